#pragma once

#include "lexalign/embedding_space.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace lexalign {

// Ordered (source, target) pairs. A source may repeat with different targets;
// exact duplicate pairs are dropped at load time.
struct BilingualLexicon {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string direction;  // informational, e.g. "en->si"
};

// Per-unique-source view: gold targets in insertion order.
struct GroupedLexicon {
    struct Entry {
        std::string source;
        std::vector<std::string> golds;
    };
    std::vector<Entry> entries;
};

struct DictionaryOptions {
    bool nfc = false;
    std::string direction;
};

// One pair per non-empty line, whitespace separated. A line with any other
// field count is an error naming the line.
BilingualLexicon load_dictionary(const std::filesystem::path& path,
                                 const DictionaryOptions& options = {},
                                 std::size_t* duplicates_dropped = nullptr);

GroupedLexicon group_by_source(const BilingualLexicon& lex);

struct ReconcileResult {
    GroupedLexicon usable;
    std::size_t dropped_sources = 0;
};

// Drops entries whose source token has no vector. Gold targets are kept even
// when absent from the target vocabulary: stem matching compares strings, so
// they can still be rescued downstream.
ReconcileResult reconcile(const GroupedLexicon& lex, const EmbeddingSpace& src_space);

}  // namespace lexalign
