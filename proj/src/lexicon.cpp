#include "lexalign/lexicon.hpp"

#include "lexalign/utf8.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace lexalign {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream ss(line);
    std::string f;
    while (ss >> f) fields.push_back(f);
    return fields;
}

}  // namespace

BilingualLexicon load_dictionary(const std::filesystem::path& path,
                                 const DictionaryOptions& options,
                                 std::size_t* duplicates_dropped) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dictionary file: " + path.string());

    BilingualLexicon lex;
    lex.direction = options.direction;
    std::unordered_set<std::string> seen;
    std::size_t duplicates = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto fields = split_ws(line);
        if (fields.empty()) continue;
        if (fields.size() != 2)
            throw std::runtime_error("dictionary line " + std::to_string(line_no) + " has " +
                                     std::to_string(fields.size()) + " fields, expected 2: " +
                                     path.string());
        std::string src = options.nfc ? utf8::nfc(fields[0]) : std::move(fields[0]);
        std::string tgt = options.nfc ? utf8::nfc(fields[1]) : std::move(fields[1]);
        std::string key = src + '\t' + tgt;
        if (!seen.insert(std::move(key)).second) {
            ++duplicates;
            continue;
        }
        lex.pairs.emplace_back(std::move(src), std::move(tgt));
    }
    if (duplicates_dropped) *duplicates_dropped = duplicates;
    return lex;
}

GroupedLexicon group_by_source(const BilingualLexicon& lex) {
    GroupedLexicon grouped;
    std::unordered_map<std::string, std::size_t> pos;
    pos.reserve(lex.pairs.size());
    for (const auto& [src, tgt] : lex.pairs) {
        auto [it, inserted] = pos.emplace(src, grouped.entries.size());
        if (inserted) grouped.entries.push_back({src, {}});
        grouped.entries[it->second].golds.push_back(tgt);
    }
    return grouped;
}

ReconcileResult reconcile(const GroupedLexicon& lex, const EmbeddingSpace& src_space) {
    ReconcileResult out;
    for (const auto& entry : lex.entries) {
        if (src_space.contains(entry.source))
            out.usable.entries.push_back(entry);
        else
            ++out.dropped_sources;
    }
    if (out.usable.entries.empty())
        throw std::runtime_error("no lexicon source word is present in the source vocabulary");
    return out;
}

}  // namespace lexalign
