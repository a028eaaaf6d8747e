#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lexalign {

// Row-major so a row is a contiguous vector; float storage keeps a
// 200k x 300 vocabulary around 240 MB. All dot products and norms are
// accumulated in double.
using MatrixF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// One language's vocabulary plus its n x d vector matrix. Immutable after
// construction; safe to share across threads.
class EmbeddingSpace {
  public:
    EmbeddingSpace(std::string language, std::vector<std::string> words, MatrixF matrix,
                   bool normalized);

    const std::string& language() const { return language_; }
    const std::vector<std::string>& words() const { return words_; }
    const MatrixF& matrix() const { return matrix_; }
    bool normalized() const { return normalized_; }

    std::size_t size() const { return words_.size(); }
    std::size_t dim() const { return static_cast<std::size_t>(matrix_.cols()); }

    std::optional<std::size_t> lookup(std::string_view token) const;
    bool contains(std::string_view token) const { return lookup(token).has_value(); }

    // New space with rows/words selected in the given order. Indices must be
    // valid and pairwise distinct; the normalized flag carries over.
    EmbeddingSpace subset(std::span<const std::size_t> keep) const;

  private:
    std::string language_;
    std::vector<std::string> words_;
    MatrixF matrix_;
    bool normalized_ = false;
    std::unordered_map<std::string, std::size_t> index_;
};

struct LoadStats {
    std::size_t duplicates_skipped = 0;
    std::size_t malformed_skipped = 0;
};

struct LoadOptions {
    std::optional<std::size_t> max_vocab;  // keep at most this many rows (file order)
    bool nfc = false;                      // NFC-normalize tokens while reading
    std::string language = "und";
};

// Text vector format: header "<count> <dim>", then "<token> <f1> ... <fdim>"
// per line. Duplicate tokens keep the first occurrence; lines that do not
// parse (multi-word tokens, non-numeric or non-finite fields) are skipped and
// counted. A line whose fields all parse as floats but disagree with the
// header dimension is an error.
EmbeddingSpace load_text_embeddings(const std::filesystem::path& path,
                                    const LoadOptions& options = {},
                                    LoadStats* stats = nullptr);

// Unit-L2 rows. Rejects zero rows by token name. Idempotent to ~1e-7.
EmbeddingSpace normalize(const EmbeddingSpace& space);

// Inverse of load_text_embeddings up to float round-off; floats are written
// with 9 significant digits so a re-parse is exact.
void save_text_embeddings(const EmbeddingSpace& space, const std::filesystem::path& path);

}  // namespace lexalign
