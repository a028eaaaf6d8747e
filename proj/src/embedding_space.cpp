#include "lexalign/embedding_space.hpp"

#include "lexalign/utf8.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <utility>

namespace lexalign {

namespace {

std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

bool is_space(char c) { return c == ' ' || c == '\t'; }

// Splits on runs of spaces/tabs. Empty fields never appear.
std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_space(line[i])) ++i;
        std::size_t j = i;
        while (j < line.size() && !is_space(line[j])) ++j;
        if (j > i) fields.push_back(line.substr(i, j - i));
        i = j;
    }
    return fields;
}

bool parse_float(std::string_view s, float& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out, std::chars_format::general);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

bool parse_size(std::string_view s, std::size_t& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

}  // namespace

EmbeddingSpace::EmbeddingSpace(std::string language, std::vector<std::string> words,
                               MatrixF matrix, bool normalized)
    : language_(std::move(language)),
      words_(std::move(words)),
      matrix_(std::move(matrix)),
      normalized_(normalized) {
    if (static_cast<Eigen::Index>(words_.size()) != matrix_.rows())
        throw std::invalid_argument("embedding space: word count " +
                                    std::to_string(words_.size()) + " != row count " +
                                    std::to_string(matrix_.rows()));
    index_.reserve(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
        if (!index_.emplace(words_[i], i).second)
            throw std::invalid_argument("embedding space: duplicate token '" + words_[i] + "'");
    }
    if (!matrix_.allFinite())
        throw std::invalid_argument("embedding space: matrix contains NaN/Inf");
}

std::optional<std::size_t> EmbeddingSpace::lookup(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

EmbeddingSpace EmbeddingSpace::subset(std::span<const std::size_t> keep) const {
    std::vector<std::uint8_t> seen(size(), 0);
    for (std::size_t idx : keep) {
        if (idx >= size())
            throw std::out_of_range("subset: index " + std::to_string(idx) + " out of range");
        if (seen[idx]) throw std::invalid_argument("subset: duplicate index " + std::to_string(idx));
        seen[idx] = 1;
    }
    std::vector<std::string> words;
    words.reserve(keep.size());
    MatrixF m(static_cast<Eigen::Index>(keep.size()), matrix_.cols());
    for (std::size_t r = 0; r < keep.size(); ++r) {
        words.push_back(words_[keep[r]]);
        m.row(static_cast<Eigen::Index>(r)) = matrix_.row(static_cast<Eigen::Index>(keep[r]));
    }
    return EmbeddingSpace(language_, std::move(words), std::move(m), normalized_);
}

EmbeddingSpace load_text_embeddings(const std::filesystem::path& path,
                                    const LoadOptions& options, LoadStats* stats) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open embedding file: " + path.string());

    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("embedding file has no header line: " + path.string());
    const auto header = split_fields(strip_cr(line));
    std::size_t count = 0, dim = 0;
    if (header.size() != 2 || !parse_size(header[0], count) || !parse_size(header[1], dim) ||
        count == 0 || dim == 0)
        throw std::runtime_error("embedding header must be '<count> <dim>': " + path.string());

    std::size_t cap = count;
    if (options.max_vocab) cap = std::min(cap, *options.max_vocab);

    LoadStats local;
    std::vector<std::string> words;
    words.reserve(cap);
    MatrixF matrix(static_cast<Eigen::Index>(cap), static_cast<Eigen::Index>(dim));
    std::unordered_map<std::string, std::size_t> seen;
    seen.reserve(cap);

    std::size_t retained = 0;
    std::size_t line_no = 1;
    std::vector<float> row(dim);
    while (retained < cap && std::getline(in, line)) {
        ++line_no;
        const auto fields = split_fields(strip_cr(line));
        if (fields.empty()) {
            ++local.malformed_skipped;
            continue;
        }
        std::string token(fields[0]);
        bool numeric_ok = true;
        for (std::size_t f = 1; f < fields.size(); ++f) {
            float v;
            if (!parse_float(fields[f], v)) {
                numeric_ok = false;
                break;
            }
            if (f - 1 < dim) row[f - 1] = v;
        }
        if (!numeric_ok || fields.size() < 2) {
            // multi-word token or garbage field
            ++local.malformed_skipped;
            continue;
        }
        if (fields.size() - 1 != dim)
            throw std::runtime_error("dimension mismatch at line " + std::to_string(line_no) +
                                     ": expected " + std::to_string(dim) + " values, got " +
                                     std::to_string(fields.size() - 1));
        if (options.nfc) token = utf8::nfc(token);
        if (!seen.emplace(token, retained).second) {
            ++local.duplicates_skipped;
            continue;
        }
        for (std::size_t j = 0; j < dim; ++j)
            matrix(static_cast<Eigen::Index>(retained), static_cast<Eigen::Index>(j)) = row[j];
        words.push_back(std::move(token));
        ++retained;
    }

    if (retained == 0) throw std::runtime_error("no usable embedding rows in " + path.string());
    matrix.conservativeResize(static_cast<Eigen::Index>(retained), Eigen::NoChange);
    if (stats) *stats = local;
    return EmbeddingSpace(options.language, std::move(words), std::move(matrix), false);
}

EmbeddingSpace normalize(const EmbeddingSpace& space) {
    MatrixF m = space.matrix();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        double ss = 0.0;
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double v = m(i, j);
            ss += v * v;
        }
        const double norm = std::sqrt(ss);
        if (norm == 0.0)
            throw std::domain_error("normalize: zero vector for token '" +
                                    space.words()[static_cast<std::size_t>(i)] + "'");
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            m(i, j) = static_cast<float>(m(i, j) / norm);
    }
    return EmbeddingSpace(space.language(), space.words(), std::move(m), true);
}

void save_text_embeddings(const EmbeddingSpace& space, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write embedding file: " + path.string());
    out << space.size() << ' ' << space.dim() << '\n';
    const MatrixF& m = space.matrix();
    char buf[48];
    std::string linebuf;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        linebuf = space.words()[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            // 9 significant digits: lossless float32 round trip
            std::snprintf(buf, sizeof buf, " %.9g", static_cast<double>(m(i, j)));
            linebuf += buf;
        }
        linebuf += '\n';
        out << linebuf;
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace lexalign
