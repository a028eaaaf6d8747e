#pragma once

#include "lexalign/embedding_space.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace lexalign {

enum class Criterion { nn, csls };

std::string to_string(Criterion c);
Criterion criterion_from_string(const std::string& s);

struct CslsParams {
    int k = 10;  // neighborhood size for the density penalties
    // Mapped-source prefix used for r_S; defaults to 50000 rows, clamped to
    // what is available.
    std::optional<std::size_t> rs_pool;
};

struct ScoredIndex {
    std::size_t index;
    double score;
};

// Ranked candidates per query. Scores are non-increasing and ties are broken
// by ascending target index, so results form a strict total order.
struct RetrievalResult {
    Criterion criterion = Criterion::nn;
    int depth = 0;  // requested N; lists hold min(N, |target vocab|) entries
    std::vector<std::vector<ScoredIndex>> ranking;
};

// Exact brute-force cosine retrieval (queries and targets must be unit
// rows; the score is then the plain dot product). Accumulation is in double
// with a fixed per-pair reduction order, so results do not depend on query
// batching or on the thread count.
RetrievalResult nn_topk(const MatrixF& queries, const EmbeddingSpace& tgt, int n, int threads = 1);

struct CslsPenalties {
    std::vector<double> r_t;  // per query: mean cosine to its k nearest targets
    std::vector<double> r_s;  // per target: mean cosine to its k nearest pool rows
};

// r_S pools from the leading rs_pool rows of `queries` itself; csls_topk
// passes the full mapped source vocabulary instead.
CslsPenalties csls_penalties(const MatrixF& queries, const EmbeddingSpace& tgt,
                             const CslsParams& params, int threads = 1);

// score(q, t) = 2 cos(q, t) - r_T(q) - r_S(t)
RetrievalResult csls_topk(const MatrixF& queries, const MatrixF& src_full,
                          const EmbeddingSpace& tgt, int n, const CslsParams& params,
                          int threads = 1);

}  // namespace lexalign
