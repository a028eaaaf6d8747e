#pragma once

#include "lexalign/embedding_space.hpp"
#include "lexalign/lexicon.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace lexalign {

enum class MapKind { unconstrained, orthogonal };

std::string to_string(MapKind kind);
MapKind map_kind_from_string(const std::string& s);

// Alignment matrix for the row convention x -> x W. The matrix is kept in
// double; embedding storage stays float.
struct LinearMap {
    Eigen::MatrixXd matrix;
    MapKind kind = MapKind::unconstrained;
    std::string provenance;  // method name + hyperparameter fingerprint

    Eigen::Index d_src() const { return matrix.rows(); }
    Eigen::Index d_tgt() const { return matrix.cols(); }
};

// Paired training rows, one per usable dictionary pair.
struct TrainMatrices {
    Eigen::MatrixXd X;  // n x d_src
    Eigen::MatrixXd Y;  // n x d_tgt
    std::size_t n = 0;
};

// Requires both spaces normalized. Pairs with either side out of vocabulary
// are dropped and counted.
TrainMatrices build_train_matrices(const BilingualLexicon& train, const EmbeddingSpace& src,
                                   const EmbeddingSpace& tgt, std::size_t* dropped_pairs = nullptr);

// Subtracts the column mean from X and Y. Off by default everywhere; exposed
// because centering is a known variant of these solvers.
void mean_center(TrainMatrices& tm);

// ||X W - Y||_F
double residual_fro(const TrainMatrices& tm, const LinearMap& map);

// ||W^T W - I||_F
double orthogonality_defect(const LinearMap& map);

// argmin_W ||X W - Y||_F^2 via SVD pseudoinverse; minimum-norm solution on
// rank-deficient input (with a warning to stderr, as for n < d_src).
LinearMap fit_least_squares(const TrainMatrices& tm);

// W = U V^T from the SVD of X^T Y. Optimal orthogonal map; requires
// d_src == d_tgt.
LinearMap fit_procrustes(const TrainMatrices& tm);

struct RcslsConfig {
    int k_neighbors = 10;
    int epochs = 10;
    double step = 1.0;
    std::size_t neighbor_pool = 20000;  // vocabulary prefix for neighborhood terms
    bool orthogonal_project = false;
};

struct RcslsResult {
    LinearMap map;
    // epoch_losses[0] is the loss at the initial map; one entry is appended
    // after every epoch. Step halving on rejected epochs makes the sequence
    // non-increasing.
    std::vector<double> epoch_losses;
    double final_step = 0.0;
    int rejected_epochs = 0;
};

// Observer invoked once at initialization (epoch 0) and after every epoch
// with the current map and its loss; tests use it to cross-check the
// reported losses independently.
using RcslsObserver = std::function<void(int epoch, const Eigen::MatrixXd& W, double loss)>;

// Full-batch gradient descent on the relaxed CSLS loss
//   L(W) = (1/n) sum_i [ -2 cos(W x_i, y_i)
//                        + (1/k) sum_{t in N_T(W x_i)} cos(W x_i, t)
//                        + (1/k) sum_{s in N_S(y_i)}   cos(W s, y_i) ]
// with k-NN neighborhoods over the leading neighbor_pool rows of the full
// target (N_T) and mapped full source (N_S) vocabularies, recomputed every
// epoch. An epoch that fails to decrease L is rejected and the step halved.
RcslsResult fit_rcsls(const TrainMatrices& tm, const EmbeddingSpace& src_full,
                      const EmbeddingSpace& tgt_full, const RcslsConfig& cfg,
                      const LinearMap& init, const RcslsObserver& observer = {});

// Loss evaluation alone (neighborhoods recomputed for the given W).
double rcsls_loss(const TrainMatrices& tm, const EmbeddingSpace& src_full,
                  const EmbeddingSpace& tgt_full, const RcslsConfig& cfg,
                  const Eigen::MatrixXd& W);

// Rows right-multiplied by W; renormalize is on by default because retrieval
// works in cosine space.
EmbeddingSpace apply_map(const LinearMap& map, const EmbeddingSpace& space,
                         bool renormalize = true);

// JSON map file: {"d_src", "d_tgt", "kind", "method", "matrix"}; matrix is a
// row-major array of arrays and round-trips exactly.
void save_map(const LinearMap& map, const std::filesystem::path& path);
LinearMap load_map(const std::filesystem::path& path);

}  // namespace lexalign
