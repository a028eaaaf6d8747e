#include "lexalign/alignment.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace lexalign {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd rows_as_double(const EmbeddingSpace& space, Index limit) {
    const Index n = std::min<Index>(limit, static_cast<Index>(space.size()));
    return space.matrix().topRows(n).cast<double>();
}

VectorXd row_norms(const MatrixXd& m) {
    VectorXd norms(m.rows());
    for (Index i = 0; i < m.rows(); ++i) norms(i) = m.row(i).norm();
    return norms;
}

// Indices of the k largest values in a row, ties broken by ascending index.
void topk_row(const Eigen::RowVectorXd& row, int k, std::vector<Index>& out) {
    const Index p = row.size();
    out.resize(static_cast<std::size_t>(p));
    for (Index t = 0; t < p; ++t) out[static_cast<std::size_t>(t)] = t;
    auto better = [&](Index a, Index b) {
        if (row(a) != row(b)) return row(a) > row(b);
        return a < b;
    };
    std::partial_sort(out.begin(), out.begin() + k, out.end(), better);
    out.resize(static_cast<std::size_t>(k));
}

// One loss evaluation: neighborhoods are a function of W, so they are
// recomputed here and cached for the gradient at the same W.
struct RcslsEval {
    double loss = 0.0;
    MatrixXd U;        // X W, n x d_tgt
    VectorXd u_norm;   // row norms of U
    MatrixXd V;        // S_pool W
    VectorXd v_norm;
    MatrixXd cos_ut;   // cos(u_i, t_p), n x pool
    MatrixXd cos_vy;   // cos(v_p, y_i), n x pool
    std::vector<std::vector<Index>> nt;  // per pair: k nearest target rows
    std::vector<std::vector<Index>> ns;  // per pair: k nearest mapped-source rows
};

struct RcslsWorkspace {
    MatrixXd Tp;       // leading pool rows of the target vocabulary
    VectorXd t_norm;
    MatrixXd Sp;       // leading pool rows of the source vocabulary
    VectorXd y_norm;   // norms of training target rows
    int k = 0;
    Index pool = 0;
};

RcslsEval evaluate_rcsls(const TrainMatrices& tm, const RcslsWorkspace& ws, const MatrixXd& W) {
    const Index n = static_cast<Index>(tm.n);
    const double inv_k = 1.0 / ws.k;
    RcslsEval ev;
    ev.U = tm.X * W;
    ev.u_norm = row_norms(ev.U);
    ev.V = ws.Sp * W;
    ev.v_norm = row_norms(ev.V);

    ev.cos_ut = ev.U * ws.Tp.transpose();
    ev.cos_vy = tm.Y * ev.V.transpose();
    for (Index i = 0; i < n; ++i) {
        ev.cos_ut.row(i) /= ev.u_norm(i);
        ev.cos_vy.row(i) /= ws.y_norm(i);
    }
    for (Index p = 0; p < ws.pool; ++p) {
        ev.cos_ut.col(p) /= ws.t_norm(p);
        ev.cos_vy.col(p) /= ev.v_norm(p);
    }

    ev.nt.resize(static_cast<std::size_t>(n));
    ev.ns.resize(static_cast<std::size_t>(n));
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
        const double cos_gold =
            ev.U.row(i).dot(tm.Y.row(i)) / (ev.u_norm(i) * ws.y_norm(i));
        double term = -2.0 * cos_gold;
        topk_row(ev.cos_ut.row(i), ws.k, ev.nt[static_cast<std::size_t>(i)]);
        for (Index t : ev.nt[static_cast<std::size_t>(i)]) term += inv_k * ev.cos_ut(i, t);
        topk_row(ev.cos_vy.row(i), ws.k, ev.ns[static_cast<std::size_t>(i)]);
        for (Index s : ev.ns[static_cast<std::size_t>(i)]) term += inv_k * ev.cos_vy(i, s);
        total += term;
    }
    ev.loss = total / static_cast<double>(n);
    if (!std::isfinite(ev.loss)) throw std::runtime_error("rcsls: loss is not finite");
    return ev;
}

// d cos(u, y)/du = (y/||y|| - cos * u/||u||) / ||u||, accumulated per row and
// pulled back through U = X W (and V = Sp W for the source-side term).
MatrixXd rcsls_gradient(const TrainMatrices& tm, const RcslsWorkspace& ws, const RcslsEval& ev) {
    const Index n = static_cast<Index>(tm.n);
    const Index dt = tm.Y.cols();
    const double inv_k = 1.0 / ws.k;

    MatrixXd g_rows = MatrixXd::Zero(n, dt);
    for (Index i = 0; i < n; ++i) {
        const Eigen::RowVectorXd u_hat = ev.U.row(i) / ev.u_norm(i);
        const Eigen::RowVectorXd y_hat = tm.Y.row(i) / ws.y_norm(i);
        const double cos_gold = ev.U.row(i).dot(tm.Y.row(i)) / (ev.u_norm(i) * ws.y_norm(i));
        Eigen::RowVectorXd g = -2.0 * (y_hat - cos_gold * u_hat);
        for (Index t : ev.nt[static_cast<std::size_t>(i)]) {
            const Eigen::RowVectorXd t_hat = ws.Tp.row(t) / ws.t_norm(t);
            g += inv_k * (t_hat - ev.cos_ut(i, t) * u_hat);
        }
        g_rows.row(i) = g / ev.u_norm(i);
    }
    MatrixXd grad = tm.X.transpose() * g_rows;

    MatrixXd g_pool = MatrixXd::Zero(ws.pool, dt);
    for (Index i = 0; i < n; ++i) {
        const Eigen::RowVectorXd y_hat = tm.Y.row(i) / ws.y_norm(i);
        for (Index s : ev.ns[static_cast<std::size_t>(i)]) {
            const Eigen::RowVectorXd v_hat = ev.V.row(s) / ev.v_norm(s);
            g_pool.row(s) += inv_k / ev.v_norm(s) * (y_hat - ev.cos_vy(i, s) * v_hat);
        }
    }
    grad += ws.Sp.transpose() * g_pool;
    return grad / static_cast<double>(tm.n);
}

MatrixXd nearest_orthogonal(const MatrixXd& W) {
    Eigen::JacobiSVD<MatrixXd> svd(W, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixU() * svd.matrixV().transpose();
}

RcslsWorkspace make_rcsls_workspace(const TrainMatrices& tm, const EmbeddingSpace& src_full,
                                    const EmbeddingSpace& tgt_full, const RcslsConfig& cfg) {
    if (cfg.k_neighbors < 1) throw std::invalid_argument("rcsls: k_neighbors must be >= 1");
    if (cfg.epochs < 0) throw std::invalid_argument("rcsls: epochs must be >= 0");
    RcslsWorkspace ws;
    const Index pool = static_cast<Index>(
        std::min<std::size_t>(cfg.neighbor_pool, std::min(src_full.size(), tgt_full.size())));
    if (static_cast<Index>(cfg.k_neighbors) > pool)
        throw std::invalid_argument("rcsls: k_neighbors " + std::to_string(cfg.k_neighbors) +
                                    " exceeds neighbor pool " + std::to_string(pool));
    ws.pool = pool;
    ws.k = cfg.k_neighbors;
    ws.Tp = rows_as_double(tgt_full, pool);
    ws.t_norm = row_norms(ws.Tp);
    ws.Sp = rows_as_double(src_full, pool);
    ws.y_norm = row_norms(tm.Y);
    return ws;
}

std::string rcsls_provenance(const RcslsConfig& cfg) {
    std::ostringstream os;
    os << "rcsls(k=" << cfg.k_neighbors << ",epochs=" << cfg.epochs << ",step=" << cfg.step
       << ",pool=" << cfg.neighbor_pool << ",proj=" << (cfg.orthogonal_project ? 1 : 0) << ")";
    return os.str();
}

}  // namespace

std::string to_string(MapKind kind) {
    return kind == MapKind::orthogonal ? "orthogonal" : "unconstrained";
}

MapKind map_kind_from_string(const std::string& s) {
    if (s == "orthogonal") return MapKind::orthogonal;
    if (s == "unconstrained") return MapKind::unconstrained;
    throw std::invalid_argument("unknown map kind: " + s);
}

TrainMatrices build_train_matrices(const BilingualLexicon& train, const EmbeddingSpace& src,
                                   const EmbeddingSpace& tgt, std::size_t* dropped_pairs) {
    if (!src.normalized() || !tgt.normalized())
        throw std::invalid_argument("build_train_matrices: spaces must be normalized first");
    std::vector<std::pair<std::size_t, std::size_t>> rows;
    rows.reserve(train.pairs.size());
    std::size_t dropped = 0;
    for (const auto& [s, t] : train.pairs) {
        const auto si = src.lookup(s);
        const auto ti = tgt.lookup(t);
        if (si && ti)
            rows.emplace_back(*si, *ti);
        else
            ++dropped;
    }
    if (dropped_pairs) *dropped_pairs = dropped;
    if (rows.empty())
        throw std::runtime_error("no training pair has both sides in vocabulary");

    TrainMatrices tm;
    tm.n = rows.size();
    tm.X.resize(static_cast<Index>(rows.size()), static_cast<Index>(src.dim()));
    tm.Y.resize(static_cast<Index>(rows.size()), static_cast<Index>(tgt.dim()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        tm.X.row(static_cast<Index>(r)) =
            src.matrix().row(static_cast<Index>(rows[r].first)).cast<double>();
        tm.Y.row(static_cast<Index>(r)) =
            tgt.matrix().row(static_cast<Index>(rows[r].second)).cast<double>();
    }
    return tm;
}

void mean_center(TrainMatrices& tm) {
    tm.X.rowwise() -= tm.X.colwise().mean();
    tm.Y.rowwise() -= tm.Y.colwise().mean();
}

double residual_fro(const TrainMatrices& tm, const LinearMap& map) {
    return (tm.X * map.matrix - tm.Y).norm();
}

double orthogonality_defect(const LinearMap& map) {
    const MatrixXd wtw = map.matrix.transpose() * map.matrix;
    return (wtw - MatrixXd::Identity(wtw.rows(), wtw.cols())).norm();
}

LinearMap fit_least_squares(const TrainMatrices& tm) {
    if (tm.X.rows() < tm.X.cols())
        std::cerr << "warning: least squares with n=" << tm.X.rows() << " < d_src=" << tm.X.cols()
                  << "; solution is underdetermined\n";
    Eigen::BDCSVD<MatrixXd> svd(tm.X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.rank() < tm.X.cols())
        std::cerr << "warning: rank-deficient training matrix (rank " << svd.rank() << " of "
                  << tm.X.cols() << "); returning the minimum-norm solution\n";
    LinearMap map;
    map.matrix = svd.solve(tm.Y);
    map.kind = MapKind::unconstrained;
    map.provenance = "lstsq";
    return map;
}

LinearMap fit_procrustes(const TrainMatrices& tm) {
    if (tm.X.cols() != tm.Y.cols())
        throw std::invalid_argument("procrustes requires d_src == d_tgt, got " +
                                    std::to_string(tm.X.cols()) + " and " +
                                    std::to_string(tm.Y.cols()));
    const MatrixXd m = tm.X.transpose() * tm.Y;
    Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.info() != Eigen::Success) throw std::runtime_error("procrustes: SVD did not converge");
    LinearMap map;
    map.matrix = svd.matrixU() * svd.matrixV().transpose();
    map.kind = MapKind::orthogonal;
    map.provenance = "procrustes";
    return map;
}

double rcsls_loss(const TrainMatrices& tm, const EmbeddingSpace& src_full,
                  const EmbeddingSpace& tgt_full, const RcslsConfig& cfg,
                  const Eigen::MatrixXd& W) {
    const RcslsWorkspace ws = make_rcsls_workspace(tm, src_full, tgt_full, cfg);
    return evaluate_rcsls(tm, ws, W).loss;
}

RcslsResult fit_rcsls(const TrainMatrices& tm, const EmbeddingSpace& src_full,
                      const EmbeddingSpace& tgt_full, const RcslsConfig& cfg,
                      const LinearMap& init, const RcslsObserver& observer) {
    if (init.d_src() != tm.X.cols() || init.d_tgt() != tm.Y.cols())
        throw std::invalid_argument("rcsls: init map dimensions do not match training matrices");
    const RcslsWorkspace ws = make_rcsls_workspace(tm, src_full, tgt_full, cfg);

    MatrixXd W = init.matrix;
    RcslsEval eval = evaluate_rcsls(tm, ws, W);
    RcslsResult out;
    out.epoch_losses.push_back(eval.loss);
    if (observer) observer(0, W, eval.loss);

    double step = cfg.step;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const MatrixXd grad = rcsls_gradient(tm, ws, eval);
        MatrixXd cand = W - step * grad;
        if (cfg.orthogonal_project) cand = nearest_orthogonal(cand);
        RcslsEval cand_eval = evaluate_rcsls(tm, ws, cand);
        if (cand_eval.loss <= eval.loss) {
            W = std::move(cand);
            eval = std::move(cand_eval);
        } else {
            step *= 0.5;
            ++out.rejected_epochs;
        }
        out.epoch_losses.push_back(eval.loss);
        if (observer) observer(epoch, W, eval.loss);
    }

    out.final_step = step;
    out.map.matrix = std::move(W);
    out.map.kind = cfg.orthogonal_project ? MapKind::orthogonal : MapKind::unconstrained;
    out.map.provenance = rcsls_provenance(cfg);
    return out;
}

EmbeddingSpace apply_map(const LinearMap& map, const EmbeddingSpace& space, bool renormalize) {
    if (static_cast<Index>(space.dim()) != map.d_src())
        throw std::invalid_argument("apply_map: space dimension " + std::to_string(space.dim()) +
                                    " != map d_src " + std::to_string(map.d_src()));
    const Index n = static_cast<Index>(space.size());
    MatrixF out(n, map.d_tgt());
    constexpr Index kBlock = 4096;
    for (Index r0 = 0; r0 < n; r0 += kBlock) {
        const Index rows = std::min(kBlock, n - r0);
        MatrixXd mapped = space.matrix().middleRows(r0, rows).cast<double>() * map.matrix;
        if (renormalize) {
            for (Index i = 0; i < rows; ++i) {
                const double norm = mapped.row(i).norm();
                if (norm == 0.0)
                    throw std::domain_error(
                        "apply_map: mapped vector is zero for token '" +
                        space.words()[static_cast<std::size_t>(r0 + i)] + "'");
                mapped.row(i) /= norm;
            }
        }
        out.middleRows(r0, rows) = mapped.cast<float>();
    }
    return EmbeddingSpace(space.language(), space.words(), std::move(out), renormalize);
}

void save_map(const LinearMap& map, const std::filesystem::path& path) {
    nlohmann::json j;
    j["d_src"] = map.d_src();
    j["d_tgt"] = map.d_tgt();
    j["kind"] = to_string(map.kind);
    j["method"] = map.provenance;
    nlohmann::json rows = nlohmann::json::array();
    for (Index i = 0; i < map.matrix.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Index jx = 0; jx < map.matrix.cols(); ++jx) row.push_back(map.matrix(i, jx));
        rows.push_back(std::move(row));
    }
    j["matrix"] = std::move(rows);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write map file: " + path.string());
    out << j.dump() << '\n';
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

LinearMap load_map(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open map file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("map file is not valid JSON: " + path.string() + ": " + e.what());
    }
    for (const char* key : {"d_src", "d_tgt", "kind", "method", "matrix"})
        if (!j.contains(key))
            throw std::runtime_error("map file missing field '" + std::string(key) + "'");

    LinearMap map;
    const auto d_src = j["d_src"].get<Index>();
    const auto d_tgt = j["d_tgt"].get<Index>();
    map.kind = map_kind_from_string(j["kind"].get<std::string>());
    map.provenance = j["method"].get<std::string>();
    const auto& rows = j["matrix"];
    if (!rows.is_array() || static_cast<Index>(rows.size()) != d_src)
        throw std::runtime_error("map matrix row count does not match d_src");
    map.matrix.resize(d_src, d_tgt);
    for (Index i = 0; i < d_src; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Index>(row.size()) != d_tgt)
            throw std::runtime_error("map matrix row " + std::to_string(i) +
                                     " does not match d_tgt");
        for (Index jx = 0; jx < d_tgt; ++jx)
            map.matrix(i, jx) = row[static_cast<std::size_t>(jx)].get<double>();
    }
    if (!map.matrix.allFinite()) throw std::runtime_error("map matrix contains NaN/Inf");
    if (map.kind == MapKind::orthogonal) {
        if (d_src != d_tgt) throw std::runtime_error("orthogonal map must be square");
        if (orthogonality_defect(map) > 1e-5)
            throw std::runtime_error("orthogonal map fails the orthogonality check");
    }
    return map;
}

}  // namespace lexalign
