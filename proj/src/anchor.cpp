#include "meraclust/anchor.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "meraclust/linalg.hpp"
#include "meraclust/spectral.hpp"

namespace meraclust::anchor {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

using clock_type = std::chrono::steady_clock;

double seconds_between(clock_type::time_point a, clock_type::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

MatrixXd orthonormalize(const MatrixXd& m) {
    Eigen::HouseholderQR<MatrixXd> qr(m);
    MatrixXd q = qr.householderQ() * MatrixXd::Identity(m.rows(), m.cols());
    const VectorXd diag = qr.matrixQR().diagonal();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        if (diag(j) < 0.0) q.col(j) = -q.col(j);
    return q;
}

MatrixXd gaussian(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    MatrixXd m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
    return m;
}

Eigen::MatrixXd anchor_slice(const DenseTensor& t, Index m, Index n, Index v) {
    return Eigen::Map<const MatrixXd>(t.data() + v * m * n, m, n);
}

}  // namespace

std::vector<MatrixXd> init_anchors(const MultiViewDataset& data, const AnchorConfig& cfg) {
    data.validate();
    const Index m = cfg.num_anchors;
    for (Index v = 0; v < data.num_views(); ++v) {
        const Index dv = data.views[static_cast<std::size_t>(v)].rows();
        if (m < 1 || m > dv)
            throw std::invalid_argument("init_anchors: M = " + std::to_string(m) +
                                        " must lie in [1, D_v], view " + std::to_string(v) +
                                        " has D_v = " + std::to_string(dv));
    }
    std::mt19937_64 rng(cfg.seed);
    std::vector<MatrixXd> anchors;
    anchors.reserve(static_cast<std::size_t>(data.num_views()));
    for (Index v = 0; v < data.num_views(); ++v) {
        const MatrixXd& x = data.views[static_cast<std::size_t>(v)];
        if (cfg.anchor_init == AnchorInit::Sampled) {
            std::vector<Index> idx(static_cast<std::size_t>(x.cols()));
            std::iota(idx.begin(), idx.end(), Index{0});
            std::shuffle(idx.begin(), idx.end(), rng);
            MatrixXd cols(x.rows(), m);
            for (Index j = 0; j < m; ++j) cols.col(j) = x.col(idx[static_cast<std::size_t>(j)]);
            anchors.push_back(orthonormalize(cols));
        } else {
            anchors.push_back(orthonormalize(gaussian(x.rows(), m, rng)));
        }
    }
    return anchors;
}

MatrixXd update_c(Index v, const AnchorState& state, const MultiViewDataset& data) {
    const MatrixXd& x = data.views[static_cast<std::size_t>(v)];
    const MatrixXd& a = state.A[static_cast<std::size_t>(v)];
    const Index m = a.cols();
    const Index n = x.cols();
    MatrixXd out = a.transpose() * (state.Lambda[static_cast<std::size_t>(v)] +
                                    state.mu2 * (x - state.E[static_cast<std::size_t>(v)]));
    out.noalias() += state.mu1 * anchor_slice(state.Y, m, n, v);
    out.noalias() -= anchor_slice(state.Gamma, m, n, v);
    return out / (state.mu1 + state.mu2);
}

MatrixXd update_a(Index v, const AnchorState& state, const MultiViewDataset& data) {
    const MatrixXd& x = data.views[static_cast<std::size_t>(v)];
    const MatrixXd g = (x - state.E[static_cast<std::size_t>(v)] +
                        state.Lambda[static_cast<std::size_t>(v)] / state.mu2) *
                       state.C[static_cast<std::size_t>(v)].transpose();
    return linalg::procrustes_max(g);
}

DenseTensor anchor_reshape(std::span<const MatrixXd> c, Index a, Index q, Index m1, Index m2) {
    if (c.empty()) throw std::invalid_argument("anchor_reshape: no views");
    const Index m = c.front().rows();
    const Index n = c.front().cols();
    if (m1 * m2 != m)
        throw std::invalid_argument("anchor_reshape: m1*m2 = " + std::to_string(m1 * m2) +
                                    " does not equal M = " + std::to_string(m));
    if (a * q != n)
        throw std::invalid_argument("anchor_reshape: A*Q = " + std::to_string(a * q) +
                                    " does not equal N = " + std::to_string(n));
    const Index v_count = static_cast<Index>(c.size());
    VectorXd data(m * n * v_count);
    for (Index v = 0; v < v_count; ++v) {
        const MatrixXd& mat = c[static_cast<std::size_t>(v)];
        if (mat.rows() != m || mat.cols() != n)
            throw std::invalid_argument("anchor_reshape: view " + std::to_string(v) +
                                        " shape differs");
        data.segment(v * m * n, m * n) = VectorXd::Map(mat.data(), m * n);
    }
    return DenseTensor({m1, m2, a, q, v_count}, std::move(data));
}

std::vector<int> labels_from_anchor_graphs(std::span<const MatrixXd> c, int k, std::uint64_t seed,
                                           int kmeans_restarts) {
    if (c.empty()) throw std::invalid_argument("labels_from_anchor_graphs: no views");
    if (k < 2) throw std::invalid_argument("labels_from_anchor_graphs: k must be >= 2");
    const Index m = c.front().rows();
    const Index n = c.front().cols();
    if (k > n) throw std::invalid_argument("labels_from_anchor_graphs: k exceeds sample count");
    MatrixXd mean = MatrixXd::Zero(m, n);
    for (const MatrixXd& mat : c) mean += mat;
    mean /= static_cast<double>(c.size());

    // Thin SVD of the M x N consensus graph costs O(N M^2).
    const linalg::SvdFactors f = linalg::svd(mean);
    MatrixXd embedding = MatrixXd::Zero(n, k);
    const Index take = std::min<Index>(k, f.right.cols());
    embedding.leftCols(take) = f.right.leftCols(take);
    for (Index i = 0; i < n; ++i) {
        const double norm = embedding.row(i).norm();
        if (norm > 0.0) embedding.row(i) /= norm;
    }
    spectral::SpectralConfig scfg;
    scfg.k = k;
    scfg.kmeans_restarts = kmeans_restarts;
    scfg.seed = seed;
    return spectral::kmeans(embedding, k, scfg);
}

AnchorOutput solve_anchor(const MultiViewDataset& data, const AnchorConfig& cfg) {
    data.validate();
    if (cfg.max_iters < 1) throw std::invalid_argument("solve_anchor: max_iters must be >= 1");
    if (cfg.eta <= 1.0) throw std::invalid_argument("solve_anchor: eta must exceed 1");
    if (cfg.epsilon <= 0.0) throw std::invalid_argument("solve_anchor: epsilon must be positive");
    if (cfg.lambda < 0.0) throw std::invalid_argument("solve_anchor: lambda must be >= 0");

    const Index n = data.num_samples();
    const Index m = cfg.num_anchors;
    const Index v_count = data.num_views();
    const msc::Split sn = msc::balanced_split(n);
    const msc::Split sm = msc::balanced_split(m);
    const Index a = sn.a, q = sn.q, m1 = sm.a, m2 = sm.q;
    if (cfg.rank < 1 || cfg.rank > m1 * m2 || cfg.rank > a * q * v_count)
        throw std::invalid_argument("solve_anchor: MERA rank " + std::to_string(cfg.rank) +
                                    " infeasible for reshape (" + std::to_string(m1) + "," +
                                    std::to_string(m2) + "," + std::to_string(a) + "," +
                                    std::to_string(q) + "," + std::to_string(v_count) +
                                    "); rank must be <= M");

    int k = data.num_clusters;
    if (k < 2) throw std::invalid_argument("solve_anchor: need num_clusters >= 2");

    AnchorState state;
    state.mu1 = cfg.mu1_init;
    state.mu2 = cfg.mu2_init;
    state.A = init_anchors(data, cfg);
    const tensor::Shape tshape{m1, m2, a, q, v_count};
    state.Y = DenseTensor(tshape);
    state.Gamma = DenseTensor(tshape);
    for (Index v = 0; v < v_count; ++v) {
        const auto& x = data.views[static_cast<std::size_t>(v)];
        state.C.emplace_back(MatrixXd::Zero(m, n));
        state.E.emplace_back(MatrixXd::Zero(x.rows(), n));
        state.Lambda.emplace_back(MatrixXd::Zero(x.rows(), n));
    }

    AnchorOutput out;
    for (int t = 0; t < cfg.max_iters; ++t) {
        const auto tic = clock_type::now();
        for (Index v = 0; v < v_count; ++v) {
            const auto vi = static_cast<std::size_t>(v);
            state.C[vi] = update_c(v, state, data);
            state.A[vi] = update_a(v, state, data);
            const MatrixXd d = data.views[vi] - state.A[vi] * state.C[vi] +
                               state.Lambda[vi] / state.mu2;
            state.E[vi] = msc::l21_shrink(d, cfg.lambda / state.mu2);
        }

        const DenseTensor chat = anchor_reshape(state.C, a, q, m1, m2);
        DenseTensor input(chat.shape(), chat.values() + state.Gamma.values() / state.mu1);
        mera::MeraConfig mcfg;
        mcfg.rank = cfg.rank;
        mcfg.sweeps = cfg.mera_sweeps;
        mcfg.seed = cfg.seed;
        if (state.mera_net && !cfg.mera_cold_start) mcfg.warm_start = state.mera_net;
        mera::MeraResult result = mera::approximate(input, mcfg);
        state.mera_net = std::move(result.network);
        state.Y = std::move(result.reconstruction);

        state.Gamma = DenseTensor(state.Gamma.shape(),
                                  state.Gamma.values() +
                                      state.mu1 * (chat.values() - state.Y.values()));
        double re = 0.0, me = 0.0;
        for (Index v = 0; v < v_count; ++v) {
            const auto vi = static_cast<std::size_t>(v);
            const MatrixXd resid =
                data.views[vi] - state.A[vi] * state.C[vi] - state.E[vi];
            state.Lambda[vi] += state.mu2 * resid;
            re = std::max(re, resid.size() ? resid.cwiseAbs().maxCoeff() : 0.0);
            me = std::max(me, (state.C[vi] - anchor_slice(state.Y, m, n, v))
                                  .cwiseAbs()
                                  .maxCoeff());
        }
        state.mu1 = std::min(cfg.eta * state.mu1, cfg.mu_max);
        state.mu2 = std::min(cfg.eta * state.mu2, cfg.mu_max);
        state.iter = t + 1;
        out.residual_trace.push_back({re, me, seconds_between(tic, clock_type::now())});
        if (re <= cfg.epsilon && me <= cfg.epsilon) {
            out.converged = true;
            break;
        }
    }
    out.iterations = state.iter;
    out.C = state.C;
    out.A = state.A;
    out.labels = labels_from_anchor_graphs(out.C, k, cfg.seed, cfg.kmeans_restarts);
    return out;
}

}  // namespace meraclust::anchor
