#include "meraclust/msc.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "meraclust/spectral.hpp"

namespace meraclust::msc {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

using clock_type = std::chrono::steady_clock;

double seconds_between(clock_type::time_point a, clock_type::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

double max_abs(const MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

void MultiViewDataset::validate() const {
    if (views.empty()) throw std::invalid_argument("dataset: needs at least one view");
    const Index n = views.front().cols();
    for (std::size_t v = 0; v < views.size(); ++v) {
        if (views[v].cols() != n)
            throw std::invalid_argument("dataset: view " + std::to_string(v) +
                                        " sample count differs");
        if (views[v].size() == 0)
            throw std::invalid_argument("dataset: view " + std::to_string(v) + " is empty");
        if (!views[v].allFinite())
            throw std::invalid_argument("dataset: view " + std::to_string(v) +
                                        " has non-finite values");
    }
    if (labels && static_cast<Index>(labels->size()) != n)
        throw std::invalid_argument("dataset: label count does not match sample count");
}

Split balanced_split(Index n) {
    if (n < 1) throw std::invalid_argument("balanced_split: n must be >= 1");
    Split s;
    for (Index d = 1; d * d <= n; ++d) {
        if (n % d == 0) {
            s.a = d;
            s.q = n / d;
        }
    }
    s.degraded = (s.a == 1 && n > 1);
    return s;
}

DenseTensor stack_reshape(std::span<const MatrixXd> z, Index a, Index q) {
    if (z.empty()) throw std::invalid_argument("stack_reshape: no views");
    const Index n = z.front().rows();
    if (a * q != n)
        throw std::invalid_argument("stack_reshape: A*Q = " + std::to_string(a * q) +
                                    " does not equal N = " + std::to_string(n));
    const Index v_count = static_cast<Index>(z.size());
    VectorXd data(n * n * v_count);
    for (Index v = 0; v < v_count; ++v) {
        const MatrixXd& m = z[static_cast<std::size_t>(v)];
        if (m.rows() != n || m.cols() != n)
            throw std::invalid_argument("stack_reshape: view " + std::to_string(v) +
                                        " is not N x N");
        data.segment(v * n * n, n * n) = VectorXd::Map(m.data(), n * n);
    }
    return DenseTensor({a, q, a, q, v_count}, std::move(data));
}

std::vector<MatrixXd> unstack_reshape(const DenseTensor& t, Index n) {
    if (t.size() % (n * n) != 0)
        throw std::invalid_argument("unstack_reshape: tensor size is not a multiple of N*N");
    const Index v_count = t.size() / (n * n);
    std::vector<MatrixXd> out;
    out.reserve(static_cast<std::size_t>(v_count));
    for (Index v = 0; v < v_count; ++v)
        out.emplace_back(Eigen::Map<const MatrixXd>(t.data() + v * n * n, n, n));
    return out;
}

MatrixXd view_slice(const DenseTensor& t, Index n, Index v) {
    if ((v + 1) * n * n > t.size())
        throw std::invalid_argument("view_slice: slice out of range");
    return Eigen::Map<const MatrixXd>(t.data() + v * n * n, n, n);
}

MatrixXd l21_shrink(const MatrixXd& d, double tau) {
    MatrixXd out = MatrixXd::Zero(d.rows(), d.cols());
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
        const double norm = d.col(j).norm();
        if (norm > tau) out.col(j) = ((norm - tau) / norm) * d.col(j);
    }
    return out;
}

MatrixXd update_z(Index v, const MscState& state, const MultiViewDataset& data,
                  const linalg::GramSolver& gram) {
    const MatrixXd& x = data.views[static_cast<std::size_t>(v)];
    const Index n = x.cols();
    const MatrixXd& lam = state.Lambda[static_cast<std::size_t>(v)];
    const MatrixXd& e = state.E[static_cast<std::size_t>(v)];
    MatrixXd rhs = x.transpose() * (lam + state.mu2 * (x - e));
    rhs.noalias() += state.mu1 * view_slice(state.Y, n, v);
    rhs.noalias() -= view_slice(state.Gamma, n, v);
    return gram.solve(state.mu1, state.mu2, rhs);
}

MatrixXd update_e(Index v, const MscState& state, const MultiViewDataset& data, double lambda) {
    const MatrixXd& x = data.views[static_cast<std::size_t>(v)];
    const MatrixXd d =
        x - x * state.Z[static_cast<std::size_t>(v)] + state.Lambda[static_cast<std::size_t>(v)] / state.mu2;
    return l21_shrink(d, lambda / state.mu2);
}

DenseTensor update_y(MscState& state, const MscConfig& cfg, Index a, Index q) {
    const DenseTensor zhat = stack_reshape(state.Z, a, q);
    DenseTensor input(zhat.shape(), zhat.values() + state.Gamma.values() / state.mu1);
    mera::MeraConfig mcfg;
    mcfg.rank = cfg.rank;
    mcfg.sweeps = cfg.mera_sweeps;
    mcfg.seed = cfg.seed;
    if (state.mera_net && !cfg.mera_cold_start) mcfg.warm_start = state.mera_net;
    mera::MeraResult result = mera::approximate(input, mcfg);
    state.mera_net = std::move(result.network);
    return std::move(result.reconstruction);
}

MscState update_multipliers_and_penalties(MscState state, const MultiViewDataset& data,
                                          const MscConfig& cfg) {
    const Index n = data.num_samples();
    const Split sp = balanced_split(n);
    const auto [a, q] = cfg.split_override.value_or(std::make_pair(sp.a, sp.q));
    const DenseTensor zhat = stack_reshape(state.Z, a, q);
    state.Gamma = DenseTensor(state.Gamma.shape(),
                              state.Gamma.values() +
                                  state.mu1 * (zhat.values() - state.Y.values()));
    for (Index v = 0; v < data.num_views(); ++v) {
        const MatrixXd& x = data.views[static_cast<std::size_t>(v)];
        state.Lambda[static_cast<std::size_t>(v)] +=
            state.mu2 * (x - x * state.Z[static_cast<std::size_t>(v)] -
                         state.E[static_cast<std::size_t>(v)]);
    }
    state.mu1 = std::min(cfg.eta * state.mu1, cfg.mu_max);
    state.mu2 = std::min(cfg.eta * state.mu2, cfg.mu_max);
    return state;
}

std::pair<double, double> residuals(const MscState& state, const MultiViewDataset& data) {
    const Index n = data.num_samples();
    double re = 0.0, me = 0.0;
    for (Index v = 0; v < data.num_views(); ++v) {
        const MatrixXd& x = data.views[static_cast<std::size_t>(v)];
        re = std::max(re, max_abs(x - x * state.Z[static_cast<std::size_t>(v)] -
                                  state.E[static_cast<std::size_t>(v)]));
        me = std::max(me, max_abs(state.Z[static_cast<std::size_t>(v)] -
                                  view_slice(state.Y, n, v)));
    }
    return {re, me};
}

MatrixXd build_affinity(std::span<const MatrixXd> z) {
    if (z.empty()) throw std::invalid_argument("build_affinity: no views");
    const Index n = z.front().rows();
    MatrixXd s = MatrixXd::Zero(n, n);
    for (const MatrixXd& m : z) {
        if (m.rows() != n || m.cols() != n)
            throw std::invalid_argument("build_affinity: views must all be N x N");
        const MatrixXd a = m.cwiseAbs();
        s += a + a.transpose();
    }
    return s / static_cast<double>(z.size());
}

MscOutput solve(const MultiViewDataset& data, const MscConfig& cfg) {
    data.validate();
    if (cfg.max_iters < 1) throw std::invalid_argument("solve: max_iters must be >= 1");
    if (cfg.eta <= 1.0) throw std::invalid_argument("solve: eta must exceed 1");
    if (cfg.epsilon <= 0.0) throw std::invalid_argument("solve: epsilon must be positive");
    if (cfg.lambda < 0.0) throw std::invalid_argument("solve: lambda must be >= 0");

    const Index n = data.num_samples();
    const Index v_count = data.num_views();
    const Split sp = balanced_split(n);
    const auto [a, q] = cfg.split_override.value_or(std::make_pair(sp.a, sp.q));
    if (a * q != n)
        throw std::invalid_argument("solve: split override " + std::to_string(a) + "x" +
                                    std::to_string(q) + " does not factor N = " +
                                    std::to_string(n));
    if (cfg.rank < 1 || cfg.rank > a * q || cfg.rank > a * q * v_count)
        throw std::invalid_argument("solve: MERA rank " + std::to_string(cfg.rank) +
                                    " infeasible for reshape (" + std::to_string(a) + "," +
                                    std::to_string(q) + "," + std::to_string(a) + "," +
                                    std::to_string(q) + "," + std::to_string(v_count) + ")");

    int k = data.num_clusters;
    if (k <= 0 && data.labels) {
        std::vector<int> uniq(data.labels->begin(), data.labels->end());
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        k = static_cast<int>(uniq.size());
    }
    if (k < 2) throw std::invalid_argument("solve: need num_clusters >= 2");

    MscState state;
    state.mu1 = cfg.mu1_init;
    state.mu2 = cfg.mu2_init;
    const tensor::Shape tshape{a, q, a, q, v_count};
    state.Y = DenseTensor(tshape);
    state.Gamma = DenseTensor(tshape);
    for (Index v = 0; v < v_count; ++v) {
        const auto& x = data.views[static_cast<std::size_t>(v)];
        state.Z.emplace_back(MatrixXd::Zero(n, n));
        state.E.emplace_back(MatrixXd::Zero(x.rows(), n));
        state.Lambda.emplace_back(MatrixXd::Zero(x.rows(), n));
    }

    std::vector<linalg::GramSolver> grams;
    grams.reserve(static_cast<std::size_t>(v_count));
    for (Index v = 0; v < v_count; ++v)
        grams.emplace_back(data.views[static_cast<std::size_t>(v)]);

    MscOutput out;
    for (int t = 0; t < cfg.max_iters; ++t) {
        const auto tic = clock_type::now();
        for (Index v = 0; v < v_count; ++v) {
            state.Z[static_cast<std::size_t>(v)] =
                update_z(v, state, data, grams[static_cast<std::size_t>(v)]);
            state.E[static_cast<std::size_t>(v)] = update_e(v, state, data, cfg.lambda);
        }
        state.Y = update_y(state, cfg, a, q);
        state = update_multipliers_and_penalties(std::move(state), data, cfg);
        state.iter = t + 1;
        const auto [re, me] = residuals(state, data);
        out.residual_trace.push_back({re, me, seconds_between(tic, clock_type::now())});
        if (re <= cfg.epsilon && me <= cfg.epsilon) {
            out.converged = true;
            break;
        }
    }
    out.iterations = state.iter;
    out.Z = state.Z;
    out.affinity = build_affinity(out.Z);

    spectral::SpectralConfig scfg;
    scfg.k = k;
    scfg.kmeans_restarts = cfg.kmeans_restarts;
    scfg.seed = cfg.seed;
    out.labels = spectral::cluster(out.affinity, scfg);
    return out;
}

}  // namespace meraclust::msc
