#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "meraclust/dense_tensor.hpp"
#include "meraclust/linalg.hpp"
#include "meraclust/mera.hpp"

namespace meraclust::msc {

using tensor::DenseTensor;
using tensor::Index;

// V feature matrices X_v (D_v x N) over the same N samples.
struct MultiViewDataset {
    std::vector<Eigen::MatrixXd> views;
    std::optional<std::vector<int>> labels;
    int num_clusters = 0;

    Index num_samples() const { return views.empty() ? 0 : views.front().cols(); }
    Index num_views() const { return static_cast<Index>(views.size()); }
    void validate() const;
};

struct MscConfig {
    Index rank = 1;
    double lambda = 0.0;
    double mu1_init = 1e-4;
    double mu2_init = 5e-4;
    double eta = 2.0;
    double mu_max = 1e10;
    double epsilon = 1e-6;
    int max_iters = 50;
    int mera_sweeps = 10;
    std::uint64_t seed = 0;
    std::optional<std::pair<Index, Index>> split_override;  // forces (A, Q)
    bool mera_cold_start = false;  // re-randomize the MERA factors each iteration
    int kmeans_restarts = 30;
};

// All ADMM iterates. Tensors use the (A,Q,A,Q,V) reshape of the N x N x V stack.
struct MscState {
    std::vector<Eigen::MatrixXd> Z;       // N x N self-representations
    std::vector<Eigen::MatrixXd> E;       // D_v x N noise
    std::vector<Eigen::MatrixXd> Lambda;  // D_v x N multipliers
    DenseTensor Y;                        // auxiliary consensus tensor
    DenseTensor Gamma;                    // tensor multiplier
    double mu1 = 0.0;
    double mu2 = 0.0;
    int iter = 0;
    std::optional<mera::Mera5Network> mera_net;  // warm start across iterations
};

struct ResidualPoint {
    double re = 0.0;  // max_v ||X_v - X_v Z_v - E_v||_inf
    double me = 0.0;  // max_v ||Z_v - Y_v||_inf
    double seconds = 0.0;
};

struct MscOutput {
    std::vector<Eigen::MatrixXd> Z;
    Eigen::MatrixXd affinity;
    std::vector<int> labels;
    std::vector<ResidualPoint> residual_trace;
    bool converged = false;
    int iterations = 0;
};

struct Split {
    Index a = 1;
    Index q = 1;
    bool degraded = false;  // a == 1 on a non-trivial n: the reshape adds nothing
};

// Divisor pair a <= q with a*q = n minimizing q - a.
Split balanced_split(Index n);

// Stacks the per-view matrices into N x N x V and reinterprets as
// (A,Q,A,Q,V); exact inverse pair with unstack_reshape / view_slice.
DenseTensor stack_reshape(std::span<const Eigen::MatrixXd> z, Index a, Index q);
std::vector<Eigen::MatrixXd> unstack_reshape(const DenseTensor& t, Index n);
Eigen::MatrixXd view_slice(const DenseTensor& t, Index n, Index v);

// Column-wise l2,1 proximal operator: columns with norm above tau shrink
// toward zero by tau, the rest vanish.
Eigen::MatrixXd l21_shrink(const Eigen::MatrixXd& d, double tau);

Eigen::MatrixXd update_z(Index v, const MscState& state, const MultiViewDataset& data,
                         const linalg::GramSolver& gram);
Eigen::MatrixXd update_e(Index v, const MscState& state, const MultiViewDataset& data,
                         double lambda);
// Runs the low-rank MERA approximation on reshape(Z) + Gamma/mu1, warm-started
// from the previous network unless cold_start; stores the new network in state.
DenseTensor update_y(MscState& state, const MscConfig& cfg, Index a, Index q);
MscState update_multipliers_and_penalties(MscState state, const MultiViewDataset& data,
                                          const MscConfig& cfg);
std::pair<double, double> residuals(const MscState& state, const MultiViewDataset& data);

// S = (1/V) sum_v |Z_v| + |Z_v^T|; symmetric and nonnegative.
Eigen::MatrixXd build_affinity(std::span<const Eigen::MatrixXd> z);

MscOutput solve(const MultiViewDataset& data, const MscConfig& cfg);

}  // namespace meraclust::msc
