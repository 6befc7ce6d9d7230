#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "meraclust/dense_tensor.hpp"
#include "meraclust/mera.hpp"
#include "meraclust/msc.hpp"

namespace meraclust::anchor {

using msc::MultiViewDataset;
using msc::ResidualPoint;
using tensor::DenseTensor;
using tensor::Index;

enum class AnchorInit { Sampled, RandomOrthonormal };

struct AnchorConfig {
    Index num_anchors = 1;  // M
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
    AnchorInit anchor_init = AnchorInit::Sampled;
    bool mera_cold_start = false;
    int kmeans_restarts = 30;
};

// ADMM iterates for X_v = A_v C_v + E_v with orthonormal-column anchors A_v.
// The tensor iterates live on the (m1,m2,A,Q,V) reshape of the M x N x V
// anchor-graph stack.
struct AnchorState {
    std::vector<Eigen::MatrixXd> A;       // D_v x M anchors
    std::vector<Eigen::MatrixXd> C;       // M x N anchor graphs
    std::vector<Eigen::MatrixXd> E;       // D_v x N noise
    std::vector<Eigen::MatrixXd> Lambda;  // D_v x N multipliers
    DenseTensor Y;
    DenseTensor Gamma;
    double mu1 = 0.0;
    double mu2 = 0.0;
    int iter = 0;
    std::optional<mera::Mera5Network> mera_net;
};

struct AnchorOutput {
    std::vector<Eigen::MatrixXd> C;
    std::vector<Eigen::MatrixXd> A;
    std::vector<int> labels;
    std::vector<ResidualPoint> residual_trace;
    bool converged = false;
    int iterations = 0;
};

// Sampled mode draws M distinct data columns per view and orthonormalizes;
// random mode takes the leading M columns of a seeded random orthogonal basis.
std::vector<Eigen::MatrixXd> init_anchors(const MultiViewDataset& data, const AnchorConfig& cfg);

Eigen::MatrixXd update_c(Index v, const AnchorState& state, const MultiViewDataset& data);
Eigen::MatrixXd update_a(Index v, const AnchorState& state, const MultiViewDataset& data);

// Stacks the M x N anchor graphs and reshapes to (m1,m2,A,Q,V) with
// m1*m2 = M and A*Q = N.
DenseTensor anchor_reshape(std::span<const Eigen::MatrixXd> c, Index a, Index q, Index m1,
                           Index m2);

// Consensus anchor graph -> top-k right singular subspace -> row-normalized
// k-means; never materializes an N x N matrix.
std::vector<int> labels_from_anchor_graphs(std::span<const Eigen::MatrixXd> c, int k,
                                           std::uint64_t seed, int kmeans_restarts = 30);

AnchorOutput solve_anchor(const MultiViewDataset& data, const AnchorConfig& cfg);

}  // namespace meraclust::anchor
