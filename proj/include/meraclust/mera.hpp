#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "meraclust/dense_tensor.hpp"

namespace meraclust::mera {

using tensor::DenseTensor;
using tensor::Index;

// Single-layer MERA network for a 5th-order tensor: one disentangler acting
// on legs 2 and 3 (1-based), an isometry grouping legs {1,2}, an isometry
// grouping legs {3,4,5}, and an R x R top core. The disentangler unfolding is
// square orthogonal; the isometry unfoldings have orthonormal columns.
struct Mera5Network {
    std::array<Index, 5> leg_dims{};  // (I1,...,I5)
    Index rank = 0;                   // R, shared by both isometries
    DenseTensor u1;                   // I2 x I3 x I2 x I3
    DenseTensor w1;                   // I1 x I2 x R
    DenseTensor w2;                   // I3 x I4 x I5 x R
    Eigen::MatrixXd b;                // R x R
};

struct MeraConfig {
    Index rank = 1;
    int sweeps = 10;
    std::uint64_t seed = 0;
    std::optional<Mera5Network> warm_start;  // overrides random initialization
};

// Fit errors ||y - f(B,W,U)||_F recorded at the end of each sweep.
struct MeraTrace {
    std::vector<double> fit_errors;
};

struct MeraResult {
    Mera5Network network;
    DenseTensor reconstruction;
    MeraTrace trace;
};

// Seeded random-orthogonal factors (QR of Gaussians) and Gaussian top core.
Mera5Network init_network(const std::array<Index, 5>& leg_dims, Index rank, std::uint64_t seed);

// Deterministic data-driven initialization: identity disentangler and
// leading singular subspaces of the {1,2} unfolding. Exact at full split rank.
Mera5Network spectral_init_network(const DenseTensor& y, Index rank);

DenseTensor reconstruct(const Mera5Network& net);

Mera5Network update_disentangler(const DenseTensor& y, const Mera5Network& net);
Mera5Network update_isometry(const DenseTensor& y, const Mera5Network& net, int which);
Mera5Network update_top_core(const DenseTensor& y, const Mera5Network& net);

// Alternating block updates (disentangler, isometries, top core) for a fixed
// number of sweeps; the fit-error trace is nonincreasing.
MeraResult approximate(const DenseTensor& y, const MeraConfig& cfg);

}  // namespace meraclust::mera
