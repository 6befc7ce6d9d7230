#pragma once

#include <cstdint>
#include <vector>

#include "meraclust/msc.hpp"

namespace meraclust::io {

// Union-of-subspaces generator: per cluster and view, samples live in a
// random subspace_dim-dimensional subspace of the view's ambient space, plus
// isotropic Gaussian noise. Ground-truth labels are included.
msc::MultiViewDataset synth_multiview(int k, int n_per_cluster, int subspace_dim,
                                      const std::vector<tensor::Index>& ambient_dims,
                                      double noise_sigma, std::uint64_t seed);

}  // namespace meraclust::io
