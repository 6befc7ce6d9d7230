#include "meraclust/synth.hpp"

#include <random>
#include <stdexcept>

namespace meraclust::io {

namespace {

using Eigen::MatrixXd;

MatrixXd gaussian(tensor::Index rows, tensor::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    MatrixXd m(rows, cols);
    for (tensor::Index j = 0; j < cols; ++j)
        for (tensor::Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
    return m;
}

MatrixXd orthonormal_basis(tensor::Index rows, tensor::Index cols, std::mt19937_64& rng) {
    Eigen::HouseholderQR<MatrixXd> qr(gaussian(rows, cols, rng));
    return qr.householderQ() * MatrixXd::Identity(rows, cols);
}

}  // namespace

msc::MultiViewDataset synth_multiview(int k, int n_per_cluster, int subspace_dim,
                                      const std::vector<tensor::Index>& ambient_dims,
                                      double noise_sigma, std::uint64_t seed) {
    if (k < 1 || n_per_cluster < 1 || subspace_dim < 1)
        throw std::invalid_argument("synth_multiview: counts must be positive");
    if (ambient_dims.empty()) throw std::invalid_argument("synth_multiview: no views requested");
    for (tensor::Index d : ambient_dims)
        if (d < subspace_dim)
            throw std::invalid_argument("synth_multiview: subspace_dim exceeds ambient dim " +
                                        std::to_string(d));
    if (noise_sigma < 0.0) throw std::invalid_argument("synth_multiview: negative noise");

    std::mt19937_64 rng(seed);
    const tensor::Index n = static_cast<tensor::Index>(k) * n_per_cluster;
    msc::MultiViewDataset data;
    data.num_clusters = k;
    for (tensor::Index dv : ambient_dims) {
        MatrixXd x(dv, n);
        for (int c = 0; c < k; ++c) {
            const MatrixXd basis = orthonormal_basis(dv, subspace_dim, rng);
            const MatrixXd coeffs = gaussian(subspace_dim, n_per_cluster, rng);
            x.middleCols(static_cast<tensor::Index>(c) * n_per_cluster, n_per_cluster) =
                basis * coeffs;
        }
        if (noise_sigma > 0.0) x += noise_sigma * gaussian(dv, n, rng);
        data.views.push_back(std::move(x));
    }
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int c = 0; c < k; ++c)
        for (int i = 0; i < n_per_cluster; ++i)
            labels[static_cast<std::size_t>(c) * n_per_cluster + static_cast<std::size_t>(i)] = c;
    data.labels = std::move(labels);
    return data;
}

}  // namespace meraclust::io
