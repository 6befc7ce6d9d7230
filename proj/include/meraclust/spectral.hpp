#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace meraclust::spectral {

struct SpectralConfig {
    int k = 2;
    int kmeans_restarts = 30;
    int kmeans_max_iters = 300;
    std::uint64_t seed = 0;
    double degree_floor = 1e-12;
};

// Symmetrically normalized graph Laplacian L = I - D^{-1/2} S D^{-1/2} with
// degrees floored to keep isolated vertices well defined.
Eigen::MatrixXd normalized_laplacian(const Eigen::MatrixXd& s, double degree_floor = 1e-12);

// Row-normalized eigenvectors of the k smallest Laplacian eigenvalues
// (all-zero rows are left as zero).
Eigen::MatrixXd spectral_embedding(const Eigen::MatrixXd& s, int k, double degree_floor = 1e-12);

// Lloyd iterations from k-means++ seeds, best of cfg.kmeans_restarts runs by
// within-cluster sum of squares. Deterministic given cfg.seed.
std::vector<int> kmeans(const Eigen::MatrixXd& points, int k, const SpectralConfig& cfg);

std::vector<int> cluster(const Eigen::MatrixXd& s, const SpectralConfig& cfg);

namespace detail {

struct KmeansRun {
    std::vector<int> labels;
    std::vector<double> wcss_trace;  // objective after each Lloyd iteration
    double wcss = 0.0;
};

KmeansRun kmeans_single_run(const Eigen::MatrixXd& points, int k, int max_iters,
                            std::uint64_t seed);

}  // namespace detail

}  // namespace meraclust::spectral
