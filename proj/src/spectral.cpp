#include "meraclust/spectral.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "meraclust/linalg.hpp"

namespace meraclust::spectral {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

void check_affinity(const MatrixXd& s) {
    if (s.rows() != s.cols())
        throw std::invalid_argument("spectral: affinity matrix must be square");
    const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
    if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw std::invalid_argument("spectral: affinity matrix is not symmetric within tolerance");
    if (s.minCoeff() < 0.0)
        throw std::invalid_argument("spectral: affinity matrix has negative entries");
}

double squared_distance(const MatrixXd& points, Eigen::Index i, const VectorXd& center) {
    return (points.row(i).transpose() - center).squaredNorm();
}

}  // namespace

MatrixXd normalized_laplacian(const MatrixXd& s, double degree_floor) {
    check_affinity(s);
    const Eigen::Index n = s.rows();
    VectorXd dinv(n);
    for (Eigen::Index i = 0; i < n; ++i)
        dinv(i) = 1.0 / std::sqrt(std::max(s.row(i).sum(), degree_floor));
    MatrixXd l(n, n);
    // Build the upper triangle and mirror so the result is exactly symmetric.
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
            const double off = dinv(i) * s(i, j) * dinv(j);
            const double val = (i == j ? 1.0 - off : -off);
            l(i, j) = val;
            l(j, i) = val;
        }
    }
    return l;
}

MatrixXd spectral_embedding(const MatrixXd& s, int k, double degree_floor) {
    if (k < 1 || k > s.rows())
        throw std::invalid_argument("spectral_embedding: k out of range");
    const MatrixXd l = normalized_laplacian(s, degree_floor);
    auto [vals, vecs] = linalg::sym_eig_smallest(l, k);
    (void)vals;
    for (Eigen::Index i = 0; i < vecs.rows(); ++i) {
        const double norm = vecs.row(i).norm();
        if (norm > 0.0) vecs.row(i) /= norm;
    }
    return vecs;
}

namespace detail {

KmeansRun kmeans_single_run(const MatrixXd& points, int k, int max_iters, std::uint64_t seed) {
    const Eigen::Index n = points.rows();
    std::mt19937_64 rng(seed);

    // k-means++ seeding.
    MatrixXd centers(k, points.cols());
    std::uniform_int_distribution<Eigen::Index> uniform_index(0, n - 1);
    centers.row(0) = points.row(uniform_index(rng));
    VectorXd dist2(n);
    for (Eigen::Index i = 0; i < n; ++i) dist2(i) = squared_distance(points, i, centers.row(0));
    for (int c = 1; c < k; ++c) {
        const double total = dist2.sum();
        Eigen::Index pick = 0;
        if (total > 0.0) {
            std::uniform_real_distribution<double> u(0.0, total);
            double target = u(rng), acc = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                acc += dist2(i);
                if (acc >= target) {
                    pick = i;
                    break;
                }
                pick = i;
            }
        } else {
            pick = uniform_index(rng);  // all points coincide with a center
        }
        centers.row(c) = points.row(pick);
        for (Eigen::Index i = 0; i < n; ++i)
            dist2(i) = std::min(dist2(i), squared_distance(points, i, centers.row(c)));
    }

    KmeansRun run;
    run.labels.assign(static_cast<std::size_t>(n), 0);
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        double wcss = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = squared_distance(points, i, centers.row(c));
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (run.labels[static_cast<std::size_t>(i)] != best) {
                run.labels[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
            wcss += best_d;
        }
        run.wcss_trace.push_back(wcss);
        if (!changed && iter > 0) break;

        centers.setZero();
        std::fill(counts.begin(), counts.end(), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            centers.row(run.labels[static_cast<std::size_t>(i)]) += points.row(i);
            ++counts[static_cast<std::size_t>(run.labels[static_cast<std::size_t>(i)])];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                centers.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
            } else {
                // Reseed an empty cluster at the point farthest from its center.
                Eigen::Index far = 0;
                double far_d = -1.0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double d = squared_distance(
                        points, i, centers.row(run.labels[static_cast<std::size_t>(i)]));
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                centers.row(c) = points.row(far);
            }
        }
    }

    // Final objective for the returned assignment.
    double wcss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        wcss += squared_distance(points, i, centers.row(run.labels[static_cast<std::size_t>(i)]));
    run.wcss = wcss;
    return run;
}

}  // namespace detail

std::vector<int> kmeans(const MatrixXd& points, int k, const SpectralConfig& cfg) {
    if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
    if (points.rows() < k)
        throw std::invalid_argument("kmeans: fewer points than clusters (" +
                                    std::to_string(points.rows()) + " < " + std::to_string(k) +
                                    ")");
    if (cfg.kmeans_restarts < 1) throw std::invalid_argument("kmeans: restarts must be >= 1");
    detail::KmeansRun best;
    best.wcss = std::numeric_limits<double>::infinity();
    for (int r = 0; r < cfg.kmeans_restarts; ++r) {
        auto run = detail::kmeans_single_run(points, k, cfg.kmeans_max_iters,
                                             splitmix64(cfg.seed + static_cast<std::uint64_t>(r)));
        if (run.wcss < best.wcss) best = std::move(run);
    }
    return best.labels;
}

std::vector<int> cluster(const MatrixXd& s, const SpectralConfig& cfg) {
    if (cfg.k < 2) throw std::invalid_argument("cluster: k must be >= 2");
    const MatrixXd embedding = spectral_embedding(s, cfg.k, cfg.degree_floor);
    return kmeans(embedding, cfg.k, cfg);
}

}  // namespace meraclust::spectral
