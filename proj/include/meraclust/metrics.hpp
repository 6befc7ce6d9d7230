#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>

namespace meraclust::metrics {

struct MetricsReport {
    double fscore = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double nmi = 0.0;
    double ari = 0.0;
    double acc = 0.0;
};

using Contingency = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

// n_ij = number of samples with truth class i and predicted cluster j,
// classes/clusters indexed by first appearance.
Contingency contingency(std::span<const int> truth, std::span<const int> pred);

struct PairMetrics {
    double fscore = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

// Pair-counting precision/recall/F over all unordered sample pairs.
PairMetrics pair_metrics(std::span<const int> truth, std::span<const int> pred);

enum class NmiNormalization { Arithmetic, Geometric };

// Mutual information normalized by the mean of the two entropies; two trivial
// single-cluster partitions score 1.
double nmi(std::span<const int> truth, std::span<const int> pred,
           NmiNormalization norm = NmiNormalization::Arithmetic);

// Hubert-Arabie adjusted Rand index; the degenerate zero-denominator case
// returns 1 for identical partitions and 0 otherwise.
double ari(std::span<const int> truth, std::span<const int> pred);

// Clustering accuracy under the best one-to-one cluster-to-class matching
// (Hungarian assignment on the contingency matrix).
double acc(std::span<const int> truth, std::span<const int> pred);

MetricsReport evaluate(std::span<const int> truth, std::span<const int> pred);

}  // namespace meraclust::metrics
