#include "meraclust/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace meraclust::metrics {

namespace {

std::vector<int> compact_ids(std::span<const int> labels, int& count) {
    std::unordered_map<int, int> remap;
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto [it, inserted] = remap.try_emplace(labels[i], static_cast<int>(remap.size()));
        out[i] = it->second;
    }
    count = static_cast<int>(remap.size());
    return out;
}

void check_lengths(std::span<const int> truth, std::span<const int> pred) {
    if (truth.size() != pred.size())
        throw std::invalid_argument("metrics: label sequences differ in length");
    if (truth.empty()) throw std::invalid_argument("metrics: label sequences are empty");
}

double comb2(std::int64_t n) { return 0.5 * static_cast<double>(n) * static_cast<double>(n - 1); }

struct PairCounts {
    double same_both = 0.0;   // pairs grouped together in both partitions
    double same_truth = 0.0;  // pairs grouped together in the truth
    double same_pred = 0.0;   // pairs grouped together in the prediction
    double total = 0.0;
};

PairCounts pair_counts(const Contingency& c) {
    PairCounts pc;
    std::int64_t n = 0;
    for (Eigen::Index i = 0; i < c.rows(); ++i)
        for (Eigen::Index j = 0; j < c.cols(); ++j) pc.same_both += comb2(c(i, j));
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        const std::int64_t a = c.row(i).sum();
        pc.same_truth += comb2(a);
        n += a;
    }
    for (Eigen::Index j = 0; j < c.cols(); ++j) pc.same_pred += comb2(c.col(j).sum());
    pc.total = comb2(n);
    return pc;
}

// Each row and each column carries exactly one nonzero cell: the two
// label sequences induce the same partition.
bool partitions_identical(const Contingency& c) {
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        int nz = 0;
        for (Eigen::Index j = 0; j < c.cols(); ++j) nz += c(i, j) != 0;
        if (nz != 1) return false;
    }
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
        int nz = 0;
        for (Eigen::Index i = 0; i < c.rows(); ++i) nz += c(i, j) != 0;
        if (nz != 1) return false;
    }
    return true;
}

// Potential-based Hungarian algorithm, O(n^3), minimizing total cost over a
// square matrix. Returns the column assigned to each row.
std::vector<int> hungarian_min(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
        std::vector<char> used(n + 1, false);
        do {
            used[j0] = true;
            const int i0 = p[j0];
            double delta = std::numeric_limits<double>::infinity();
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] != 0) row_to_col[static_cast<std::size_t>(p[j] - 1)] = j - 1;
    return row_to_col;
}

}  // namespace

Contingency contingency(std::span<const int> truth, std::span<const int> pred) {
    check_lengths(truth, pred);
    int kt = 0, kp = 0;
    const std::vector<int> t = compact_ids(truth, kt);
    const std::vector<int> p = compact_ids(pred, kp);
    Contingency c = Contingency::Zero(kt, kp);
    for (std::size_t i = 0; i < t.size(); ++i) ++c(t[i], p[i]);
    return c;
}

PairMetrics pair_metrics(std::span<const int> truth, std::span<const int> pred) {
    const PairCounts pc = pair_counts(contingency(truth, pred));
    PairMetrics m;
    m.precision = pc.same_pred > 0.0 ? pc.same_both / pc.same_pred : 0.0;
    m.recall = pc.same_truth > 0.0 ? pc.same_both / pc.same_truth : 0.0;
    m.fscore = (m.precision + m.recall) > 0.0
                   ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                   : 0.0;
    return m;
}

double nmi(std::span<const int> truth, std::span<const int> pred, NmiNormalization norm) {
    const Contingency c = contingency(truth, pred);
    const double n = static_cast<double>(truth.size());
    double h_t = 0.0, h_p = 0.0, mi = 0.0;
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        const double pi = static_cast<double>(c.row(i).sum()) / n;
        if (pi > 0.0) h_t -= pi * std::log(pi);
    }
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
        const double pj = static_cast<double>(c.col(j).sum()) / n;
        if (pj > 0.0) h_p -= pj * std::log(pj);
    }
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        const double ai = static_cast<double>(c.row(i).sum());
        for (Eigen::Index j = 0; j < c.cols(); ++j) {
            if (c(i, j) == 0) continue;
            const double pij = static_cast<double>(c(i, j)) / n;
            const double bj = static_cast<double>(c.col(j).sum());
            mi += pij * std::log(n * static_cast<double>(c(i, j)) / (ai * bj));
        }
    }
    const double denom = norm == NmiNormalization::Arithmetic ? 0.5 * (h_t + h_p)
                                                              : std::sqrt(h_t * h_p);
    if (denom <= 0.0) return 1.0;  // both partitions trivial
    return std::clamp(mi / denom, 0.0, 1.0);
}

double ari(std::span<const int> truth, std::span<const int> pred) {
    const Contingency c = contingency(truth, pred);
    const PairCounts pc = pair_counts(c);
    if (pc.total <= 0.0) return 1.0;  // single sample
    const double expected = pc.same_truth * pc.same_pred / pc.total;
    const double maximum = 0.5 * (pc.same_truth + pc.same_pred);
    if (std::abs(maximum - expected) < 1e-12 * std::max(1.0, maximum))
        return partitions_identical(c) ? 1.0 : 0.0;
    return (pc.same_both - expected) / (maximum - expected);
}

double acc(std::span<const int> truth, std::span<const int> pred) {
    const Contingency c = contingency(truth, pred);
    const int n = static_cast<int>(std::max(c.rows(), c.cols()));
    const double top = static_cast<double>(c.maxCoeff());
    Eigen::MatrixXd cost = Eigen::MatrixXd::Constant(n, n, top);  // zero-padded, negated
    for (Eigen::Index i = 0; i < c.rows(); ++i)
        for (Eigen::Index j = 0; j < c.cols(); ++j) cost(i, j) = top - static_cast<double>(c(i, j));
    const std::vector<int> match = hungarian_min(cost);
    std::int64_t hit = 0;
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        const int j = match[static_cast<std::size_t>(i)];
        if (j >= 0 && j < c.cols()) hit += c(i, j);
    }
    return static_cast<double>(hit) / static_cast<double>(truth.size());
}

MetricsReport evaluate(std::span<const int> truth, std::span<const int> pred) {
    MetricsReport r;
    const PairMetrics pm = pair_metrics(truth, pred);
    r.fscore = pm.fscore;
    r.precision = pm.precision;
    r.recall = pm.recall;
    r.nmi = nmi(truth, pred);
    r.ari = ari(truth, pred);
    r.acc = acc(truth, pred);
    return r;
}

}  // namespace meraclust::metrics
