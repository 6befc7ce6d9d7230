#include <doctest.h>

#include <random>

#include "meraclust/metrics.hpp"
#include "support/oracles.hpp"

using namespace meraclust::metrics;

namespace {

const std::vector<int> kTruth{0, 0, 1, 1};
const std::vector<int> kPred{0, 1, 0, 1};

std::vector<int> relabel(const std::vector<int>& labels, int offset, int stride) {
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) out[i] = offset + stride * labels[i];
    return out;
}

}  // namespace

TEST_CASE("contingency counts") {
    const std::vector<int> same{2, 2, 5, 5, 9};
    const Contingency diag = contingency(same, same);
    CHECK(diag.rows() == 3);
    CHECK(diag.cols() == 3);
    CHECK(diag.diagonal().sum() == 5);
    CHECK(diag.sum() == 5);

    const Contingency ones = contingency(kTruth, kPred);
    CHECK(ones.rows() == 2);
    CHECK(ones.cols() == 2);
    for (Eigen::Index i = 0; i < 2; ++i)
        for (Eigen::Index j = 0; j < 2; ++j) CHECK(ones(i, j) == 1);

    const std::vector<int> a{0, 1}, b{0};
    CHECK_THROWS_AS(contingency(a, b), std::invalid_argument);
}

TEST_CASE("pair metrics on the spec examples") {
    const PairMetrics ident = pair_metrics(kTruth, kTruth);
    CHECK(ident.fscore == doctest::Approx(1.0));
    CHECK(ident.precision == doctest::Approx(1.0));
    CHECK(ident.recall == doctest::Approx(1.0));

    const PairMetrics cross = pair_metrics(kTruth, kPred);
    CHECK(cross.fscore == 0.0);
    CHECK(cross.precision == 0.0);
    CHECK(cross.recall == 0.0);
    const auto oracle = oracles::pair_metrics_bruteforce(kTruth, kPred);
    CHECK(cross.fscore == doctest::Approx(oracle[0]));

    // All samples in one predicted cluster, two equal truth classes.
    const std::vector<int> one{7, 7, 7, 7};
    const PairMetrics lump = pair_metrics(kTruth, one);
    const auto lump_oracle = oracles::pair_metrics_bruteforce(kTruth, one);
    CHECK(lump.precision == doctest::Approx(2.0 / 6.0));
    CHECK(lump.recall == doctest::Approx(1.0));
    CHECK(lump.precision == doctest::Approx(lump_oracle[1]));
    CHECK(lump.recall == doctest::Approx(lump_oracle[2]));
}

TEST_CASE("nmi on the spec examples") {
    const std::vector<int> ident{0, 0, 1, 1, 2};
    CHECK(nmi(ident, ident) == doctest::Approx(1.0));
    CHECK(nmi(kTruth, kPred) == doctest::Approx(0.0));
    // Relabeling either side changes nothing.
    CHECK(nmi(kTruth, relabel(kPred, 10, 3)) == doctest::Approx(0.0));
    CHECK(nmi(relabel(ident, -5, 2), ident) == doctest::Approx(1.0));
    // Both-trivial convention.
    const std::vector<int> trivial{4, 4, 4};
    CHECK(nmi(trivial, trivial) == doctest::Approx(1.0));
}

TEST_CASE("ari on the oracle-checked example") {
    CHECK(ari(kTruth, kTruth) == doctest::Approx(1.0));
    // The pair-count oracle fixes the expected value at -1/2.
    const double oracle = oracles::ari_bruteforce(kTruth, kPred);
    CHECK(oracle == doctest::Approx(-0.5));
    CHECK(ari(kTruth, kPred) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(ari(relabel(kTruth, 3, 4), relabel(kPred, 1, 9)) == doctest::Approx(oracle));

    const std::vector<int> trivial{1, 1, 1};
    CHECK(ari(trivial, trivial) == doctest::Approx(1.0));
    const std::vector<int> singletons{0, 1, 2};
    CHECK(ari(singletons, singletons) == doctest::Approx(1.0));
    CHECK(ari(trivial, singletons) == doctest::Approx(0.0));
}

TEST_CASE("acc on the spec examples") {
    CHECK(acc(kTruth, relabel(kTruth, 5, -2)) == doctest::Approx(1.0));
    CHECK(acc(kTruth, kPred) == doctest::Approx(0.5));
    CHECK(acc(kTruth, kPred) == doctest::Approx(oracles::acc_bruteforce(kTruth, kPred)));
}

TEST_CASE("acc equals the k!-enumeration oracle on random partitions") {
    std::mt19937_64 rng(91);
    for (int rep = 0; rep < 60; ++rep) {
        const int k = 2 + static_cast<int>(rng() % 5);  // up to 6 clusters
        const std::size_t n = 5 + rng() % 40;
        const auto truth = oracles::random_partition(n, k, rng);
        const auto pred = oracles::random_partition(n, k, rng);
        CHECK(acc(truth, pred) == doctest::Approx(oracles::acc_bruteforce(truth, pred)));

        // Single-assignment lower bound: the best matching covers at least the
        // largest contingency cell.
        const Contingency c = contingency(truth, pred);
        CHECK(acc(truth, pred) >=
              static_cast<double>(c.maxCoeff()) / static_cast<double>(n) - 1e-12);
    }
}

TEST_CASE("metrics agree with definition oracles on random partitions") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 50; ++rep) {
        const int kt = 2 + static_cast<int>(rng() % 5);
        const int kp = 2 + static_cast<int>(rng() % 5);
        const std::size_t n = 10 + rng() % 150;
        const auto truth = oracles::random_partition(n, kt, rng);
        const auto pred = oracles::random_partition(n, kp, rng);

        const auto pm = pair_metrics(truth, pred);
        const auto pm_o = oracles::pair_metrics_bruteforce(truth, pred);
        CHECK(pm.fscore == doctest::Approx(pm_o[0]).epsilon(1e-12));
        CHECK(pm.precision == doctest::Approx(pm_o[1]).epsilon(1e-12));
        CHECK(pm.recall == doctest::Approx(pm_o[2]).epsilon(1e-12));
        CHECK(nmi(truth, pred) == doctest::Approx(oracles::nmi_bruteforce(truth, pred)).epsilon(1e-12));
        CHECK(ari(truth, pred) == doctest::Approx(oracles::ari_bruteforce(truth, pred)).epsilon(1e-12));

        // Range invariants.
        CHECK(nmi(truth, pred) >= 0.0);
        CHECK(nmi(truth, pred) <= 1.0);
        CHECK(ari(truth, pred) >= -1.0);
        CHECK(ari(truth, pred) <= 1.0);
        CHECK(acc(truth, pred) >= 0.0);
        CHECK(acc(truth, pred) <= 1.0);
    }
}

TEST_CASE("evaluate assembles the six metrics consistently") {
    const MetricsReport ident = evaluate(kTruth, kTruth);
    CHECK(ident.fscore == doctest::Approx(1.0));
    CHECK(ident.precision == doctest::Approx(1.0));
    CHECK(ident.recall == doctest::Approx(1.0));
    CHECK(ident.nmi == doctest::Approx(1.0));
    CHECK(ident.ari == doctest::Approx(1.0));
    CHECK(ident.acc == doctest::Approx(1.0));

    const MetricsReport cross = evaluate(kTruth, kPred);
    CHECK(cross.fscore == doctest::Approx(pair_metrics(kTruth, kPred).fscore));
    CHECK(cross.precision == doctest::Approx(0.0));
    CHECK(cross.recall == doctest::Approx(0.0));
    CHECK(cross.nmi == doctest::Approx(0.0));
    CHECK(cross.ari == doctest::Approx(-0.5));
    CHECK(cross.acc == doctest::Approx(0.5));

    // The report equals the per-metric calls exactly.
    std::mt19937_64 rng(5);
    const auto truth = oracles::random_partition(40, 4, rng);
    const auto pred = oracles::random_partition(40, 3, rng);
    const MetricsReport r = evaluate(truth, pred);
    CHECK(r.nmi == nmi(truth, pred));
    CHECK(r.ari == ari(truth, pred));
    CHECK(r.acc == acc(truth, pred));
    CHECK(r.fscore == pair_metrics(truth, pred).fscore);
    if (r.precision + r.recall > 0)
        CHECK(r.fscore ==
              doctest::Approx(2 * r.precision * r.recall / (r.precision + r.recall)));
}
