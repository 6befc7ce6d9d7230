#include <doctest.h>

#include <random>

#include "meraclust/mera.hpp"
#include "support/oracles.hpp"

using namespace meraclust;
using namespace meraclust::mera;
using Eigen::MatrixXd;
using tensor::DenseTensor;
using tensor::Index;

namespace {

double orth_defect(const DenseTensor& t, Index rows, Index cols) {
    const Eigen::Map<const MatrixXd> m(t.data(), rows, cols);
    return (m.transpose() * m - MatrixXd::Identity(cols, cols)).norm();
}

double network_orth_defect(const Mera5Network& net) {
    const auto& d = net.leg_dims;
    double defect = orth_defect(net.u1, d[1] * d[2], d[1] * d[2]);
    defect = std::max(defect, orth_defect(net.w1, d[0] * d[1], net.rank));
    defect = std::max(defect, orth_defect(net.w2, d[2] * d[3] * d[4], net.rank));
    return defect;
}

double fit(const DenseTensor& y, const Mera5Network& net) {
    return (y.values() - reconstruct(net).values()).norm();
}

}  // namespace

TEST_CASE("init_network satisfies the orthogonality invariants and is deterministic") {
    const std::array<Index, 5> dims{2, 2, 2, 2, 2};
    const Mera5Network net = init_network(dims, 2, 42);
    CHECK(network_orth_defect(net) <= 1e-10);

    const Mera5Network again = init_network(dims, 2, 42);
    CHECK((net.u1.values() - again.u1.values()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((net.w1.values() - again.w1.values()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((net.w2.values() - again.w2.values()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((net.b - again.b).cwiseAbs().maxCoeff() == 0.0);

    const Mera5Network other = init_network(dims, 2, 43);
    CHECK((net.b - other.b).cwiseAbs().maxCoeff() > 0.0);

    // Full split rank: the w1 unfolding becomes square orthogonal.
    const Mera5Network full = init_network(dims, 4, 1);
    const Eigen::Map<const MatrixXd> w1m(full.w1.data(), 4, 4);
    CHECK((w1m * w1m.transpose() - MatrixXd::Identity(4, 4)).norm() <= 1e-10);

    CHECK_THROWS_WITH_AS(init_network(dims, 5, 0), doctest::Contains("I1*I2"),
                         std::invalid_argument);
    CHECK_THROWS_AS(init_network({2, 2, 1, 1, 1}, 3, 0), std::invalid_argument);
}

TEST_CASE("reconstruct matches the brute-force contraction oracle") {
    for (int rep = 0; rep < 5; ++rep) {
        const Mera5Network net = init_network({2, 3, 2, 2, 2}, 3, 100 + rep);
        const DenseTensor got = reconstruct(net);
        const DenseTensor want = oracles::mera_reconstruct_bruteforce(net);
        CHECK((got.values() - want.values()).cwiseAbs().maxCoeff() < 1e-12);
    }

    // Canonical-basis network: identity disentangler, leading basis columns as
    // isometries, identity core.
    Mera5Network basis;
    basis.leg_dims = {2, 2, 2, 2, 2};
    basis.rank = 2;
    basis.u1 = tensor::fold(MatrixXd::Identity(4, 4), 0, 1, {2, 2, 2, 2});
    const MatrixXd w1m = MatrixXd::Identity(4, 4).leftCols(2);
    basis.w1 = DenseTensor({2, 2, 2}, Eigen::VectorXd::Map(w1m.data(), w1m.size()));
    const MatrixXd w2m = MatrixXd::Identity(8, 8).leftCols(2);
    basis.w2 = DenseTensor({2, 2, 2, 2}, Eigen::VectorXd::Map(w2m.data(), w2m.size()));
    basis.b = MatrixXd::Identity(2, 2);
    const DenseTensor got = reconstruct(basis);
    const DenseTensor want = oracles::mera_reconstruct_bruteforce(basis);
    CHECK((got.values() - want.values()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(got.values().squaredNorm() == doctest::Approx(2.0));  // equals ||B||_F^2

    // Multilinearity in the top core.
    Mera5Network scaled = basis;
    scaled.b *= 3.5;
    CHECK((reconstruct(scaled).values() - 3.5 * got.values()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("reconstruction norm equals the top-core norm") {
    for (int rep = 0; rep < 5; ++rep) {
        const Mera5Network net = init_network({3, 2, 2, 3, 2}, 4, 7 * rep + 1);
        CHECK(reconstruct(net).values().norm() == doctest::Approx(net.b.norm()).epsilon(1e-10));
    }
}

TEST_CASE("update_disentangler: fixed point, orthogonality, Procrustes optimality") {
    std::mt19937_64 rng(11);
    const std::array<Index, 5> dims{2, 3, 2, 2, 2};
    const Mera5Network net = init_network(dims, 2, 5);

    // Data generated by the network keeps a zero fit error.
    const DenseTensor y0 = reconstruct(net);
    const Mera5Network up0 = update_disentangler(y0, net);
    CHECK(fit(y0, up0) <= 1e-10 * y0.values().norm() + 1e-12);

    const DenseTensor y = oracles::random_tensor({2, 3, 2, 2, 2}, rng);
    const Mera5Network up = update_disentangler(y, net);
    CHECK(network_orth_defect(up) <= 1e-10);
    CHECK(fit(y, up) <= fit(y, net) + 1e-12);

    // Trace objective against random orthogonal candidates: G is formed with
    // an identity disentangler so only the fixed blocks enter.
    const MatrixXd y23 = tensor::unfold(y, 1, 2);
    Mera5Network cleared = net;
    cleared.u1 = tensor::fold(MatrixXd::Identity(6, 6), 0, 1, {3, 2, 3, 2});
    const MatrixXd m23 = tensor::unfold(reconstruct(cleared), 1, 2);
    const MatrixXd g = y23 * m23.transpose();
    const Eigen::Map<const MatrixXd> u_new(up.u1.data(), 6, 6);
    const double best = (u_new.transpose() * g).trace();
    for (int rep = 0; rep < 500; ++rep) {
        const MatrixXd cand = oracles::random_semiorthogonal(6, 6, rng);
        CHECK((cand.transpose() * g).trace() <= best + 1e-9);
    }

    CHECK_THROWS_AS(update_disentangler(oracles::random_tensor({2, 2, 2, 2, 2}, rng), net),
                    std::invalid_argument);
}

TEST_CASE("update_isometry: fixed point, semi-orthogonality, block optimality") {
    std::mt19937_64 rng(13);
    const std::array<Index, 5> dims{2, 2, 2, 2, 3};
    const Mera5Network net = init_network(dims, 3, 9);

    const DenseTensor y0 = reconstruct(net);
    Mera5Network up = update_isometry(y0, net, 1);
    CHECK(fit(y0, up) <= 1e-10 * y0.values().norm() + 1e-12);
    up = update_isometry(y0, net, 2);
    CHECK(fit(y0, up) <= 1e-10 * y0.values().norm() + 1e-12);

    const DenseTensor y = oracles::random_tensor({2, 2, 2, 2, 3}, rng);
    for (int which : {1, 2}) {
        const Mera5Network u = update_isometry(y, net, which);
        CHECK(network_orth_defect(u) <= 1e-10);
        const double updated = fit(y, u);
        CHECK(updated <= fit(y, net) + 1e-12);

        // The refreshed block beats random semi-orthogonal candidates.
        for (int rep = 0; rep < 500; ++rep) {
            Mera5Network cand = net;
            if (which == 1) {
                const MatrixXd w = oracles::random_semiorthogonal(4, 3, rng);
                cand.w1 = DenseTensor({2, 2, 3}, Eigen::VectorXd::Map(w.data(), w.size()));
            } else {
                const MatrixXd w = oracles::random_semiorthogonal(12, 3, rng);
                cand.w2 = DenseTensor({2, 2, 3, 3}, Eigen::VectorXd::Map(w.data(), w.size()));
            }
            CHECK(updated <= fit(y, cand) + 1e-9);
        }
    }

    CHECK_THROWS_AS(update_isometry(y, net, 3), std::invalid_argument);
    CHECK_THROWS_AS(update_isometry(oracles::random_tensor({3, 2, 2, 2, 3}, rng), net, 1),
                    std::invalid_argument);
}

TEST_CASE("update_top_core: fixed point, zero data, least-squares optimum") {
    std::mt19937_64 rng(17);
    const std::array<Index, 5> dims{2, 2, 2, 2, 2};
    const Mera5Network net = init_network(dims, 2, 21);

    const DenseTensor y0 = reconstruct(net);
    const Mera5Network up0 = update_top_core(y0, net);
    CHECK((up0.b - net.b).cwiseAbs().maxCoeff() <= 1e-12);

    const Mera5Network upz = update_top_core(DenseTensor({2, 2, 2, 2, 2}), net);
    CHECK(upz.b.cwiseAbs().maxCoeff() == 0.0);

    // R = 1: the optimum is the inner product with the unit-norm basis tensor,
    // recoverable by an explicit normal-equation solve.
    const Mera5Network small = init_network(dims, 1, 23);
    const DenseTensor y = oracles::random_tensor({2, 2, 2, 2, 2}, rng);
    Mera5Network dir = small;
    dir.b(0, 0) = 1.0;
    const Eigen::VectorXd basis = reconstruct(dir).values();
    const double expected = basis.dot(y.values()) / basis.squaredNorm();
    const Mera5Network up = update_top_core(y, small);
    CHECK(up.b(0, 0) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("approximate: warm start at generating factors is a fixed point") {
    const std::array<Index, 5> dims{2, 2, 2, 2, 2};
    for (Index rank : {2, 4}) {
        const Mera5Network truth = init_network(dims, rank, 77);
        const DenseTensor y = reconstruct(truth);
        MeraConfig cfg;
        cfg.rank = rank;
        cfg.sweeps = 10;
        cfg.warm_start = truth;
        const MeraResult res = approximate(y, cfg);
        const double rel = (y.values() - res.reconstruction.values()).norm() / y.values().norm();
        CHECK(rel <= 1e-10);
    }
}

TEST_CASE("approximate: trace is nonincreasing and matches recomputed errors") {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 5; ++rep) {
        const DenseTensor y = oracles::random_tensor({3, 2, 2, 3, 2}, rng);
        MeraConfig cfg;
        cfg.rank = 2;
        cfg.sweeps = 6;
        cfg.seed = static_cast<std::uint64_t>(rep);
        const MeraResult res = approximate(y, cfg);
        REQUIRE(res.trace.fit_errors.size() == 6);
        for (std::size_t s = 1; s < res.trace.fit_errors.size(); ++s)
            CHECK(res.trace.fit_errors[s] <= res.trace.fit_errors[s - 1] + 1e-12);
        const double explicit_err = (y.values() - res.reconstruction.values()).norm();
        CHECK(res.trace.fit_errors.back() ==
              doctest::Approx(explicit_err).epsilon(1e-6).scale(y.values().norm()));
    }
}

TEST_CASE("per-step block updates never increase the fit error") {
    std::mt19937_64 rng(37);
    for (int rep = 0; rep < 5; ++rep) {
        const DenseTensor y = oracles::random_tensor({2, 3, 2, 2, 2}, rng);
        Mera5Network net = init_network({2, 3, 2, 2, 2}, 2, 50 + rep);
        double err = fit(y, net);
        for (int sweep = 0; sweep < 3; ++sweep) {
            net = update_disentangler(y, net);
            double next = fit(y, net);
            CHECK(next <= err + 1e-12);
            err = next;
            net = update_isometry(y, net, 1);
            next = fit(y, net);
            CHECK(next <= err + 1e-12);
            err = next;
            net = update_isometry(y, net, 2);
            next = fit(y, net);
            CHECK(next <= err + 1e-12);
            err = next;
            net = update_top_core(y, net);
            next = fit(y, net);
            CHECK(next <= err + 1e-12);
            err = next;
            CHECK(network_orth_defect(net) <= 1e-10);
        }
    }
}

TEST_CASE("approximate is deterministic and validates its inputs") {
    std::mt19937_64 rng(41);
    const DenseTensor y = oracles::random_tensor({2, 2, 2, 2, 2}, rng);
    MeraConfig cfg;
    cfg.rank = 2;
    cfg.sweeps = 4;
    cfg.seed = 9;
    const MeraResult a = approximate(y, cfg);
    const MeraResult b = approximate(y, cfg);
    CHECK((a.reconstruction.values() - b.reconstruction.values()).cwiseAbs().maxCoeff() == 0.0);

    MeraConfig bad = cfg;
    bad.rank = 100;
    CHECK_THROWS_AS(approximate(y, bad), std::invalid_argument);
    CHECK_THROWS_AS(approximate(oracles::random_tensor({2, 2, 2}, rng), cfg),
                    std::invalid_argument);

    MeraConfig mismatched = cfg;
    mismatched.warm_start = init_network({2, 2, 2, 2, 3}, 2, 0);
    CHECK_THROWS_AS(approximate(y, mismatched), std::invalid_argument);
}

TEST_CASE("spectral_init_network is exact at full split rank") {
    std::mt19937_64 rng(47);
    const DenseTensor y = oracles::random_tensor({2, 2, 3, 2, 2}, rng);
    const Index full = 4;  // I1*I2
    const Mera5Network net = spectral_init_network(y, full);
    CHECK(network_orth_defect(net) <= 1e-10);
    CHECK(fit(y, net) <= 1e-10 * y.values().norm());

    MeraConfig cfg;
    cfg.rank = full;
    cfg.sweeps = 2;
    cfg.warm_start = net;
    const MeraResult res = approximate(y, cfg);
    CHECK((y.values() - res.reconstruction.values()).norm() <= 1e-10 * y.values().norm());
}
