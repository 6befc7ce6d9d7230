#include <doctest.h>

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "meraclust/cli.hpp"
#include "meraclust/dataset_io.hpp"
#include "meraclust/report.hpp"
#include "meraclust/synth.hpp"
#include "support/oracles.hpp"

using namespace meraclust;
using namespace meraclust::io;

namespace fs = std::filesystem;

namespace {

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"meraclust"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("meraclust_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("usage errors exit with status 2") {
    CHECK(run({}) == 2);
    CHECK(run({"frobnicate"}) == 2);
    CHECK(run({"cluster"}) == 2);                       // missing --data
    CHECK(run({"eval", "--truth", "x"}) == 2);          // missing --pred
    CHECK(run({"cluster", "--data", "x", "--bogus"}) == 2);
}

TEST_CASE("missing input files exit with status 1") {
    CHECK(run({"eval", "--truth", "/nonexistent/a", "--pred", "/nonexistent/b"}) == 1);
    CHECK(run({"cluster", "--data", "/nonexistent/ds"}) == 1);
}

TEST_CASE("eval on identical label files reports perfect metrics") {
    TempDir tmp;
    save_labels({0, 0, 1, 1, 2, 2}, tmp.path / "labels.txt");
    const fs::path out = tmp.path / "report.txt";
    CHECK(run({"eval", "--truth", (tmp.path / "labels.txt").string(), "--pred",
               (tmp.path / "labels.txt").string(), "--out", out.string()}) == 0);
    const RunReport rep = load_report(out);
    REQUIRE(rep.metric_values.has_value());
    CHECK(rep.metric_values->acc == doctest::Approx(1.0));
    CHECK(rep.metric_values->nmi == doctest::Approx(1.0));
    CHECK(rep.metric_values->ari == doctest::Approx(1.0));
    CHECK(rep.metric_values->fscore == doctest::Approx(1.0));
}

TEST_CASE("synth then cluster produces a full report") {
    TempDir tmp;
    const fs::path ds = tmp.path / "ds";
    CHECK(run({"synth", "--out", ds.string(), "--clusters", "3", "--per-cluster", "12",
               "--subspace-dim", "3", "--dims", "20,24", "--noise", "0.0", "--seed", "5"}) == 0);
    const fs::path out = tmp.path / "report.txt";
    CHECK(run({"cluster", "--data", ds.string(), "--rank", "4", "--lambda", "0.01",
               "--max-iters", "40", "--seed", "1", "--out", out.string()}) == 0);
    const RunReport rep = load_report(out);
    CHECK(rep.command == "cluster");
    REQUIRE(rep.metric_values.has_value());
    CHECK(rep.metric_values->acc == doctest::Approx(1.0));
    CHECK(rep.trace_re.size() == rep.trace_me.size());
    CHECK(rep.trace_re.size() >= 1);
    CHECK(rep.labels.size() == 36);

    // Re-running with the same seed reproduces labels and metrics bit-for-bit.
    const fs::path out2 = tmp.path / "report2.txt";
    CHECK(run({"cluster", "--data", ds.string(), "--rank", "4", "--lambda", "0.01",
               "--max-iters", "40", "--seed", "1", "--out", out2.string()}) == 0);
    const RunReport rep2 = load_report(out2);
    CHECK(rep2.labels == rep.labels);
    CHECK(rep2.metric_values->acc == rep.metric_values->acc);
    CHECK(rep2.metric_values->nmi == rep.metric_values->nmi);
    CHECK(rep2.trace_re == rep.trace_re);
}

TEST_CASE("anchor subcommand runs end to end") {
    TempDir tmp;
    const fs::path ds = tmp.path / "ds";
    save_dataset(oracles::planted_clusters_dataset(3, 40, {16, 18}, 0.15, 7), ds);
    const fs::path out = tmp.path / "report.txt";
    CHECK(run({"anchor", "--data", ds.string(), "--anchors", "9", "--rank", "2", "--lambda",
               "0.05", "--seed", "3", "--out", out.string()}) == 0);
    const RunReport rep = load_report(out);
    CHECK(rep.command == "anchor");
    CHECK(rep.labels.size() == 120);
    REQUIRE(rep.metric_values.has_value());
    CHECK(rep.metric_values->acc >= 0.95);
}

TEST_CASE("compress at full split rank with the svd warm start is exact") {
    TempDir tmp;
    std::mt19937_64 rng(9);
    Eigen::MatrixXd m(4 * 5 * 5, 4 * 3);
    std::normal_distribution<double> dist;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = dist(rng);
    save_matrix_mvtd(m, tmp.path / "t.mvtd");

    const fs::path out = tmp.path / "report.txt";
    CHECK(run({"compress", "--input", (tmp.path / "t.mvtd").string(), "--shape", "4,5,5,4,3",
               "--rank", "20", "--init", "svd", "--out", out.string()}) == 0);
    const RunReport rep = load_report(out);
    CHECK(rep.command == "compress");
    double reported_rel = -1.0;
    for (const auto& [k, v] : rep.timings)
        if (k == "relative_error") reported_rel = v;
    CHECK(reported_rel >= 0.0);
    CHECK(reported_rel <= 1e-6);

    CHECK(run({"compress", "--input", (tmp.path / "t.mvtd").string(), "--shape", "4,5,5,4",
               "--rank", "4"}) == 2);  // shape must have five dims
}
