#include "meraclust/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "meraclust/anchor.hpp"
#include "meraclust/dataset_io.hpp"
#include "meraclust/mera.hpp"
#include "meraclust/metrics.hpp"
#include "meraclust/msc.hpp"
#include "meraclust/report.hpp"
#include "meraclust/synth.hpp"

namespace meraclust::io {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<tensor::Index> parse_index_list(const std::string& csv, const char* what) {
    std::vector<tensor::Index> out;
    std::string cur;
    for (char ch : csv + ",") {
        if (ch == ',') {
            if (cur.empty()) continue;
            try {
                out.push_back(static_cast<tensor::Index>(std::stoll(cur)));
            } catch (const std::exception&) {
                throw CLI::ValidationError(std::string(what) + ": bad integer '" + cur + "'");
            }
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (out.empty()) throw CLI::ValidationError(std::string(what) + ": empty list");
    return out;
}

void print_metrics(const metrics::MetricsReport& m) {
    std::printf("F-score   %.4f\n", m.fscore);
    std::printf("Precision %.4f\n", m.precision);
    std::printf("Recall    %.4f\n", m.recall);
    std::printf("NMI       %.4f\n", m.nmi);
    std::printf("ARI       %.4f\n", m.ari);
    std::printf("ACC       %.4f\n", m.acc);
}

struct ClusterArgs {
    std::string data;
    std::string out;
    std::string split;
    std::int64_t rank = 4;
    std::int64_t anchors = 0;  // 0 means plain MERA-MSC
    double lambda = 0.01;
    double epsilon = 1e-6;
    int max_iters = 50;
    int mera_sweeps = 10;
    std::uint64_t seed = 0;
    bool cold_start = false;
    int clusters = 0;
};

void add_common_cluster_flags(CLI::App* cmd, ClusterArgs& args) {
    cmd->add_option("--data", args.data, "dataset directory or manifest file")->required();
    cmd->add_option("--rank", args.rank, "MERA rank R");
    cmd->add_option("--lambda", args.lambda, "noise trade-off weight");
    cmd->add_option("--max-iters", args.max_iters, "ADMM iteration cap");
    cmd->add_option("--epsilon", args.epsilon, "stopping tolerance on RE and ME");
    cmd->add_option("--mera-sweeps", args.mera_sweeps, "ALS sweeps per MERA call");
    cmd->add_option("--seed", args.seed, "random seed");
    cmd->add_option("--clusters", args.clusters, "override the manifest cluster count");
    cmd->add_option("--out", args.out, "report output path");
    cmd->add_flag("--cold-start", args.cold_start,
                  "re-randomize MERA factors every iteration instead of warm starting");
}

RunReport report_from_solve(const ClusterArgs& args, const msc::MultiViewDataset& data,
                            const std::vector<int>& labels,
                            const std::vector<msc::ResidualPoint>& trace, bool converged,
                            int iterations, double solve_seconds) {
    RunReport rep;
    rep.config.emplace_back("data", args.data);
    rep.config.emplace_back("rank", std::to_string(args.rank));
    rep.config.emplace_back("lambda", fmt_double(args.lambda));
    rep.config.emplace_back("max_iters", std::to_string(args.max_iters));
    rep.config.emplace_back("mera_sweeps", std::to_string(args.mera_sweeps));
    rep.config.emplace_back("seed", std::to_string(args.seed));
    if (args.anchors > 0) rep.config.emplace_back("anchors", std::to_string(args.anchors));
    if (!args.split.empty()) rep.config.emplace_back("split", args.split);
    rep.converged = converged;
    rep.iterations = iterations;
    for (const auto& p : trace) {
        rep.trace_re.push_back(p.re);
        rep.trace_me.push_back(p.me);
        rep.iteration_seconds.push_back(p.seconds);
    }
    rep.timings.emplace_back("solve_s", solve_seconds);
    rep.labels = labels;
    if (data.labels) rep.metric_values = metrics::evaluate(*data.labels, labels);
    return rep;
}

int cmd_cluster(const ClusterArgs& args) {
    msc::MultiViewDataset data = load_dataset(args.data);
    if (args.clusters > 0) data.num_clusters = args.clusters;

    msc::MscConfig cfg;
    cfg.rank = args.rank;
    cfg.lambda = args.lambda;
    cfg.max_iters = args.max_iters;
    cfg.epsilon = args.epsilon;
    cfg.mera_sweeps = args.mera_sweeps;
    cfg.seed = args.seed;
    cfg.mera_cold_start = args.cold_start;
    if (!args.split.empty()) {
        const auto parts = parse_index_list(args.split, "--split");
        if (parts.size() != 2) throw CLI::ValidationError("--split expects A,Q");
        cfg.split_override = std::make_pair(parts[0], parts[1]);
    }

    const auto t0 = clock_type::now();
    const msc::MscOutput out = msc::solve(data, cfg);
    const double secs = seconds_since(t0);

    RunReport rep = report_from_solve(args, data, out.labels, out.residual_trace, out.converged,
                                      out.iterations, secs);
    rep.command = "cluster";
    std::printf("cluster: %d iterations, %s, %.2fs\n", out.iterations,
                out.converged ? "converged" : "iteration cap reached", secs);
    if (rep.metric_values) print_metrics(*rep.metric_values);
    if (!args.out.empty()) save_report(rep, args.out);
    return 0;
}

int cmd_anchor(const ClusterArgs& args) {
    msc::MultiViewDataset data = load_dataset(args.data);
    if (args.clusters > 0) data.num_clusters = args.clusters;

    anchor::AnchorConfig cfg;
    cfg.num_anchors = args.anchors;
    cfg.rank = args.rank;
    cfg.lambda = args.lambda;
    cfg.max_iters = args.max_iters;
    cfg.epsilon = args.epsilon;
    cfg.mera_sweeps = args.mera_sweeps;
    cfg.seed = args.seed;
    cfg.mera_cold_start = args.cold_start;

    const auto t0 = clock_type::now();
    const anchor::AnchorOutput out = anchor::solve_anchor(data, cfg);
    const double secs = seconds_since(t0);

    RunReport rep = report_from_solve(args, data, out.labels, out.residual_trace, out.converged,
                                      out.iterations, secs);
    rep.command = "anchor";
    std::printf("anchor: %d iterations, %s, %.2fs\n", out.iterations,
                out.converged ? "converged" : "iteration cap reached", secs);
    if (rep.metric_values) print_metrics(*rep.metric_values);
    if (!args.out.empty()) save_report(rep, args.out);
    return 0;
}

struct CompressArgs {
    std::string input;
    std::string shape;
    std::string out;
    std::string init = "random";
    std::int64_t rank = 1;
    int sweeps = 10;
    std::uint64_t seed = 0;
};

int cmd_compress(const CompressArgs& args) {
    const Eigen::MatrixXd raw = load_matrix(args.input);
    const auto dims = parse_index_list(args.shape, "--shape");
    if (dims.size() != 5) throw CLI::ValidationError("--shape expects five dimensions");
    const tensor::DenseTensor y(
        tensor::Shape(dims.begin(), dims.end()),
        Eigen::VectorXd::Map(raw.data(), raw.size()));

    mera::MeraConfig cfg;
    cfg.rank = args.rank;
    cfg.sweeps = args.sweeps;
    cfg.seed = args.seed;
    if (args.init == "svd") cfg.warm_start = mera::spectral_init_network(y, args.rank);
    else if (args.init != "random") throw CLI::ValidationError("--init must be random or svd");

    const auto t0 = clock_type::now();
    const mera::MeraResult result = mera::approximate(y, cfg);
    const double secs = seconds_since(t0);

    const double ynorm = y.values().norm();
    const double err = (y.values() - result.reconstruction.values()).norm();
    const double rel = ynorm > 0.0 ? err / ynorm : 0.0;
    const double peak = tensor::norms(y).max_abs;
    const double mse = err * err / static_cast<double>(y.size());
    const double psnr = mse > 0.0 ? 10.0 * std::log10(peak * peak / mse)
                                  : std::numeric_limits<double>::infinity();
    const auto& net = result.network;
    const double params = static_cast<double>(net.u1.size() + net.w1.size() + net.w2.size() +
                                              net.b.size());
    const double ratio = static_cast<double>(y.size()) / params;

    std::printf("compress: relative error %.6e, PSNR %.2f dB, compression ratio %.3f, %.2fs\n",
                rel, psnr, ratio, secs);

    if (!args.out.empty()) {
        RunReport rep;
        rep.command = "compress";
        rep.config.emplace_back("input", args.input);
        rep.config.emplace_back("shape", args.shape);
        rep.config.emplace_back("rank", std::to_string(args.rank));
        rep.config.emplace_back("sweeps", std::to_string(args.sweeps));
        rep.config.emplace_back("seed", std::to_string(args.seed));
        rep.config.emplace_back("init", args.init);
        rep.iterations = args.sweeps;
        rep.converged = true;
        rep.trace_re = result.trace.fit_errors;
        rep.timings.emplace_back("approximate_s", secs);
        rep.timings.emplace_back("relative_error", rel);
        rep.timings.emplace_back("psnr_db", psnr);
        rep.timings.emplace_back("compression_ratio", ratio);
        save_report(rep, args.out);
    }
    return 0;
}

struct EvalArgs {
    std::string truth;
    std::string pred;
    std::string out;
};

int cmd_eval(const EvalArgs& args) {
    const std::vector<int> truth = load_labels(args.truth);
    const std::vector<int> pred = load_labels(args.pred);
    const metrics::MetricsReport m = metrics::evaluate(truth, pred);
    print_metrics(m);
    if (!args.out.empty()) {
        RunReport rep;
        rep.command = "eval";
        rep.config.emplace_back("truth", args.truth);
        rep.config.emplace_back("pred", args.pred);
        rep.metric_values = m;
        rep.labels = pred;
        save_report(rep, args.out);
    }
    return 0;
}

struct SynthArgs {
    std::string out;
    std::string dims = "30,25,40";
    int clusters = 3;
    int per_cluster = 20;
    int subspace_dim = 3;
    double noise = 0.0;
    std::uint64_t seed = 0;
};

int cmd_synth(const SynthArgs& args) {
    const auto dims = parse_index_list(args.dims, "--dims");
    const msc::MultiViewDataset data = synth_multiview(
        args.clusters, args.per_cluster, args.subspace_dim, dims, args.noise, args.seed);
    save_dataset(data, args.out);
    std::printf("synth: wrote %lld samples, %lld views, %d clusters to %s\n",
                static_cast<long long>(data.num_samples()),
                static_cast<long long>(data.num_views()), data.num_clusters, args.out.c_str());
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Low-rank MERA toolkit: tensor approximation and multi-view clustering"};
    app.require_subcommand(1);

    ClusterArgs cluster_args;
    CLI::App* cluster = app.add_subcommand("cluster", "multi-view subspace clustering");
    add_common_cluster_flags(cluster, cluster_args);
    cluster->add_option("--split", cluster_args.split, "override the A,Q sample reshape");

    ClusterArgs anchor_args;
    CLI::App* anchor_cmd = app.add_subcommand("anchor", "scalable anchor-graph clustering");
    add_common_cluster_flags(anchor_cmd, anchor_args);
    anchor_cmd->add_option("--anchors", anchor_args.anchors, "anchor count M")->required();

    CompressArgs compress_args;
    CLI::App* compress = app.add_subcommand("compress", "low-rank MERA tensor approximation");
    compress->add_option("--input", compress_args.input, "matrix file (MVTD or CSV)")->required();
    compress->add_option("--shape", compress_args.shape, "five comma-separated leg dims")
        ->required();
    compress->add_option("--rank", compress_args.rank, "MERA rank R")->required();
    compress->add_option("--sweeps", compress_args.sweeps, "ALS sweeps");
    compress->add_option("--seed", compress_args.seed, "random seed");
    compress->add_option("--init", compress_args.init, "factor initialization: random or svd");
    compress->add_option("--out", compress_args.out, "report output path");

    EvalArgs eval_args;
    CLI::App* eval = app.add_subcommand("eval", "score predicted labels against ground truth");
    eval->add_option("--truth", eval_args.truth, "ground-truth label file")->required();
    eval->add_option("--pred", eval_args.pred, "predicted label file")->required();
    eval->add_option("--out", eval_args.out, "report output path");

    SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic multi-view dataset");
    synth->add_option("--out", synth_args.out, "output directory")->required();
    synth->add_option("--clusters", synth_args.clusters, "cluster count");
    synth->add_option("--per-cluster", synth_args.per_cluster, "samples per cluster");
    synth->add_option("--subspace-dim", synth_args.subspace_dim, "per-cluster subspace dimension");
    synth->add_option("--dims", synth_args.dims, "comma-separated ambient dims, one per view");
    synth->add_option("--noise", synth_args.noise, "Gaussian noise sigma");
    synth->add_option("--seed", synth_args.seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cluster->parsed()) return cmd_cluster(cluster_args);
        if (anchor_cmd->parsed()) return cmd_anchor(anchor_args);
        if (compress->parsed()) return cmd_compress(compress_args);
        if (eval->parsed()) return cmd_eval(eval_args);
        if (synth->parsed()) return cmd_synth(synth_args);
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}

}  // namespace meraclust::io
