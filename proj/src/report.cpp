#include "meraclust/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "meraclust/dataset_io.hpp"

namespace meraclust::io {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_array(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out.push_back(' ');
        out += fmt(v[i]);
    }
    out.push_back(']');
    return out;
}

std::string fmt_array(const std::vector<int>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out.push_back(' ');
        out += std::to_string(v[i]);
    }
    out.push_back(']');
    return out;
}

std::vector<double> parse_double_array(const std::string& s) {
    if (s.size() < 2 || s.front() != '[' || s.back() != ']')
        throw std::runtime_error("report: malformed array '" + s + "'");
    std::vector<double> out;
    std::istringstream in(s.substr(1, s.size() - 2));
    double v;
    while (in >> v) out.push_back(v);
    return out;
}

std::vector<int> parse_int_array(const std::string& s) {
    if (s.size() < 2 || s.front() != '[' || s.back() != ']')
        throw std::runtime_error("report: malformed array '" + s + "'");
    std::vector<int> out;
    std::istringstream in(s.substr(1, s.size() - 2));
    int v;
    while (in >> v) out.push_back(v);
    return out;
}

}  // namespace

std::string serialize_report(const RunReport& r) {
    std::string out;
    out += "meraclust.report.version=1\n";
    out += "command=" + r.command + "\n";
    for (const auto& [k, v] : r.config) out += "config." + k + "=" + v + "\n";
    out += "converged=" + std::string(r.converged ? "true" : "false") + "\n";
    out += "iterations=" + std::to_string(r.iterations) + "\n";
    if (r.metric_values) {
        const auto& m = *r.metric_values;
        out += "metrics.fscore=" + fmt(m.fscore) + "\n";
        out += "metrics.precision=" + fmt(m.precision) + "\n";
        out += "metrics.recall=" + fmt(m.recall) + "\n";
        out += "metrics.nmi=" + fmt(m.nmi) + "\n";
        out += "metrics.ari=" + fmt(m.ari) + "\n";
        out += "metrics.acc=" + fmt(m.acc) + "\n";
    }
    for (const auto& [k, v] : r.timings) out += "timings." + k + "=" + fmt(v) + "\n";
    if (!r.trace_re.empty()) out += "trace.re=" + fmt_array(r.trace_re) + "\n";
    if (!r.trace_me.empty()) out += "trace.me=" + fmt_array(r.trace_me) + "\n";
    if (!r.iteration_seconds.empty())
        out += "trace.seconds=" + fmt_array(r.iteration_seconds) + "\n";
    if (!r.labels.empty()) out += "labels=" + fmt_array(r.labels) + "\n";
    return out;
}

RunReport parse_report(const std::string& text) {
    RunReport r;
    std::istringstream in(text);
    std::string line;
    metrics::MetricsReport m;
    bool have_metrics = false;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error("report: expected key=value");
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "meraclust.report.version") {
            if (value != "1") throw std::runtime_error("report: unsupported version " + value);
        } else if (key == "command") {
            r.command = value;
        } else if (key.starts_with("config.")) {
            r.config.emplace_back(key.substr(7), value);
        } else if (key == "converged") {
            r.converged = value == "true";
        } else if (key == "iterations") {
            r.iterations = std::stoi(value);
        } else if (key.starts_with("metrics.")) {
            have_metrics = true;
            const std::string name = key.substr(8);
            const double v = std::stod(value);
            if (name == "fscore") m.fscore = v;
            else if (name == "precision") m.precision = v;
            else if (name == "recall") m.recall = v;
            else if (name == "nmi") m.nmi = v;
            else if (name == "ari") m.ari = v;
            else if (name == "acc") m.acc = v;
            else throw std::runtime_error("report: unknown metric '" + name + "'");
        } else if (key.starts_with("timings.")) {
            r.timings.emplace_back(key.substr(8), std::stod(value));
        } else if (key == "trace.re") {
            r.trace_re = parse_double_array(value);
        } else if (key == "trace.me") {
            r.trace_me = parse_double_array(value);
        } else if (key == "trace.seconds") {
            r.iteration_seconds = parse_double_array(value);
        } else if (key == "labels") {
            r.labels = parse_int_array(value);
        } else {
            throw std::runtime_error("report: unknown key '" + key + "'");
        }
    }
    if (have_metrics) r.metric_values = m;
    return r;
}

void save_report(const RunReport& report, const std::filesystem::path& path) {
    atomic_write(path, serialize_report(report));
}

RunReport load_report(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open report '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_report(ss.str());
}

}  // namespace meraclust::io
