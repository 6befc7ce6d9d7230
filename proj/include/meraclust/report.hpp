#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "meraclust/metrics.hpp"

namespace meraclust::io {

// Structured-text run record: configuration echo, optional metrics, residual
// traces, per-phase timings and predicted labels. Serializes losslessly
// (doubles keep full precision) and save -> load -> save is byte-identical.
struct RunReport {
    std::string command;
    std::vector<std::pair<std::string, std::string>> config;
    std::optional<metrics::MetricsReport> metric_values;
    std::vector<double> trace_re;
    std::vector<double> trace_me;
    std::vector<double> iteration_seconds;
    std::vector<std::pair<std::string, double>> timings;
    std::vector<int> labels;
    bool converged = false;
    int iterations = 0;
};

std::string serialize_report(const RunReport& report);
RunReport parse_report(const std::string& text);

void save_report(const RunReport& report, const std::filesystem::path& path);
RunReport load_report(const std::filesystem::path& path);

}  // namespace meraclust::io
