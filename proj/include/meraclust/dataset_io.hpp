#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "meraclust/msc.hpp"

namespace meraclust::io {

// Plain-text key=value manifest describing a multi-view dataset on disk.
struct DatasetManifest {
    std::int64_t n_samples = 0;
    std::int64_t n_views = 0;
    std::int64_t n_clusters = 0;
    std::vector<std::string> view_files;
    std::vector<std::int64_t> view_dims;
    std::string labels_file;  // empty when no ground truth is stored
};

// Single-matrix container format "MVTD": magic, version byte, little-endian
// uint64 row and column counts, then float64 values in column-major order.
void save_matrix_mvtd(const Eigen::MatrixXd& m, const std::filesystem::path& path);
Eigen::MatrixXd load_matrix_mvtd(const std::filesystem::path& path);

void save_matrix_csv(const Eigen::MatrixXd& m, const std::filesystem::path& path);
Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& path);

// Dispatches on extension: .csv reads as text, everything else as MVTD.
Eigen::MatrixXd load_matrix(const std::filesystem::path& path);

std::vector<int> load_labels(const std::filesystem::path& path);
void save_labels(const std::vector<int>& labels, const std::filesystem::path& path);

DatasetManifest load_manifest(const std::filesystem::path& path);

// `path` may be the manifest file or a directory containing manifest.txt.
msc::MultiViewDataset load_dataset(const std::filesystem::path& path);

// Writes manifest.txt, view_<i>.mvtd and labels.txt (when present) into `dir`.
void save_dataset(const msc::MultiViewDataset& data, const std::filesystem::path& dir);

// Writes through a temporary file in the same directory plus an atomic rename.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

}  // namespace meraclust::io
