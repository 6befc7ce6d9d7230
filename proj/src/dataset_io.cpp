#include "meraclust/dataset_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace meraclust::io {

namespace fs = std::filesystem;

static_assert(std::endian::native == std::endian::little,
              "MVTD serialization assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'M', 'V', 'T', 'D'};
constexpr std::uint8_t kVersion = 1;

[[noreturn]] void load_fail(const fs::path& path, const std::string& what) {
    throw std::runtime_error("failed to load '" + path.string() + "': " + what);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) load_fail(path, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void check_finite(const Eigen::MatrixXd& m, const fs::path& path) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (!std::isfinite(m(i, j)))
                load_fail(path, "non-finite value at row " + std::to_string(i) + ", column " +
                                    std::to_string(j));
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void atomic_write(const fs::path& path, const std::string& contents) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

void save_matrix_mvtd(const Eigen::MatrixXd& m, const fs::path& path) {
    std::string buf;
    buf.reserve(13 + static_cast<std::size_t>(m.size()) * sizeof(double));
    buf.append(kMagic, 4);
    buf.push_back(static_cast<char>(kVersion));
    const std::uint64_t rows = static_cast<std::uint64_t>(m.rows());
    const std::uint64_t cols = static_cast<std::uint64_t>(m.cols());
    buf.append(reinterpret_cast<const char*>(&rows), sizeof rows);
    buf.append(reinterpret_cast<const char*>(&cols), sizeof cols);
    buf.append(reinterpret_cast<const char*>(m.data()),
               static_cast<std::size_t>(m.size()) * sizeof(double));
    atomic_write(path, buf);
}

Eigen::MatrixXd load_matrix_mvtd(const fs::path& path) {
    const std::string buf = read_file(path);
    if (buf.size() < 21) load_fail(path, "truncated header");
    if (std::memcmp(buf.data(), kMagic, 4) != 0) load_fail(path, "bad magic bytes");
    if (static_cast<std::uint8_t>(buf[4]) != kVersion)
        load_fail(path, "unsupported format version " + std::to_string(buf[4]));
    std::uint64_t rows = 0, cols = 0;
    std::memcpy(&rows, buf.data() + 5, sizeof rows);
    std::memcpy(&cols, buf.data() + 13, sizeof cols);
    const std::size_t expect = 21 + rows * cols * sizeof(double);
    if (buf.size() != expect)
        load_fail(path, "size mismatch: expected " + std::to_string(expect) + " bytes, got " +
                            std::to_string(buf.size()));
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    std::memcpy(m.data(), buf.data() + 21, rows * cols * sizeof(double));
    check_finite(m, path);
    return m;
}

void save_matrix_csv(const Eigen::MatrixXd& m, const fs::path& path) {
    std::string buf;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) buf.push_back(',');
            buf += format_double(m(i, j));
        }
        buf.push_back('\n');
    }
    atomic_write(path, buf);
}

Eigen::MatrixXd load_matrix_csv(const fs::path& path) {
    const std::string buf = read_file(path);
    std::vector<std::vector<double>> rows;
    std::istringstream in(buf);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                load_fail(path, "unparsable value '" + cell + "' at row " +
                                    std::to_string(rows.size()));
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            load_fail(path, "ragged row " + std::to_string(rows.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) load_fail(path, "empty CSV");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    check_finite(m, path);
    return m;
}

Eigen::MatrixXd load_matrix(const fs::path& path) {
    if (path.extension() == ".csv") return load_matrix_csv(path);
    return load_matrix_mvtd(path);
}

std::vector<int> load_labels(const fs::path& path) {
    const std::string buf = read_file(path);
    std::istringstream in(buf);
    std::string line;
    std::vector<int> labels;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            labels.push_back(std::stoi(line));
        } catch (const std::exception&) {
            load_fail(path, "unparsable label at line " + std::to_string(lineno));
        }
    }
    if (labels.empty()) load_fail(path, "no labels found");
    return labels;
}

void save_labels(const std::vector<int>& labels, const fs::path& path) {
    std::string buf;
    for (int l : labels) {
        buf += std::to_string(l);
        buf.push_back('\n');
    }
    atomic_write(path, buf);
}

DatasetManifest load_manifest(const fs::path& path) {
    const std::string buf = read_file(path);
    DatasetManifest man;
    std::istringstream in(buf);
    std::string line;
    std::size_t lineno = 0;
    auto parse_count = [&](const std::string& value) {
        try {
            return static_cast<std::int64_t>(std::stoll(value));
        } catch (const std::exception&) {
            load_fail(path, "bad integer '" + value + "' at line " + std::to_string(lineno));
        }
    };
    std::vector<std::pair<std::int64_t, std::string>> files;
    std::vector<std::pair<std::int64_t, std::int64_t>> dims;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            load_fail(path, "expected key=value at line " + std::to_string(lineno));
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "n_samples") man.n_samples = parse_count(value);
        else if (key == "n_views") man.n_views = parse_count(value);
        else if (key == "n_clusters") man.n_clusters = parse_count(value);
        else if (key == "labels.file") man.labels_file = value;
        else if (key.starts_with("view.") && key.ends_with(".file"))
            files.emplace_back(parse_count(key.substr(5, key.size() - 10)), value);
        else if (key.starts_with("view.") && key.ends_with(".dim"))
            dims.emplace_back(parse_count(key.substr(5, key.size() - 9)), parse_count(value));
        else
            load_fail(path, "unknown key '" + key + "' at line " + std::to_string(lineno));
    }
    if (man.n_views <= 0) load_fail(path, "n_views missing or not positive");
    if (man.n_samples <= 0) load_fail(path, "n_samples missing or not positive");
    man.view_files.resize(static_cast<std::size_t>(man.n_views));
    man.view_dims.assign(static_cast<std::size_t>(man.n_views), 0);
    for (auto& [idx, file] : files) {
        if (idx < 0 || idx >= man.n_views) load_fail(path, "view index out of range");
        man.view_files[static_cast<std::size_t>(idx)] = file;
    }
    for (auto& [idx, dim] : dims) {
        if (idx < 0 || idx >= man.n_views) load_fail(path, "view index out of range");
        man.view_dims[static_cast<std::size_t>(idx)] = dim;
    }
    for (std::size_t v = 0; v < man.view_files.size(); ++v)
        if (man.view_files[v].empty())
            load_fail(path, "missing view." + std::to_string(v) + ".file entry");
    return man;
}

msc::MultiViewDataset load_dataset(const fs::path& path) {
    fs::path manifest_path = path;
    if (fs::is_directory(path)) manifest_path = path / "manifest.txt";
    const DatasetManifest man = load_manifest(manifest_path);
    const fs::path base = manifest_path.parent_path();

    msc::MultiViewDataset data;
    data.num_clusters = static_cast<int>(man.n_clusters);
    for (std::size_t v = 0; v < man.view_files.size(); ++v) {
        const fs::path file = base / man.view_files[v];
        Eigen::MatrixXd m = load_matrix(file);
        if (m.cols() != man.n_samples)
            load_fail(file, "manifest declares " + std::to_string(man.n_samples) +
                                " samples but matrix has " + std::to_string(m.cols()) +
                                " columns");
        if (man.view_dims[v] > 0 && m.rows() != man.view_dims[v])
            load_fail(file, "manifest declares dim " + std::to_string(man.view_dims[v]) +
                                " but matrix has " + std::to_string(m.rows()) + " rows");
        data.views.push_back(std::move(m));
    }
    if (!man.labels_file.empty()) {
        const fs::path file = base / man.labels_file;
        std::vector<int> labels = load_labels(file);
        if (static_cast<std::int64_t>(labels.size()) != man.n_samples)
            load_fail(file, "expected " + std::to_string(man.n_samples) + " labels, got " +
                                std::to_string(labels.size()));
        data.labels = std::move(labels);
    }
    data.validate();
    return data;
}

void save_dataset(const msc::MultiViewDataset& data, const fs::path& dir) {
    data.validate();
    fs::create_directories(dir);
    std::string manifest;
    manifest += "n_samples=" + std::to_string(data.num_samples()) + "\n";
    manifest += "n_views=" + std::to_string(data.num_views()) + "\n";
    manifest += "n_clusters=" + std::to_string(data.num_clusters) + "\n";
    for (std::size_t v = 0; v < data.views.size(); ++v) {
        const std::string name = "view_" + std::to_string(v) + ".mvtd";
        save_matrix_mvtd(data.views[v], dir / name);
        manifest += "view." + std::to_string(v) + ".file=" + name + "\n";
        manifest += "view." + std::to_string(v) +
                    ".dim=" + std::to_string(data.views[v].rows()) + "\n";
    }
    if (data.labels) {
        save_labels(*data.labels, dir / "labels.txt");
        manifest += "labels.file=labels.txt\n";
    }
    atomic_write(dir / "manifest.txt", manifest);
}

}  // namespace meraclust::io
