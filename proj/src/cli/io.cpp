#include "cli/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "wclt/errors.hpp"

namespace wclt::cli {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write file: " + path.string());
        out << content;
        if (!out) throw ConfigError("write failed: " + path.string());
    }
    std::filesystem::rename(tmp, path);
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string fnv1a64_hex(const std::string& data) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(data)));
    return buf;
}

namespace {

std::vector<std::vector<double>> read_csv_rows(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read CSV file: " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError("non-numeric CSV cell in " + path.string());
            }
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ConfigError("empty CSV file: " + path.string());
    for (const auto& r : rows) {
        if (r.size() != rows.front().size()) {
            throw ConfigError("ragged CSV file: " + path.string());
        }
    }
    return rows;
}

} // namespace

Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path) {
    const auto rows = read_csv_rows(path);
    Eigen::MatrixXd m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return m;
}

Eigen::VectorXd read_csv_vector(const std::filesystem::path& path) {
    const auto rows = read_csv_rows(path);
    std::vector<double> flat;
    for (const auto& r : rows) {
        for (double v : r) flat.push_back(v);
    }
    Eigen::VectorXd out(flat.size());
    for (std::size_t i = 0; i < flat.size(); ++i) out(static_cast<Eigen::Index>(i)) = flat[i];
    return out;
}

} // namespace wclt::cli
