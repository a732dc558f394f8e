#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace wclt::cli {

// 17 significant digits: round-trip exact for IEEE doubles.
std::string format_double(double v);

std::string read_file(const std::filesystem::path& path);

// Writes to a temporary sibling and renames, so readers never observe a
// partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::uint64_t fnv1a64(const std::string& data);
std::string fnv1a64_hex(const std::string& data);

// Numeric CSV without header; every row must have the same arity.
Eigen::MatrixXd read_csv_matrix(const std::filesystem::path& path);
Eigen::VectorXd read_csv_vector(const std::filesystem::path& path);

} // namespace wclt::cli
