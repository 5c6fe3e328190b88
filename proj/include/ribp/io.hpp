#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "ribp/feature_matrix.hpp"
#include "ribp/linear_gaussian.hpp"
#include "ribp/restricting.hpp"
#include "ribp/samplers.hpp"

namespace ribp::io {

/// First line of every CSV written here. Readers accept files without it
/// (external data) and reject any other version.
inline constexpr int kCsvVersion = 1;
inline constexpr std::string_view kCsvVersionTag = "# ribp-csv-version:";

/// Shortest text that parses back to the same double.
std::string format_double(double v);

/// Numeric CSV with a header row of column names. Throws DataError on I/O
/// failure.
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                  std::string_view column_prefix);
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);

void write_binary(const std::filesystem::path& path, const FeatureMatrix& z);
FeatureMatrix read_binary(const std::filesystem::path& path);

/// Held-out entries as `row,col` pairs.
void write_mask(const std::filesystem::path& path, const HoldoutMask& mask);
HoldoutMask read_mask(const std::filesystem::path& path, Eigen::Index rows, Eigen::Index cols);

void write_labels(const std::filesystem::path& path, const std::vector<int>& labels);
std::vector<int> read_labels(const std::filesystem::path& path);

/// Long-format CSV with the given header; rows are written verbatim.
void write_table(const std::filesystem::path& path, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);

/// Per-row restricting distributions, either a JSON object with a "per_row"
/// array of spec strings, a bare JSON array, or one spec per line.
std::vector<RestrictingDistribution> read_per_row_f(const std::filesystem::path& path);
nlohmann::ordered_json per_row_f_json(const std::vector<RestrictingDistribution>& f);

/// Report counts as JSON; timing is kept out so reports replay bit-exactly.
nlohmann::ordered_json report_json(const SimReport& r);
nlohmann::ordered_json timing_json(const SimReport& r);

}  // namespace ribp::io
