#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ribp {

using BinaryRow = std::vector<std::uint8_t>;

/// N x I binary assignment matrix with a cached count of ones per row.
///
/// Every mutator keeps row_count(n) equal to the sum of row n.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols);

  static FeatureMatrix from_rows(const std::vector<BinaryRow>& rows, std::size_t cols);
  static FeatureMatrix from_eigen(const Eigen::MatrixXd& m);

  std::size_t rows() const { return row_counts_.size(); }
  std::size_t cols() const { return cols_; }

  bool operator()(std::size_t n, std::size_t i) const { return entries_[n * cols_ + i] != 0; }
  void set(std::size_t n, std::size_t i, bool value);

  std::span<const std::uint8_t> row(std::size_t n) const {
    return {entries_.data() + n * cols_, cols_};
  }
  void set_row(std::size_t n, std::span<const std::uint8_t> values);
  void append_row(std::span<const std::uint8_t> values);

  int row_count(std::size_t n) const { return row_counts_[n]; }
  std::span<const int> row_counts() const { return row_counts_; }

  /// m_i = sum_n z_ni.
  std::vector<int> column_counts() const;

  /// Appends `extra` all-zero columns.
  void add_columns(std::size_t extra);
  /// Keeps only the columns with keep[i] == true, in order.
  void keep_columns(const std::vector<bool>& keep);
  /// New matrix whose column j is column order[j] of this one.
  FeatureMatrix permuted_columns(std::span<const std::size_t> order) const;

  Eigen::MatrixXd to_eigen() const;

  /// Recomputes every row sum and compares with the cache.
  bool counts_consistent() const;

  friend bool operator==(const FeatureMatrix& a, const FeatureMatrix& b) {
    return a.cols_ == b.cols_ && a.entries_ == b.entries_;
  }

 private:
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> entries_;
  std::vector<int> row_counts_;
};

}  // namespace ribp
