#include "ribp/feature_matrix.hpp"

#include <stdexcept>

namespace ribp {

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t cols)
    : cols_(cols), entries_(rows * cols, 0), row_counts_(rows, 0) {}

FeatureMatrix FeatureMatrix::from_rows(const std::vector<BinaryRow>& rows, std::size_t cols) {
  FeatureMatrix z(0, cols);
  for (const auto& r : rows) z.append_row(r);
  return z;
}

FeatureMatrix FeatureMatrix::from_eigen(const Eigen::MatrixXd& m) {
  FeatureMatrix z(m.rows(), m.cols());
  for (Eigen::Index n = 0; n < m.rows(); ++n)
    for (Eigen::Index i = 0; i < m.cols(); ++i) {
      if (m(n, i) != 0.0 && m(n, i) != 1.0)
        throw std::invalid_argument("feature matrix entries must be 0 or 1");
      z.set(n, i, m(n, i) != 0.0);
    }
  return z;
}

void FeatureMatrix::set(std::size_t n, std::size_t i, bool value) {
  auto& e = entries_[n * cols_ + i];
  const std::uint8_t v = value ? 1 : 0;
  row_counts_[n] += static_cast<int>(v) - static_cast<int>(e);
  e = v;
}

void FeatureMatrix::set_row(std::size_t n, std::span<const std::uint8_t> values) {
  if (values.size() != cols_) throw std::invalid_argument("set_row: width mismatch");
  int count = 0;
  for (std::size_t i = 0; i < cols_; ++i) {
    const std::uint8_t v = values[i] ? 1 : 0;
    entries_[n * cols_ + i] = v;
    count += v;
  }
  row_counts_[n] = count;
}

void FeatureMatrix::append_row(std::span<const std::uint8_t> values) {
  if (values.size() != cols_) throw std::invalid_argument("append_row: width mismatch");
  row_counts_.push_back(0);
  entries_.resize(entries_.size() + cols_);
  set_row(row_counts_.size() - 1, values);
}

std::vector<int> FeatureMatrix::column_counts() const {
  std::vector<int> m(cols_, 0);
  for (std::size_t n = 0; n < rows(); ++n)
    for (std::size_t i = 0; i < cols_; ++i) m[i] += entries_[n * cols_ + i];
  return m;
}

void FeatureMatrix::add_columns(std::size_t extra) {
  if (extra == 0) return;
  const std::size_t new_cols = cols_ + extra;
  std::vector<std::uint8_t> grown(rows() * new_cols, 0);
  for (std::size_t n = 0; n < rows(); ++n)
    for (std::size_t i = 0; i < cols_; ++i) grown[n * new_cols + i] = entries_[n * cols_ + i];
  entries_ = std::move(grown);
  cols_ = new_cols;
}

void FeatureMatrix::keep_columns(const std::vector<bool>& keep) {
  if (keep.size() != cols_) throw std::invalid_argument("keep_columns: mask width mismatch");
  std::size_t new_cols = 0;
  for (bool k : keep) new_cols += k;
  std::vector<std::uint8_t> kept(rows() * new_cols, 0);
  for (std::size_t n = 0; n < rows(); ++n) {
    std::size_t j = 0;
    int count = 0;
    for (std::size_t i = 0; i < cols_; ++i) {
      if (!keep[i]) continue;
      kept[n * new_cols + j++] = entries_[n * cols_ + i];
      count += entries_[n * cols_ + i];
    }
    row_counts_[n] = count;
  }
  entries_ = std::move(kept);
  cols_ = new_cols;
}

FeatureMatrix FeatureMatrix::permuted_columns(std::span<const std::size_t> order) const {
  if (order.size() != cols_) throw std::invalid_argument("permuted_columns: order width mismatch");
  FeatureMatrix out(rows(), cols_);
  for (std::size_t n = 0; n < rows(); ++n)
    for (std::size_t j = 0; j < cols_; ++j) out.set(n, j, (*this)(n, order[j]));
  return out;
}

Eigen::MatrixXd FeatureMatrix::to_eigen() const {
  Eigen::MatrixXd m(rows(), cols_);
  for (std::size_t n = 0; n < rows(); ++n)
    for (std::size_t i = 0; i < cols_; ++i) m(n, i) = entries_[n * cols_ + i];
  return m;
}

bool FeatureMatrix::counts_consistent() const {
  for (std::size_t n = 0; n < rows(); ++n) {
    int count = 0;
    for (std::size_t i = 0; i < cols_; ++i) count += entries_[n * cols_ + i];
    if (count != row_counts_[n]) return false;
  }
  return true;
}

}  // namespace ribp
