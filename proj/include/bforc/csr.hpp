#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace bforc {

/// Compressed sparse row matrix with a fixed pattern. Entries are accumulated
/// in caller-controlled (deterministic) order, so identical inputs yield
/// bit-identical value arrays. Column ids are strictly increasing within each
/// row and never duplicated.
class CsrMatrix {
public:
  CsrMatrix() = default;

  /// Build an empty matrix from per-row column lists (unsorted, may contain
  /// duplicates; both are normalized here).
  CsrMatrix(int rows, int cols, std::vector<std::vector<int>> pattern)
      : rows_(rows), cols_(cols) {
    if (static_cast<int>(pattern.size()) != rows) throw std::invalid_argument("CsrMatrix: pattern size");
    row_offsets_.resize(static_cast<std::size_t>(rows) + 1, 0);
    for (int r = 0; r < rows; ++r) {
      auto& cs = pattern[static_cast<std::size_t>(r)];
      std::sort(cs.begin(), cs.end());
      cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
      row_offsets_[static_cast<std::size_t>(r) + 1] =
          row_offsets_[static_cast<std::size_t>(r)] + static_cast<int>(cs.size());
    }
    col_ids_.reserve(static_cast<std::size_t>(row_offsets_.back()));
    for (int r = 0; r < rows; ++r) {
      for (int c : pattern[static_cast<std::size_t>(r)]) {
        if (c < 0 || c >= cols) throw std::invalid_argument("CsrMatrix: column out of range");
        col_ids_.push_back(c);
      }
    }
    values_.assign(col_ids_.size(), 0.0);
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nnz() const { return col_ids_.size(); }
  const std::vector<int>& row_offsets() const { return row_offsets_; }
  const std::vector<int>& col_ids() const { return col_ids_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Accumulate into an existing pattern slot.
  void add(int r, int c, double v) {
    const auto begin = col_ids_.begin() + row_offsets_[static_cast<std::size_t>(r)];
    const auto end = col_ids_.begin() + row_offsets_[static_cast<std::size_t>(r) + 1];
    const auto it = std::lower_bound(begin, end, c);
    if (it == end || *it != c) throw std::logic_error("CsrMatrix::add: entry not in pattern");
    values_[static_cast<std::size_t>(it - col_ids_.begin())] += v;
  }

  double coeff(int r, int c) const {
    const auto begin = col_ids_.begin() + row_offsets_[static_cast<std::size_t>(r)];
    const auto end = col_ids_.begin() + row_offsets_[static_cast<std::size_t>(r) + 1];
    const auto it = std::lower_bound(begin, end, c);
    if (it == end || *it != c) return 0.0;
    return values_[static_cast<std::size_t>(it - col_ids_.begin())];
  }

  /// this += alpha * other; both matrices must share the identical pattern.
  void axpy(const CsrMatrix& other, double alpha = 1.0) {
    if (other.rows_ != rows_ || other.cols_ != cols_ || other.col_ids_ != col_ids_) {
      throw std::invalid_argument("CsrMatrix::axpy: pattern mismatch");
    }
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += alpha * other.values_[k];
  }

  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const {
    if (x.size() != cols_) throw std::invalid_argument("CsrMatrix::multiply: size mismatch");
    Eigen::VectorXd y = Eigen::VectorXd::Zero(rows_);
    for (int r = 0; r < rows_; ++r) {
      double acc = 0.0;
      for (int k = row_offsets_[static_cast<std::size_t>(r)]; k < row_offsets_[static_cast<std::size_t>(r) + 1];
           ++k) {
        acc += values_[static_cast<std::size_t>(k)] * x[col_ids_[static_cast<std::size_t>(k)]];
      }
      y[r] = acc;
    }
    return y;
  }

  Eigen::VectorXd multiply_transpose(const Eigen::VectorXd& x) const {
    if (x.size() != rows_) throw std::invalid_argument("CsrMatrix::multiply_transpose: size mismatch");
    Eigen::VectorXd y = Eigen::VectorXd::Zero(cols_);
    for (int r = 0; r < rows_; ++r) {
      for (int k = row_offsets_[static_cast<std::size_t>(r)]; k < row_offsets_[static_cast<std::size_t>(r) + 1];
           ++k) {
        y[col_ids_[static_cast<std::size_t>(k)]] += values_[static_cast<std::size_t>(k)] * x[r];
      }
    }
    return y;
  }

  double quadratic_form(const Eigen::VectorXd& x) const { return x.dot(multiply(x)); }

  /// max |A + A^T| entry, for skew-symmetry checks (square matrices).
  double max_abs_symmetric_part() const {
    double m = 0.0;
    for (int r = 0; r < rows_; ++r) {
      for (int k = row_offsets_[static_cast<std::size_t>(r)]; k < row_offsets_[static_cast<std::size_t>(r) + 1];
           ++k) {
        const int c = col_ids_[static_cast<std::size_t>(k)];
        m = std::max(m, std::abs(values_[static_cast<std::size_t>(k)] + coeff(c, r)));
      }
    }
    return m;
  }

  /// max |A - A^T| entry, for symmetry checks (square matrices).
  double max_abs_asymmetry() const {
    double m = 0.0;
    for (int r = 0; r < rows_; ++r) {
      for (int k = row_offsets_[static_cast<std::size_t>(r)]; k < row_offsets_[static_cast<std::size_t>(r) + 1];
           ++k) {
        const int c = col_ids_[static_cast<std::size_t>(k)];
        m = std::max(m, std::abs(values_[static_cast<std::size_t>(k)] - coeff(c, r)));
      }
    }
    return m;
  }

  Eigen::SparseMatrix<double> to_eigen() const {
    Eigen::SparseMatrix<double> m(rows_, cols_);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(nnz());
    for (int r = 0; r < rows_; ++r) {
      for (int k = row_offsets_[static_cast<std::size_t>(r)]; k < row_offsets_[static_cast<std::size_t>(r) + 1];
           ++k) {
        trips.emplace_back(r, col_ids_[static_cast<std::size_t>(k)], values_[static_cast<std::size_t>(k)]);
      }
    }
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();
    return m;
  }

private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_offsets_;
  std::vector<int> col_ids_;
  std::vector<double> values_;
};

}  // namespace bforc
