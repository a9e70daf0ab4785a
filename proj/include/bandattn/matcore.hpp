#pragma once

// Core matrix types for structured attention scores: dense square score
// matrices, fixed-bandwidth band matrices and bounded sparse error matrices,
// together with the entrywise 1-norm and structural predicates.

#include <cstddef>
#include <span>
#include <tuple>
#include <vector>

#include "bandattn/errors.hpp"

namespace bandattn {

// Dense rows x cols matrix, row-major. Used for Q, K, V and attention outputs.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Square n x n matrix of attention scores (H or A). Row-stochasticity is a
// property checked on demand, not enforced at construction.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  explicit ScoreMatrix(std::size_t n, double fill = 0.0);
  ScoreMatrix(std::size_t n, std::vector<double> data);

  static ScoreMatrix identity(std::size_t n);

  std::size_t n() const { return n_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * n_, n_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  ScoreMatrix& operator+=(const ScoreMatrix& other);
  ScoreMatrix& operator-=(const ScoreMatrix& other);
  ScoreMatrix& operator*=(double scalar);

  bool operator==(const ScoreMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

ScoreMatrix operator+(ScoreMatrix lhs, const ScoreMatrix& rhs);
ScoreMatrix operator-(ScoreMatrix lhs, const ScoreMatrix& rhs);
ScoreMatrix operator*(double scalar, ScoreMatrix m);
ScoreMatrix matmul(const ScoreMatrix& a, const ScoreMatrix& b);

// n x n matrix whose entries vanish outside |i - j| <= w.
//
// Storage is row-major over the 2w+1 diagonals: slot s of row i holds column
// i - w + s. Slots falling outside [0, n) are padding and always hold zero, so
// every row has the same stride. The band attention kernel relies on this.
class BandMatrix {
 public:
  BandMatrix() = default;
  // Throws DomainError unless n >= 1 and w < n.
  BandMatrix(std::size_t n, std::size_t w);

  std::size_t n() const { return n_; }
  std::size_t w() const { return w_; }
  std::size_t stride() const { return 2 * w_ + 1; }

  static bool in_band(std::size_t i, std::size_t j, std::size_t w) {
    return (i > j ? i - j : j - i) <= w;
  }
  bool in_band(std::size_t i, std::size_t j) const { return in_band(i, j, w_); }

  // Off-band reads return 0.
  double at(std::size_t i, std::size_t j) const;
  // Throws DomainError for off-band positions.
  void set(std::size_t i, std::size_t j, double value);

  // Raw padded storage, n * (2w+1) values.
  std::span<const double> slots() const { return slots_; }
  std::span<const double> row_slots(std::size_t i) const {
    return {slots_.data() + i * stride(), stride()};
  }

  ScoreMatrix to_dense() const;
  // Keeps the band of `m` and drops everything else.
  static BandMatrix from_dense(const ScoreMatrix& m, std::size_t w);

  // True when every stored entry lies in [0, 1] (membership in B_[0,1]).
  bool entries_in_unit_interval() const;

  bool operator==(const BandMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::size_t w_ = 0;
  std::vector<double> slots_;
};

struct SparseEntry {
  std::size_t i = 0;
  std::size_t j = 0;
  double value = 0.0;

  bool operator==(const SparseEntry&) const = default;
};

// Number of nonzeros allowed by density budget rho for an n x n matrix:
// ceil(rho * n^2), guarded against floating-point overshoot.
std::size_t sparse_budget(std::size_t n, double rho);

// Sparse n x n error matrix with |e_ij| <= eps and at most sparse_budget(n, rho)
// stored entries. Entries are kept sorted by (i, j).
class SparseError {
 public:
  SparseError() = default;
  // Empty error matrix. Throws DomainError unless n >= 1, eps >= 0, rho in [0, 1).
  SparseError(std::size_t n, double eps, double rho);
  // Validates bound, budget, ranges and uniqueness of keys.
  SparseError(std::size_t n, double eps, double rho, std::vector<SparseEntry> entries);

  std::size_t n() const { return n_; }
  double eps() const { return eps_; }
  double rho() const { return rho_; }
  std::size_t budget() const { return sparse_budget(n_, rho_); }
  std::size_t nnz() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  const std::vector<SparseEntry>& entries() const { return entries_; }

  double max_abs() const;
  ScoreMatrix to_dense() const;

  bool operator==(const SparseError&) const = default;

 private:
  std::size_t n_ = 0;
  double eps_ = 0.0;
  double rho_ = 0.0;
  std::vector<SparseEntry> entries_;
};

// Entrywise 1-norm: sum of |m_ij|.
double norm1(const ScoreMatrix& m);
double norm1(const BandMatrix& m);
double norm1(const SparseError& m);

struct Distance {
  double total = 0.0;
  double per_element_mean = 0.0;
};

// |a - x| in the entrywise 1-norm and the same value divided by n^2.
Distance distance(const ScoreMatrix& a, const ScoreMatrix& x);

// Dimension of the space of n x n matrices with bandwidth w:
// -(w+1)(w-2n) - n, i.e. the number of cells with |i-j| <= w.
std::size_t band_dim(std::size_t n, std::size_t w);

bool is_band(const ScoreMatrix& m, std::size_t w, double tol = 0.0);

// Every entry in [-tol, 1+tol] and every row sum within tol of one.
bool check_row_stochastic(const ScoreMatrix& m, double tol = 1e-6);

}  // namespace bandattn
