#include "bandattn/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

namespace bandattn {

namespace {

void require_same_n(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ShapeError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                     " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ShapeError("Matrix: expected " + std::to_string(rows_ * cols_) + " values, got " +
                     std::to_string(data_.size()));
  }
}

ScoreMatrix::ScoreMatrix(std::size_t n, double fill) : n_(n), data_(n * n, fill) {
  if (n == 0) throw DomainError("ScoreMatrix: n must be >= 1");
}

ScoreMatrix::ScoreMatrix(std::size_t n, std::vector<double> data) : n_(n), data_(std::move(data)) {
  if (n == 0) throw DomainError("ScoreMatrix: n must be >= 1");
  if (data_.size() != n * n) {
    throw ShapeError("ScoreMatrix: expected " + std::to_string(n * n) + " values, got " +
                     std::to_string(data_.size()));
  }
}

ScoreMatrix ScoreMatrix::identity(std::size_t n) {
  ScoreMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ScoreMatrix& ScoreMatrix::operator+=(const ScoreMatrix& other) {
  require_same_n(n_, other.n_, "ScoreMatrix::operator+=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

ScoreMatrix& ScoreMatrix::operator-=(const ScoreMatrix& other) {
  require_same_n(n_, other.n_, "ScoreMatrix::operator-=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

ScoreMatrix& ScoreMatrix::operator*=(double scalar) {
  for (double& v : data_) v *= scalar;
  return *this;
}

ScoreMatrix operator+(ScoreMatrix lhs, const ScoreMatrix& rhs) { return lhs += rhs; }
ScoreMatrix operator-(ScoreMatrix lhs, const ScoreMatrix& rhs) { return lhs -= rhs; }
ScoreMatrix operator*(double scalar, ScoreMatrix m) { return m *= scalar; }

ScoreMatrix matmul(const ScoreMatrix& a, const ScoreMatrix& b) {
  require_same_n(a.n(), b.n(), "matmul");
  const std::size_t n = a.n();
  ScoreMatrix c(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

BandMatrix::BandMatrix(std::size_t n, std::size_t w) : n_(n), w_(w) {
  if (n == 0) throw DomainError("BandMatrix: n must be >= 1");
  if (w >= n) {
    throw DomainError("BandMatrix: bandwidth " + std::to_string(w) + " must be < n = " +
                      std::to_string(n));
  }
  slots_.assign(n * stride(), 0.0);
}

double BandMatrix::at(std::size_t i, std::size_t j) const {
  if (!in_band(i, j)) return 0.0;
  return slots_[i * stride() + (j + w_ - i)];
}

void BandMatrix::set(std::size_t i, std::size_t j, double value) {
  if (i >= n_ || j >= n_ || !in_band(i, j)) {
    throw DomainError("BandMatrix::set: (" + std::to_string(i) + ", " + std::to_string(j) +
                      ") is outside the band");
  }
  slots_[i * stride() + (j + w_ - i)] = value;
}

ScoreMatrix BandMatrix::to_dense() const {
  ScoreMatrix m(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t lo = i > w_ ? i - w_ : 0;
    const std::size_t hi = std::min(n_ - 1, i + w_);
    for (std::size_t j = lo; j <= hi; ++j) m(i, j) = at(i, j);
  }
  return m;
}

BandMatrix BandMatrix::from_dense(const ScoreMatrix& m, std::size_t w) {
  BandMatrix b(m.n(), w);
  const std::size_t n = m.n();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i > w ? i - w : 0;
    const std::size_t hi = std::min(n - 1, i + w);
    for (std::size_t j = lo; j <= hi; ++j) b.set(i, j, m(i, j));
  }
  return b;
}

bool BandMatrix::entries_in_unit_interval() const {
  return std::all_of(slots_.begin(), slots_.end(), [](double v) { return v >= 0.0 && v <= 1.0; });
}

std::size_t sparse_budget(std::size_t n, double rho) {
  const double cells = static_cast<double>(n) * static_cast<double>(n);
  // rho * n^2 is computed in floating point; values like 0.05 * 400 must not
  // round up to 21.
  const double raw = rho * cells;
  const double nearest = std::round(raw);
  if (std::abs(raw - nearest) <= 1e-9 * std::max(1.0, cells)) {
    return static_cast<std::size_t>(nearest);
  }
  return static_cast<std::size_t>(std::ceil(raw));
}

SparseError::SparseError(std::size_t n, double eps, double rho) : n_(n), eps_(eps), rho_(rho) {
  if (n == 0) throw DomainError("SparseError: n must be >= 1");
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw DomainError("SparseError: eps must be >= 0");
  if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("SparseError: rho must lie in [0, 1)");
}

SparseError::SparseError(std::size_t n, double eps, double rho, std::vector<SparseEntry> entries)
    : SparseError(n, eps, rho) {
  std::sort(entries.begin(), entries.end(), [](const SparseEntry& a, const SparseEntry& b) {
    return std::tie(a.i, a.j) < std::tie(b.i, b.j);
  });
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& e = entries[k];
    if (e.i >= n || e.j >= n) throw ShapeError("SparseError: entry index out of range");
    if (!std::isfinite(e.value) || std::abs(e.value) > eps) {
      throw DomainError("SparseError: entry magnitude exceeds eps");
    }
    if (k > 0 && entries[k - 1].i == e.i && entries[k - 1].j == e.j) {
      throw DomainError("SparseError: duplicate entry (" + std::to_string(e.i) + ", " +
                        std::to_string(e.j) + ")");
    }
  }
  if (entries.size() > sparse_budget(n, rho)) {
    throw DomainError("SparseError: " + std::to_string(entries.size()) +
                      " nonzeros exceed density budget " + std::to_string(sparse_budget(n, rho)));
  }
  entries_ = std::move(entries);
}

double SparseError::max_abs() const {
  double m = 0.0;
  for (const auto& e : entries_) m = std::max(m, std::abs(e.value));
  return m;
}

ScoreMatrix SparseError::to_dense() const {
  ScoreMatrix m(n_);
  for (const auto& e : entries_) m(e.i, e.j) = e.value;
  return m;
}

double norm1(const ScoreMatrix& m) {
  double s = 0.0;
  for (double v : m.data()) s += std::abs(v);
  return s;
}

double norm1(const BandMatrix& m) {
  double s = 0.0;
  for (double v : m.slots()) s += std::abs(v);
  return s;
}

double norm1(const SparseError& m) {
  double s = 0.0;
  for (const auto& e : m.entries()) s += std::abs(e.value);
  return s;
}

Distance distance(const ScoreMatrix& a, const ScoreMatrix& x) {
  require_same_n(a.n(), x.n(), "distance");
  const auto da = a.data();
  const auto dx = x.data();
  double total = 0.0;
  for (std::size_t k = 0; k < da.size(); ++k) total += std::abs(da[k] - dx[k]);
  const double cells = static_cast<double>(a.n()) * static_cast<double>(a.n());
  return {total, total / cells};
}

std::size_t band_dim(std::size_t n, std::size_t w) {
  if (n == 0) throw DomainError("band_dim: n must be >= 1");
  if (w >= n) {
    throw DomainError("band_dim: bandwidth " + std::to_string(w) + " must be < n = " +
                      std::to_string(n));
  }
  const auto sn = static_cast<std::int64_t>(n);
  const auto sw = static_cast<std::int64_t>(w);
  return static_cast<std::size_t>(-(sw + 1) * (sw - 2 * sn) - sn);
}

bool is_band(const ScoreMatrix& m, std::size_t w, double tol) {
  const std::size_t n = m.n();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!BandMatrix::in_band(i, j, w) && !(std::abs(m(i, j)) <= tol)) return false;
    }
  }
  return true;
}

bool check_row_stochastic(const ScoreMatrix& m, double tol) {
  for (std::size_t i = 0; i < m.n(); ++i) {
    double sum = 0.0;
    for (double v : m.row(i)) {
      if (!(v >= -tol && v <= 1.0 + tol)) return false;
      sum += v;
    }
    if (!(std::abs(sum - 1.0) <= tol)) return false;
  }
  return true;
}

}  // namespace bandattn
