#include "bandattn/approx.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace bandattn {

namespace {

void require_bandwidth(std::size_t n, std::size_t w, const char* what) {
  if (w >= n) {
    throw DomainError(std::string(what) + ": bandwidth " + std::to_string(w) +
                      " must be < n = " + std::to_string(n));
  }
}

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

BandMatrix project_band(const ScoreMatrix& h, std::size_t w, bool clamp01) {
  require_bandwidth(h.n(), w, "project_band");
  BandMatrix b = BandMatrix::from_dense(h, w);
  if (clamp01) {
    const std::size_t n = h.n();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i > w ? i - w : 0;
      const std::size_t hi = std::min(n - 1, i + w);
      for (std::size_t j = lo; j <= hi; ++j) b.set(i, j, clamp_unit(h(i, j)));
    }
  }
  return b;
}

double band_residual(const ScoreMatrix& h, std::size_t w, bool clamp01) {
  require_bandwidth(h.n(), w, "band_residual");
  double r = 0.0;
  for (std::size_t i = 0; i < h.n(); ++i) {
    for (std::size_t j = 0; j < h.n(); ++j) {
      const double v = h(i, j);
      if (!BandMatrix::in_band(i, j, w)) {
        r += std::abs(v);
      } else if (clamp01) {
        r += std::abs(v - clamp_unit(v));
      }
    }
  }
  return r;
}

ScoreMatrix reconstruct(const Decomposition& d) {
  ScoreMatrix m = d.band.to_dense();
  for (const auto& e : d.error.entries()) m(e.i, e.j) += e.value;
  return m;
}

double residual_of(const ScoreMatrix& h, const Decomposition& d) {
  return distance(h, reconstruct(d)).total;
}

Decomposition fit_structured(const ScoreMatrix& h, std::size_t w, double eps, double rho) {
  const std::size_t n = h.n();
  require_bandwidth(n, w, "fit_structured");
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw DomainError("fit_structured: eps must be >= 0");
  if (!(rho >= 0.0 && rho < 1.0)) throw DomainError("fit_structured: rho must lie in [0, 1)");
  for (double v : h.data()) {
    if (!(v >= -kUnitIntervalTol && v <= 1.0 + kUnitIntervalTol)) {
      throw PreconditionError("fit_structured: entries of H must lie in [0, 1]");
    }
  }

  BandMatrix band = project_band(h, w, true);
  const std::size_t budget = sparse_budget(n, rho);

  // Off-band cells ranked by |h_ij|, largest first; (i, j) order breaks ties.
  std::vector<SparseEntry> off_band;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!BandMatrix::in_band(i, j, w) && h(i, j) != 0.0) off_band.push_back({i, j, h(i, j)});
    }
  }
  const std::size_t take = std::min(budget, off_band.size());
  std::partial_sort(off_band.begin(), off_band.begin() + static_cast<std::ptrdiff_t>(take),
                    off_band.end(), [](const SparseEntry& a, const SparseEntry& b) {
                      const double ma = std::abs(a.value);
                      const double mb = std::abs(b.value);
                      if (ma != mb) return ma > mb;
                      return std::tie(a.i, a.j) < std::tie(b.i, b.j);
                    });
  off_band.resize(take);
  for (auto& e : off_band) e.value = std::clamp(e.value, -eps, eps);
  std::erase_if(off_band, [](const SparseEntry& e) { return e.value == 0.0; });

  Decomposition d{std::move(band), SparseError(n, eps, rho, std::move(off_band)), 0.0, eps, w};
  d.residual = residual_of(h, d);
  return d;
}

Nearest min_distance(const ScoreMatrix& a, std::span<const ScoreMatrix> candidates) {
  if (candidates.empty()) throw ArgumentError("min_distance: candidate list is empty");
  Nearest best;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const Distance d = distance(a, candidates[k]);
    if (k == 0 || d.total < best.total) best = {k, d.total, d.per_element_mean};
  }
  return best;
}

}  // namespace bandattn
