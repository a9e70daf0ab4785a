#pragma once

// Best approximation of a score matrix H by structured matrices under the
// entrywise 1-norm.
//
// The 1-norm is separable over entries, so |H - B| over bandwidth-w matrices B
// splits into an in-band part, which is zero exactly when B copies H on the
// band, and an off-band part that no B can change. Keeping the band of H is
// therefore a minimizer, and every minimizer agrees with H on the band. With
// entries restricted to [0, 1] the in-band part is minimized cell by cell by
// clamping.
//
// fit_structured extends this to band + sparse error (B in B_[0,1], E with
// |e_ij| <= eps and a nonzero budget). The greedy fill of E is a heuristic; its
// residual never exceeds that of the band projection alone, since E = 0 is
// always feasible.

#include <cstddef>
#include <span>

#include "bandattn/matcore.hpp"

namespace bandattn {

BandMatrix project_band(const ScoreMatrix& h, std::size_t w, bool clamp01 = false);

// |H - project_band(H, w, clamp01)| without materializing the projection.
double band_residual(const ScoreMatrix& h, std::size_t w, bool clamp01 = false);

struct Decomposition {
  BandMatrix band;
  SparseError error;
  double residual = 0.0;
  double eps = 0.0;
  std::size_t w = 0;
};

ScoreMatrix reconstruct(const Decomposition& d);
// norm1(H - band - error), recomputed from the parts.
double residual_of(const ScoreMatrix& h, const Decomposition& d);

// Tolerance for the [0, 1] precondition on H.
inline constexpr double kUnitIntervalTol = 1e-9;

// Throws PreconditionError if some entry of H lies outside [0, 1] by more than
// kUnitIntervalTol.
Decomposition fit_structured(const ScoreMatrix& h, std::size_t w, double eps, double rho);

struct Nearest {
  std::size_t index = 0;
  double total = 0.0;
  double per_element_mean = 0.0;
};

// Candidate closest to A in the entrywise 1-norm; ties go to the lowest index.
Nearest min_distance(const ScoreMatrix& a, std::span<const ScoreMatrix> candidates);

}  // namespace bandattn
