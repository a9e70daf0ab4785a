#pragma once

// Seeded generators for the three structured head families and the sparse
// noise term. A candidate score matrix is I_n * P + E where P comes from one of
//   positional   - the identity,
//   syntactic    - a bandwidth-w all-ones band with entrywise dropout,
//   rare token   - identity rows except for blocks of rows that all point at a
//                  single column,
// and E is a sparse matrix with entries bounded by eps.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bandattn/matcore.hpp"

namespace bandattn {

enum class Family { Positional, Syntactic, RareToken };

std::string_view family_name(Family f);
// Accepts "positional"/"syntactic"/"rare-token" and the aliases "sigma1".."sigma3".
std::optional<Family> parse_family(std::string_view name);

struct SigmaSpec {
  Family family = Family::Positional;
  std::size_t n = 1;
  // Bandwidth for syntactic heads; window size of each rare-token block.
  std::size_t w = 0;
  // Number of rare-token blocks drawn when rare_positions is not given.
  std::size_t num_pos = 1;
  double dropout_p = 0.3;
  // Explicit rare tokens t_k (ascending) and their windows w_k. Block k covers
  // rows [t_k - (w_k-1)/2, t_k - (w_k-1)/2 + w_k).
  std::optional<std::vector<std::size_t>> rare_positions;
  std::optional<std::vector<std::size_t>> rare_windows;
  std::uint64_t seed = 0;
  bool normalize_rows = true;
};

struct NoiseSpec {
  double eps = 0.05;
  double rho = 0.05;
  // Values in [-eps, eps] instead of (0, eps].
  bool signed_values = false;
  std::uint64_t seed = 0;
};

struct RareBlock {
  std::size_t token = 0;      // attended column
  std::size_t first_row = 0;  // first row of the block
  std::size_t window = 0;     // number of rows

  bool operator==(const RareBlock&) const = default;
};

// Block layout of a rare-token matrix. Explicit positions are validated;
// otherwise num_pos blocks of size w are placed uniformly over all
// non-overlapping arrangements, each pointing at its middle row.
std::vector<RareBlock> rare_blocks(const SigmaSpec& spec);

ScoreMatrix gen_sigma1(std::size_t n);
ScoreMatrix gen_sigma2(const SigmaSpec& spec);
ScoreMatrix gen_sigma3(const SigmaSpec& spec);
// Dispatches on spec.family.
ScoreMatrix gen_sigma(const SigmaSpec& spec);

SparseError gen_noise(std::size_t n, const NoiseSpec& spec);

// Dense I_n * P + E.
ScoreMatrix gen_candidate(const ScoreMatrix& p, const SparseError& noise);
ScoreMatrix gen_candidate(const SigmaSpec& spec, const std::optional<NoiseSpec>& noise);

}  // namespace bandattn
