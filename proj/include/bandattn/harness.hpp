#pragma once

// Validation experiment: for each head family, draw a fixed number of noisy
// candidates and keep the one closest to the observed attention matrix.
// A sweep repeats this over a grid of (w, num_pos).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bandattn/matrix_io.hpp"
#include "bandattn/sigma.hpp"
#include "json.hpp"

namespace bandattn {

struct ValidationConfig {
  std::size_t w = 3;
  std::size_t num_pos = 2;
  std::size_t samples_per_family = 30;
  double eps = 0.05;
  // rho = 0 disables the noise term.
  double rho = 0.05;
  double dropout_p = 0.3;
  bool normalize_rows = true;
  bool signed_noise = false;
  std::uint64_t seed = 0;
  std::vector<Family> families{Family::Positional, Family::Syntactic, Family::RareToken};

  bool operator==(const ValidationConfig&) const = default;
};

// Throws ArgumentError or DomainError for out-of-range settings.
void check_config(const ValidationConfig& cfg);

nlohmann::ordered_json config_to_json(const ValidationConfig& cfg);
// Missing keys keep their defaults; unknown keys raise ArgumentError.
ValidationConfig config_from_json(const nlohmann::json& j,
                                  const ValidationConfig& defaults = {});

// Recipes for candidate `index` of `family`. Seeds depend on (cfg.seed,
// family, index) only, so the positional family is identical for every (w,
// num_pos).
SigmaSpec candidate_spec(const ValidationConfig& cfg, std::size_t n, Family family,
                         std::size_t index);
std::optional<NoiseSpec> candidate_noise(const ValidationConfig& cfg, Family family,
                                         std::size_t index);
std::vector<ScoreMatrix> generate_candidates(const ValidationConfig& cfg, std::size_t n,
                                             Family family);

struct FamilyResult {
  Family family = Family::Positional;
  std::size_t best_index = 0;
  double total_distance = 0.0;
  double mean_per_element = 0.0;

  bool operator==(const FamilyResult&) const = default;
};

struct ApproxReport {
  std::size_t n = 0;
  ValidationConfig config;
  std::vector<FamilyResult> families;
  // Overall winner; `family` names the family it came from.
  FamilyResult global;
  double wall_ms = 0.0;  // timing, excluded from equality

  bool operator==(const ApproxReport& o) const {
    return n == o.n && config == o.config && families == o.families && global == o.global;
  }
};

ApproxReport validate(const ScoreMatrix& a, const ValidationConfig& cfg);
inline ApproxReport validate(const MatrixFile& a, const ValidationConfig& cfg) {
  return validate(a.data, cfg);
}

struct SweepCell {
  std::size_t w = 0;
  std::size_t num_pos = 0;
  ApproxReport report;

  bool operator==(const SweepCell&) const = default;
};

struct SweepResult {
  // Row-major over (w, num_pos): w varies slowest.
  std::vector<SweepCell> cells;
  // Cell with the smallest global distance, lowest index on ties.
  std::size_t best = 0;
};

// Throws ArgumentError on an empty range.
SweepResult sweep(const ScoreMatrix& a, std::span<const std::size_t> w_range,
                  std::span<const std::size_t> num_pos_range, const ValidationConfig& base);

// Band-projection and band-plus-sparse fits of a single matrix.
struct ProjectionSummary {
  std::size_t n = 0;
  std::size_t w = 0;
  double band_residual = 0.0;
  double band_mean = 0.0;
  double structured_residual = 0.0;
  double structured_mean = 0.0;
  std::size_t error_nnz = 0;
  std::size_t band_dimension = 0;
};
ProjectionSummary project_summary(const ScoreMatrix& a, std::size_t w, double eps, double rho);

// Synthetic attention matrices with known structure, used as bundled fixtures
// because trained attention maps are not shipped with the repository.
enum class FixtureKind {
  // softmax of a fixed diagonal logit over a dropped-out bandwidth-3 band
  Syntactic,
  // as Syntactic, plus two 3-row rare-token blocks
  RareSyntactic,
  // softmax of a diagonal bonus plus a full bandwidth-3 band
  PositionalSpread,
  // row-normalized positive weights on exactly bandwidth 3, zero elsewhere
  ExactBand3,
};

std::string_view fixture_name(FixtureKind kind);
std::optional<FixtureKind> parse_fixture(std::string_view name);
MatrixFile make_fixture(FixtureKind kind, std::size_t n, std::uint64_t seed);

}  // namespace bandattn
