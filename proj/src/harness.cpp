#include "bandattn/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "bandattn/approx.hpp"
#include "bandattn/random.hpp"

namespace bandattn {

namespace {

std::uint64_t family_tag(Family f) { return static_cast<std::uint64_t>(f) + 1; }

constexpr std::uint64_t kStructureStream = 0;
constexpr std::uint64_t kNoiseStream = 1;

}  // namespace

void check_config(const ValidationConfig& cfg) {
  if (cfg.samples_per_family == 0) throw ArgumentError("samples per family must be >= 1");
  if (cfg.families.empty()) throw ArgumentError("at least one family is required");
  if (!(cfg.eps > 0.0) || !std::isfinite(cfg.eps)) throw DomainError("eps must be > 0");
  if (!(cfg.rho >= 0.0 && cfg.rho < 1.0)) throw DomainError("rho must lie in [0, 1)");
  if (!(cfg.dropout_p > 0.0 && cfg.dropout_p < 1.0)) {
    throw DomainError("dropout probability must lie in (0, 1)");
  }
  for (std::size_t k = 0; k < cfg.families.size(); ++k) {
    for (std::size_t m = 0; m < k; ++m) {
      if (cfg.families[k] == cfg.families[m]) throw ArgumentError("duplicate family in config");
    }
  }
}

nlohmann::ordered_json config_to_json(const ValidationConfig& cfg) {
  nlohmann::ordered_json j;
  j["w"] = cfg.w;
  j["num_pos"] = cfg.num_pos;
  j["samples_per_family"] = cfg.samples_per_family;
  j["eps"] = cfg.eps;
  j["rho"] = cfg.rho;
  j["dropout_p"] = cfg.dropout_p;
  j["normalize_rows"] = cfg.normalize_rows;
  j["signed_noise"] = cfg.signed_noise;
  j["seed"] = cfg.seed;
  auto families = nlohmann::ordered_json::array();
  for (Family f : cfg.families) families.push_back(std::string(family_name(f)));
  j["families"] = std::move(families);
  return j;
}

ValidationConfig config_from_json(const nlohmann::json& j, const ValidationConfig& defaults) {
  if (!j.is_object()) throw ArgumentError("config must be a JSON object");
  ValidationConfig cfg = defaults;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "w") {
        cfg.w = value.get<std::size_t>();
      } else if (key == "num_pos") {
        cfg.num_pos = value.get<std::size_t>();
      } else if (key == "samples_per_family") {
        cfg.samples_per_family = value.get<std::size_t>();
      } else if (key == "eps") {
        cfg.eps = value.get<double>();
      } else if (key == "rho") {
        cfg.rho = value.get<double>();
      } else if (key == "dropout_p") {
        cfg.dropout_p = value.get<double>();
      } else if (key == "normalize_rows") {
        cfg.normalize_rows = value.get<bool>();
      } else if (key == "signed_noise") {
        cfg.signed_noise = value.get<bool>();
      } else if (key == "seed") {
        cfg.seed = value.get<std::uint64_t>();
      } else if (key == "families") {
        cfg.families.clear();
        for (const auto& name : value) {
          const auto f = parse_family(name.get<std::string>());
          if (!f) throw ArgumentError("unknown family '" + name.get<std::string>() + "'");
          cfg.families.push_back(*f);
        }
      } else {
        throw ArgumentError("unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("bad config value: ") + e.what());
  }
  return cfg;
}

SigmaSpec candidate_spec(const ValidationConfig& cfg, std::size_t n, Family family,
                         std::size_t index) {
  SigmaSpec spec;
  spec.family = family;
  spec.n = n;
  spec.w = cfg.w;
  spec.num_pos = cfg.num_pos;
  spec.dropout_p = cfg.dropout_p;
  spec.normalize_rows = cfg.normalize_rows;
  spec.seed = derive_seed(cfg.seed, family_tag(family), index, kStructureStream);
  return spec;
}

std::optional<NoiseSpec> candidate_noise(const ValidationConfig& cfg, Family family,
                                         std::size_t index) {
  if (cfg.rho == 0.0) return std::nullopt;
  return NoiseSpec{cfg.eps, cfg.rho, cfg.signed_noise,
                   derive_seed(cfg.seed, family_tag(family), index, kNoiseStream)};
}

std::vector<ScoreMatrix> generate_candidates(const ValidationConfig& cfg, std::size_t n,
                                             Family family) {
  std::vector<ScoreMatrix> out;
  out.reserve(cfg.samples_per_family);
  for (std::size_t s = 0; s < cfg.samples_per_family; ++s) {
    out.push_back(gen_candidate(candidate_spec(cfg, n, family, s), candidate_noise(cfg, family, s)));
  }
  return out;
}

ApproxReport validate(const ScoreMatrix& a, const ValidationConfig& cfg) {
  check_config(cfg);
  const auto start = std::chrono::steady_clock::now();

  ApproxReport report;
  report.n = a.n();
  report.config = cfg;
  for (Family f : cfg.families) {
    const auto candidates = generate_candidates(cfg, a.n(), f);
    const Nearest best = min_distance(a, candidates);
    report.families.push_back({f, best.index, best.total, best.per_element_mean});
  }
  report.global = report.families.front();
  for (const auto& r : report.families) {
    if (r.total_distance < report.global.total_distance) report.global = r;
  }
  report.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

SweepResult sweep(const ScoreMatrix& a, std::span<const std::size_t> w_range,
                  std::span<const std::size_t> num_pos_range, const ValidationConfig& base) {
  if (w_range.empty()) throw ArgumentError("sweep: empty w range");
  if (num_pos_range.empty()) throw ArgumentError("sweep: empty num_pos range");

  SweepResult result;
  for (std::size_t w : w_range) {
    for (std::size_t num_pos : num_pos_range) {
      ValidationConfig cfg = base;
      cfg.w = w;
      cfg.num_pos = num_pos;
      result.cells.push_back({w, num_pos, validate(a, cfg)});
    }
  }
  for (std::size_t k = 1; k < result.cells.size(); ++k) {
    if (result.cells[k].report.global.total_distance <
        result.cells[result.best].report.global.total_distance) {
      result.best = k;
    }
  }
  return result;
}

ProjectionSummary project_summary(const ScoreMatrix& a, std::size_t w, double eps, double rho) {
  const double cells = static_cast<double>(a.n()) * static_cast<double>(a.n());
  ProjectionSummary s;
  s.n = a.n();
  s.w = w;
  s.band_residual = band_residual(a, w, true);
  s.band_mean = s.band_residual / cells;
  const Decomposition d = fit_structured(a, w, eps, rho);
  s.structured_residual = d.residual;
  s.structured_mean = d.residual / cells;
  s.error_nnz = d.error.nnz();
  s.band_dimension = band_dim(a.n(), w);
  return s;
}

std::string_view fixture_name(FixtureKind kind) {
  switch (kind) {
    case FixtureKind::Syntactic:
      return "syntactic";
    case FixtureKind::RareSyntactic:
      return "rare-syntactic";
    case FixtureKind::PositionalSpread:
      return "positional-spread";
    case FixtureKind::ExactBand3:
      return "exact-band3";
  }
  return "unknown";
}

std::optional<FixtureKind> parse_fixture(std::string_view name) {
  for (auto k : {FixtureKind::Syntactic, FixtureKind::RareSyntactic, FixtureKind::PositionalSpread,
                 FixtureKind::ExactBand3}) {
    if (fixture_name(k) == name) return k;
  }
  return std::nullopt;
}

namespace {

ScoreMatrix softmax_rows(const ScoreMatrix& logits) {
  ScoreMatrix out(logits.n());
  for (std::size_t i = 0; i < logits.n(); ++i) {
    const auto in = logits.row(i);
    const double peak = *std::max_element(in.begin(), in.end());
    double sum = 0.0;
    auto row = out.row(i);
    for (std::size_t j = 0; j < in.size(); ++j) sum += row[j] = std::exp(in[j] - peak);
    for (double& v : row) v /= sum;
  }
  return out;
}

}  // namespace

MatrixFile make_fixture(FixtureKind kind, std::size_t n, std::uint64_t seed) {
  constexpr std::size_t kBand = 3;
  if (n <= kBand) throw DomainError("make_fixture: n must exceed 3");
  Rng rng(derive_seed(seed, 0xf1f7));

  SigmaSpec band_spec;
  band_spec.family = Family::Syntactic;
  band_spec.n = n;
  band_spec.w = kBand;
  band_spec.dropout_p = 0.3;
  band_spec.normalize_rows = false;
  band_spec.seed = derive_seed(seed, 0xba4d);

  ScoreMatrix m(n);
  switch (kind) {
    case FixtureKind::Syntactic:
    case FixtureKind::RareSyntactic: {
      ScoreMatrix logits = 2.5 * gen_sigma2(band_spec);
      for (std::size_t i = 0; i < n; ++i) logits(i, i) = 3.3;
      if (kind == FixtureKind::RareSyntactic) {
        SigmaSpec rare;
        rare.family = Family::RareToken;
        rare.n = n;
        rare.w = kBand;
        rare.num_pos = 2;
        rare.seed = derive_seed(seed, 0x4a4e);
        for (const auto& b : rare_blocks(rare)) {
          for (std::size_t r = b.first_row; r < b.first_row + b.window; ++r) logits(r, b.token) += 2.0;
        }
      }
      for (double& v : logits.data()) v += 0.2 * rng.normal();
      m = softmax_rows(logits);
      break;
    }
    case FixtureKind::PositionalSpread: {
      ScoreMatrix logits(n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          logits(i, j) = (i == j ? 1.0 : 0.0) + (BandMatrix::in_band(i, j, kBand) ? 2.0 : 0.0) +
                         0.2 * rng.normal();
        }
      }
      m = softmax_rows(logits);
      break;
    }
    case FixtureKind::ExactBand3: {
      for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          if (!BandMatrix::in_band(i, j, kBand)) continue;
          m(i, j) = (i == j ? 1.0 : 0.8) + 0.1 * rng.uniform01();
          sum += m(i, j);
        }
        for (double& v : m.row(i)) v /= sum;
      }
      break;
    }
  }

  MatrixFile file;
  file.data = std::move(m);
  file.head_id = 0;
  file.layer_id = 0;
  file.sentence_len = n;
  file.metadata["fixture"] = std::string(fixture_name(kind));
  file.metadata["seed"] = std::to_string(seed);
  return file;
}

}  // namespace bandattn
