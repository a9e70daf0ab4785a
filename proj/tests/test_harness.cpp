#include <string>

#include "bandattn/approx.hpp"
#include "bandattn/harness.hpp"
#include "doctest.h"

using namespace bandattn;

namespace {

MatrixFile fixture(const std::string& name) {
  return load_matrix(std::string(BANDATTN_FIXTURE_DIR) + "/" + name + ".attn");
}

}  // namespace

TEST_CASE("identity target with the positional family and no noise") {
  ValidationConfig cfg;
  cfg.families = {Family::Positional};
  cfg.rho = 0.0;
  const ApproxReport r = validate(ScoreMatrix::identity(16), cfg);
  REQUIRE(r.families.size() == 1);
  CHECK(r.families[0].total_distance == 0.0);
  CHECK(r.global.total_distance == 0.0);
  CHECK(r.global.family == Family::Positional);
}

TEST_CASE("validate is deterministic and internally consistent") {
  const MatrixFile a = fixture("syntactic");
  ValidationConfig cfg;
  cfg.seed = 7;
  const ApproxReport first = validate(a, cfg);
  const ApproxReport second = validate(a, cfg);
  CHECK(first == second);
  REQUIRE(first.families.size() == 3);
  for (const auto& row : first.families) {
    CHECK(row.mean_per_element == row.total_distance / 256.0);
    CHECK(first.global.total_distance <= row.total_distance);
    CHECK(row.best_index < cfg.samples_per_family);
  }

  // Re-derive the syntactic winner from the candidate recipes.
  const auto candidates = generate_candidates(cfg, 16, Family::Syntactic);
  const Nearest best = min_distance(a.data, candidates);
  CHECK(best.index == first.families[1].best_index);
  CHECK(best.total == first.families[1].total_distance);
}

TEST_CASE("positional candidates do not depend on w or num_pos") {
  const MatrixFile a = fixture("positional-spread");
  ValidationConfig narrow;
  narrow.seed = 3;
  ValidationConfig wide = narrow;
  wide.w = 10;
  wide.num_pos = 1;
  CHECK(validate(a, narrow).families[0] == validate(a, wide).families[0]);
}

TEST_CASE("narrow context fits a diagonal-dominant head better than a wide one") {
  const MatrixFile a = fixture("syntactic");
  ValidationConfig narrow;
  narrow.seed = 1;
  ValidationConfig wide = narrow;
  wide.w = 10;
  wide.num_pos = 1;
  CHECK(validate(a, narrow).global.mean_per_element < validate(a, wide).global.mean_per_element);
}

TEST_CASE("config validation") {
  ValidationConfig cfg;
  CHECK_NOTHROW(check_config(cfg));
  cfg.samples_per_family = 0;
  CHECK_THROWS_AS(check_config(cfg), ArgumentError);
  cfg = {};
  cfg.families.clear();
  CHECK_THROWS_AS(check_config(cfg), ArgumentError);
  cfg = {};
  cfg.families = {Family::Syntactic, Family::Syntactic};
  CHECK_THROWS_AS(check_config(cfg), ArgumentError);
  cfg = {};
  cfg.dropout_p = 1.0;
  CHECK_THROWS_AS(check_config(cfg), DomainError);
  cfg = {};
  cfg.eps = 0.0;
  CHECK_THROWS_AS(check_config(cfg), DomainError);

  // Rare-token blocks that cannot fit surface from validate.
  cfg = {};
  cfg.w = 10;
  cfg.num_pos = 2;
  CHECK_THROWS_AS(validate(ScoreMatrix::identity(16), cfg), DomainError);
}

TEST_CASE("config JSON") {
  ValidationConfig cfg;
  cfg.w = 5;
  cfg.seed = 99;
  cfg.families = {Family::RareToken};
  cfg.signed_noise = true;
  CHECK(config_from_json(config_to_json(cfg)) == cfg);

  const auto partial = config_from_json(nlohmann::json::parse(R"({"num_pos": 4})"));
  CHECK(partial.num_pos == 4);
  CHECK(partial.w == 3);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"width": 4})")), ArgumentError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"w": "x"})")), ArgumentError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"families": ["sigma9"]})")),
                  ArgumentError);
}

TEST_CASE("sweep") {
  const MatrixFile a = fixture("exact-band3");
  ValidationConfig cfg;
  cfg.seed = 5;

  SUBCASE("single cell equals validate") {
    const std::vector<std::size_t> w{4}, np{1};
    const SweepResult s = sweep(a.data, w, np, cfg);
    REQUIRE(s.cells.size() == 1);
    ValidationConfig same = cfg;
    same.w = 4;
    same.num_pos = 1;
    CHECK(s.cells[0].report == validate(a, same));
  }
  SUBCASE("recovers the bandwidth of a band-3 head") {
    const std::vector<std::size_t> w{1, 2, 3, 4, 5}, np{1, 2};
    const SweepResult s = sweep(a.data, w, np, cfg);
    CHECK(s.cells.size() == 10);
    CHECK(s.cells[s.best].w == 3);
    CHECK(s.cells[0].w == 1);
    CHECK(s.cells[1].num_pos == 2);
  }
  SUBCASE("empty ranges") {
    const std::vector<std::size_t> none, some{1};
    CHECK_THROWS_AS(sweep(a.data, none, some, cfg), ArgumentError);
    CHECK_THROWS_AS(sweep(a.data, some, none, cfg), ArgumentError);
  }
}

TEST_CASE("project_summary") {
  const MatrixFile a = fixture("syntactic");
  const ProjectionSummary s = project_summary(a.data, 3, 0.05, 0.05);
  CHECK(s.band_dimension == 100);
  CHECK(s.structured_residual <= s.band_residual);
  CHECK(s.error_nnz <= 13);
  CHECK(s.band_mean == s.band_residual / 256.0);
}

TEST_CASE("bundled fixtures are reproducible and well-formed") {
  for (auto kind : {FixtureKind::Syntactic, FixtureKind::RareSyntactic,
                    FixtureKind::PositionalSpread, FixtureKind::ExactBand3}) {
    const std::string name(fixture_name(kind));
    CAPTURE(name);
    const MatrixFile bundled = fixture(name);
    CHECK(bundled == make_fixture(kind, 16, 11));
    CHECK(check_row_stochastic(bundled.data, 1e-12));
    CHECK(parse_fixture(name) == kind);
  }
  CHECK(is_band(fixture("exact-band3").data, 3, 0.0));

  // Diagonal is the row maximum in the two positional/syntactic fixtures.
  for (const char* name : {"syntactic", "positional-spread"}) {
    const ScoreMatrix& m = fixture(name).data;
    for (std::size_t i = 0; i < m.n(); ++i) {
      for (std::size_t j = 0; j < m.n(); ++j) CHECK(m(i, i) >= m(i, j));
    }
  }
  CHECK_THROWS_AS(make_fixture(FixtureKind::Syntactic, 3, 0), DomainError);
}
