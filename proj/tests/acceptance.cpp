// Acceptance suite: one line per criterion, non-zero exit if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bandattn/approx.hpp"
#include "bandattn/attnsim.hpp"
#include "bandattn/harness.hpp"
#include "bandattn/matcore.hpp"
#include "bandattn/report.hpp"
#include "test_util.hpp"

using namespace bandattn;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double budget_s;  // wall-time limit, 0 for none
  std::function<Outcome()> run;
};

std::string fixture_path(const std::string& name) {
  return std::string(BANDATTN_FIXTURE_DIR) + "/" + name + ".attn";
}

Outcome band_dimension() {
  std::size_t mismatches = 0;
  for (std::size_t n = 1; n <= 20; ++n) {
    for (std::size_t w = 0; w < n; ++w) {
      if (band_dim(n, w) != testutil::count_band_cells(n, w)) ++mismatches;
    }
  }
  const std::size_t spot = band_dim(16, 3);
  std::ostringstream d;
  d << "mismatches=" << mismatches << " band_dim(16,3)=" << spot;
  return {mismatches == 0 && spot == 100, d.str()};
}

Outcome projection_optimality() {
  std::mt19937_64 gen(20240601);
  std::uniform_int_distribution<std::size_t> size(1, 16);
  std::normal_distribution<double> jitter(0.0, 1e-3);
  std::size_t violations = 0, comparisons = 0;
  for (int instance = 0; instance < 1000; ++instance) {
    const std::size_t n = size(gen);
    const std::size_t w = std::uniform_int_distribution<std::size_t>(0, n - 1)(gen);
    const ScoreMatrix h = testutil::random_matrix(gen, n, 0.0, 1.0);
    const ScoreMatrix p = project_band(h, w).to_dense();
    const double best = distance(h, p).total;
    for (int k = 0; k < 1000; ++k) {
      ScoreMatrix b;
      if (k % 2 == 0) {
        b = testutil::random_band_dense(gen, n, w, -0.5, 1.5);
      } else {
        // near-optimal adversary: the projection with a jittered band
        b = p;
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            if (BandMatrix::in_band(i, j, w)) b(i, j) += jitter(gen);
          }
        }
      }
      ++comparisons;
      if (best > distance(h, b).total) ++violations;
    }
  }
  std::ostringstream d;
  d << "violations=" << violations << " of " << comparisons;
  return {violations == 0, d.str()};
}

Outcome structured_dominance() {
  std::mt19937_64 gen(77);
  const double eps = 0.05, rho = 0.05;
  std::size_t violations = 0, strict = 0, equal = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + gen() % 15;
    const std::size_t w = gen() % n;  // includes w = n-1: nothing off-band
    ScoreMatrix h = testutil::random_row_stochastic(gen, n);
    if (trial % 10 == 0) {
      // banded row-stochastic head: nothing to absorb
      h = ScoreMatrix(n);
      for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          if (BandMatrix::in_band(i, j, w)) sum += h(i, j) = 1.0 + static_cast<double>(gen() % 5);
        }
        for (double& v : h.row(i)) v /= sum;
      }
    }
    const double fitted = fit_structured(h, w, eps, rho).residual;
    const double banded = band_residual(h, w, true);

    bool absorbable = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        absorbable = absorbable || (!BandMatrix::in_band(i, j, w) && h(i, j) != 0.0);
      }
    }
    absorbable = absorbable && sparse_budget(n, rho) > 0;

    if (fitted > banded) ++violations;
    if (absorbable && !(fitted < banded)) ++violations;
    if (!absorbable && fitted != banded) ++violations;
    (fitted < banded ? strict : equal)++;
  }
  std::ostringstream d;
  d << "violations=" << violations << " strict=" << strict << " equal=" << equal;
  return {violations == 0, d.str()};
}

Outcome parameter_study() {
  std::size_t failures = 0, comparisons = 0;
  std::ostringstream d;
  for (const char* name : {"syntactic", "rare-syntactic", "positional-spread"}) {
    const MatrixFile a = load_matrix(fixture_path(name));
    double narrow_sum = 0.0, wide_sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      ValidationConfig narrow;
      narrow.w = 3;
      narrow.num_pos = 2;
      narrow.samples_per_family = 30;
      narrow.seed = seed;
      ValidationConfig wide = narrow;
      wide.w = 10;
      wide.num_pos = 1;
      const double m_narrow = validate(a, narrow).global.mean_per_element;
      const double m_wide = validate(a, wide).global.mean_per_element;
      narrow_sum += m_narrow;
      wide_sum += m_wide;
      ++comparisons;
      if (!(m_narrow < m_wide)) ++failures;
    }
    d << name << ": " << narrow_sum / 5 << " vs " << wide_sum / 5 << "; ";
  }
  d << "failures=" << failures << " of " << comparisons;
  return {failures == 0, d.str()};
}

Outcome softmax_contract() {
  std::mt19937_64 gen(31337);
  std::uniform_int_distribution<std::size_t> size(1, 12), dim(1, 8);
  std::uniform_real_distribution<double> scale(0.1, 20.0), shift(-50.0, 50.0);
  std::size_t stochastic_fail = 0, shift_fail = 0, pooling_fail = 0;
  double worst_shift = 0.0, worst_pool = 0.0;

  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = size(gen), d = dim(gen);
    const double s = scale(gen);
    EmbeddingBatch batch{testutil::random_dense(gen, n, d, -s, s), testutil::random_dense(gen, n, d, -s, s),
                         testutil::random_dense(gen, n, 3), d};
    const AttentionOutput base = softmax_attention(batch);
    if (!check_row_stochastic(base.scores, 1e-6)) ++stochastic_fail;

    // Add c to every logit of row j through an extra coordinate: q_j gets
    // c * sqrt(d), every key gets 1.
    const std::size_t j = gen() % n;
    const double c = shift(gen);
    EmbeddingBatch shifted{Matrix(n, d + 1), Matrix(n, d + 1), batch.v, d};
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t k = 0; k < d; ++k) {
        shifted.q(r, k) = batch.q(r, k);
        shifted.k(r, k) = batch.k(r, k);
      }
      shifted.k(r, d) = 1.0;
    }
    shifted.q(j, d) = c * std::sqrt(static_cast<double>(d));
    const AttentionOutput moved = softmax_attention(shifted);
    for (std::size_t i = 0; i < n; ++i) {
      const double diff = std::abs(moved.scores(j, i) - base.scores(j, i));
      worst_shift = std::max(worst_shift, diff);
      if (diff > 1e-9) ++shift_fail;
    }

    // One key dominates row j's logits by a margin of 50.
    const std::size_t target = gen() % n;
    EmbeddingBatch pool{Matrix(n, 1), Matrix(n, 1), batch.v, 1};
    pool.q(j, 0) = 1.0;
    pool.k(target, 0) = 50.0;
    const AttentionOutput pooled = softmax_attention(pool);
    for (std::size_t k = 0; k < 3; ++k) {
      const double diff = std::abs(pooled.output(j, k) - batch.v(target, k));
      worst_pool = std::max(worst_pool, diff);
      if (n > 1 && diff >= 1e-6) ++pooling_fail;
    }
  }
  std::ostringstream d;
  d << "non-stochastic=" << stochastic_fail << " shift>1e-9=" << shift_fail
    << " (max " << worst_shift << ") pooling>=1e-6=" << pooling_fail << " (max " << worst_pool
    << ")";
  return {stochastic_fail == 0 && shift_fail == 0 && pooling_fail == 0, d.str()};
}

Outcome kernel_equivalence() {
  std::mt19937_64 gen(4242);
  std::size_t mismatch = 0, count_fail = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + gen() % 64;
    const std::size_t w = gen() % n;
    const std::size_t d = 1 + gen() % 16;
    const BandMatrix p = BandMatrix::from_dense(testutil::random_band_dense(gen, n, w), w);
    const Matrix v = testutil::random_dense(gen, n, d);
    const SparseError none(n, 0.05, 0.05);
    KernelCounters band_ops, dense_ops;
    const Matrix fast = band_attention(p, none, v, &band_ops);
    const Matrix ref = structured_attention(p.to_dense(), none, v, &dense_ops);
    for (std::size_t k = 0; k < fast.data().size(); ++k) {
      const double diff = std::abs(fast.data()[k] - ref.data()[k]);
      worst = std::max(worst, diff);
      if (diff > 1e-9) ++mismatch;
    }
    if (band_ops.total() != n * (2 * w + 1) * d || dense_ops.total() != n * n * d) ++count_fail;
  }

  const std::vector<std::size_t> sizes{64, 256, 1024};
  const auto rows = bench_attention(sizes, 8, 32, 7);
  std::vector<double> xs, ys;
  for (const auto& r : rows) {
    if (r.path != "band") continue;
    xs.push_back(std::log(static_cast<double>(r.n)));
    ys.push_back(std::log(r.median_ns));
  }
  const double mx = (xs[0] + xs[1] + xs[2]) / 3.0, my = (ys[0] + ys[1] + ys[2]) / 3.0;
  double num = 0.0, den = 0.0;
  for (int k = 0; k < 3; ++k) {
    num += (xs[k] - mx) * (ys[k] - my);
    den += (xs[k] - mx) * (xs[k] - mx);
  }
  const double slope = num / den;

  std::ostringstream d;
  d << "mismatch>1e-9=" << mismatch << " (max " << worst << ") count-mismatch=" << count_fail
    << " band slope=" << slope;
  return {mismatch == 0 && count_fail == 0 && std::abs(slope - 1.0) <= 0.3, d.str()};
}

std::string run_cli(const std::string& args) {
  const std::string cmd = std::string(BANDATTN_CLI_PATH) + " " + args + " 2>/dev/null";
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return "<popen failed>";
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  const int status = pclose(pipe);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) out += "<exit " + std::to_string(status) + ">";
  return out;
}

// Drops the "wall_ms" field from JSON-lines output.
std::string strip_timing(const std::string& jsonl) {
  std::istringstream in(jsonl);
  std::string line, out;
  while (std::getline(in, line)) {
    auto j = nlohmann::ordered_json::parse(line);
    j.erase("wall_ms");
    out += j.dump() + "\n";
  }
  return out;
}

Outcome determinism() {
  const std::string input = fixture_path("rare-syntactic");
  std::size_t differ = 0;
  for (const char* fmt : {"csv", "markdown"}) {
    const std::string args = "validate --input " + input + " --seed 7 --format " + fmt;
    if (run_cli(args) != run_cli(args)) ++differ;
  }
  const std::string jsonl = "validate --input " + input + " --seed 7 --format json-lines";
  const std::string first = run_cli(jsonl), second = run_cli(jsonl);
  if (first.find("<exit") != std::string::npos || strip_timing(first) != strip_timing(second)) ++differ;

  for (const char* fmt : {"csv", "markdown", "json-lines"}) {
    const std::string args = "sweep --input " + input +
                             " --w-range 1:5 --num-pos-range 1:2 --seed 7 --format " + fmt;
    const std::string a = run_cli(args);
    if (a.find("<exit") != std::string::npos || a != run_cli(args)) ++differ;
  }
  std::ostringstream d;
  d << "differing outputs=" << differ << " of 6";
  return {differ == 0, d.str()};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"band dimension formula", 1.0, band_dimension},
      {"projection optimality", 30.0, projection_optimality},
      {"band+sparse dominance", 0.0, structured_dominance},
      {"parameter study (w=3,num_pos=2) < (w=10,num_pos=1)", 10.0, parameter_study},
      {"softmax contract", 0.0, softmax_contract},
      {"kernel equivalence and asymptotics", 0.0, kernel_equivalence},
      {"validate/sweep determinism", 0.0, determinism},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = o.pass;
    if (c.budget_s > 0.0 && secs >= c.budget_s) {
      pass = false;
      o.detail += " (over time budget)";
    }
    failed += pass ? 0 : 1;
    std::printf("[%s] %-52s %7.3fs  %s\n", pass ? "PASS" : "FAIL", c.name.c_str(), secs,
                o.detail.c_str());
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
