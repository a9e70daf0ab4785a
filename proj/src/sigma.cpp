#include "bandattn/sigma.hpp"

#include <algorithm>
#include <numeric>

#include "bandattn/random.hpp"

namespace bandattn {

namespace {

void require_n(std::size_t n, const char* what) {
  if (n == 0) throw DomainError(std::string(what) + ": n must be >= 1");
}

// Rows that lost every entry fall back to attending themselves.
void repair_and_normalize(ScoreMatrix& m, bool normalize_rows) {
  for (std::size_t i = 0; i < m.n(); ++i) {
    auto row = m.row(i);
    const double sum = std::accumulate(row.begin(), row.end(), 0.0);
    if (sum == 0.0) {
      row[i] = 1.0;
      continue;
    }
    if (normalize_rows) {
      for (double& v : row) v /= sum;
    }
  }
}

}  // namespace

std::string_view family_name(Family f) {
  switch (f) {
    case Family::Positional:
      return "positional";
    case Family::Syntactic:
      return "syntactic";
    case Family::RareToken:
      return "rare-token";
  }
  return "unknown";
}

std::optional<Family> parse_family(std::string_view name) {
  if (name == "positional" || name == "sigma1") return Family::Positional;
  if (name == "syntactic" || name == "sigma2") return Family::Syntactic;
  if (name == "rare-token" || name == "rare_token" || name == "sigma3") return Family::RareToken;
  return std::nullopt;
}

ScoreMatrix gen_sigma1(std::size_t n) {
  require_n(n, "gen_sigma1");
  return ScoreMatrix::identity(n);
}

ScoreMatrix gen_sigma2(const SigmaSpec& spec) {
  require_n(spec.n, "gen_sigma2");
  if (spec.w >= spec.n) {
    throw DomainError("gen_sigma2: bandwidth " + std::to_string(spec.w) + " must be < n = " +
                      std::to_string(spec.n));
  }
  if (!(spec.dropout_p > 0.0 && spec.dropout_p < 1.0)) {
    throw DomainError("gen_sigma2: dropout probability must lie in (0, 1)");
  }
  const std::size_t n = spec.n;
  const std::size_t w = spec.w;
  Rng rng(spec.seed);
  ScoreMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i > w ? i - w : 0;
    const std::size_t hi = std::min(n - 1, i + w);
    for (std::size_t j = lo; j <= hi; ++j) {
      m(i, j) = rng.bernoulli(spec.dropout_p) ? 0.0 : 1.0;
    }
  }
  repair_and_normalize(m, spec.normalize_rows);
  return m;
}

std::vector<RareBlock> rare_blocks(const SigmaSpec& spec) {
  require_n(spec.n, "rare_blocks");
  const std::size_t n = spec.n;
  std::vector<RareBlock> blocks;

  if (spec.rare_positions) {
    const auto& tokens = *spec.rare_positions;
    std::vector<std::size_t> windows;
    if (spec.rare_windows) {
      windows = *spec.rare_windows;
      if (windows.size() != tokens.size()) {
        throw DomainError("rare_blocks: rare_positions and rare_windows differ in length");
      }
    } else {
      windows.assign(tokens.size(), spec.w);
    }
    std::size_t next_free = 0;
    for (std::size_t k = 0; k < tokens.size(); ++k) {
      const std::size_t t = tokens[k];
      const std::size_t win = windows[k];
      if (win == 0) throw DomainError("rare_blocks: window size must be >= 1");
      const std::size_t back = (win - 1) / 2;
      if (t >= n || t < back || t - back + win > n) {
        throw DomainError("rare_blocks: block for token " + std::to_string(t) +
                          " falls outside the matrix");
      }
      const std::size_t first = t - back;
      if (first < next_free) {
        throw DomainError("rare_blocks: block for token " + std::to_string(t) +
                          " overlaps the previous block or tokens are not ascending");
      }
      blocks.push_back({t, first, win});
      next_free = first + win;
    }
    return blocks;
  }

  const std::size_t s = spec.num_pos;
  if (s == 0) return blocks;
  if (spec.w == 0) throw DomainError("rare_blocks: window size must be >= 1");
  if (s * spec.w > n) {
    throw DomainError("rare_blocks: " + std::to_string(s) + " blocks of size " +
                      std::to_string(spec.w) + " do not fit in n = " + std::to_string(n));
  }
  // Stars and bars: s blocks and n - s*w free rows form a sequence of
  // n - s*w + s items; choosing which s items are blocks is a uniform draw
  // over all ordered non-overlapping layouts.
  Rng rng(spec.seed);
  const std::size_t free_rows = n - s * spec.w;
  const auto slots = rng.sample_sorted(free_rows + s, s);
  for (std::size_t k = 0; k < s; ++k) {
    const std::size_t first = slots[k] - k + k * spec.w;
    blocks.push_back({first + (spec.w - 1) / 2, first, spec.w});
  }
  return blocks;
}

ScoreMatrix gen_sigma3(const SigmaSpec& spec) {
  ScoreMatrix m = gen_sigma1(spec.n);
  for (const auto& b : rare_blocks(spec)) {
    for (std::size_t r = b.first_row; r < b.first_row + b.window; ++r) {
      m(r, r) = 0.0;
      m(r, b.token) = 1.0;
    }
  }
  return m;
}

ScoreMatrix gen_sigma(const SigmaSpec& spec) {
  switch (spec.family) {
    case Family::Positional:
      return gen_sigma1(spec.n);
    case Family::Syntactic:
      return gen_sigma2(spec);
    case Family::RareToken:
      return gen_sigma3(spec);
  }
  throw DomainError("gen_sigma: unknown family");
}

SparseError gen_noise(std::size_t n, const NoiseSpec& spec) {
  require_n(n, "gen_noise");
  if (!(spec.eps > 0.0)) throw DomainError("gen_noise: eps must be > 0");
  if (!(spec.rho >= 0.0 && spec.rho < 1.0)) throw DomainError("gen_noise: rho must lie in [0, 1)");

  const std::size_t count = sparse_budget(n, spec.rho);
  Rng rng(spec.seed);
  std::vector<SparseEntry> entries;
  entries.reserve(count);
  for (std::size_t cell : rng.sample_sorted(n * n, count)) {
    // 1 - u lies in (0, 1], so stored values are never zero.
    double v = spec.eps * (1.0 - rng.uniform01());
    if (spec.signed_values && rng.bernoulli(0.5)) v = -v;
    entries.push_back({cell / n, cell % n, v});
  }
  return SparseError(n, spec.eps, spec.rho, std::move(entries));
}

ScoreMatrix gen_candidate(const ScoreMatrix& p, const SparseError& noise) {
  if (p.n() != noise.n()) {
    throw ShapeError("gen_candidate: P is " + std::to_string(p.n()) + "x" + std::to_string(p.n()) +
                     " but the noise is " + std::to_string(noise.n()) + "x" +
                     std::to_string(noise.n()));
  }
  ScoreMatrix out = matmul(ScoreMatrix::identity(p.n()), p);
  for (const auto& e : noise.entries()) out(e.i, e.j) += e.value;
  return out;
}

ScoreMatrix gen_candidate(const SigmaSpec& spec, const std::optional<NoiseSpec>& noise) {
  const ScoreMatrix p = gen_sigma(spec);
  if (!noise) return gen_candidate(p, SparseError(spec.n, 0.0, 0.0));
  return gen_candidate(p, gen_noise(spec.n, *noise));
}

}  // namespace bandattn
