#include "bandattn/attnsim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "bandattn/random.hpp"

namespace bandattn {

namespace {

void require_finite(const Matrix& m, const char* what) {
  for (double v : m.data()) {
    if (!std::isfinite(v)) throw NumericError(std::string("softmax_attention: non-finite ") + what);
  }
}

void require_value_rows(std::size_t n, const Matrix& v, const char* what) {
  if (v.rows() != n) {
    throw ShapeError(std::string(what) + ": V has " + std::to_string(v.rows()) +
                     " rows, expected " + std::to_string(n));
  }
}

}  // namespace

AttentionOutput softmax_attention(const EmbeddingBatch& batch) {
  const Matrix& q = batch.q;
  const Matrix& k = batch.k;
  const Matrix& v = batch.v;
  const std::size_t n = q.rows();
  const std::size_t d = q.cols();
  if (n == 0) throw ShapeError("softmax_attention: empty batch");
  if (k.rows() != n || k.cols() != d) throw ShapeError("softmax_attention: K must match Q's shape");
  require_value_rows(n, v, "softmax_attention");
  require_finite(q, "query");
  require_finite(k, "key");
  require_finite(v, "value");

  const std::size_t head_dim = batch.head_dim == 0 ? d : batch.head_dim;
  const double scale = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(head_dim, 1)));

  AttentionOutput out{ScoreMatrix(n), Matrix(n, v.cols())};
  std::vector<double> logits(n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto qj = q.row(j);
    double peak = -INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
      const auto ki = k.row(i);
      double dot = 0.0;
      for (std::size_t c = 0; c < d; ++c) dot += qj[c] * ki[c];
      logits[i] = dot * scale;
      peak = std::max(peak, logits[i]);
    }
    if (!std::isfinite(peak)) throw NumericError("softmax_attention: logit overflow");
    double sum = 0.0;
    auto row = out.scores.row(j);
    for (std::size_t i = 0; i < n; ++i) {
      row[i] = std::exp(logits[i] - peak);
      sum += row[i];
    }
    for (double& s : row) s /= sum;

    auto oj = out.output.row(j);
    for (std::size_t i = 0; i < n; ++i) {
      const auto vi = v.row(i);
      for (std::size_t c = 0; c < v.cols(); ++c) oj[c] += row[i] * vi[c];
    }
  }
  return out;
}

Matrix structured_attention(const ScoreMatrix& p, const SparseError& e, const Matrix& v,
                            KernelCounters* counters) {
  const std::size_t n = p.n();
  if (e.n() != n) throw ShapeError("structured_attention: P and E differ in size");
  require_value_rows(n, v, "structured_attention");

  ScoreMatrix weights = p;
  for (const auto& entry : e.entries()) weights(entry.i, entry.j) += entry.value;

  const std::size_t d = v.cols();
  Matrix out(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    auto oi = out.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double a = weights(i, j);
      const auto vj = v.row(j);
      for (std::size_t c = 0; c < d; ++c) oi[c] += a * vj[c];
    }
  }
  if (counters) counters->dense_macs += static_cast<std::uint64_t>(n) * n * d;
  return out;
}

Matrix band_attention(const BandMatrix& p, const SparseError& e, const Matrix& v,
                      KernelCounters* counters) {
  const std::size_t n = p.n();
  const std::size_t w = p.w();
  if (e.n() != n) throw ShapeError("band_attention: P and E differ in size");
  require_value_rows(n, v, "band_attention");

  const std::size_t d = v.cols();
  const std::size_t stride = p.stride();

  // Row r of `padded` is V row r - w, zero outside [0, n).
  std::vector<double> padded((n + 2 * w) * d, 0.0);
  std::copy(v.data().begin(), v.data().end(), padded.begin() + static_cast<std::ptrdiff_t>(w * d));

  Matrix out(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto slots = p.row_slots(i);
    auto oi = out.row(i);
    for (std::size_t s = 0; s < stride; ++s) {
      const double a = slots[s];
      const double* vr = padded.data() + (i + s) * d;
      for (std::size_t c = 0; c < d; ++c) oi[c] += a * vr[c];
    }
  }
  for (const auto& entry : e.entries()) {
    auto oi = out.row(entry.i);
    const auto vj = v.row(entry.j);
    for (std::size_t c = 0; c < d; ++c) oi[c] += entry.value * vj[c];
  }
  if (counters) {
    counters->band_macs += static_cast<std::uint64_t>(n) * stride * d;
    counters->sparse_macs += static_cast<std::uint64_t>(e.nnz()) * d;
  }
  return out;
}

namespace {

template <typename Kernel>
double median_ns_per_call(Kernel&& kernel, std::size_t repeats, double min_sample_ns) {
  using clock = std::chrono::steady_clock;
  std::vector<double> samples;
  samples.reserve(repeats);
  kernel();  // warm-up
  for (std::size_t r = 0; r < repeats; ++r) {
    std::size_t calls = 0;
    const auto start = clock::now();
    double elapsed = 0.0;
    do {
      kernel();
      ++calls;
      elapsed = std::chrono::duration<double, std::nano>(clock::now() - start).count();
    } while (elapsed < min_sample_ns);
    samples.push_back(elapsed / static_cast<double>(calls));
  }
  std::sort(samples.begin(), samples.end());
  const std::size_t mid = samples.size() / 2;
  return samples.size() % 2 == 1 ? samples[mid] : 0.5 * (samples[mid - 1] + samples[mid]);
}

}  // namespace

std::vector<BenchRow> bench_attention(std::span<const std::size_t> n_values, std::size_t w,
                                      std::size_t d, std::size_t repeats,
                                      const BenchOptions& options) {
  if (n_values.empty()) throw ArgumentError("bench_attention: no sizes given");
  if (repeats == 0) throw ArgumentError("bench_attention: repeats must be >= 1");
  if (d == 0) throw ArgumentError("bench_attention: dimension must be >= 1");

  std::vector<BenchRow> rows;
  volatile double sink = 0.0;
  for (std::size_t n : n_values) {
    if (n == 0) throw ArgumentError("bench_attention: sizes must be >= 1");
    const std::size_t bw = std::min(w, n - 1);
    Rng rng(derive_seed(options.seed, n));

    BandMatrix band(n, bw);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i > bw ? i - bw : 0;
      const std::size_t hi = std::min(n - 1, i + bw);
      for (std::size_t j = lo; j <= hi; ++j) band.set(i, j, rng.uniform01());
    }
    Matrix v(n, d);
    for (double& x : v.data()) x = rng.uniform(-1.0, 1.0);
    const ScoreMatrix dense = band.to_dense();
    const SparseError none(n, 0.0, 0.0);

    KernelCounters dense_ops;
    KernelCounters band_ops;
    structured_attention(dense, none, v, &dense_ops);
    band_attention(band, none, v, &band_ops);

    const double dense_ns = median_ns_per_call(
        [&] { sink = structured_attention(dense, none, v)(0, 0); }, repeats,
        options.min_sample_ns);
    const double band_ns = median_ns_per_call(
        [&] { sink = band_attention(band, none, v)(0, 0); }, repeats, options.min_sample_ns);

    rows.push_back({n, "dense", dense_ns, dense_ops.total()});
    rows.push_back({n, "band", band_ns, band_ops.total()});
  }
  return rows;
}

void write_bench_csv(std::ostream& os, std::span<const BenchRow> rows) {
  os << "n,path,median_ns,ops_count\n";
  for (const auto& r : rows) {
    os << r.n << ',' << r.path << ',' << static_cast<std::uint64_t>(std::llround(r.median_ns)) << ','
       << r.ops_count << '\n';
  }
}

}  // namespace bandattn
