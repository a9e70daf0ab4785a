#pragma once

// Attention forward passes: the reference softmax pooling and the structured
// replacement (I_n P + E) V, with a band kernel whose cost is linear in n.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bandattn/matcore.hpp"

namespace bandattn {

struct EmbeddingBatch {
  Matrix q;  // n x d
  Matrix k;  // n x d
  Matrix v;  // n x d_v
  // Scaling denominator is sqrt(head_dim); 0 means "use d".
  std::size_t head_dim = 0;
};

struct AttentionOutput {
  ScoreMatrix scores;
  Matrix output;
};

// scores[j, i] = exp(<q_j, k_i> / sqrt(k)) / sum_l exp(<q_j, k_l> / sqrt(k)),
// evaluated with the row maximum subtracted; output = scores * V.
// Throws ShapeError on inconsistent shapes and NumericError on non-finite input.
AttentionOutput softmax_attention(const EmbeddingBatch& batch);

// Multiply-add counters filled in by the kernels when requested.
struct KernelCounters {
  std::uint64_t dense_macs = 0;
  std::uint64_t band_macs = 0;
  std::uint64_t sparse_macs = 0;

  std::uint64_t total() const { return dense_macs + band_macs + sparse_macs; }
};

// Dense reference: forms P + E and multiplies by V (n^2 * d multiply-adds).
Matrix structured_attention(const ScoreMatrix& p, const SparseError& e, const Matrix& v,
                            KernelCounters* counters = nullptr);

// Band kernel: every row visits its 2w+1 band slots against a zero-padded copy
// of V (n * (2w+1) * d multiply-adds), then adds E * V over stored nonzeros
// (nnz * d multiply-adds).
Matrix band_attention(const BandMatrix& p, const SparseError& e, const Matrix& v,
                      KernelCounters* counters = nullptr);

struct BenchRow {
  std::size_t n = 0;
  std::string path;  // "dense" or "band"
  double median_ns = 0.0;
  std::uint64_t ops_count = 0;
};

struct BenchOptions {
  std::uint64_t seed = 1;
  // Each timing sample repeats the kernel until at least this much time passed.
  double min_sample_ns = 2.0e5;
};

// Median wall time per call of the dense and band paths for every n. The
// bandwidth is capped at n - 1. Throws ArgumentError when repeats, d or any n
// is zero, or n_values is empty.
std::vector<BenchRow> bench_attention(std::span<const std::size_t> n_values, std::size_t w,
                                      std::size_t d, std::size_t repeats,
                                      const BenchOptions& options = {});

// CSV with header "n,path,median_ns,ops_count".
void write_bench_csv(std::ostream& os, std::span<const BenchRow> rows);

}  // namespace bandattn
