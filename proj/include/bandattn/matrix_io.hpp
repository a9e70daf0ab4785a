#pragma once

// Text interchange format for attention score matrices.
//
//   # source=opus_books        optional metadata lines, "# key=value"
//   # pair=en-it
//   n=16 head=3 layer=0        header; head, layer and len=<sentence length> optional
//   0.91 0.05 ...              n lines of n decimal values separated by one space
//
// Values are written in shortest round-trip form, so save followed by load
// reproduces every double bit for bit. Files ending in ".csv" use the fallback
// layout: the same metadata lines, then n comma-separated rows and no header.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "bandattn/matcore.hpp"

namespace bandattn {

struct MatrixFile {
  ScoreMatrix data;
  std::optional<int> head_id;
  std::optional<int> layer_id;
  std::optional<std::size_t> sentence_len;
  std::map<std::string, std::string> metadata;

  std::size_t n() const { return data.n(); }
  bool operator==(const MatrixFile&) const = default;
};

class MatrixFileError : public std::runtime_error {
 public:
  enum class Code { Io, Parse, Shape, NonFinite };

  MatrixFileError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

MatrixFile read_matrix(std::istream& in);
MatrixFile read_matrix_csv(std::istream& in);
void write_matrix(std::ostream& out, const MatrixFile& file);
void write_matrix_csv(std::ostream& out, const MatrixFile& file);

// Dispatch on the extension: ".csv" selects the CSV layout.
MatrixFile load_matrix(const std::filesystem::path& path);
void save_matrix(const std::filesystem::path& path, const MatrixFile& file);

// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace bandattn
