#include "bandattn/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

namespace bandattn {

namespace {

using Code = MatrixFileError::Code;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_value(std::string_view token, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw MatrixFileError(Code::Parse, "line " + std::to_string(line_no) + ": bad number '" +
                                           std::string(token) + "'");
  }
  if (!std::isfinite(v)) {
    throw MatrixFileError(Code::NonFinite,
                          "line " + std::to_string(line_no) + ": non-finite entry '" +
                              std::string(token) + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(std::string_view token, std::string_view key) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw MatrixFileError(Code::Parse, "header: bad value for '" + std::string(key) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= line.size()) {
    const auto pos = line.find(sep, start);
    const auto end = pos == std::string_view::npos ? line.size() : pos;
    out.push_back(trim(line.substr(start, end - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

// Consumes "# key=value" lines; returns the first non-comment, non-blank line.
std::optional<std::string> read_metadata(std::istream& in, MatrixFile& file, std::size_t& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t.front() != '#') return std::string(t);
    const auto body = trim(t.substr(1));
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw MatrixFileError(Code::Parse, "line " + std::to_string(line_no) +
                                             ": metadata must be '# key=value'");
    }
    file.metadata[std::string(trim(body.substr(0, eq)))] = std::string(trim(body.substr(eq + 1)));
  }
  return std::nullopt;
}

void check_sentence_len(const MatrixFile& file) {
  if (file.sentence_len && *file.sentence_len != file.n()) {
    throw MatrixFileError(Code::Shape, "sentence length " + std::to_string(*file.sentence_len) +
                                           " does not match n = " + std::to_string(file.n()));
  }
}

std::string matrix_error_prefix(const std::filesystem::path& path) { return path.string() + ": "; }

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

MatrixFile read_matrix(std::istream& in) {
  MatrixFile file;
  std::size_t line_no = 0;
  const auto header = read_metadata(in, file, line_no);
  if (!header) throw MatrixFileError(Code::Parse, "missing header line");

  std::optional<std::size_t> n;
  std::istringstream hs(*header);
  std::string token;
  while (hs >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) {
      throw MatrixFileError(Code::Parse, "header: expected key=value, got '" + token + "'");
    }
    const std::string key = token.substr(0, eq);
    const std::string_view value = std::string_view(token).substr(eq + 1);
    if (key == "n") {
      n = parse_int<std::size_t>(value, key);
    } else if (key == "head") {
      if (!value.empty()) file.head_id = parse_int<int>(value, key);
    } else if (key == "layer") {
      if (!value.empty()) file.layer_id = parse_int<int>(value, key);
    } else if (key == "len") {
      if (!value.empty()) file.sentence_len = parse_int<std::size_t>(value, key);
    } else {
      throw MatrixFileError(Code::Parse, "header: unknown key '" + key + "'");
    }
  }
  if (!n) throw MatrixFileError(Code::Parse, "header: missing n=<int>");
  if (*n == 0) throw MatrixFileError(Code::Shape, "header: n must be >= 1");

  std::vector<double> values;
  values.reserve(*n * *n);
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    std::size_t count = 0;
    for (auto tok : split(t, ' ')) {
      if (tok.empty()) continue;
      values.push_back(parse_value(tok, line_no));
      ++count;
    }
    if (count != *n) {
      throw MatrixFileError(Code::Shape, "line " + std::to_string(line_no) + ": expected " +
                                             std::to_string(*n) + " values, got " +
                                             std::to_string(count));
    }
    ++rows;
  }
  if (rows != *n) {
    throw MatrixFileError(Code::Shape, "expected " + std::to_string(*n) + " rows, got " +
                                           std::to_string(rows));
  }
  file.data = ScoreMatrix(*n, std::move(values));
  check_sentence_len(file);
  return file;
}

MatrixFile read_matrix_csv(std::istream& in) {
  MatrixFile file;
  std::size_t line_no = 0;
  auto first = read_metadata(in, file, line_no);
  if (!first) throw MatrixFileError(Code::Parse, "empty CSV matrix");

  std::vector<std::vector<double>> rows;
  auto consume = [&](std::string_view t) {
    std::vector<double> row;
    for (auto tok : split(t, ',')) row.push_back(parse_value(tok, line_no));
    rows.push_back(std::move(row));
  };
  consume(*first);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (!t.empty()) consume(t);
  }
  const std::size_t n = rows.size();
  std::vector<double> values;
  values.reserve(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    if (rows[r].size() != n) {
      throw MatrixFileError(Code::Shape, "row " + std::to_string(r) + ": expected " +
                                             std::to_string(n) + " values, got " +
                                             std::to_string(rows[r].size()));
    }
    values.insert(values.end(), rows[r].begin(), rows[r].end());
  }
  file.data = ScoreMatrix(n, std::move(values));
  check_sentence_len(file);
  return file;
}

namespace {

void write_metadata(std::ostream& out, const MatrixFile& file) {
  for (const auto& [key, value] : file.metadata) out << "# " << key << '=' << value << '\n';
}

void write_rows(std::ostream& out, const ScoreMatrix& m, char sep) {
  for (std::size_t i = 0; i < m.n(); ++i) {
    for (std::size_t j = 0; j < m.n(); ++j) {
      if (j) out << sep;
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

}  // namespace

void write_matrix(std::ostream& out, const MatrixFile& file) {
  write_metadata(out, file);
  out << "n=" << file.n();
  if (file.head_id) out << " head=" << *file.head_id;
  if (file.layer_id) out << " layer=" << *file.layer_id;
  if (file.sentence_len) out << " len=" << *file.sentence_len;
  out << '\n';
  write_rows(out, file.data, ' ');
}

void write_matrix_csv(std::ostream& out, const MatrixFile& file) {
  write_metadata(out, file);
  write_rows(out, file.data, ',');
}

MatrixFile load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MatrixFileError(Code::Io, matrix_error_prefix(path) + "cannot open for reading");
  try {
    return path.extension() == ".csv" ? read_matrix_csv(in) : read_matrix(in);
  } catch (const MatrixFileError& e) {
    throw MatrixFileError(e.code(), matrix_error_prefix(path) + e.what());
  }
}

void save_matrix(const std::filesystem::path& path, const MatrixFile& file) {
  std::ofstream out(path);
  if (!out) throw MatrixFileError(Code::Io, matrix_error_prefix(path) + "cannot open for writing");
  if (path.extension() == ".csv") {
    write_matrix_csv(out, file);
  } else {
    write_matrix(out, file);
  }
  if (!out) throw MatrixFileError(Code::Io, matrix_error_prefix(path) + "write failed");
}

}  // namespace bandattn
