// bandattn: structured attention-score approximation toolkit.
//
//   bandattn validate   --input A.attn [--w 3 --num-pos 2 --samples 30 ...]
//   bandattn sweep      --input A.attn --w-range 1:5 --num-pos-range 1:2
//   bandattn project    --input A.attn --w 3
//   bandattn gen        --family syntactic --n 16 --w 3 --seed 7
//   bandattn attn-bench --n 64,256,1024 --w 8 --d 32
//   bandattn convert    --input A.attn --output A.csv
//
// Exit codes: 0 success, 2 argument error, 3 data error.

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bandattn/approx.hpp"
#include "bandattn/attnsim.hpp"
#include "bandattn/harness.hpp"
#include "bandattn/matrix_io.hpp"
#include "bandattn/report.hpp"
#include "bandattn/sigma.hpp"

namespace {

using namespace bandattn;

constexpr int kExitArgument = 2;
constexpr int kExitData = 3;

struct ConfigFlags {
  std::string config_path;
  std::optional<std::size_t> w;
  std::optional<std::size_t> num_pos;
  std::optional<std::size_t> samples;
  std::optional<double> eps;
  std::optional<double> rho;
  std::optional<double> dropout_p;
  std::optional<std::uint64_t> seed;
  std::optional<bool> normalize_rows;
  std::optional<bool> signed_noise;
  std::vector<std::string> families;
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f, bool with_w) {
  cmd->add_option("--config", f.config_path, "JSON file with validation settings");
  if (with_w) {
    cmd->add_option("--w", f.w, "bandwidth / context window (default 3)");
    cmd->add_option("--num-pos", f.num_pos, "rare-token blocks per candidate (default 2)");
  }
  cmd->add_option("--samples", f.samples, "candidates per family (default 30)");
  cmd->add_option("--eps", f.eps, "noise bound (default 0.05)");
  cmd->add_option("--rho", f.rho, "noise density, 0 disables noise (default 0.05)");
  cmd->add_option("--dropout-p", f.dropout_p, "band dropout probability (default 0.3)");
  cmd->add_option("--seed", f.seed, "base RNG seed (default 0)");
  cmd->add_option("--normalize-rows", f.normalize_rows, "normalize syntactic rows (default true)");
  cmd->add_option("--signed-noise", f.signed_noise, "noise in [-eps, eps] (default false)");
  cmd->add_option("--families", f.families, "subset of positional,syntactic,rare-token")
      ->delimiter(',');
}

ValidationConfig resolve_config(const ConfigFlags& f) {
  ValidationConfig cfg;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw ArgumentError("cannot open config file " + f.config_path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ArgumentError("config file " + f.config_path + ": " + e.what());
    }
    cfg = config_from_json(j);
  }
  if (f.w) cfg.w = *f.w;
  if (f.num_pos) cfg.num_pos = *f.num_pos;
  if (f.samples) cfg.samples_per_family = *f.samples;
  if (f.eps) cfg.eps = *f.eps;
  if (f.rho) cfg.rho = *f.rho;
  if (f.dropout_p) cfg.dropout_p = *f.dropout_p;
  if (f.seed) cfg.seed = *f.seed;
  if (f.normalize_rows) cfg.normalize_rows = *f.normalize_rows;
  if (f.signed_noise) cfg.signed_noise = *f.signed_noise;
  if (!f.families.empty()) {
    cfg.families.clear();
    for (const auto& name : f.families) {
      const auto fam = parse_family(name);
      if (!fam) throw ArgumentError("unknown family '" + name + "'");
      cfg.families.push_back(*fam);
    }
  }
  check_config(cfg);
  return cfg;
}

ReportFormat resolve_format(const std::string& name) {
  const auto f = parse_format(name);
  if (!f) throw ArgumentError("unknown format '" + name + "' (csv, markdown, json-lines)");
  return *f;
}

// "a:b" (inclusive) or "a,b,c".
std::vector<std::size_t> parse_range(const std::string& text) {
  auto number = [&](std::string_view s) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
      throw ArgumentError("bad range '" + text + "'");
    }
    return v;
  };
  std::vector<std::size_t> out;
  if (const auto colon = text.find(':'); colon != std::string::npos) {
    const std::size_t lo = number(std::string_view(text).substr(0, colon));
    const std::size_t hi = number(std::string_view(text).substr(colon + 1));
    for (std::size_t v = lo; v <= hi; ++v) out.push_back(v);
    return out;
  }
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    out.push_back(number(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

// Writes to `path`, or stdout when empty.
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw MatrixFileError(MatrixFileError::Code::Io, "cannot open " + path + " for writing");
  fn(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured attention-score approximation toolkit"};
  app.require_subcommand(1);

  // validate
  ConfigFlags vflags;
  std::string v_input, v_format = "csv", v_out;
  auto* validate_cmd = app.add_subcommand("validate", "best candidate per head family");
  validate_cmd->add_option("--input", v_input, "attention matrix file")->required();
  add_config_flags(validate_cmd, vflags, true);
  validate_cmd->add_option("--format", v_format, "csv, markdown or json-lines");
  validate_cmd->add_option("--out", v_out, "output file (default stdout)");

  // sweep
  ConfigFlags sflags;
  std::string s_input, s_w_range = "1:5", s_np_range = "1:2", s_format = "csv", s_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "validate over a (w, num_pos) grid");
  sweep_cmd->add_option("--input", s_input, "attention matrix file")->required();
  sweep_cmd->add_option("--w-range", s_w_range, "bandwidths, 'a:b' or 'a,b,c'");
  sweep_cmd->add_option("--num-pos-range", s_np_range, "rare-token counts, 'a:b' or 'a,b,c'");
  add_config_flags(sweep_cmd, sflags, false);
  sweep_cmd->add_option("--format", s_format, "csv, markdown or json-lines");
  sweep_cmd->add_option("--out", s_out, "output file (default stdout)");

  // project
  std::string p_input, p_out, p_band_out;
  std::size_t p_w = 3;
  double p_eps = 0.05, p_rho = 0.05;
  auto* project_cmd = app.add_subcommand("project", "band and band-plus-sparse best approximations");
  project_cmd->add_option("--input", p_input, "attention matrix file")->required();
  project_cmd->add_option("--w", p_w, "bandwidth");
  project_cmd->add_option("--eps", p_eps, "error bound");
  project_cmd->add_option("--rho", p_rho, "error density budget");
  project_cmd->add_option("--out", p_out, "summary JSON (default stdout)");
  project_cmd->add_option("--band-out", p_band_out, "write the clamped band projection here");

  // gen
  std::string g_family = "positional", g_fixture, g_out;
  std::size_t g_n = 16, g_w = 3, g_num_pos = 2;
  double g_dropout = 0.3, g_eps = 0.05, g_rho = 0.0;
  std::uint64_t g_seed = 0;
  bool g_normalize = true, g_signed = false;
  auto* gen_cmd = app.add_subcommand("gen", "generate a structured candidate or a fixture");
  gen_cmd->add_option("--family", g_family, "positional, syntactic or rare-token");
  gen_cmd->add_option("--fixture", g_fixture,
                      "syntactic, rare-syntactic, positional-spread or exact-band3");
  gen_cmd->add_option("--n", g_n, "matrix size");
  gen_cmd->add_option("--w", g_w, "bandwidth / window");
  gen_cmd->add_option("--num-pos", g_num_pos, "rare-token blocks");
  gen_cmd->add_option("--dropout-p", g_dropout, "band dropout probability");
  gen_cmd->add_option("--eps", g_eps, "noise bound");
  gen_cmd->add_option("--rho", g_rho, "noise density (default 0: no noise)");
  gen_cmd->add_option("--signed-noise", g_signed, "noise in [-eps, eps]");
  gen_cmd->add_option("--seed", g_seed, "RNG seed");
  gen_cmd->add_option("--normalize-rows", g_normalize, "normalize syntactic rows");
  gen_cmd->add_option("--out", g_out, "output matrix file (default stdout)");

  // attn-bench
  std::string b_sizes = "64,256,1024", b_out;
  std::size_t b_w = 8, b_d = 32, b_repeats = 7;
  std::uint64_t b_seed = 1;
  auto* bench_cmd = app.add_subcommand("attn-bench", "time dense vs band structured attention");
  bench_cmd->add_option("--n", b_sizes, "sequence lengths, 'a,b,c'");
  bench_cmd->add_option("--w", b_w, "bandwidth");
  bench_cmd->add_option("--d", b_d, "value dimension");
  bench_cmd->add_option("--repeats", b_repeats, "timing samples per path");
  bench_cmd->add_option("--seed", b_seed, "RNG seed");
  bench_cmd->add_option("--out", b_out, "CSV output (default stdout)");

  // convert
  std::string c_input, c_output;
  auto* convert_cmd = app.add_subcommand("convert", "convert between .attn and .csv layouts");
  convert_cmd->add_option("--input", c_input, "source file")->required();
  convert_cmd->add_option("--output", c_output, "destination file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitArgument;
  }

  try {
    if (*validate_cmd) {
      const ValidationConfig cfg = resolve_config(vflags);
      const ReportFormat fmt = resolve_format(v_format);
      const MatrixFile a = load_matrix(v_input);
      const ApproxReport report = validate(a, cfg);
      with_output(v_out, [&](std::ostream& os) { emit_report(os, report, fmt); });
    } else if (*sweep_cmd) {
      const ValidationConfig cfg = resolve_config(sflags);
      const ReportFormat fmt = resolve_format(s_format);
      const auto w_range = parse_range(s_w_range);
      const auto np_range = parse_range(s_np_range);
      const MatrixFile a = load_matrix(s_input);
      const SweepResult result = sweep(a.data, w_range, np_range, cfg);
      with_output(s_out, [&](std::ostream& os) { emit_sweep(os, result, fmt); });
      const auto& best = result.cells[result.best];
      std::cerr << "best: w=" << best.w << " num_pos=" << best.num_pos
                << " mean_per_element=" << format_double(best.report.global.mean_per_element)
                << '\n';
    } else if (*project_cmd) {
      const MatrixFile a = load_matrix(p_input);
      const ProjectionSummary s = project_summary(a.data, p_w, p_eps, p_rho);
      nlohmann::ordered_json j;
      j["n"] = s.n;
      j["w"] = s.w;
      j["band_dim"] = s.band_dimension;
      j["band_residual"] = s.band_residual;
      j["band_mean_per_element"] = s.band_mean;
      j["structured_residual"] = s.structured_residual;
      j["structured_mean_per_element"] = s.structured_mean;
      j["error_nnz"] = s.error_nnz;
      with_output(p_out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
      if (!p_band_out.empty()) {
        MatrixFile band = a;
        band.data = project_band(a.data, p_w, true).to_dense();
        band.metadata["projection_w"] = std::to_string(p_w);
        save_matrix(p_band_out, band);
      }
    } else if (*gen_cmd) {
      MatrixFile file;
      if (!g_fixture.empty()) {
        const auto kind = parse_fixture(g_fixture);
        if (!kind) throw ArgumentError("unknown fixture '" + g_fixture + "'");
        file = make_fixture(*kind, g_n, g_seed);
      } else {
        const auto family = parse_family(g_family);
        if (!family) throw ArgumentError("unknown family '" + g_family + "'");
        SigmaSpec spec;
        spec.family = *family;
        spec.n = g_n;
        spec.w = g_w;
        spec.num_pos = g_num_pos;
        spec.dropout_p = g_dropout;
        spec.seed = g_seed;
        spec.normalize_rows = g_normalize;
        std::optional<NoiseSpec> noise;
        if (g_rho > 0.0) noise = NoiseSpec{g_eps, g_rho, g_signed, g_seed ^ 0x5eedULL};
        file.data = gen_candidate(spec, noise);
        file.metadata["family"] = std::string(family_name(*family));
        file.metadata["seed"] = std::to_string(g_seed);
      }
      if (g_out.empty()) {
        write_matrix(std::cout, file);
      } else {
        save_matrix(g_out, file);
      }
    } else if (*bench_cmd) {
      const auto sizes = parse_range(b_sizes);
      const auto rows = bench_attention(sizes, b_w, b_d, b_repeats, BenchOptions{b_seed});
      with_output(b_out, [&](std::ostream& os) { write_bench_csv(os, rows); });
    } else if (*convert_cmd) {
      save_matrix(c_output, load_matrix(c_input));
    }
  } catch (const MatrixFileError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitArgument;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitArgument;
  }
  return 0;
}
