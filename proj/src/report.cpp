#include "bandattn/report.hpp"

#include <istream>
#include <ostream>
#include <string>

namespace bandattn {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string global_label(const FamilyResult& r) {
  return "global:" + std::string(family_name(r.family));
}

ordered_json row_json(std::string_view kind, const FamilyResult& r) {
  ordered_json j;
  j["kind"] = kind;
  j["family"] = std::string(family_name(r.family));
  j["best_index"] = r.best_index;
  j["total_distance"] = r.total_distance;
  j["mean_per_element"] = r.mean_per_element;
  return j;
}

FamilyResult row_from_json(const nlohmann::json& j) {
  const auto family = parse_family(j.at("family").get<std::string>());
  if (!family) throw ArgumentError("report: unknown family");
  return {*family, j.at("best_index").get<std::size_t>(), j.at("total_distance").get<double>(),
          j.at("mean_per_element").get<double>()};
}

void csv_row(std::ostream& os, const std::string& label, const FamilyResult& r) {
  os << label << ',' << r.best_index << ',' << format_double(r.total_distance) << ','
     << format_double(r.mean_per_element) << '\n';
}

void markdown_row(std::ostream& os, const std::string& label, const FamilyResult& r) {
  os << "| " << label << " | " << r.best_index << " | " << format_double(r.total_distance) << " | "
     << format_double(r.mean_per_element) << " |\n";
}

}  // namespace

std::optional<ReportFormat> parse_format(std::string_view name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "markdown" || name == "md") return ReportFormat::Markdown;
  if (name == "json-lines" || name == "jsonl") return ReportFormat::JsonLines;
  return std::nullopt;
}

void emit_report(std::ostream& os, const ApproxReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Csv:
      os << "family,best_index,total_distance,mean_per_element\n";
      for (const auto& r : report.families) csv_row(os, std::string(family_name(r.family)), r);
      if (!report.families.empty()) csv_row(os, global_label(report.global), report.global);
      break;
    case ReportFormat::Markdown:
      os << "n = " << report.n << ", config: " << config_to_json(report.config).dump() << "\n\n";
      os << "| family | best_index | total_distance | mean_per_element |\n";
      os << "|---|---|---|---|\n";
      for (const auto& r : report.families) markdown_row(os, std::string(family_name(r.family)), r);
      if (!report.families.empty()) markdown_row(os, global_label(report.global), report.global);
      break;
    case ReportFormat::JsonLines: {
      ordered_json head;
      head["kind"] = "config";
      head["n"] = report.n;
      head["config"] = config_to_json(report.config);
      os << head.dump() << '\n';
      for (const auto& r : report.families) os << row_json("family", r).dump() << '\n';
      auto global = row_json("global", report.global);
      global["wall_ms"] = report.wall_ms;
      os << global.dump() << '\n';
      break;
    }
  }
}

void emit_sweep(std::ostream& os, const SweepResult& result, ReportFormat format) {
  switch (format) {
    case ReportFormat::Csv:
      os << "w,num_pos,best_family,best_index,total_distance,mean_per_element\n";
      for (const auto& c : result.cells) {
        const auto& g = c.report.global;
        os << c.w << ',' << c.num_pos << ',' << family_name(g.family) << ',' << g.best_index << ','
           << format_double(g.total_distance) << ',' << format_double(g.mean_per_element) << '\n';
      }
      break;
    case ReportFormat::Markdown:
      os << "| w | num_pos | best_family | best_index | total_distance | mean_per_element |\n";
      os << "|---|---|---|---|---|---|\n";
      for (const auto& c : result.cells) {
        const auto& g = c.report.global;
        os << "| " << c.w << " | " << c.num_pos << " | " << family_name(g.family) << " | "
           << g.best_index << " | " << format_double(g.total_distance) << " | "
           << format_double(g.mean_per_element) << " |\n";
      }
      if (!result.cells.empty()) {
        const auto& b = result.cells[result.best];
        os << "\nbest: w = " << b.w << ", num_pos = " << b.num_pos << '\n';
      }
      break;
    case ReportFormat::JsonLines:
      for (const auto& c : result.cells) {
        auto j = row_json("cell", c.report.global);
        j["w"] = c.w;
        j["num_pos"] = c.num_pos;
        os << j.dump() << '\n';
      }
      break;
  }
}

ApproxReport load_report_jsonl(std::istream& is) {
  ApproxReport report;
  bool seen_config = false;
  bool seen_global = false;
  std::string line;
  try {
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      const auto kind = j.at("kind").get<std::string>();
      if (kind == "config") {
        report.n = j.at("n").get<std::size_t>();
        report.config = config_from_json(j.at("config"));
        seen_config = true;
      } else if (kind == "family") {
        report.families.push_back(row_from_json(j));
      } else if (kind == "global") {
        report.global = row_from_json(j);
        report.wall_ms = j.value("wall_ms", 0.0);
        seen_global = true;
      } else {
        throw ArgumentError("report: unknown row kind '" + kind + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("report: malformed JSON line: ") + e.what());
  }
  if (!seen_config || !seen_global) throw ArgumentError("report: missing config or global row");
  return report;
}

}  // namespace bandattn
