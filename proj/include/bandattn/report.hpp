#pragma once

// Report emission. Output depends only on the report contents; the wall time
// is written only to JSON lines ("wall_ms" on the global row).
//
// validate, CSV:   family,best_index,total_distance,mean_per_element
//                  one row per family, then "global:<winning family>"
// sweep, CSV:      w,num_pos,best_family,best_index,total_distance,mean_per_element
//                  one row per grid cell

#include <iosfwd>
#include <optional>
#include <string_view>

#include "bandattn/harness.hpp"

namespace bandattn {

enum class ReportFormat { Csv, Markdown, JsonLines };

std::optional<ReportFormat> parse_format(std::string_view name);

void emit_report(std::ostream& os, const ApproxReport& report, ReportFormat format);
void emit_sweep(std::ostream& os, const SweepResult& result, ReportFormat format);

// Inverse of emit_report(..., JsonLines). Throws ArgumentError on malformed input.
ApproxReport load_report_jsonl(std::istream& is);

}  // namespace bandattn
