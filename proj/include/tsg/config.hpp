#pragma once

#include "tsg/goursat.hpp"
#include "tsg/time_scale.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tsg {

/// Parses a time-scale literal: items separated by ';', each one of
///   [lo,hi]               closed interval
///   {p} or {p1, p2, ...}  isolated points
///   lattice(lo,hi,step)   lo, lo+step, ..., hi
/// Throws ParseError with the byte offset of the problem.
TimeScale parse_time_scale(std::string_view src);

struct RunConfig {
  ProblemSpec problem;
  std::string rhs_source;

  std::string solution_csv = "solution.csv";
  std::string report = "report.txt";
  std::string study_csv = "study.csv";

  /// Refinement study: strictly decreasing h values.
  std::vector<double> study_h;
  std::optional<double> probe_x;
  std::optional<double> probe_y;
  std::size_t probe_component = 1;
  /// Exact probe value; when absent the study uses a Richardson reference.
  std::optional<double> oracle;
};

/// Parses "key = value" lines ('#' starts a comment). Required keys: scale1,
/// scale2, rhs. Throws ValidationError naming the field (and line) on bad
/// input, std::runtime_error when the file cannot be read.
RunConfig parse_config(std::string_view text, const std::string& origin = "<config>");
RunConfig load_config(const std::filesystem::path& path);

} // namespace tsg
