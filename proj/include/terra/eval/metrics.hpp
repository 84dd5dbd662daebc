#pragma once

#include <string>
#include <vector>

#include "terra/travmap/trav_grid.hpp"

namespace terra {

struct ErrorStats {
  double mean_error = 0.0;
  double error_variance = 0.0;  // population variance
  std::size_t cells = 0;
};

/// Absolute score error over cells observed in both grids. Throws
/// geometry_mismatch or no_overlap.
ErrorStats compare(const TravGrid& map, const TravGrid& gt);

struct ReportRow {
  std::size_t frame = 0;
  double mean_error = 0.0;
  double error_variance = 0.0;
  double runtime_ms = 0.0;
};

struct EvalReport {
  std::vector<ReportRow> rows;

  /// Column means of the rows (frame column unused).
  ReportRow average() const;
};

void write_report(const EvalReport& report, const std::string& path);
/// Parses data rows; the trailing aggregate line is checked, not stored.
EvalReport read_report(const std::string& path);

}  // namespace terra
