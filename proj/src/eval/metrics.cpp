#include "terra/eval/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include <fmt/format.h>

#include "terra/common/error.hpp"

namespace terra {

ErrorStats compare(const TravGrid& map, const TravGrid& gt) {
  if (!map.geometry.same_as(gt.geometry) || map.cells.size() != gt.cells.size()) {
    throw Error(ErrorCode::geometry_mismatch, "map and ground truth grids differ in geometry");
  }
  ErrorStats s;
  double sum = 0.0;
  for (std::size_t c = 0; c < gt.cells.size(); ++c) {
    if (!map.cells[c].observed || !gt.cells[c].observed) continue;
    sum += std::abs(map.cells[c].score - gt.cells[c].score);
    ++s.cells;
  }
  if (s.cells == 0) throw Error(ErrorCode::no_overlap, "no cell is observed in both grids");
  s.mean_error = sum / static_cast<double>(s.cells);
  double sq = 0.0;
  for (std::size_t c = 0; c < gt.cells.size(); ++c) {
    if (!map.cells[c].observed || !gt.cells[c].observed) continue;
    const double d = std::abs(map.cells[c].score - gt.cells[c].score) - s.mean_error;
    sq += d * d;
  }
  s.error_variance = sq / static_cast<double>(s.cells);
  return s;
}

ReportRow EvalReport::average() const {
  ReportRow avg;
  if (rows.empty()) return avg;
  for (const auto& r : rows) {
    avg.mean_error += r.mean_error;
    avg.error_variance += r.error_variance;
    avg.runtime_ms += r.runtime_ms;
  }
  const double n = static_cast<double>(rows.size());
  avg.mean_error /= n;
  avg.error_variance /= n;
  avg.runtime_ms /= n;
  return avg;
}

void write_report(const EvalReport& report, const std::string& path) {
  if (report.rows.empty()) throw Error(ErrorCode::invalid_argument, "report has no rows");
  std::unique_ptr<FILE, int (*)(FILE*)> f(std::fopen(path.c_str(), "w"), &std::fclose);
  if (!f) throw Error(ErrorCode::io, fmt::format("{}: cannot open for writing", path));
  std::fprintf(f.get(), "frame,mean_error,error_variance,runtime_ms\n");
  for (const auto& r : report.rows) {
    std::fprintf(f.get(), "%zu,%.9g,%.9g,%.9g\n", r.frame, r.mean_error, r.error_variance, r.runtime_ms);
  }
  const auto avg = report.average();
  std::fprintf(f.get(), "# avg,%.9g,%.9g,%.9g\n", avg.mean_error, avg.error_variance, avg.runtime_ms);
  if (std::ferror(f.get())) throw Error(ErrorCode::io, fmt::format("{}: write failed", path));
}

EvalReport read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, fmt::format("{}: cannot open", path));
  EvalReport report;
  std::string line;
  std::size_t lineno = 0;
  bool saw_avg = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1) {
      if (line != "frame,mean_error,error_variance,runtime_ms") {
        throw Error(ErrorCode::parse, fmt::format("{}:1: unexpected header", path));
      }
      continue;
    }
    if (line.empty()) continue;
    if (line.rfind("# avg,", 0) == 0) {
      saw_avg = true;
      continue;
    }
    ReportRow r;
    char tail = 0;
    if (std::sscanf(line.c_str(), "%zu,%lf,%lf,%lf%c", &r.frame, &r.mean_error, &r.error_variance, &r.runtime_ms,
                    &tail) != 4) {
      throw Error(ErrorCode::parse, fmt::format("{}:{}: malformed row", path, lineno));
    }
    report.rows.push_back(r);
  }
  if (!saw_avg) throw Error(ErrorCode::parse, fmt::format("{}: missing aggregate line", path));
  return report;
}

}  // namespace terra
