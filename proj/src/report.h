#ifndef DRAMDSE_REPORT_H_
#define DRAMDSE_REPORT_H_

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "dse.h"

namespace dramdse {

enum class ReportFormat { kCsv, kJson, kTable };

// Tabular report with typed cells so every output format shares one
// source. Doubles render with 6 significant digits in csv/table.
struct Cell {
  std::variant<std::string, uint64_t, double> value;

  Cell(const char* s) : value(std::string(s)) {}
  Cell(std::string s) : value(std::move(s)) {}
  Cell(uint64_t v) : value(v) {}
  Cell(int v) : value(uint64_t(v)) {}
  Cell(double v) : value(v) {}
};

struct Report {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string FormatReal(double v);  // %.6g
void Write(const Report& report, ReportFormat format, std::ostream& out);

// evaluate: one concrete design point per layer per architecture.
struct EvaluateRecord {
  std::string layer;
  std::string arch;
  int policy_id = 0;
  ScheduleScheme schedule = ScheduleScheme::kIfmsReuse;
  TilingConfig tiling;
  AccessCounts counts;
  EdpResult edp;
};

Report EvaluateReport(const std::vector<EvaluateRecord>& records);

// explore: per-layer winners plus per-arch network totals.
Report ExploreWinnersReport(const DseResult& result,
                            std::span<const LayerShape> network,
                            std::span<const ArchConfig> archs);

// explore --keep-full-sweep: one row per evaluated design point.
Report ExploreSweepReport(const DseResult& result,
                          std::span<const LayerShape> network,
                          std::span<const ArchConfig> archs);

// compare: long-form layer x policy EDP matrix.
Report CompareReport(const std::vector<CompareCell>& cells,
                     std::span<const LayerShape> network,
                     std::span<const ArchConfig> archs);

}  // namespace dramdse

#endif  // DRAMDSE_REPORT_H_
