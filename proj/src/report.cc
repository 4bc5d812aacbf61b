#include "report.h"

#include <cstdio>
#include <ostream>

#include "json.hpp"

namespace dramdse {

std::string FormatReal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

namespace {

std::string CellText(const Cell& cell) {
  if (const auto* s = std::get_if<std::string>(&cell.value)) return *s;
  if (const auto* i = std::get_if<uint64_t>(&cell.value))
    return std::to_string(*i);
  return FormatReal(std::get<double>(cell.value));
}

void WriteCsv(const Report& report, std::ostream& out) {
  for (size_t i = 0; i < report.columns.size(); ++i) {
    if (i) out << ',';
    out << report.columns[i];
  }
  out << '\n';
  for (const auto& row : report.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << CellText(row[i]);
    }
    out << '\n';
  }
}

void WriteJson(const Report& report, std::ostream& out) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : report.rows) {
    nlohmann::json obj;
    for (size_t i = 0; i < row.size() && i < report.columns.size(); ++i) {
      const Cell& cell = row[i];
      if (const auto* s = std::get_if<std::string>(&cell.value)) {
        obj[report.columns[i]] = *s;
      } else if (const auto* v = std::get_if<uint64_t>(&cell.value)) {
        obj[report.columns[i]] = *v;
      } else {
        obj[report.columns[i]] = std::get<double>(cell.value);
      }
    }
    rows.push_back(std::move(obj));
  }
  out << rows.dump(2) << '\n';
}

void WriteTable(const Report& report, std::ostream& out) {
  std::vector<size_t> widths(report.columns.size());
  std::vector<std::vector<std::string>> cells;
  for (size_t i = 0; i < report.columns.size(); ++i) {
    widths[i] = report.columns[i].size();
  }
  for (const auto& row : report.rows) {
    std::vector<std::string> texts;
    for (size_t i = 0; i < row.size(); ++i) {
      texts.push_back(CellText(row[i]));
      if (i < widths.size()) widths[i] = std::max(widths[i], texts[i].size());
    }
    cells.push_back(std::move(texts));
  }
  auto pad = [&](const std::string& s, size_t w) {
    out << s;
    for (size_t i = s.size(); i < w; ++i) out << ' ';
  };
  for (size_t i = 0; i < report.columns.size(); ++i) {
    if (i) out << "  ";
    pad(report.columns[i], widths[i]);
  }
  out << '\n';
  for (const auto& row : cells) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << "  ";
      pad(row[i], i < widths.size() ? widths[i] : 0);
    }
    out << '\n';
  }
}

std::string PolicyName(int id) { return "Mapping-" + std::to_string(id); }

}  // namespace

void Write(const Report& report, ReportFormat format, std::ostream& out) {
  switch (format) {
    case ReportFormat::kCsv: WriteCsv(report, out); break;
    case ReportFormat::kJson: WriteJson(report, out); break;
    case ReportFormat::kTable: WriteTable(report, out); break;
  }
}

Report EvaluateReport(const std::vector<EvaluateRecord>& records) {
  Report report;
  report.columns = {"layer",        "arch",        "policy",
                    "schedule",     "t_m",         "t_c",
                    "t_h",          "t_w",         "acc_column",
                    "acc_row_near", "acc_row_far", "acc_subarray",
                    "acc_bank",     "latency_cycles", "energy_nJ", "edp"};
  for (const EvaluateRecord& r : records) {
    report.rows.push_back({r.layer, r.arch, PolicyName(r.policy_id),
                           ToString(r.schedule), r.tiling.t_m, r.tiling.t_c,
                           r.tiling.t_h, r.tiling.t_w, r.counts.column,
                           r.counts.row_near, r.counts.row_far,
                           r.counts.subarray, r.counts.bank,
                           r.edp.latency_cycles, r.edp.energy_nj, r.edp.edp});
  }
  return report;
}

Report ExploreWinnersReport(const DseResult& result,
                            std::span<const LayerShape> network,
                            std::span<const ArchConfig> archs) {
  Report report;
  report.columns = {"layer", "arch", "policy", "schedule",
                    "t_m",   "t_c",  "t_h",    "t_w",
                    "latency_cycles", "energy_nJ", "edp"};
  for (const ArchResult& ar : result.per_arch) {
    const std::string arch = ToString(archs[ar.arch_index].variant.kind);
    for (const LayerWinner& w : ar.winners) {
      if (!w.found) continue;
      report.rows.push_back({network[w.layer].name, arch,
                             PolicyName(w.mapping.id), ToString(w.resolved),
                             w.tiling.t_m, w.tiling.t_c, w.tiling.t_h,
                             w.tiling.t_w, w.edp.latency_cycles,
                             w.edp.energy_nj, w.edp.edp});
    }
    report.rows.push_back({"total", arch, "", "", "", "", "", "",
                           ar.totals.latency_cycles, ar.totals.energy_nj,
                           ar.totals.edp});
  }
  return report;
}

Report ExploreSweepReport(const DseResult& result,
                          std::span<const LayerShape> network,
                          std::span<const ArchConfig> archs) {
  Report report;
  report.columns = {"layer", "arch", "policy", "schedule",
                    "t_m",   "t_c",  "t_h",    "t_w",
                    "latency_cycles", "energy_nJ", "edp"};
  for (const SweepRow& row : result.sweep) {
    report.rows.push_back(
        {network[row.layer].name, ToString(archs[row.arch_index].variant.kind),
         PolicyName(row.policy_id), ToString(row.resolved), row.tiling.t_m,
         row.tiling.t_c, row.tiling.t_h, row.tiling.t_w,
         row.edp.latency_cycles, row.edp.energy_nj, row.edp.edp});
  }
  return report;
}

Report CompareReport(const std::vector<CompareCell>& cells,
                     std::span<const LayerShape> network,
                     std::span<const ArchConfig> archs) {
  Report report;
  report.columns = {"layer", "arch", "schedule", "policy", "edp"};
  for (const CompareCell& cell : cells) {
    if (!cell.found) continue;
    report.rows.push_back({network[cell.layer].name,
                           ToString(archs[cell.arch_index].variant.kind),
                           ToString(cell.resolved), PolicyName(cell.policy_id),
                           cell.edp.edp});
  }
  return report;
}

}  // namespace dramdse
