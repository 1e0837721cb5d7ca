#ifndef SREHM_REPORT_HPP
#define SREHM_REPORT_HPP

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "srehm/engine.hpp"
#include "srehm/metrics.hpp"

namespace srehm {

inline constexpr const char* kReportHeader =
    "v_fp,t,mttr,mtbf,availability,accuracy,overloads,power,utilization,migrations";

/// Report CSV, one row per observation boundary.
void write_report(std::ostream& out, std::span<const SlotMetrics> rows);
/// Reads a report written by write_report. Throws InvalidArgument with the line number
/// on a wrong header or a malformed row.
std::vector<SlotMetrics> read_report(std::istream& in);
std::vector<SlotMetrics> load_report(const std::string& path);

/// slot,vm_id,source,dest,hops,energy,woke_dest
void write_migration_log(std::ostream& out, std::span<const MigrationRecord> records);
/// slot,vm_id,significance,chosen,F; chosen and F are empty for unprotected VMs.
void write_selection_log(std::ostream& out, std::span<const SelectionRecord> records);

/// Fixed-width table for terminals.
std::string format_report_table(std::span<const SlotMetrics> rows);

/// Writes report.csv, migrations.csv, selections.csv and config.json into `dir`
/// (created if missing).
void save_run(const std::string& dir, const SimConfig& config, const RunResult& result);

}  // namespace srehm

#endif  // SREHM_REPORT_HPP
