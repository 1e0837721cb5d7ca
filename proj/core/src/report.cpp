#include "srehm/report.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "srehm/error.hpp"

namespace srehm {
namespace {

std::string num(double v) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.10g", v);
    return buf.data();
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
T field(std::string_view s, std::size_t line) {
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw InvalidArgument("report line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

void write_report(std::ostream& out, std::span<const SlotMetrics> rows) {
    out << kReportHeader << '\n';
    for (const auto& r : rows) {
        out << num(r.v_fp) << ',' << num(r.t) << ',' << num(r.mttr) << ',' << num(r.mtbf) << ','
            << num(r.availability) << ',' << num(r.prediction_accuracy) << ',' << r.overloads << ','
            << num(r.power) << ',' << num(r.utilization) << ',' << r.migrations << '\n';
    }
}

std::vector<SlotMetrics> read_report(std::istream& in) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) throw InvalidArgument("report is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kReportHeader) throw InvalidArgument("report line 1: unexpected header '" + line + "'");
    std::vector<SlotMetrics> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split(line);
        if (f.size() != 10) {
            throw InvalidArgument("report line " + std::to_string(line_no) + ": expected 10 fields, got " +
                                  std::to_string(f.size()));
        }
        SlotMetrics m;
        m.v_fp = field<double>(f[0], line_no);
        m.t = field<double>(f[1], line_no);
        m.mttr = field<double>(f[2], line_no);
        m.mtbf = field<double>(f[3], line_no);
        m.availability = field<double>(f[4], line_no);
        m.prediction_accuracy = field<double>(f[5], line_no);
        m.overloads = field<long>(f[6], line_no);
        m.power = field<double>(f[7], line_no);
        m.utilization = field<double>(f[8], line_no);
        m.migrations = field<long>(f[9], line_no);
        rows.push_back(m);
    }
    return rows;
}

std::vector<SlotMetrics> load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open report '" + path + "'");
    return read_report(in);
}

void write_migration_log(std::ostream& out, std::span<const MigrationRecord> records) {
    out << "slot,vm_id,source,dest,hops,energy,woke_dest\n";
    for (const auto& r : records) {
        out << r.slot << ',' << r.plan.vm_id << ',' << r.plan.source_pm << ',' << r.plan.dest_pm << ','
            << r.plan.hops << ',' << num(r.plan.energy) << ',' << (r.plan.woke_dest ? 1 : 0) << '\n';
    }
}

void write_selection_log(std::ostream& out, std::span<const SelectionRecord> records) {
    out << "slot,vm_id,significance,chosen,F\n";
    for (const auto& r : records) {
        out << r.slot << ',' << r.vm_id << ',' << num(r.significance) << ',';
        if (r.chosen) out << to_string(*r.chosen) << ',' << num(r.failure_probability);
        else out << ',';
        out << '\n';
    }
}

std::string format_report_table(std::span<const SlotMetrics> rows) {
    std::ostringstream out;
    std::array<char, 160> buf{};
    std::snprintf(buf.data(), buf.size(), "%6s %7s %9s %10s %9s %9s %9s %9s %8s %10s\n", "v_fp", "t", "mttr",
                  "mtbf", "avail%", "acc%", "overload", "power_W", "util%", "migrations");
    out << buf.data();
    for (const auto& r : rows) {
        std::snprintf(buf.data(), buf.size(), "%6.1f %7.1f %9.4f %10.2f %9.4f %9.2f %9ld %9.1f %8.2f %10ld\n",
                      r.v_fp, r.t, r.mttr, r.mtbf, r.availability, r.prediction_accuracy, r.overloads, r.power,
                      r.utilization, r.migrations);
        out << buf.data();
    }
    return out.str();
}

void save_run(const std::string& dir, const SimConfig& config, const RunResult& result) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
    auto open = [&](const char* name) {
        std::ofstream f(fs::path(dir) / name);
        if (!f) throw Error("cannot write '" + (fs::path(dir) / name).string() + "'");
        return f;
    };
    {
        auto f = open("report.csv");
        const auto rows = result.report_rows(config.observation_minutes);
        write_report(f, rows);
    }
    {
        auto f = open("migrations.csv");
        write_migration_log(f, result.migrations);
    }
    {
        auto f = open("selections.csv");
        write_selection_log(f, result.selections);
    }
    {
        auto f = open("config.json");
        f << config_to_json(config);
    }
}

}  // namespace srehm
