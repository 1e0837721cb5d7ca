#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "srehm/config.hpp"
#include "srehm/engine.hpp"
#include "srehm/error.hpp"
#include "srehm/forecast.hpp"
#include "srehm/ranking.hpp"
#include "srehm/report.hpp"
#include "srehm/trace.hpp"

namespace srehm::cli {
namespace {

struct SimulateArgs {
    std::string config;
    std::string trace;
    std::string synthetic;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string out = "srehm-out";
    std::string mode;
    double v_fp = -1.0;
};

struct RankArgs {
    std::string graph;
    double d = kDefaultDamping;
    double psi = -1.0;
    int critical_threshold = kDefaultCriticalThreshold;
    double tol = 1e-9;
    int max_iter = 1000;
};

struct ForecastArgs {
    std::string trace;
    std::string pm_capacity = "S3";
    double threshold = kDefaultOverloadThreshold;
    std::uint64_t seed = 0;
    double slot_minutes = 5.0;
};

struct ReportArgs {
    std::string in;
    bool csv = false;
};

std::optional<std::uint64_t> env_seed() {
    const char* v = std::getenv("SREHM_SEED");
    if (!v || !*v) return std::nullopt;
    std::uint64_t seed = 0;
    const std::string_view s(v);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError("SREHM_SEED is not a non-negative integer: '" + std::string(s) + "'");
    }
    return seed;
}

int simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
    SimConfig cfg;
    try {
        cfg = a.config.empty() ? SimConfig::desk_default() : load_config(a.config);
        if (a.seed_given) cfg.seed = a.seed;
        if (auto s = env_seed()) cfg.seed = *s;
        if (!a.mode.empty()) cfg.mode = parse_ha_mode(a.mode);
        if (a.v_fp >= 0.0) cfg.failures.v_fp = a.v_fp;
        if (!a.synthetic.empty()) cfg.synthetic_pattern = parse_trace_pattern(a.synthetic);
        cfg.synthetic.slot_minutes = cfg.slot_minutes;
        cfg.validate();
    } catch (const Error& e) {
        err << "config error: " << e.what() << '\n';
        return kUsageOrConfig;
    }

    UsageTrace trace(cfg.slot_minutes);
    try {
        if (!a.trace.empty()) {
            auto loaded = load_trace(a.trace, cfg.slot_minutes);
            if (loaded.clamped > 0) err << "warning: " << loaded.clamped << " out-of-range fraction(s) clamped\n";
            trace = std::move(loaded.trace);
        } else if (cfg.n_slots() > 0) {
            trace = synth_trace(cfg.seed, cfg.n_vms(), cfg.n_slots(), cfg.synthetic_pattern, cfg.synthetic);
        }
    } catch (const Error& e) {
        err << "trace error: " << e.what() << '\n';
        return kTraceError;
    }

    RunResult result;
    try {
        result = run(cfg, trace);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kUsageOrConfig;
    } catch (const TraceError& e) {
        err << "trace error: " << e.what() << '\n';
        return kTraceError;
    } catch (const ScheduleError& e) {
        err << "infeasible: " << e.what() << " (first unplaced task " << e.unplaced_tasks().front() << ")\n";
        return kInfeasible;
    } catch (const InfeasibleError& e) {
        err << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const ConvergenceError& e) {
        err << "ranking did not converge: " << e.what() << '\n';
        return kNoConvergence;
    }

    try {
        save_run(a.out, cfg, result);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsageOrConfig;
    }
    const SlotMetrics m = result.summary();
    std::ostringstream line;
    line << std::fixed << std::setprecision(4) << "availability=" << m.availability << "% "
         << std::setprecision(1) << "power=" << m.power << "W migrations=" << m.migrations;
    out << line.str() << '\n';
    return kOk;
}

int rank_cmd(const RankArgs& a, std::ostream& out, std::ostream& err) {
    InvocationGraph g;
    try {
        g = load_graph(a.graph, a.critical_threshold);
    } catch (const Error& e) {
        err << "graph error: " << e.what() << '\n';
        return kUsageOrConfig;
    }
    SignificanceOptions opts;
    opts.damping = a.d;
    if (a.psi >= 0.0) opts.psi = a.psi;
    opts.tol = a.tol;
    opts.max_iter = a.max_iter;
    SignificanceVector sig;
    try {
        sig = significance(g, opts);
    } catch (const ConvergenceError& e) {
        err << "no convergence: " << e.what() << '\n';
        return kNoConvergence;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsageOrConfig;
    }
    const auto order = rank(sig);
    for (std::size_t r = 0; r < order.size(); ++r) {
        const auto pos = static_cast<std::size_t>(
            std::find(sig.node_ids.begin(), sig.node_ids.end(), order[r]) - sig.node_ids.begin());
        std::ostringstream line;
        line << order[r] << ' ' << std::setprecision(12) << sig.values[pos] << ' ' << r + 1;
        out << line.str() << '\n';
    }
    return kOk;
}

struct Capacity {
    ResourceVector pm;
    ResourceVector vm;
};

// SPEC is a server preset or "cpu:mem" in MIPS and GB, optionally followed by
// "/vm_preset" naming the size every trace VM is assumed to have.
Capacity parse_capacity(const std::string& spec) {
    std::string pm_part = spec;
    std::string vm_part = "v_medium";
    if (auto slash = spec.find('/'); slash != std::string::npos) {
        pm_part = spec.substr(0, slash);
        vm_part = spec.substr(slash + 1);
    }
    Capacity c;
    c.vm = vm_preset(vm_part).demand();
    if (auto colon = pm_part.find(':'); colon != std::string::npos) {
        auto parse = [&](std::string_view s) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !(v > 0.0)) {
                throw InvalidArgument("bad capacity '" + std::string(s) + "' in --pm-capacity");
            }
            return v;
        };
        c.pm = {parse(std::string_view(pm_part).substr(0, colon)), parse(std::string_view(pm_part).substr(colon + 1))};
    } else {
        c.pm = pm_preset(pm_part).capacity();
    }
    return c;
}

int forecast_cmd(const ForecastArgs& a, std::ostream& out, std::ostream& err) {
    Capacity cap;
    std::uint64_t seed = a.seed;
    try {
        if (!(a.threshold > 0.0 && a.threshold <= 1.0)) throw InvalidArgument("--threshold must lie in (0,1]");
        if (!(a.slot_minutes > 0.0)) throw InvalidArgument("--slot-minutes must be > 0");
        cap = parse_capacity(a.pm_capacity);
        if (auto s = env_seed()) seed = *s;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsageOrConfig;
    }
    UsageTrace trace;
    try {
        auto loaded = load_trace(a.trace, a.slot_minutes);
        if (loaded.clamped > 0) err << "warning: " << loaded.clamped << " out-of-range fraction(s) clamped\n";
        trace = std::move(loaded.trace);
    } catch (const Error& e) {
        err << "trace error: " << e.what() << '\n';
        return kTraceError;
    }

    // Aggregate PM series: all trace VMs are assumed to sit on one PM of the given capacity.
    long first = 0, last = 0;
    bool any = false;
    for (const auto& [id, s] : trace.series()) {
        const long end = s.first_slot + static_cast<long>(s.values.size());
        first = any ? std::min(first, s.first_slot) : s.first_slot;
        last = any ? std::max(last, end) : end;
        any = true;
    }
    const auto n = static_cast<std::size_t>(any ? last - first : 0);
    std::vector<double> cpu(n, 0.0), mem(n, 0.0);
    for (const auto& [id, s] : trace.series()) {
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            const auto k = static_cast<std::size_t>(s.first_slot - first) + i;
            cpu[k] += s.values[i].cpu * cap.vm.cpu / cap.pm.cpu;
            mem[k] += s.values[i].mem * cap.vm.mem / cap.pm.mem;
        }
    }
    for (auto& v : cpu) v = std::min(v, 1.0);
    for (auto& v : mem) v = std::min(v, 1.0);

    ForecastConfig fc;
    ResourcePredictor p_cpu(fc, seed * 2 + 1), p_mem(fc, seed * 2 + 2);
    out << "slot,pred_cpu,pred_mem,actual_cpu,actual_mem,flag\n";
    for (std::size_t s = 0; s < n; ++s) {
        const std::span<const double> hc(cpu.data(), s), hm(mem.data(), s);
        p_cpu.update(hc, s);
        p_mem.update(hm, s);
        const double pc = p_cpu.predict(hc);
        const double pm = p_mem.predict(hm);
        std::ostringstream line;
        line << std::fixed << std::setprecision(6) << first + static_cast<long>(s) << ',' << pc << ',' << pm << ','
             << cpu[s] << ',' << mem[s] << ',' << (estimate_failure(pc, pm, a.threshold) ? 1 : 0);
        out << line.str() << '\n';
    }
    return kOk;
}

int report_cmd(const ReportArgs& a, std::ostream& out, std::ostream& err) {
    try {
        const auto rows = load_report(a.in);
        if (a.csv) {
            write_report(out, rows);
        } else {
            out << format_report_table(rows);
        }
    } catch (const Error& e) {
        err << "report error: " << e.what() << '\n';
        return kUsageOrConfig;
    }
    return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Availability-aware cloud datacenter simulator"};
    app.name("srehm");
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate_cmd = app.add_subcommand("simulate", "Run the slotted datacenter simulation");
    simulate_cmd->add_option("--config", sim.config, "JSON run configuration (desk defaults when omitted)");
    auto* trace_opt = simulate_cmd->add_option("--trace", sim.trace, "Usage trace CSV with header slot,vm_id,cpu,mem");
    auto* synth_opt =
        simulate_cmd->add_option("--synthetic", sim.synthetic, "Generate a trace instead: flat, diurnal or bursty");
    trace_opt->excludes(synth_opt);
    simulate_cmd->add_option("--seed", sim.seed, "Random seed (SREHM_SEED overrides)")
        ->each([&](const std::string&) { sim.seed_given = true; });
    simulate_cmd->add_option("--out", sim.out, "Output directory for report.csv, migrations.csv, selections.csv")
        ->capture_default_str();
    simulate_cmd->add_option("--mode", sim.mode, "Override the HA mode: srehm, disabled or protect_all_pe");
    simulate_cmd->add_option("--v-fp", sim.v_fp, "Override the failure-prone VM percentage");

    RankArgs rk;
    auto* rank_sub = app.add_subcommand("rank", "Significance ranking of an invocation graph");
    rank_sub->add_option("--graph", rk.graph, "Edge list: optional 'critical: ids' line, then 'src dst count' lines")
        ->required();
    rank_sub->add_option("--d", rk.d, "Damping factor")->capture_default_str();
    rank_sub->add_option("--psi", rk.psi, "Critical-class teleport weight (default max(0.8, |C|/n))");
    rank_sub->add_option("--critical-threshold", rk.critical_threshold,
                         "Received invocations above which a node is critical")
        ->capture_default_str();
    rank_sub->add_option("--tol", rk.tol, "Convergence tolerance (L1)")->capture_default_str();
    rank_sub->add_option("--max-iter", rk.max_iter, "Power-iteration cap")->capture_default_str();

    ForecastArgs fc;
    auto* forecast_sub = app.add_subcommand("forecast", "Forecast the aggregate PM utilization of a trace");
    forecast_sub->add_option("--trace", fc.trace, "Usage trace CSV")->required();
    forecast_sub->add_option("--pm-capacity", fc.pm_capacity,
                             "PM preset (S1, S2, S3) or cpu_mips:mem_gb, optionally /vm_preset for trace VM size")
        ->capture_default_str();
    forecast_sub->add_option("--threshold", fc.threshold, "Overload threshold in (0,1]")->capture_default_str();
    forecast_sub->add_option("--seed", fc.seed, "Forecaster initialization seed (SREHM_SEED overrides)")
        ->capture_default_str();
    forecast_sub->add_option("--slot-minutes", fc.slot_minutes, "Trace sampling interval")->capture_default_str();

    ReportArgs rp;
    auto* report_sub = app.add_subcommand("report", "Summarize a report CSV");
    report_sub->add_option("--in", rp.in, "Report CSV written by simulate")->required();
    report_sub->add_flag("--csv", rp.csv, "Echo as CSV instead of a table");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageOrConfig;
    }

    try {
        if (*simulate_cmd) return simulate(sim, out, err);
        if (*rank_sub) return rank_cmd(rk, out, err);
        if (*forecast_sub) return forecast_cmd(fc, out, err);
        if (*report_sub) return report_cmd(rp, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsageOrConfig;
    }
    return kUsageOrConfig;
}

}  // namespace srehm::cli
