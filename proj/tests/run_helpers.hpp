// Shared helpers for tests that drive whole simulation runs.
#ifndef SREHM_TESTS_RUN_HELPERS_HPP
#define SREHM_TESTS_RUN_HELPERS_HPP

#include <cstdio>
#include <sstream>
#include <string>

#include "srehm/config.hpp"
#include "srehm/engine.hpp"
#include "srehm/report.hpp"
#include "srehm/trace.hpp"

namespace testing_support {

/// Every externally visible output of a run, as text.
inline std::string serialize(const srehm::RunResult& r) {
    std::ostringstream out;
    srehm::write_report(out, r.slots);
    srehm::write_migration_log(out, r.migrations);
    srehm::write_selection_log(out, r.selections);
    char buf[160];
    for (const auto& s : r.states) {
        std::snprintf(buf, sizeof buf, "%d,%zu,%.17g,%.17g,%ld,%d,%ld\n", s.slot, s.active_pms, s.power,
                      s.utilization, s.realized_overloads, s.failures, s.migrations);
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", r.migration_energy, r.energy_wh);
    out << buf;
    return out.str();
}

/// Desk-scale config (20 PMs, 100 VMs, 10 users, 500 minutes) on a synthetic trace.
struct DeskRun {
    srehm::SimConfig config = srehm::SimConfig::desk_default();

    srehm::UsageTrace trace() const {
        return srehm::synth_trace(config.seed, config.n_vms(), config.n_slots(), config.synthetic_pattern,
                                  config.synthetic);
    }
    srehm::RunResult operator()(const srehm::RunHooks& hooks = {}) const { return srehm::run(config, trace(), hooks); }
};

}  // namespace testing_support

#endif  // SREHM_TESTS_RUN_HELPERS_HPP
