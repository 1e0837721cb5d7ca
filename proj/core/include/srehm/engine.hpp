#ifndef SREHM_ENGINE_HPP
#define SREHM_ENGINE_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "srehm/config.hpp"
#include "srehm/error.hpp"
#include "srehm/forecast.hpp"
#include "srehm/ha_strategy.hpp"
#include "srehm/metrics.hpp"
#include "srehm/migration.hpp"
#include "srehm/model.hpp"
#include "srehm/ranking.hpp"
#include "srehm/trace.hpp"

namespace srehm {

/// Virtual high-availability network: the VMs serving one user's job.
struct Vhan {
    UserId user = 0;
    std::vector<VmId> members;
    InvocationGraph graph;
    SignificanceVector significance;
};

/// Not every task could be given a VM.
class ScheduleError : public InfeasibleError {
public:
    ScheduleError(const std::string& what, std::vector<int> unplaced)
        : InfeasibleError(what), unplaced_(std::move(unplaced)) {}
    const std::vector<int>& unplaced_tasks() const noexcept { return unplaced_; }

private:
    std::vector<int> unplaced_;
};

/// Deals the hosted, unowned primary VMs (ascending id) round-robin into one disjoint
/// share per user, takes at most as many members from a share as the user has tasks, and
/// assigns tasks round-robin over members with spare task capacity. Every ordered member
/// pair gets a uniform invocation count in [0, max_invocations]; critical members follow
/// from received invocations.
/// Throws ScheduleError listing the ids of tasks that found no VM.
std::vector<Vhan> schedule_jobs(std::span<const User> users, Datacenter& dc, std::mt19937_64& rng,
                                const RankingSpec& ranking = {});

/// Seeded failure source. The failure-prone subset is a prefix of a seeded permutation,
/// so raising v_fp only adds VMs; per-slot draws are counter-based and independent of
/// everything else the simulation does.
class FailureInjector {
public:
    FailureInjector(std::uint64_t seed, std::span<const VmId> vms, double v_fp, double q);

    const std::vector<VmId>& failure_prone() const { return prone_; }
    bool is_failure_prone(VmId vm) const;
    /// Failure-prone VMs among `candidates` that fail in `slot`, ascending.
    std::vector<VmId> failures(std::span<const VmId> candidates, std::size_t slot) const;

private:
    std::uint64_t seed_;
    double q_;
    std::vector<VmId> prone_;
    std::vector<bool> prone_flag_;
};

/// Uniform [0,1) value determined only by its arguments.
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t a, std::uint64_t b);

struct MigrationRecord {
    int slot = 0;
    MigrationPlan plan;
    std::string reason;  // overload, underload or failover
};

struct SelectionRecord {
    int slot = 0;
    VmId vm_id = 0;
    UserId user = 0;
    double significance = 0.0;
    std::optional<StrategyKind> chosen;
    double failure_probability = 1.0;
    std::string note;  // why a VM is unprotected
};

struct OverloadLogRecord {
    int slot = 0;
    OverloadRecord record;
};

struct SlotState {
    int slot = 0;
    std::size_t active_pms = 0;
    double power = 0.0;        // watts
    double utilization = 0.0;  // fraction
    long realized_overloads = 0;
    int failures = 0;
    long migrations = 0;
};

struct RunResult {
    std::vector<SlotMetrics> slots;  // cumulative metrics at the end of every slot
    std::vector<SlotState> states;
    std::vector<MigrationRecord> migrations;
    std::vector<SelectionRecord> selections;
    std::vector<OverloadLogRecord> overloads;
    std::vector<Vhan> vhans;
    std::vector<VmId> failure_prone;
    double migration_energy = 0.0;
    double energy_wh = 0.0;

    /// Last cumulative row, or a zero row for an empty run.
    SlotMetrics summary() const;
    /// Rows at every multiple of the observation window, plus the final slot.
    std::vector<SlotMetrics> report_rows(double observation_minutes) const;
};

struct RunHooks {
    /// Called after every slot with the state the slot ended in.
    std::function<void(int slot, const Datacenter&)> on_slot;
    /// Per-user availability score fed back at the end of every slot.
    std::function<void(int slot, UserId user, double score)> on_feedback;
    /// Called with the state and per-VM load forecast right before proactive mitigation.
    std::function<void(int slot, const Datacenter&, const VmLoadForecast&)> on_forecast;
};

/// Runs the slotted simulation. Throws ConfigError for an invalid config, TraceError when
/// the trace does not cover every VM for the horizon, and InfeasibleError when the initial
/// placement or the job schedule cannot be satisfied.
RunResult run(const SimConfig& config, const UsageTrace& trace, const RunHooks& hooks = {});

}  // namespace srehm

#endif  // SREHM_ENGINE_HPP
