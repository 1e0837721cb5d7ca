#ifndef SREHM_CONFIG_HPP
#define SREHM_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "srehm/forecast.hpp"
#include "srehm/ha_strategy.hpp"
#include "srehm/metrics.hpp"
#include "srehm/migration.hpp"
#include "srehm/model.hpp"
#include "srehm/ranking.hpp"
#include "srehm/trace.hpp"

namespace srehm {

/// Which availability machinery is switched on.
enum class HaMode {
    SreHm,         // forecasting, proactive migration, ranking-gated strategy selection
    Disabled,      // none of the above; failures are never masked
    ProtectAllPe,  // like SreHm, but every service VM is protected with parallel execution
};

std::string_view to_string(HaMode m);
HaMode parse_ha_mode(std::string_view name);

struct PmGroup {
    std::string profile;  // preset name or a key of SimConfig::pm_profiles
    int count = 0;
};

struct VmGroup {
    std::string profile;
    int count = 0;
};

struct UserSpec {
    int count = 10;
    int tasks_min = 8;
    int tasks_max = 12;
    double budget_min = 2.0;
    double budget_max = 5.0;
    double deadline_min = 10.0;  // minutes
    double deadline_max = 40.0;
    double task_minutes_min = 1.0;
    double task_minutes_max = 4.0;
    double guaranteed_availability = 0.99;
};

/// Cost and response-time model of one strategy in the pool. Execution cost is
/// cost_per_image times the number of extra images (ARP keeps num-1 standbys) or the
/// number of concurrently running versions (MVP, PE). Response time is
/// time_factor * task time + recovery_penalty_slots * slot length.
struct StrategySpec {
    StrategyKind kind = StrategyKind::ARP;
    int num = 3;
    double cost_per_image = 1.0;
    double time_factor = 1.0;
    int recovery_penalty_slots = 0;
};

std::vector<StrategySpec> default_strategy_pool();

struct FailureSpec {
    double v_fp = 5.0;                     // percent of VMs that are failure-prone
    double q = 0.05;                       // per-slot failure probability of a failure-prone VM
    double replica_base_failure = 0.001;   // failure probability of a healthy replica image
    double pm_failure_prob = 0.0;          // per-slot hardware failure probability of an active PM
    int pm_repair_slots = 12;
    double protected_repair_minutes = kProtectedRepairMinutes;
};

struct RankingSpec {
    double damping = kDefaultDamping;
    std::optional<double> psi;  // default max(0.8, |C|/n) per VHAN
    double tol = 1e-9;
    int max_iter = 1000;
    int critical_threshold = kDefaultCriticalThreshold;
    int max_invocations = 6;
    std::optional<double> sig_threshold;  // default 1/n per VHAN
};

struct SimConfig {
    std::uint64_t seed = 0;
    double slot_minutes = 5.0;
    double horizon_minutes = 500.0;
    double observation_minutes = kDefaultObservationMinutes;
    int clusters = 2;  // PM i belongs to cluster i % clusters
    std::vector<PmGroup> pm_fleet;
    std::vector<VmGroup> vm_fleet;
    std::map<std::string, PmProfile> pm_profiles;  // custom server profiles
    std::map<std::string, VmProfile> vm_profiles;  // custom VM profiles
    double transition_energy = kDefaultTransitionEnergy;
    UserSpec users;
    FailureSpec failures;
    RankingSpec ranking;
    std::vector<StrategySpec> strategies = default_strategy_pool();
    ForecastConfig forecast;
    MigrationConfig migration;  // threshold, hop distances, c_mig, consolidation
    HaMode mode = HaMode::SreHm;
    TracePattern synthetic_pattern = TracePattern::Bursty;
    SynthOptions synthetic;

    /// 20 PMs, 100 VMs, 10 users, 500 minutes in 5-minute slots.
    static SimConfig desk_default();

    std::size_t n_slots() const;
    std::size_t n_pms() const;
    std::size_t n_vms() const;
    const PmProfile& pm_profile(const std::string& name) const;
    const VmProfile& vm_profile(const std::string& name) const;
    /// Throws ConfigError when a field is out of range or a profile is unknown.
    void validate() const;
};

/// Reads a JSON config. Keys that are absent keep the desk defaults; unknown keys are
/// rejected. Throws ConfigError on malformed JSON, wrong types or invalid values.
SimConfig parse_config(std::istream& in);
SimConfig parse_config_string(std::string_view text);
SimConfig load_config(const std::string& path);

/// Full JSON form of a config; parse_config(to_json(c)) reproduces c.
std::string config_to_json(const SimConfig& config);

}  // namespace srehm

#endif  // SREHM_CONFIG_HPP
