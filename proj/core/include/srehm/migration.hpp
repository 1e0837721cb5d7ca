#ifndef SREHM_MIGRATION_HPP
#define SREHM_MIGRATION_HPP

#include <functional>
#include <span>
#include <vector>

#include "srehm/forecast.hpp"
#include "srehm/model.hpp"

namespace srehm {

struct MigrationConfig {
    double c_mig = 1.0;  // energy per hop and weight unit
    int hops_same_cluster = 1;
    int hops_cross_cluster = 2;
    double threshold = kDefaultOverloadThreshold;
    double underload_threshold = 0.1;
    bool consolidate = true;
};

struct MigrationPlan {
    VmId vm_id = 0;
    PmId source_pm = 0;
    PmId dest_pm = 0;
    int hops = 1;
    double vm_weight = 0.0;  // demand.cpu * demand.mem
    bool woke_dest = false;
    double energy = 0.0;
    ResourceVector moved_load;  // predicted usage carried to the destination
};

/// Hop distance: same cluster and cross-cluster constants from the config.
int hop_distance(const PhysicalMachine& a, const PhysicalMachine& b, const MigrationConfig& config = {});

/// Ids (ascending) of PMs whose estimate raised the contention flag. Every VM hosted on
/// such a PM gets its migration status raised; all other VMs are cleared.
std::vector<PmId> detect_overloads(std::span<const FailureEstimate> estimates, Datacenter& dc);

/// Largest hosted VM by weight; lowest id on ties. Throws InvalidArgument on an empty PM.
VmId select_migration_vm(const PhysicalMachine& pm, const Placement& placement);

/// Extra restrictions on a destination.
struct TargetFilter {
    std::vector<PmId> excluded;                // e.g. PMs flagged as overloaded this slot
    std::function<bool(PmId)> admits;          // e.g. predicted load stays under threshold
    bool allow_wake = true;
};

struct TargetChoice {
    PmId pm = 0;
    bool woke = false;
};

/// Best-fit destination among active PMs (smallest CPU residual fraction after placing,
/// then memory residual, then lowest id). When no active PM fits, the first inactive PM
/// that can hold the VM is proposed with woke = true; the caller activates it. The VM's
/// current host is never returned. Throws InfeasibleError when nothing fits.
TargetChoice select_target_pm(const VirtualMachine& vm, std::span<const PhysicalMachine> pms,
                              const Placement& placement, const TargetFilter& filter = {});

/// c_mig * hops * W plus the wake-up energy when the destination had to be activated.
double migration_cost(const MigrationPlan& plan, double c_mig, double e_tr);

/// Predicted absolute usage of every VM for the coming slot, indexed by VM id.
using VmLoadForecast = std::vector<ResourceVector>;

/// Predicted load of a PM relative to its capacity.
ResourceVector predicted_utilization(const PhysicalMachine& pm, const Placement& placement,
                                     const VmLoadForecast& load);

struct OverloadRecord {
    PmId pm = 0;
    ResourceVector predicted_before;  // utilization fractions
    ResourceVector predicted_after;
    int migrations = 0;
    bool resolved = false;
};

struct MitigationOutcome {
    std::vector<MigrationPlan> plans;
    std::vector<OverloadRecord> overloads;
    std::vector<FailureEstimate> estimates;
};

/// Returns true when `vm` must not share `pm` with another image of the same service.
using ConflictFn = std::function<bool(VmId vm, PmId pm)>;

/// One proactive mitigation pass over all active PMs: flags PMs whose predicted load
/// exceeds the threshold and migrates their largest movable VMs, one at a time, until
/// the prediction clears or nothing else can move. Destinations stay under the threshold.
MitigationOutcome mitigate_overloads(Datacenter& dc, const VmLoadForecast& load, const MigrationConfig& config,
                                     const ConflictFn& conflicts = {});

/// Empties active PMs whose predicted load is under the underload threshold on both
/// resources, when all of their VMs fit on other active PMs, and deactivates every
/// active PM left without VMs.
std::vector<MigrationPlan> consolidate_underloaded(Datacenter& dc, const VmLoadForecast& load,
                                                   const MigrationConfig& config, const ConflictFn& conflicts = {});

}  // namespace srehm

#endif  // SREHM_MIGRATION_HPP
