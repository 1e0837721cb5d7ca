#include "srehm/migration.hpp"

#include <algorithm>
#include <tuple>

#include "srehm/error.hpp"

namespace srehm {
namespace {

bool excluded(const TargetFilter& f, PmId pm) {
    return std::find(f.excluded.begin(), f.excluded.end(), pm) != f.excluded.end();
}

ResourceVector pm_load(PmId pm, const Placement& placement, const VmLoadForecast& load) {
    ResourceVector sum;
    for (VmId v : placement.vms_on(pm)) sum += load.at(static_cast<std::size_t>(v));
    return sum;
}

ResourceVector as_fraction(const ResourceVector& abs, const PhysicalMachine& pm) {
    return {abs.cpu / pm.capacity.cpu, abs.mem / pm.capacity.mem};
}

bool over(const ResourceVector& frac, double threshold) { return estimate_failure(frac.cpu, frac.mem, threshold); }

// Hosted VMs by descending weight, lowest id first among equals.
std::vector<VmId> by_weight(const PhysicalMachine& pm, const Placement& placement) {
    std::vector<VmId> vms = placement.vms_on(pm.id);
    std::stable_sort(vms.begin(), vms.end(), [&](VmId a, VmId b) {
        const auto da = placement.demand_of(a);
        const auto db = placement.demand_of(b);
        return da.cpu * da.mem > db.cpu * db.mem;
    });
    return vms;
}

MigrationPlan make_plan(const Datacenter& dc, VmId vm, PmId source, const TargetChoice& target,
                        const ResourceVector& moved, const MigrationConfig& config) {
    MigrationPlan plan;
    plan.vm_id = vm;
    plan.source_pm = source;
    plan.dest_pm = target.pm;
    plan.hops = hop_distance(dc.pm(source), dc.pm(target.pm), config);
    plan.vm_weight = dc.vm(vm).weight();
    plan.woke_dest = target.woke;
    plan.moved_load = moved;
    plan.energy = migration_cost(plan, config.c_mig, dc.pm(target.pm).transition_energy);
    return plan;
}

void apply(Datacenter& dc, const MigrationPlan& plan) {
    if (plan.woke_dest) dc.pm(plan.dest_pm).state = PmState::Active;
    dc.migrate(plan.vm_id, plan.dest_pm);
}

}  // namespace

int hop_distance(const PhysicalMachine& a, const PhysicalMachine& b, const MigrationConfig& config) {
    return a.cluster_id == b.cluster_id ? config.hops_same_cluster : config.hops_cross_cluster;
}

std::vector<PmId> detect_overloads(std::span<const FailureEstimate> estimates, Datacenter& dc) {
    for (auto& vm : dc.vms) vm.status = false;
    std::vector<PmId> flagged;
    for (const auto& e : estimates) {
        if (!e.eta_star) continue;
        flagged.push_back(e.pm_id);
        for (VmId v : dc.placement.vms_on(e.pm_id)) dc.vm(v).status = true;
    }
    std::sort(flagged.begin(), flagged.end());
    return flagged;
}

VmId select_migration_vm(const PhysicalMachine& pm, const Placement& placement) {
    const auto vms = by_weight(pm, placement);
    if (vms.empty()) throw InvalidArgument("PM " + std::to_string(pm.id) + " hosts no VM to migrate");
    return vms.front();
}

TargetChoice select_target_pm(const VirtualMachine& vm, std::span<const PhysicalMachine> pms,
                              const Placement& placement, const TargetFilter& filter) {
    const auto source = placement.host_of(vm.id);
    auto eligible = [&](const PhysicalMachine& pm) {
        return pm.id != source && !excluded(filter, pm.id) && (!filter.admits || filter.admits(pm.id));
    };

    const PhysicalMachine* best = nullptr;
    std::tuple<double, double, PmId> best_key{};
    for (const auto& pm : pms) {
        if (!pm.active() || !eligible(pm) || !check_placement(vm, pm, placement)) continue;
        const ResourceVector used = placement.hosted_demand(pm.id);
        const double cpu_left = (pm.capacity.cpu - used.cpu - vm.demand.cpu) / pm.capacity.cpu;
        const double mem_left = (pm.capacity.mem - used.mem - vm.demand.mem) / pm.capacity.mem;
        std::tuple<double, double, PmId> key{cpu_left, mem_left, pm.id};
        if (!best || key < best_key) {
            best = &pm;
            best_key = key;
        }
    }
    if (best) return {best->id, false};

    if (filter.allow_wake) {
        for (const auto& pm : pms) {
            if (pm.state != PmState::Inactive || !eligible(pm)) continue;
            if (vm.demand.cpu <= pm.capacity.cpu && vm.demand.mem <= pm.capacity.mem) return {pm.id, true};
        }
    }
    throw InfeasibleError("no PM can host VM " + std::to_string(vm.id));
}

double migration_cost(const MigrationPlan& plan, double c_mig, double e_tr) {
    return c_mig * plan.hops * plan.vm_weight + (plan.woke_dest ? e_tr : 0.0);
}

ResourceVector predicted_utilization(const PhysicalMachine& pm, const Placement& placement,
                                     const VmLoadForecast& load) {
    return as_fraction(pm_load(pm.id, placement, load), pm);
}

MitigationOutcome mitigate_overloads(Datacenter& dc, const VmLoadForecast& load, const MigrationConfig& config,
                                     const ConflictFn& conflicts) {
    MitigationOutcome out;
    for (const auto& pm : dc.pms) {
        if (!pm.active()) continue;
        const ResourceVector u = predicted_utilization(pm, dc.placement, load);
        FailureEstimate e;
        e.pm_id = pm.id;
        e.predicted_cpu = std::clamp(u.cpu, 0.0, 1.0);
        e.predicted_mem = std::clamp(u.mem, 0.0, 1.0);
        e.threshold = config.threshold;
        e.eta_star = estimate_failure(e.predicted_cpu, e.predicted_mem, config.threshold);
        out.estimates.push_back(e);
    }
    const std::vector<PmId> flagged = detect_overloads(out.estimates, dc);

    for (PmId source : flagged) {
        OverloadRecord rec;
        rec.pm = source;
        rec.predicted_before = predicted_utilization(dc.pm(source), dc.placement, load);

        while (over(predicted_utilization(dc.pm(source), dc.placement, load), config.threshold)) {
            bool moved = false;
            for (VmId vm : by_weight(dc.pm(source), dc.placement)) {
                const ResourceVector carried = load.at(static_cast<std::size_t>(vm));
                if (carried.cpu <= 0.0 && carried.mem <= 0.0) continue;  // moving it frees nothing
                TargetFilter filter;
                filter.excluded = flagged;
                filter.admits = [&](PmId dest) {
                    if (conflicts && conflicts(vm, dest)) return false;
                    const auto& d = dc.pm(dest);
                    const ResourceVector after = as_fraction(pm_load(dest, dc.placement, load) + carried, d);
                    return !over(after, config.threshold);
                };
                try {
                    const TargetChoice target = select_target_pm(dc.vm(vm), dc.pms, dc.placement, filter);
                    const MigrationPlan plan = make_plan(dc, vm, source, target, carried, config);
                    apply(dc, plan);
                    out.plans.push_back(plan);
                    ++rec.migrations;
                    moved = true;
                    break;
                } catch (const InfeasibleError&) {
                    // try the next largest VM
                }
            }
            if (!moved) break;
        }
        rec.predicted_after = predicted_utilization(dc.pm(source), dc.placement, load);
        rec.resolved = !over(rec.predicted_after, config.threshold);
        out.overloads.push_back(rec);
    }
    return out;
}

std::vector<MigrationPlan> consolidate_underloaded(Datacenter& dc, const VmLoadForecast& load,
                                                   const MigrationConfig& config, const ConflictFn& conflicts) {
    std::vector<MigrationPlan> plans;
    for (auto& pm : dc.pms) {
        if (!pm.active()) continue;
        if (dc.placement.count_on(pm.id) == 0) {
            pm.state = PmState::Inactive;
            continue;
        }
        const ResourceVector u = predicted_utilization(pm, dc.placement, load);
        if (!(u.cpu < config.underload_threshold && u.mem < config.underload_threshold)) continue;

        // Trial run on copies so that a PM is either fully drained or left untouched.
        Placement trial = dc.placement;
        std::vector<PhysicalMachine> pms = dc.pms;
        pms[static_cast<std::size_t>(pm.id)].state = PmState::Inactive;  // not a destination
        std::vector<MigrationPlan> staged;
        bool drained = true;
        for (VmId vm : by_weight(pm, trial)) {
            const ResourceVector carried = load.at(static_cast<std::size_t>(vm));
            TargetFilter filter;
            filter.allow_wake = false;
            filter.admits = [&](PmId dest) {
                if (conflicts && conflicts(vm, dest)) return false;
                const auto& d = pms[static_cast<std::size_t>(dest)];
                return !over(as_fraction(pm_load(dest, trial, load) + carried, d), config.threshold);
            };
            try {
                const TargetChoice target = select_target_pm(dc.vm(vm), pms, trial, filter);
                staged.push_back(make_plan(dc, vm, pm.id, target, carried, config));
                trial.move(vm, pms[static_cast<std::size_t>(target.pm)]);
            } catch (const InfeasibleError&) {
                drained = false;
                break;
            }
        }
        if (!drained) continue;
        for (const auto& plan : staged) {
            apply(dc, plan);
            plans.push_back(plan);
        }
        pm.state = PmState::Inactive;
    }
    return plans;
}

}  // namespace srehm
