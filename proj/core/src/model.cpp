#include "srehm/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "srehm/error.hpp"

namespace srehm {
namespace {

// Server and VM sizes from the reference IBM/HP and EC2-style configurations.
const std::array<PmProfile, 3> kPmPresets{{
    {"S1", 2, 2660.0, 4.0, 135.0, 93.7, 93.7},
    {"S2", 4, 3067.0, 8.0, 113.0, 42.3, 42.3},
    {"S3", 12, 3067.0, 16.0, 222.0, 58.4, 58.4},
}};

const std::array<VmProfile, 4> kVmPresets{{
    {"v_small", VmType::Small, 1, 500.0, 0.5},
    {"v_medium", VmType::Medium, 2, 1000.0, 1.0},
    {"v_large", VmType::Large, 3, 1500.0, 2.0},
    {"v_xlarge", VmType::XLarge, 4, 2000.0, 3.0},
}};

// Slack for summing fractional GB values.
constexpr double kFitSlack = 1e-9;

bool fits(const ResourceVector& used, const ResourceVector& extra, const ResourceVector& cap) {
    return used.cpu + extra.cpu <= cap.cpu * (1.0 + kFitSlack) &&
           used.mem + extra.mem <= cap.mem * (1.0 + kFitSlack);
}

}  // namespace

std::string_view to_string(PmState s) {
    switch (s) {
        case PmState::Active: return "active";
        case PmState::Inactive: return "inactive";
        case PmState::Failed: return "failed";
    }
    return "?";
}

std::string_view to_string(VmType t) {
    switch (t) {
        case VmType::Small: return "small";
        case VmType::Medium: return "medium";
        case VmType::Large: return "large";
        case VmType::XLarge: return "xlarge";
    }
    return "?";
}

std::span<const PmProfile> pm_presets() { return kPmPresets; }
std::span<const VmProfile> vm_presets() { return kVmPresets; }

const PmProfile& pm_preset(std::string_view name) {
    for (const auto& p : kPmPresets) {
        if (p.name == name) return p;
    }
    throw InvalidArgument("unknown server preset '" + std::string(name) + "'");
}

const VmProfile& vm_preset(std::string_view name) {
    for (const auto& p : kVmPresets) {
        if (p.name == name) return p;
    }
    throw InvalidArgument("unknown VM preset '" + std::string(name) + "'");
}

const VmProfile& vm_preset(VmType type) {
    for (const auto& p : kVmPresets) {
        if (p.type == type) return p;
    }
    throw InvalidArgument("unknown VM type");
}

PhysicalMachine PhysicalMachine::from_profile(PmId id, int cluster_id, const PmProfile& p, PmState state) {
    PhysicalMachine pm;
    pm.id = id;
    pm.cluster_id = cluster_id;
    pm.profile = p.name;
    pm.capacity = p.capacity();
    pm.state = state;
    pm.power_max = p.power_max;
    pm.power_min = p.power_min;
    pm.power_idle = p.power_idle;
    pm.validate();
    return pm;
}

void PhysicalMachine::validate() const {
    if (!(capacity.cpu > 0.0) || !(capacity.mem > 0.0)) {
        throw InvalidArgument("PM " + std::to_string(id) + ": capacity must be strictly positive");
    }
    if (power_idle > power_max || power_min > power_max || power_idle < 0.0 || power_min < 0.0) {
        throw InvalidArgument("PM " + std::to_string(id) + ": power_min/power_idle must not exceed power_max");
    }
    if (transition_energy < 0.0) {
        throw InvalidArgument("PM " + std::to_string(id) + ": negative transition energy");
    }
}

VirtualMachine VirtualMachine::from_profile(VmId id, const VmProfile& p) {
    VirtualMachine vm;
    vm.id = id;
    vm.vm_type = p.type;
    vm.demand = p.demand();
    vm.task_capacity = p.pe;
    return vm;
}

ResourceVector VirtualMachine::usage_at(std::size_t slot) const {
    if (slot >= usage_series.size()) return {};
    const auto& f = usage_series[slot];
    return {f.cpu * demand.cpu, f.mem * demand.mem};
}

void User::validate() const {
    if (!(budget > 0.0)) throw InvalidArgument("user " + std::to_string(id) + ": budget must be > 0");
    if (!(deadline > 0.0)) throw InvalidArgument("user " + std::to_string(id) + ": deadline must be > 0");
    if (!(guaranteed_availability > 0.0) || guaranteed_availability > 1.0) {
        throw InvalidArgument("user " + std::to_string(id) + ": guaranteed availability must be in (0,1]");
    }
}

void Placement::assign(const VirtualMachine& vm, const PhysicalMachine& pm) {
    if (entries_.contains(vm.id)) {
        throw InvalidArgument("VM " + std::to_string(vm.id) + " is already placed");
    }
    entries_.emplace(vm.id, Entry{pm.id, pm.cluster_id, vm.demand});
    by_pm_[pm.id].insert(vm.id);
}

void Placement::move(VmId vm, const PhysicalMachine& dest) {
    auto it = entries_.find(vm);
    if (it == entries_.end()) throw InvalidArgument("VM " + std::to_string(vm) + " is not placed");
    by_pm_[it->second.pm].erase(vm);
    it->second.pm = dest.id;
    it->second.cluster = dest.cluster_id;
    by_pm_[dest.id].insert(vm);
}

void Placement::remove(VmId vm) {
    auto it = entries_.find(vm);
    if (it == entries_.end()) return;
    by_pm_[it->second.pm].erase(vm);
    entries_.erase(it);
}

std::optional<PmId> Placement::host_of(VmId vm) const {
    auto it = entries_.find(vm);
    if (it == entries_.end()) return std::nullopt;
    return it->second.pm;
}

bool Placement::mapped(int cluster, VmId vm, PmId pm) const {
    auto it = entries_.find(vm);
    return it != entries_.end() && it->second.pm == pm && it->second.cluster == cluster;
}

std::vector<VmId> Placement::vms_on(PmId pm) const {
    auto it = by_pm_.find(pm);
    if (it == by_pm_.end()) return {};
    return {it->second.begin(), it->second.end()};
}

std::size_t Placement::count_on(PmId pm) const {
    auto it = by_pm_.find(pm);
    return it == by_pm_.end() ? 0 : it->second.size();
}

ResourceVector Placement::hosted_demand(PmId pm) const {
    ResourceVector sum;
    auto it = by_pm_.find(pm);
    if (it == by_pm_.end()) return sum;
    for (VmId v : it->second) sum += entries_.at(v).demand;
    return sum;
}

ResourceVector Placement::demand_of(VmId vm) const {
    auto it = entries_.find(vm);
    return it == entries_.end() ? ResourceVector{} : it->second.demand;
}

bool check_placement(const VirtualMachine& vm, const PhysicalMachine& pm, const Placement& placement) {
    if (!pm.active()) return false;
    ResourceVector used = placement.hosted_demand(pm.id);
    if (placement.host_of(vm.id) == pm.id) used -= placement.demand_of(vm.id);
    return fits(used, vm.demand, pm.capacity);
}

double pm_utilization(const PhysicalMachine& pm, const Placement& placement, Resource r) {
    const double cap = component(pm.capacity, r);
    if (!(cap > 0.0)) {
        throw InvalidArgument("PM " + std::to_string(pm.id) + " has undefined (zero) capacity");
    }
    return component(placement.hosted_demand(pm.id), r) / cap;
}

double datacenter_utilization(std::span<const PhysicalMachine> pms, const Placement& placement) {
    constexpr double kResources = 2.0;  // CPU and memory
    double sum = 0.0;
    std::size_t active = 0;
    for (const auto& pm : pms) {
        if (!pm.active()) continue;
        ++active;
        sum += pm_utilization(pm, placement, Resource::Cpu) + pm_utilization(pm, placement, Resource::Mem);
    }
    if (active == 0) throw InvalidArgument("datacenter utilization needs at least one active PM");
    return sum / (kResources * static_cast<double>(active));
}

double pm_power(const PhysicalMachine& pm, double ru) {
    if (!(ru >= 0.0 && ru <= 1.0)) {
        throw InvalidArgument("utilization " + std::to_string(ru) + " outside [0,1]");
    }
    return (pm.power_max - pm.power_min) * ru + pm.power_idle;
}

double datacenter_power(std::span<const PhysicalMachine> pms, const Placement& placement) {
    double sum = 0.0;
    for (const auto& pm : pms) {
        if (!pm.active()) continue;
        // fits() admits a 1e-9 relative overshoot
        double ru = std::min(1.0, pm_utilization(pm, placement, Resource::Cpu));
        sum += pm_power(pm, ru);
    }
    return sum;
}

void Datacenter::place(VmId v, PmId p) {
    auto& target = pm(p);
    if (!target.active()) {
        throw InvalidArgument("cannot place VM " + std::to_string(v) + " on non-active PM " + std::to_string(p));
    }
    placement.assign(vm(v), target);
    vm(v).host = p;
}

void Datacenter::migrate(VmId v, PmId dest) {
    auto& target = pm(dest);
    if (!target.active()) {
        throw InvalidArgument("cannot migrate VM " + std::to_string(v) + " to non-active PM " + std::to_string(dest));
    }
    placement.move(v, target);
    vm(v).host = dest;
}

void Datacenter::release(VmId v) {
    placement.remove(v);
    vm(v).host.reset();
}

std::size_t Datacenter::active_pm_count() const {
    return static_cast<std::size_t>(std::count_if(pms.begin(), pms.end(), [](const auto& p) { return p.active(); }));
}

}  // namespace srehm
