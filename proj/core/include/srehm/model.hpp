#ifndef SREHM_MODEL_HPP
#define SREHM_MODEL_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace srehm {

using PmId = int;
using VmId = int;
using UserId = int;

/// CPU in MIPS (processing elements x per-element MIPS), memory in GB.
struct ResourceVector {
    double cpu = 0.0;
    double mem = 0.0;

    ResourceVector& operator+=(const ResourceVector& o) {
        cpu += o.cpu;
        mem += o.mem;
        return *this;
    }
    ResourceVector& operator-=(const ResourceVector& o) {
        cpu -= o.cpu;
        mem -= o.mem;
        return *this;
    }
    friend ResourceVector operator+(ResourceVector a, const ResourceVector& b) { return a += b; }
    friend ResourceVector operator-(ResourceVector a, const ResourceVector& b) { return a -= b; }
    friend ResourceVector operator*(ResourceVector a, double s) { return {a.cpu * s, a.mem * s}; }
    friend bool operator==(const ResourceVector&, const ResourceVector&) = default;
};

enum class Resource { Cpu, Mem };

inline double component(const ResourceVector& v, Resource r) { return r == Resource::Cpu ? v.cpu : v.mem; }

enum class PmState { Active, Inactive, Failed };

enum class VmType { Small, Medium, Large, XLarge };

std::string_view to_string(PmState s);
std::string_view to_string(VmType t);

/// Hardware profile of a server type.
struct PmProfile {
    std::string name;
    int pe = 1;
    double mips = 0.0;  // per processing element
    double ram_gb = 0.0;
    double power_max = 0.0;
    double power_min = 0.0;
    double power_idle = 0.0;

    ResourceVector capacity() const { return {pe * mips, ram_gb}; }
};

/// Size profile of a VM instance type.
struct VmProfile {
    std::string name;
    VmType type = VmType::Small;
    int pe = 1;
    double mips = 0.0;
    double ram_gb = 0.0;

    ResourceVector demand() const { return {pe * mips, ram_gb}; }
};

/// Built-in server presets "S1", "S2", "S3".
std::span<const PmProfile> pm_presets();
/// Built-in VM presets "v_small", "v_medium", "v_large", "v_xlarge".
std::span<const VmProfile> vm_presets();
/// Throws InvalidArgument for unknown names.
const PmProfile& pm_preset(std::string_view name);
const VmProfile& vm_preset(std::string_view name);
const VmProfile& vm_preset(VmType type);

inline constexpr double kDefaultTransitionEnergy = 100.0;

struct PhysicalMachine {
    PmId id = 0;
    int cluster_id = 0;
    std::string profile;
    ResourceVector capacity;
    PmState state = PmState::Inactive;
    double power_max = 0.0;
    double power_min = 0.0;
    double power_idle = 0.0;
    double transition_energy = kDefaultTransitionEnergy;

    static PhysicalMachine from_profile(PmId id, int cluster_id, const PmProfile& p,
                                        PmState state = PmState::Inactive);

    bool active() const { return state == PmState::Active; }
    /// Throws InvalidArgument when the power or capacity invariants do not hold.
    void validate() const;
};

struct Task {
    int id = 0;
    double duration_minutes = 1.0;
};

struct VirtualMachine {
    VmId id = 0;
    VmType vm_type = VmType::Small;
    ResourceVector demand;
    std::optional<PmId> host;
    bool status = false;  // migration flag, raised for the current slot only
    bool critical = false;
    std::optional<UserId> owner;
    std::optional<VmId> replica_of;  // set for HA replica images
    std::vector<int> tasks;          // task ids executed by this VM
    int task_capacity = 1;           // concurrent tasks, one per processing element
    double task_minutes = 0.0;       // total duration of the assigned tasks
    std::vector<ResourceVector> usage_series;  // per-slot fractions of demand

    static VirtualMachine from_profile(VmId id, const VmProfile& p);

    /// Migration weight W = cpu x mem.
    double weight() const { return demand.cpu * demand.mem; }
    /// Observed usage in absolute units for a slot; zero outside the series.
    ResourceVector usage_at(std::size_t slot) const;
};

struct User {
    UserId id = 0;
    double budget = 1.0;
    double deadline = 1.0;  // minutes
    std::vector<Task> tasks;
    double guaranteed_availability = 0.99;

    void validate() const;
};

/// The mapping omega(cluster, vm, pm) -> {0,1}. Each VM is mapped to at most one PM;
/// the mapping keeps each placed VM's demand so load queries need no VM table.
class Placement {
public:
    /// Throws InvalidArgument if the VM is already placed.
    void assign(const VirtualMachine& vm, const PhysicalMachine& pm);
    /// Moves an already placed VM; the VM is never mapped twice.
    void move(VmId vm, const PhysicalMachine& dest);
    void remove(VmId vm);

    std::optional<PmId> host_of(VmId vm) const;
    bool mapped(int cluster, VmId vm, PmId pm) const;
    std::vector<VmId> vms_on(PmId pm) const;
    std::size_t count_on(PmId pm) const;
    ResourceVector hosted_demand(PmId pm) const;
    ResourceVector demand_of(VmId vm) const;
    std::size_t size() const { return entries_.size(); }

private:
    struct Entry {
        PmId pm;
        int cluster;
        ResourceVector demand;
    };
    std::map<VmId, Entry> entries_;
    std::map<PmId, std::set<VmId>> by_pm_;
};

/// Capacity constraint on both resources. Returns false for a non-active PM.
bool check_placement(const VirtualMachine& vm, const PhysicalMachine& pm, const Placement& placement);

/// Allocated share of one resource on a PM. Throws InvalidArgument on zero capacity.
double pm_utilization(const PhysicalMachine& pm, const Placement& placement, Resource r);

/// Mean of CPU and memory utilization over active PMs. Throws InvalidArgument when no PM is active.
double datacenter_utilization(std::span<const PhysicalMachine> pms, const Placement& placement);

/// Linear power model (max - min) * ru + idle. Throws InvalidArgument for ru outside [0,1].
double pm_power(const PhysicalMachine& pm, double ru);

/// Sum of pm_power over active PMs at their CPU utilization; other PMs draw nothing.
double datacenter_power(std::span<const PhysicalMachine> pms, const Placement& placement);

/// Whole mutable state of one simulated data centre. VM ids index `vms`, PM ids index `pms`.
struct Datacenter {
    std::vector<PhysicalMachine> pms;
    std::vector<VirtualMachine> vms;
    Placement placement;

    PhysicalMachine& pm(PmId id) { return pms.at(static_cast<std::size_t>(id)); }
    const PhysicalMachine& pm(PmId id) const { return pms.at(static_cast<std::size_t>(id)); }
    VirtualMachine& vm(VmId id) { return vms.at(static_cast<std::size_t>(id)); }
    const VirtualMachine& vm(VmId id) const { return vms.at(static_cast<std::size_t>(id)); }

    void place(VmId vm, PmId pm);
    void migrate(VmId vm, PmId dest);
    void release(VmId vm);
    std::size_t active_pm_count() const;
};

}  // namespace srehm

#endif  // SREHM_MODEL_HPP
