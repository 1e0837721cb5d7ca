#include "srehm/config.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "srehm/error.hpp"

namespace srehm {
namespace {

using json = nlohmann::json;

// Typed access to one JSON object; remembers which keys were read so leftovers can be reported.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where() + "must be an object");
    }

    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end()) return;
        try {
            if constexpr (std::is_same_v<T, double>) {
                if (!it->is_number()) throw ConfigError(where() + key + " must be a number");
            } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
                if (!it->is_number_integer()) throw ConfigError(where() + key + " must be an integer");
                if constexpr (std::is_unsigned_v<T>) {
                    if (it->is_number_integer() && !it->is_number_unsigned()) {
                        throw ConfigError(where() + key + " must be non-negative");
                    }
                }
            }
            out = it->get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(where() + key + ": " + e.what());
        }
    }

    template <typename T>
    void get(const char* key, std::optional<T>& out) {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end()) return;
        if (it->is_null()) {
            out.reset();
            return;
        }
        T v{};
        get(key, v);
        out = v;
    }

    const json* child(const char* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.contains(it.key())) throw ConfigError(where() + "unknown key '" + it.key() + "'");
        }
    }

private:
    std::string where() const { return path_.empty() ? std::string() : path_ + ": "; }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

VmType parse_vm_type(const std::string& s) {
    for (VmType t : {VmType::Small, VmType::Medium, VmType::Large, VmType::XLarge}) {
        if (to_string(t) == s) return t;
    }
    throw ConfigError("unknown VM type '" + s + "'");
}

template <typename Fn>
decltype(auto) translating(Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

void read_groups(Section& root, const char* key, std::vector<PmGroup>* pms, std::vector<VmGroup>* vms) {
    const json* arr = root.child(key);
    if (!arr) return;
    if (!arr->is_array()) throw ConfigError(std::string(key) + " must be an array");
    if (pms) pms->clear();
    if (vms) vms->clear();
    for (std::size_t i = 0; i < arr->size(); ++i) {
        Section s((*arr)[i], std::string(key) + "[" + std::to_string(i) + "]");
        std::string profile;
        int count = 0;
        s.get("profile", profile);
        s.get("count", count);
        s.finish();
        if (pms) pms->push_back({profile, count});
        if (vms) vms->push_back({profile, count});
    }
}

void read_pm_profiles(Section& root, SimConfig& c) {
    const json* obj = root.child("pm_profiles");
    if (!obj) return;
    if (!obj->is_object()) throw ConfigError("pm_profiles must be an object");
    for (auto it = obj->begin(); it != obj->end(); ++it) {
        Section s(it.value(), "pm_profiles." + it.key());
        PmProfile p;
        p.name = it.key();
        s.get("pe", p.pe);
        s.get("mips", p.mips);
        s.get("ram_gb", p.ram_gb);
        s.get("power_max", p.power_max);
        s.get("power_min", p.power_min);
        s.get("power_idle", p.power_idle);
        s.finish();
        c.pm_profiles[p.name] = p;
    }
}

void read_vm_profiles(Section& root, SimConfig& c) {
    const json* obj = root.child("vm_profiles");
    if (!obj) return;
    if (!obj->is_object()) throw ConfigError("vm_profiles must be an object");
    for (auto it = obj->begin(); it != obj->end(); ++it) {
        Section s(it.value(), "vm_profiles." + it.key());
        VmProfile p;
        p.name = it.key();
        std::string type = "small";
        s.get("type", type);
        p.type = parse_vm_type(type);
        s.get("pe", p.pe);
        s.get("mips", p.mips);
        s.get("ram_gb", p.ram_gb);
        s.finish();
        c.vm_profiles[p.name] = p;
    }
}

void read_strategies(Section& root, SimConfig& c) {
    const json* arr = root.child("strategies");
    if (!arr) return;
    if (!arr->is_array()) throw ConfigError("strategies must be an array");
    c.strategies.clear();
    for (std::size_t i = 0; i < arr->size(); ++i) {
        Section s((*arr)[i], "strategies[" + std::to_string(i) + "]");
        StrategySpec spec;
        std::string kind;
        s.get("kind", kind);
        spec.kind = translating([&] { return parse_strategy_kind(kind); });
        s.get("num", spec.num);
        s.get("cost_per_image", spec.cost_per_image);
        s.get("time_factor", spec.time_factor);
        s.get("recovery_penalty_slots", spec.recovery_penalty_slots);
        s.finish();
        c.strategies.push_back(spec);
    }
}

SimConfig from_json(const json& j) {
    SimConfig c = SimConfig::desk_default();
    Section root(j, "");
    root.get("seed", c.seed);
    root.get("slot_minutes", c.slot_minutes);
    root.get("horizon_minutes", c.horizon_minutes);
    root.get("observation_minutes", c.observation_minutes);
    root.get("clusters", c.clusters);
    root.get("transition_energy", c.transition_energy);
    std::string mode(to_string(c.mode));
    root.get("mode", mode);
    c.mode = translating([&] { return parse_ha_mode(mode); });

    read_groups(root, "pms", &c.pm_fleet, nullptr);
    read_groups(root, "vms", nullptr, &c.vm_fleet);
    read_pm_profiles(root, c);
    read_vm_profiles(root, c);
    read_strategies(root, c);

    if (const json* u = root.child("users")) {
        Section s(*u, "users");
        s.get("count", c.users.count);
        s.get("tasks_min", c.users.tasks_min);
        s.get("tasks_max", c.users.tasks_max);
        s.get("budget_min", c.users.budget_min);
        s.get("budget_max", c.users.budget_max);
        s.get("deadline_min", c.users.deadline_min);
        s.get("deadline_max", c.users.deadline_max);
        s.get("task_minutes_min", c.users.task_minutes_min);
        s.get("task_minutes_max", c.users.task_minutes_max);
        s.get("guaranteed_availability", c.users.guaranteed_availability);
        s.finish();
    }
    if (const json* f = root.child("failures")) {
        Section s(*f, "failures");
        s.get("v_fp", c.failures.v_fp);
        s.get("q", c.failures.q);
        s.get("replica_base_failure", c.failures.replica_base_failure);
        s.get("pm_failure_prob", c.failures.pm_failure_prob);
        s.get("pm_repair_slots", c.failures.pm_repair_slots);
        s.get("protected_repair_minutes", c.failures.protected_repair_minutes);
        s.finish();
    }
    if (const json* r = root.child("ranking")) {
        Section s(*r, "ranking");
        s.get("damping", c.ranking.damping);
        s.get("psi", c.ranking.psi);
        s.get("tol", c.ranking.tol);
        s.get("max_iter", c.ranking.max_iter);
        s.get("critical_threshold", c.ranking.critical_threshold);
        s.get("max_invocations", c.ranking.max_invocations);
        s.get("sig_threshold", c.ranking.sig_threshold);
        s.finish();
    }
    if (const json* f = root.child("forecast")) {
        Section s(*f, "forecast");
        s.get("hidden", c.forecast.hidden);
        s.get("window", c.forecast.window);
        s.get("learning_rate", c.forecast.learning_rate);
        s.get("clip_norm", c.forecast.clip_norm);
        s.get("epochs", c.forecast.epochs);
        s.get("retrain_every", c.forecast.retrain_every);
        s.get("history", c.forecast.history);
        s.finish();
    }
    if (const json* m = root.child("migration")) {
        Section s(*m, "migration");
        s.get("c_mig", c.migration.c_mig);
        s.get("hops_same_cluster", c.migration.hops_same_cluster);
        s.get("hops_cross_cluster", c.migration.hops_cross_cluster);
        s.get("threshold", c.migration.threshold);
        s.get("underload_threshold", c.migration.underload_threshold);
        s.get("consolidate", c.migration.consolidate);
        s.finish();
    }
    if (const json* t = root.child("synthetic")) {
        Section s(*t, "synthetic");
        std::string pattern(to_string(c.synthetic_pattern));
        s.get("pattern", pattern);
        c.synthetic_pattern = translating([&] { return parse_trace_pattern(pattern); });
        s.get("base", c.synthetic.base);
        s.get("amplitude", c.synthetic.amplitude);
        s.get("period_slots", c.synthetic.period_slots);
        s.get("noise", c.synthetic.noise);
        s.get("spike_probability", c.synthetic.spike_probability);
        s.get("spike_min", c.synthetic.spike_min);
        s.finish();
    }
    root.finish();
    c.synthetic.slot_minutes = c.slot_minutes;
    c.validate();
    return c;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }
bool probability(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

std::string_view to_string(HaMode m) {
    switch (m) {
        case HaMode::SreHm: return "srehm";
        case HaMode::Disabled: return "disabled";
        case HaMode::ProtectAllPe: return "protect_all_pe";
    }
    return "?";
}

HaMode parse_ha_mode(std::string_view name) {
    if (name == "srehm") return HaMode::SreHm;
    if (name == "disabled") return HaMode::Disabled;
    if (name == "protect_all_pe") return HaMode::ProtectAllPe;
    throw InvalidArgument("unknown mode '" + std::string(name) + "' (srehm, disabled, protect_all_pe)");
}

std::vector<StrategySpec> default_strategy_pool() {
    return {
        {StrategyKind::ARP, 3, 1.0, 1.0, 2},
        {StrategyKind::MVP, 3, 1.0, 1.0, 0},
        {StrategyKind::PE, 3, 1.0, 0.5, 0},
    };
}

SimConfig SimConfig::desk_default() {
    SimConfig c;
    c.pm_fleet = {{"S3", 10}, {"S2", 6}, {"S1", 4}};
    c.vm_fleet = {{"v_small", 60}, {"v_medium", 30}, {"v_large", 10}};
    return c;
}

std::size_t SimConfig::n_slots() const {
    if (!(slot_minutes > 0.0) || !(horizon_minutes >= 0.0)) return 0;
    return static_cast<std::size_t>(std::round(horizon_minutes / slot_minutes));
}

std::size_t SimConfig::n_pms() const {
    std::size_t n = 0;
    for (const auto& g : pm_fleet) n += static_cast<std::size_t>(std::max(g.count, 0));
    return n;
}

std::size_t SimConfig::n_vms() const {
    std::size_t n = 0;
    for (const auto& g : vm_fleet) n += static_cast<std::size_t>(std::max(g.count, 0));
    return n;
}

const PmProfile& SimConfig::pm_profile(const std::string& name) const {
    if (auto it = pm_profiles.find(name); it != pm_profiles.end()) return it->second;
    return translating([&]() -> const PmProfile& { return pm_preset(name); });
}

const VmProfile& SimConfig::vm_profile(const std::string& name) const {
    if (auto it = vm_profiles.find(name); it != vm_profiles.end()) return it->second;
    return translating([&]() -> const VmProfile& { return vm_preset(name); });
}

void SimConfig::validate() const {
    require(finite_positive(slot_minutes), "slot_minutes must be > 0");
    require(std::isfinite(horizon_minutes) && horizon_minutes >= 0.0, "horizon_minutes must be >= 0");
    {
        const double k = horizon_minutes / slot_minutes;
        require(std::abs(k - std::round(k)) < 1e-9 * std::max(1.0, k), "horizon_minutes must be a multiple of slot_minutes");
    }
    require(finite_positive(observation_minutes), "observation_minutes must be > 0");
    require(clusters >= 1, "clusters must be >= 1");
    require(std::isfinite(transition_energy) && transition_energy >= 0.0, "transition_energy must be >= 0");

    require(!pm_fleet.empty() && n_pms() > 0, "pms must list at least one PM");
    require(!vm_fleet.empty() && n_vms() > 0, "vms must list at least one VM");
    for (const auto& g : pm_fleet) {
        require(g.count >= 0, "PM group '" + g.profile + "' has a negative count");
        const PmProfile& p = pm_profile(g.profile);
        translating([&] {
            PhysicalMachine::from_profile(0, 0, p).validate();
            return 0;
        });
    }
    for (const auto& g : vm_fleet) {
        require(g.count >= 0, "VM group '" + g.profile + "' has a negative count");
        const VmProfile& p = vm_profile(g.profile);
        require(p.pe >= 1 && finite_positive(p.mips) && finite_positive(p.ram_gb),
                "VM profile '" + g.profile + "' needs pe >= 1 and positive mips and ram_gb");
    }

    require(users.count >= 0, "users.count must be >= 0");
    require(users.tasks_min >= 1 && users.tasks_max >= users.tasks_min, "users: need 1 <= tasks_min <= tasks_max");
    require(finite_positive(users.budget_min) && users.budget_max >= users.budget_min,
            "users: need 0 < budget_min <= budget_max");
    require(finite_positive(users.deadline_min) && users.deadline_max >= users.deadline_min,
            "users: need 0 < deadline_min <= deadline_max");
    require(finite_positive(users.task_minutes_min) && users.task_minutes_max >= users.task_minutes_min,
            "users: need 0 < task_minutes_min <= task_minutes_max");
    require(users.guaranteed_availability > 0.0 && users.guaranteed_availability <= 1.0,
            "users.guaranteed_availability must lie in (0,1]");

    require(failures.v_fp >= 0.0 && failures.v_fp <= 100.0, "failures.v_fp must lie in [0,100]");
    require(probability(failures.q), "failures.q must lie in [0,1]");
    require(probability(failures.replica_base_failure), "failures.replica_base_failure must lie in [0,1]");
    require(probability(failures.pm_failure_prob), "failures.pm_failure_prob must lie in [0,1]");
    require(failures.pm_repair_slots >= 1, "failures.pm_repair_slots must be >= 1");
    require(std::isfinite(failures.protected_repair_minutes) && failures.protected_repair_minutes >= 0.0,
            "failures.protected_repair_minutes must be >= 0");

    require(probability(ranking.damping), "ranking.damping must lie in [0,1]");
    require(!ranking.psi || probability(*ranking.psi), "ranking.psi must lie in [0,1]");
    require(finite_positive(ranking.tol), "ranking.tol must be > 0");
    require(ranking.max_iter >= 1, "ranking.max_iter must be >= 1");
    require(ranking.critical_threshold >= 0, "ranking.critical_threshold must be >= 0");
    require(ranking.max_invocations >= 1, "ranking.max_invocations must be >= 1");
    require(!ranking.sig_threshold || probability(*ranking.sig_threshold), "ranking.sig_threshold must lie in [0,1]");

    require(!strategies.empty(), "strategies must not be empty");
    for (const auto& s : strategies) {
        require(s.num >= 1, "strategy num must be >= 1");
        require(s.kind != StrategyKind::MVP || s.num % 2 == 1, "MVP needs an odd num");
        require(std::isfinite(s.cost_per_image) && s.cost_per_image >= 0.0, "strategy cost_per_image must be >= 0");
        require(std::isfinite(s.time_factor) && s.time_factor >= 0.0, "strategy time_factor must be >= 0");
        require(s.recovery_penalty_slots >= 0, "strategy recovery_penalty_slots must be >= 0");
    }

    require(forecast.hidden >= 1 && forecast.window >= 1, "forecast hidden and window must be >= 1");
    require(finite_positive(forecast.learning_rate), "forecast.learning_rate must be > 0");
    require(finite_positive(forecast.clip_norm), "forecast.clip_norm must be > 0");
    require(forecast.epochs >= 0, "forecast.epochs must be >= 0");
    require(forecast.retrain_every >= 1, "forecast.retrain_every must be >= 1");
    require(forecast.history > forecast.window, "forecast.history must exceed forecast.window");

    require(std::isfinite(migration.c_mig) && migration.c_mig >= 0.0, "migration.c_mig must be >= 0");
    require(migration.hops_same_cluster >= 0 && migration.hops_cross_cluster >= 0, "migration hops must be >= 0");
    require(migration.threshold > 0.0 && migration.threshold <= 1.0, "migration.threshold must lie in (0,1]");
    require(migration.underload_threshold >= 0.0 && migration.underload_threshold < migration.threshold,
            "migration.underload_threshold must lie in [0, threshold)");

    require(probability(synthetic.base) && synthetic.amplitude >= 0.0 && synthetic.noise >= 0.0,
            "synthetic: base in [0,1], amplitude and noise >= 0");
    require(synthetic.period_slots >= 1, "synthetic.period_slots must be >= 1");
    require(probability(synthetic.spike_probability) && probability(synthetic.spike_min),
            "synthetic spike_probability and spike_min must lie in [0,1]");
}

SimConfig parse_config(std::istream& in) {
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    return from_json(j);
}

SimConfig parse_config_string(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_config(in);
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

std::string config_to_json(const SimConfig& c) {
    json j;
    j["seed"] = c.seed;
    j["slot_minutes"] = c.slot_minutes;
    j["horizon_minutes"] = c.horizon_minutes;
    j["observation_minutes"] = c.observation_minutes;
    j["clusters"] = c.clusters;
    j["transition_energy"] = c.transition_energy;
    j["mode"] = std::string(to_string(c.mode));
    j["pms"] = json::array();
    for (const auto& g : c.pm_fleet) j["pms"].push_back({{"profile", g.profile}, {"count", g.count}});
    j["vms"] = json::array();
    for (const auto& g : c.vm_fleet) j["vms"].push_back({{"profile", g.profile}, {"count", g.count}});
    j["pm_profiles"] = json::object();
    for (const auto& [name, p] : c.pm_profiles) {
        j["pm_profiles"][name] = {{"pe", p.pe},          {"mips", p.mips},           {"ram_gb", p.ram_gb},
                                  {"power_max", p.power_max}, {"power_min", p.power_min}, {"power_idle", p.power_idle}};
    }
    j["vm_profiles"] = json::object();
    for (const auto& [name, p] : c.vm_profiles) {
        j["vm_profiles"][name] = {
            {"type", std::string(to_string(p.type))}, {"pe", p.pe}, {"mips", p.mips}, {"ram_gb", p.ram_gb}};
    }
    j["strategies"] = json::array();
    for (const auto& s : c.strategies) {
        j["strategies"].push_back({{"kind", std::string(to_string(s.kind))},
                                   {"num", s.num},
                                   {"cost_per_image", s.cost_per_image},
                                   {"time_factor", s.time_factor},
                                   {"recovery_penalty_slots", s.recovery_penalty_slots}});
    }
    const auto& u = c.users;
    j["users"] = {{"count", u.count},
                  {"tasks_min", u.tasks_min},
                  {"tasks_max", u.tasks_max},
                  {"budget_min", u.budget_min},
                  {"budget_max", u.budget_max},
                  {"deadline_min", u.deadline_min},
                  {"deadline_max", u.deadline_max},
                  {"task_minutes_min", u.task_minutes_min},
                  {"task_minutes_max", u.task_minutes_max},
                  {"guaranteed_availability", u.guaranteed_availability}};
    const auto& f = c.failures;
    j["failures"] = {{"v_fp", f.v_fp},
                     {"q", f.q},
                     {"replica_base_failure", f.replica_base_failure},
                     {"pm_failure_prob", f.pm_failure_prob},
                     {"pm_repair_slots", f.pm_repair_slots},
                     {"protected_repair_minutes", f.protected_repair_minutes}};
    const auto& r = c.ranking;
    j["ranking"] = {{"damping", r.damping},
                    {"psi", r.psi ? json(*r.psi) : json(nullptr)},
                    {"tol", r.tol},
                    {"max_iter", r.max_iter},
                    {"critical_threshold", r.critical_threshold},
                    {"max_invocations", r.max_invocations},
                    {"sig_threshold", r.sig_threshold ? json(*r.sig_threshold) : json(nullptr)}};
    const auto& fc = c.forecast;
    j["forecast"] = {{"hidden", fc.hidden},         {"window", fc.window},   {"learning_rate", fc.learning_rate},
                     {"clip_norm", fc.clip_norm},   {"epochs", fc.epochs},   {"retrain_every", fc.retrain_every},
                     {"history", fc.history}};
    const auto& m = c.migration;
    j["migration"] = {{"c_mig", m.c_mig},
                      {"hops_same_cluster", m.hops_same_cluster},
                      {"hops_cross_cluster", m.hops_cross_cluster},
                      {"threshold", m.threshold},
                      {"underload_threshold", m.underload_threshold},
                      {"consolidate", m.consolidate}};
    const auto& t = c.synthetic;
    j["synthetic"] = {{"pattern", std::string(to_string(c.synthetic_pattern))},
                      {"base", t.base},
                      {"amplitude", t.amplitude},
                      {"period_slots", t.period_slots},
                      {"noise", t.noise},
                      {"spike_probability", t.spike_probability},
                      {"spike_min", t.spike_min}};
    return j.dump(2) + "\n";
}

}  // namespace srehm
