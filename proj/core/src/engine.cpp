#include "srehm/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace srehm {
namespace {

// Independent random streams; counter draws for one purpose never shift another's.
enum Stream : std::uint64_t {
    kProne = 1,
    kVmFailure = 2,
    kRecovery = 3,
    kPhase = 4,
    kReplica = 5,
    kPmFailure = 6,
    kUsers = 7,
    kInvocations = 8,
    kPredictor = 9,
};

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) { return splitmix(splitmix(seed) ^ stream); }

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

struct Protection {
    StrategyKind kind = StrategyKind::ARP;
    double failure_probability = 1.0;
    std::vector<VmId> images;
};

class Simulation {
public:
    Simulation(const SimConfig& config, const UsageTrace& trace, const RunHooks& hooks)
        : cfg_(config), hooks_(hooks), n_slots_(config.n_slots()) {
        build_fleet(trace);
        place_initial();
        users_ = make_users();
        std::mt19937_64 rng(mix(cfg_.seed, kInvocations));
        result_.vhans = schedule_jobs(users_, dc_, rng, cfg_.ranking);
        for (auto& v : result_.vhans) {
            SignificanceOptions opts{cfg_.ranking.damping, cfg_.ranking.psi, cfg_.ranking.tol, cfg_.ranking.max_iter};
            v.significance = significance(v.graph, opts);
            for (VmId m : v.members) service_.push_back(m);
        }
        std::sort(service_.begin(), service_.end());
        is_service_.assign(dc_.vms.size(), false);
        for (VmId m : service_) is_service_[static_cast<std::size_t>(m)] = true;

        std::vector<VmId> primaries(n_primary_);
        std::iota(primaries.begin(), primaries.end(), 0);
        injector_.emplace(cfg_.seed, primaries, cfg_.failures.v_fp, cfg_.failures.q);
        result_.failure_prone = injector_->failure_prone();

        protection_.resize(n_primary_);
        select_strategies();
        user_acc_.resize(users_.size());
        repair_at_.assign(dc_.pms.size(), 0);
    }

    RunResult run() {
        for (std::size_t s = 0; s < n_slots_; ++s) step(s);
        return std::move(result_);
    }

private:
    void build_fleet(const UsageTrace& trace) {
        for (const auto& g : cfg_.pm_fleet) {
            const PmProfile& p = cfg_.pm_profile(g.profile);
            for (int i = 0; i < g.count; ++i) {
                const auto id = static_cast<PmId>(dc_.pms.size());
                auto pm = PhysicalMachine::from_profile(id, id % cfg_.clusters, p);
                pm.transition_energy = cfg_.transition_energy;
                dc_.pms.push_back(pm);
            }
        }
        for (const auto& g : cfg_.vm_fleet) {
            const VmProfile& p = cfg_.vm_profile(g.profile);
            for (int i = 0; i < g.count; ++i) {
                const auto id = static_cast<VmId>(dc_.vms.size());
                auto vm = VirtualMachine::from_profile(id, p);
                vm.usage_series = trace.window(id, n_slots_);
                dc_.vms.push_back(std::move(vm));
            }
        }
        n_primary_ = dc_.vms.size();
        group_.resize(n_primary_);
        std::iota(group_.begin(), group_.end(), 0);
    }

    // Best-fit decreasing by weight; a fresh PM is woken only when no active one fits.
    void place_initial() {
        std::vector<VmId> order(n_primary_);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](VmId a, VmId b) { return dc_.vm(a).weight() > dc_.vm(b).weight(); });
        for (VmId v : order) {
            TargetChoice t;
            try {
                t = select_target_pm(dc_.vm(v), dc_.pms, dc_.placement);
            } catch (const InfeasibleError&) {
                throw InfeasibleError("initial placement failed: no PM can host VM " + std::to_string(v));
            }
            if (t.woke) dc_.pm(t.pm).state = PmState::Active;
            dc_.place(v, t.pm);
        }
    }

    std::vector<User> make_users() const {
        std::mt19937_64 rng(mix(cfg_.seed, kUsers));
        const auto& u = cfg_.users;
        std::vector<User> users;
        int task_id = 0;
        for (int m = 0; m < u.count; ++m) {
            User user;
            user.id = m;
            const int n_tasks = uniform_int(rng, u.tasks_min, u.tasks_max);
            for (int k = 0; k < n_tasks; ++k) {
                user.tasks.push_back({task_id++, uniform(rng, u.task_minutes_min, u.task_minutes_max)});
            }
            user.budget = uniform(rng, u.budget_min, u.budget_max);
            user.deadline = uniform(rng, u.deadline_min, u.deadline_max);
            user.guaranteed_availability = u.guaranteed_availability;
            users.push_back(std::move(user));
        }
        return users;
    }

    bool conflicts(VmId vm, PmId pm) const {
        const VmId g = group_.at(static_cast<std::size_t>(vm));
        for (VmId other : dc_.placement.vms_on(pm)) {
            if (other != vm && group_[static_cast<std::size_t>(other)] == g) return true;
        }
        return false;
    }

    ConflictFn conflict_fn() const {
        return [this](VmId vm, PmId pm) { return conflicts(vm, pm); };
    }

    std::vector<double> replica_failures(VmId vm, int num) const {
        std::vector<double> p;
        for (int r = 0; r < num; ++r) {
            const bool prone = counter_uniform(cfg_.seed, kReplica, static_cast<std::uint64_t>(vm),
                                               static_cast<std::uint64_t>(r)) < cfg_.failures.v_fp / 100.0;
            p.push_back(prone ? cfg_.failures.q : cfg_.failures.replica_base_failure);
        }
        return p;
    }

    HAStrategy make_strategy(const StrategySpec& spec, const VirtualMachine& vm) const {
        HAStrategy h;
        h.kind = spec.kind;
        h.num = spec.num;
        h.per_replica_failure = replica_failures(vm.id, spec.num);
        const int images = spec.kind == StrategyKind::ARP ? spec.num - 1 : spec.num;
        h.exec_cost = spec.cost_per_image * images;
        h.response_time = spec.time_factor * vm.task_minutes + spec.recovery_penalty_slots * cfg_.slot_minutes;
        return h;
    }

    // Places the extra images of a protected VM; all or nothing.
    bool place_images(VmId primary, const HAStrategy& h, Protection& prot) {
        const std::size_t first = dc_.vms.size();
        for (int r = 0; r < h.extra_images(); ++r) {
            VirtualMachine img = dc_.vm(primary);
            img.id = static_cast<VmId>(dc_.vms.size());
            img.host.reset();
            img.owner.reset();
            img.replica_of = primary;
            img.tasks.clear();
            img.task_minutes = 0.0;
            img.critical = false;
            if (h.kind == StrategyKind::ARP) img.usage_series.clear();  // cold standby
            dc_.vms.push_back(std::move(img));
            group_.push_back(primary);
            const VmId id = dc_.vms.back().id;
            TargetFilter filter;
            filter.admits = [&](PmId pm) { return !conflicts(id, pm); };
            try {
                const TargetChoice t = select_target_pm(dc_.vm(id), dc_.pms, dc_.placement, filter);
                if (t.woke) dc_.pm(t.pm).state = PmState::Active;
                dc_.place(id, t.pm);
                prot.images.push_back(id);
            } catch (const InfeasibleError&) {
                for (std::size_t v = dc_.vms.size(); v-- > first;) {
                    if (dc_.vms[v].host) dc_.release(static_cast<VmId>(v));
                }
                dc_.vms.resize(first);
                group_.resize(first);
                prot.images.clear();
                return false;
            }
        }
        return true;
    }

    void select_strategies() {
        for (const auto& vhan : result_.vhans) {
            const User& user = users_.at(static_cast<std::size_t>(vhan.user));
            const double threshold =
                cfg_.ranking.sig_threshold.value_or(1.0 / static_cast<double>(vhan.members.size()));
            for (int id : rank(vhan.significance)) {
                const VmId vm = id;
                const auto pos = std::find(vhan.significance.node_ids.begin(), vhan.significance.node_ids.end(), id) -
                                 vhan.significance.node_ids.begin();
                SelectionRecord rec;
                rec.vm_id = vm;
                rec.user = vhan.user;
                rec.significance = vhan.significance.values[static_cast<std::size_t>(pos)];
                if (cfg_.mode == HaMode::Disabled) {
                    rec.note = "ha disabled";
                    result_.selections.push_back(rec);
                    continue;
                }
                std::vector<HAStrategy> pool;
                for (const auto& spec : cfg_.strategies) pool.push_back(make_strategy(spec, dc_.vm(vm)));

                std::optional<HAStrategy> chosen;
                if (cfg_.mode == HaMode::ProtectAllPe) {
                    StrategySpec pe{StrategyKind::PE, 3, 1.0, 0.5, 0};
                    for (const auto& spec : cfg_.strategies) {
                        if (spec.kind == StrategyKind::PE) pe = spec;
                    }
                    chosen = make_strategy(pe, dc_.vm(vm));
                } else {
                    try {
                        const auto sel = select_strategy(vm, rec.significance, pool, user.budget, user.deadline,
                                                         threshold);
                        if (sel.chosen) {
                            for (const auto& h : pool) {
                                if (h.kind == *sel.chosen && h.failure_probability() == sel.failure_probability) {
                                    chosen = h;
                                    break;
                                }
                            }
                        } else {
                            rec.note = "below significance threshold";
                        }
                    } catch (const InfeasibleError&) {
                        rec.note = "no strategy meets budget and deadline";
                    }
                }
                if (chosen) {
                    Protection prot;
                    prot.kind = chosen->kind;
                    prot.failure_probability = chosen->failure_probability();
                    if (place_images(vm, *chosen, prot)) {
                        rec.chosen = prot.kind;
                        rec.failure_probability = prot.failure_probability;
                        protection_[static_cast<std::size_t>(vm)] = std::move(prot);
                    } else {
                        rec.note = "no capacity for replica images";
                    }
                }
                result_.selections.push_back(rec);
            }
        }
    }

    // Per-PM LSTM forecast of the aggregate load, split over the hosted VMs in
    // proportion to what each used in the previous slot.
    VmLoadForecast forecast(std::size_t s) {
        VmLoadForecast load(dc_.vms.size());
        if (s == 0) return load;
        const std::size_t keep = std::min<std::size_t>(s, static_cast<std::size_t>(cfg_.forecast.history));
        std::vector<double> cpu(keep), mem(keep);
        for (const auto& pm : dc_.pms) {
            if (!pm.active()) continue;
            const auto vms = dc_.placement.vms_on(pm.id);
            if (vms.empty()) continue;
            for (std::size_t k = 0; k < keep; ++k) {
                const std::size_t slot = s - keep + k;
                ResourceVector sum;
                for (VmId v : vms) sum += dc_.vm(v).usage_at(slot);
                cpu[k] = std::clamp(sum.cpu / pm.capacity.cpu, 0.0, 1.0);
                mem[k] = std::clamp(sum.mem / pm.capacity.mem, 0.0, 1.0);
            }
            auto& pred = predictor(pm.id);
            pred.first.update(cpu, s);
            pred.second.update(mem, s);
            const ResourceVector total{pred.first.predict(cpu) * pm.capacity.cpu,
                                       pred.second.predict(mem) * pm.capacity.mem};
            ResourceVector last;
            for (VmId v : vms) last += dc_.vm(v).usage_at(s - 1);
            for (VmId v : vms) {
                const ResourceVector u = dc_.vm(v).usage_at(s - 1);
                load[static_cast<std::size_t>(v)] = {last.cpu > 0.0 ? total.cpu * u.cpu / last.cpu : 0.0,
                                                     last.mem > 0.0 ? total.mem * u.mem / last.mem : 0.0};
            }
        }
        return load;
    }

    std::pair<ResourcePredictor, ResourcePredictor>& predictor(PmId pm) {
        auto it = predictors_.find(pm);
        if (it == predictors_.end()) {
            const auto base = mix(cfg_.seed, kPredictor) ^ static_cast<std::uint64_t>(pm) * 2;
            it = predictors_
                     .emplace(pm, std::make_pair(ResourcePredictor(cfg_.forecast, splitmix(base)),
                                                 ResourcePredictor(cfg_.forecast, splitmix(base + 1))))
                     .first;
        }
        return it->second;
    }

    ResourceVector actual_utilization(const PhysicalMachine& pm, std::size_t s) const {
        ResourceVector sum;
        for (VmId v : dc_.placement.vms_on(pm.id)) sum += dc_.vm(v).usage_at(s);
        return {sum.cpu / pm.capacity.cpu, sum.mem / pm.capacity.mem};
    }

    bool over(const ResourceVector& u) const { return estimate_failure(u.cpu, u.mem, cfg_.migration.threshold); }

    void log_plans(const std::vector<MigrationPlan>& plans, std::size_t s, const char* reason) {
        for (const auto& p : plans) {
            result_.migrations.push_back({static_cast<int>(s), p, reason});
            result_.migration_energy += p.energy;
        }
        slot_migrations_ += static_cast<long>(plans.size());
    }

    // Hardware failures evict every VM of the PM; evicted and still homeless VMs are re-placed.
    void pm_failures(std::size_t s, std::set<VmId>& failed) {
        for (auto& pm : dc_.pms) {
            if (pm.state == PmState::Failed && static_cast<std::size_t>(repair_at_[static_cast<std::size_t>(pm.id)]) <= s) {
                pm.state = PmState::Inactive;
            }
        }
        if (cfg_.failures.pm_failure_prob > 0.0) {
            for (auto& pm : dc_.pms) {
                if (!pm.active()) continue;
                if (counter_uniform(cfg_.seed, kPmFailure, static_cast<std::uint64_t>(pm.id), s) >=
                    cfg_.failures.pm_failure_prob) {
                    continue;
                }
                for (VmId v : dc_.placement.vms_on(pm.id)) {
                    dc_.release(v);
                    homeless_[v] = pm.id;
                    if (is_service(v)) failed.insert(v);
                }
                pm.state = PmState::Failed;
                repair_at_[static_cast<std::size_t>(pm.id)] = static_cast<long>(s) + cfg_.failures.pm_repair_slots;
            }
        }
        std::vector<MigrationPlan> plans;
        for (auto it = homeless_.begin(); it != homeless_.end();) {
            const VmId v = it->first;
            TargetFilter filter;
            filter.admits = [&](PmId pm) { return !conflicts(v, pm); };
            try {
                const TargetChoice t = select_target_pm(dc_.vm(v), dc_.pms, dc_.placement, filter);
                if (t.woke) dc_.pm(t.pm).state = PmState::Active;
                MigrationPlan plan;
                plan.vm_id = v;
                plan.source_pm = it->second;
                plan.dest_pm = t.pm;
                plan.hops = hop_distance(dc_.pm(it->second), dc_.pm(t.pm), cfg_.migration);
                plan.vm_weight = dc_.vm(v).weight();
                plan.woke_dest = t.woke;
                plan.energy = migration_cost(plan, cfg_.migration.c_mig, dc_.pm(t.pm).transition_energy);
                dc_.place(v, t.pm);
                plans.push_back(plan);
                it = homeless_.erase(it);
            } catch (const InfeasibleError&) {
                ++it;
            }
        }
        log_plans(plans, s, "failover");
    }

    bool is_service(VmId v) const {
        return static_cast<std::size_t>(v) < is_service_.size() && is_service_[static_cast<std::size_t>(v)];
    }

    // Downtime of one failure: a short switch-over when the HA strategy masks it,
    // otherwise the unfinished part of the VM's work has to be redone.
    double downtime(VmId v, std::size_t s) const {
        const auto& prot = protection_[static_cast<std::size_t>(v)];
        if (prot && counter_uniform(cfg_.seed, kRecovery, static_cast<std::uint64_t>(v), s) >= prot->failure_probability) {
            return cfg_.failures.protected_repair_minutes;
        }
        const double phase = counter_uniform(cfg_.seed, kPhase, static_cast<std::uint64_t>(v), s);
        return std::max(dc_.vm(v).task_minutes * (1.0 - phase), 0.0);
    }

    void step(std::size_t s) {
        slot_migrations_ = 0;
        std::set<VmId> failed;
        pm_failures(s, failed);

        if (cfg_.mode != HaMode::Disabled) {
            const VmLoadForecast load = forecast(s);
            std::vector<bool> realized_before;
            for (const auto& pm : dc_.pms) {
                if (pm.active()) realized_before.push_back(over(actual_utilization(pm, s)));
            }
            if (hooks_.on_forecast) hooks_.on_forecast(static_cast<int>(s), dc_, load);
            const MitigationOutcome out = mitigate_overloads(dc_, load, cfg_.migration, conflict_fn());
            for (std::size_t i = 0; i < out.estimates.size(); ++i) {
                acc_.add_prediction(out.estimates[i].eta_star, realized_before[i]);
            }
            for (const auto& rec : out.overloads) result_.overloads.push_back({static_cast<int>(s), rec});
            log_plans(out.plans, s, "overload");
            if (cfg_.migration.consolidate && s > 0) {
                log_plans(consolidate_underloaded(dc_, load, cfg_.migration, conflict_fn()), s, "underload");
            }
        }

        // Realized contention takes down the largest service VM of the PM.
        long realized = 0;
        for (const auto& pm : dc_.pms) {
            if (!pm.active() || !over(actual_utilization(pm, s))) continue;
            ++realized;
            std::optional<VmId> victim;
            for (VmId v : dc_.placement.vms_on(pm.id)) {
                if (!is_service(v)) continue;
                if (!victim || dc_.vm(v).weight() > dc_.vm(*victim).weight()) victim = v;
            }
            if (victim) failed.insert(*victim);
        }

        std::vector<VmId> hosted;
        for (VmId v : service_) {
            if (dc_.vm(v).host) hosted.push_back(v);
        }
        for (VmId v : injector_->failures(hosted, s)) failed.insert(v);

        for (VmId v : service_) {
            const auto owner = static_cast<std::size_t>(*dc_.vm(v).owner);
            acc_.add_service_minutes(cfg_.slot_minutes);
            user_acc_[owner].add_service_minutes(cfg_.slot_minutes);
            if (failed.contains(v)) {
                const double d = homeless_.contains(v) ? cfg_.slot_minutes : downtime(v, s);
                acc_.add_failure(d);
                user_acc_[owner].add_failure(d);
            } else if (homeless_.contains(v)) {
                acc_.add_downtime(cfg_.slot_minutes);
                user_acc_[owner].add_downtime(cfg_.slot_minutes);
            }
        }

        const std::size_t active = dc_.active_pm_count();
        const double power = datacenter_power(dc_.pms, dc_.placement);
        const double util = active > 0 ? datacenter_utilization(dc_.pms, dc_.placement) : 0.0;
        acc_.add_slot(power, util, realized, slot_migrations_);
        result_.energy_wh += power * cfg_.slot_minutes / 60.0;
        const double t = static_cast<double>(s + 1) * cfg_.slot_minutes;
        result_.slots.push_back(acc_.snapshot(cfg_.failures.v_fp, t));
        result_.states.push_back({static_cast<int>(s), active, power, util, realized,
                                  static_cast<int>(failed.size()), slot_migrations_});

        if (hooks_.on_feedback) {
            for (const auto& user : users_) {
                const SlotMetrics m = user_acc_[static_cast<std::size_t>(user.id)].snapshot(cfg_.failures.v_fp, t);
                hooks_.on_feedback(static_cast<int>(s), user.id,
                                   availability_score(user.guaranteed_availability, m.availability / 100.0));
            }
        }
        if (hooks_.on_slot) hooks_.on_slot(static_cast<int>(s), dc_);
    }

    const SimConfig& cfg_;
    const RunHooks& hooks_;
    std::size_t n_slots_;
    std::size_t n_primary_ = 0;
    Datacenter dc_;
    std::vector<VmId> group_;  // primary id of every image
    std::vector<User> users_;
    std::vector<VmId> service_;
    std::vector<bool> is_service_;
    std::optional<FailureInjector> injector_;
    std::vector<std::optional<Protection>> protection_;
    std::map<PmId, std::pair<ResourcePredictor, ResourcePredictor>> predictors_;
    std::map<VmId, PmId> homeless_;  // evicted VMs and the PM they lost
    std::vector<long> repair_at_;
    MetricsAccumulator acc_;
    std::vector<MetricsAccumulator> user_acc_;
    long slot_migrations_ = 0;
    RunResult result_;
};

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t a, std::uint64_t b) {
    std::uint64_t h = splitmix(seed);
    h = splitmix(h ^ stream);
    h = splitmix(h ^ a);
    h = splitmix(h ^ b);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

FailureInjector::FailureInjector(std::uint64_t seed, std::span<const VmId> vms, double v_fp, double q)
    : seed_(seed), q_(q) {
    if (!(v_fp >= 0.0 && v_fp <= 100.0)) throw InvalidArgument("v_fp must lie in [0,100]");
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("failure probability q must lie in [0,1]");
    std::vector<VmId> order(vms.begin(), vms.end());
    std::sort(order.begin(), order.end());
    std::mt19937_64 rng(mix(seed, kProne));
    std::shuffle(order.begin(), order.end(), rng);
    const auto k = static_cast<std::size_t>(std::ceil(v_fp / 100.0 * static_cast<double>(order.size()) - 1e-9));
    prone_.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(k, order.size())));
    std::sort(prone_.begin(), prone_.end());
    for (VmId v : prone_) {
        if (v < 0) throw InvalidArgument("VM ids must be non-negative");
        if (static_cast<std::size_t>(v) >= prone_flag_.size()) prone_flag_.resize(static_cast<std::size_t>(v) + 1);
        prone_flag_[static_cast<std::size_t>(v)] = true;
    }
}

bool FailureInjector::is_failure_prone(VmId vm) const {
    return vm >= 0 && static_cast<std::size_t>(vm) < prone_flag_.size() && prone_flag_[static_cast<std::size_t>(vm)];
}

std::vector<VmId> FailureInjector::failures(std::span<const VmId> candidates, std::size_t slot) const {
    std::vector<VmId> out;
    for (VmId v : candidates) {
        if (is_failure_prone(v) && counter_uniform(seed_, kVmFailure, static_cast<std::uint64_t>(v), slot) < q_) {
            out.push_back(v);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Vhan> schedule_jobs(std::span<const User> users, Datacenter& dc, std::mt19937_64& rng,
                                const RankingSpec& ranking) {
    std::vector<VmId> free;
    for (const auto& vm : dc.vms) {
        if (vm.host && !vm.owner && !vm.replica_of) free.push_back(vm.id);
    }
    const std::size_t n_users = users.size();
    std::vector<std::vector<VmId>> shares(n_users);
    for (std::size_t i = 0; i < free.size() && n_users > 0; ++i) shares[i % n_users].push_back(free[i]);

    std::vector<Vhan> vhans;
    std::vector<int> unplaced;
    for (std::size_t m = 0; m < n_users; ++m) {
        const User& user = users[m];
        user.validate();
        const std::size_t k = std::min(shares[m].size(), user.tasks.size());
        std::vector<VmId> members(shares[m].begin(), shares[m].begin() + static_cast<std::ptrdiff_t>(k));
        std::vector<int> load(k, 0);
        std::size_t cursor = 0;
        for (const Task& task : user.tasks) {
            bool placed = false;
            for (std::size_t tries = 0; tries < k && !placed; ++tries) {
                const std::size_t i = (cursor + tries) % k;
                VirtualMachine& vm = dc.vm(members[i]);
                if (load[i] >= vm.task_capacity) continue;
                ++load[i];
                vm.tasks.push_back(task.id);
                vm.task_minutes += task.duration_minutes;
                cursor = i + 1;
                placed = true;
            }
            if (!placed) unplaced.push_back(task.id);
        }
        if (k == 0) continue;
        for (VmId v : members) dc.vm(v).owner = user.id;

        Matrix fq(k);
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = 0; b < k; ++b) {
                if (a == b) continue;
                fq(a, b) = uniform_int(rng, 0, ranking.max_invocations);
            }
        }
        const auto critical = classify_critical(in_invocations(fq), ranking.critical_threshold);
        for (std::size_t i = 0; i < k; ++i) dc.vm(members[i]).critical = critical[i];
        Vhan vhan;
        vhan.user = user.id;
        vhan.members = members;
        vhan.graph = build_wdg(fq, critical, std::vector<int>(members.begin(), members.end()));
        vhans.push_back(std::move(vhan));
    }
    if (!unplaced.empty()) {
        throw ScheduleError(std::to_string(unplaced.size()) + " task(s) could not be given a VM", unplaced);
    }
    return vhans;
}

SlotMetrics RunResult::summary() const { return slots.empty() ? SlotMetrics{} : slots.back(); }

std::vector<SlotMetrics> RunResult::report_rows(double observation_minutes) const {
    std::vector<SlotMetrics> rows;
    if (!(observation_minutes > 0.0)) throw InvalidArgument("observation window must be positive");
    for (std::size_t i = 0; i < slots.size(); ++i) {
        const double k = slots[i].t / observation_minutes;
        if (std::abs(k - std::round(k)) < 1e-9 || i + 1 == slots.size()) rows.push_back(slots[i]);
    }
    return rows;
}

RunResult run(const SimConfig& config, const UsageTrace& trace, const RunHooks& hooks) {
    config.validate();
    if (config.n_slots() == 0) return {};
    Simulation sim(config, trace, hooks);
    return sim.run();
}

}  // namespace srehm
