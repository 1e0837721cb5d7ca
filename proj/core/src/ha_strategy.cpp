#include "srehm/ha_strategy.hpp"

#include <algorithm>
#include <cctype>
#include <string>
#include <tuple>

#include "srehm/error.hpp"

namespace srehm {
namespace {

void check_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("failure probability " + std::to_string(p) + " outside [0,1]");
}

double product(std::span<const double> ps, const char* what) {
    if (ps.empty()) throw InvalidArgument(std::string(what) + " needs at least one replica");
    double f = 1.0;
    for (double p : ps) {
        check_probability(p);
        f *= p;
    }
    return f;
}

}  // namespace

std::string_view to_string(StrategyKind k) {
    switch (k) {
        case StrategyKind::ARP: return "ARP";
        case StrategyKind::MVP: return "MVP";
        case StrategyKind::PE: return "PE";
    }
    return "?";
}

StrategyKind parse_strategy_kind(std::string_view name) {
    std::string up(name);
    std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
    if (up == "ARP") return StrategyKind::ARP;
    if (up == "MVP") return StrategyKind::MVP;
    if (up == "PE") return StrategyKind::PE;
    throw InvalidArgument("unknown HA strategy '" + std::string(name) + "'");
}

double failure_arp(std::span<const double> per_replica_failure) { return product(per_replica_failure, "ARP"); }

double failure_pe(std::span<const double> per_replica_failure) { return product(per_replica_failure, "PE"); }

double failure_mvp(double p, int num) {
    check_probability(p);
    if (num < 1 || num % 2 == 0) throw InvalidArgument("MVP needs an odd number of versions");
    std::vector<double> ps(static_cast<std::size_t>(num), p);
    return failure_mvp(ps);
}

double failure_mvp(std::span<const double> per_version_failure) {
    const std::size_t num = per_version_failure.size();
    if (num == 0 || num % 2 == 0) throw InvalidArgument("MVP needs an odd number of versions");
    // dist[k] = probability that exactly k of the versions seen so far failed
    std::vector<double> dist(num + 1, 0.0);
    dist[0] = 1.0;
    for (std::size_t v = 0; v < num; ++v) {
        const double p = per_version_failure[v];
        check_probability(p);
        for (std::size_t k = v + 1; k > 0; --k) dist[k] = dist[k] * (1.0 - p) + dist[k - 1] * p;
        dist[0] *= 1.0 - p;
    }
    double f = 0.0;
    for (std::size_t k = (num + 1) / 2; k <= num; ++k) f += dist[k];
    return std::min(f, 1.0);
}

void HAStrategy::validate() const {
    if (num < 1) throw InvalidArgument("strategy needs num >= 1");
    if (kind == StrategyKind::MVP && num % 2 == 0) throw InvalidArgument("MVP needs an odd number of versions");
    if (per_replica_failure.size() != static_cast<std::size_t>(num)) {
        throw InvalidArgument("strategy failure vector length must equal num");
    }
    for (double p : per_replica_failure) check_probability(p);
    if (exec_cost < 0.0 || response_time < 0.0) throw InvalidArgument("strategy cost and time must be non-negative");
}

double HAStrategy::failure_probability() const {
    switch (kind) {
        case StrategyKind::ARP: return failure_arp(per_replica_failure);
        case StrategyKind::MVP: return failure_mvp(per_replica_failure);
        case StrategyKind::PE: return failure_pe(per_replica_failure);
    }
    return 1.0;
}

SelectionResult select_strategy(int vm_id, double significance, std::span<const HAStrategy> pool, double budget,
                                double deadline, double sig_threshold) {
    if (pool.empty()) throw InvalidArgument("strategy pool is empty");
    if (!(budget > 0.0) || !(deadline > 0.0)) throw InvalidArgument("budget and deadline must be positive");

    SelectionResult result;
    result.vm_id = vm_id;
    if (significance < sig_threshold) {
        result.below_threshold = true;
        return result;
    }

    const HAStrategy* best = nullptr;
    double best_f = 0.0;
    auto key = [](const HAStrategy& s, double f) { return std::make_tuple(f, s.exec_cost, s.response_time, s.kind); };
    for (const auto& s : pool) {
        s.validate();
        if (s.exec_cost > budget || s.response_time > deadline) continue;
        result.feasible_set.push_back(s.kind);
        const double f = s.failure_probability();
        if (!best || key(s, f) < key(*best, best_f)) {
            best = &s;
            best_f = f;
        }
    }
    if (!best) {
        throw InfeasibleError("no HA strategy satisfies budget " + std::to_string(budget) + " and deadline " +
                              std::to_string(deadline) + " for VM " + std::to_string(vm_id));
    }
    result.chosen = best->kind;
    result.failure_probability = best_f;
    return result;
}

}  // namespace srehm
