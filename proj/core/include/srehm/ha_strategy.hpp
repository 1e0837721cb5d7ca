#ifndef SREHM_HA_STRATEGY_HPP
#define SREHM_HA_STRATEGY_HPP

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace srehm {

/// Declaration order is the final tie-break of strategy selection.
enum class StrategyKind { ARP, MVP, PE };

std::string_view to_string(StrategyKind k);
/// Accepts "ARP", "MVP", "PE" (case-insensitive). Throws InvalidArgument otherwise.
StrategyKind parse_strategy_kind(std::string_view name);

/// Automatic recovery block: fails only if every standby image fails.
double failure_arp(std::span<const double> per_replica_failure);

/// Multi-version programming with majority voting over `num` i.i.d. versions:
/// probability that at least (num+1)/2 versions fail. `num` must be odd.
double failure_mvp(double p, int num);

/// Majority-failure probability for independent versions with individual failure
/// probabilities (Poisson-binomial). Reduces to failure_mvp(p, num) for equal entries.
double failure_mvp(std::span<const double> per_version_failure);

/// Parallel execution: fails only if every concurrent execution fails.
double failure_pe(std::span<const double> per_replica_failure);

struct HAStrategy {
    StrategyKind kind = StrategyKind::ARP;
    int num = 3;
    std::vector<double> per_replica_failure;  // one entry per replica/version
    double exec_cost = 0.0;
    double response_time = 0.0;  // minutes

    /// Throws InvalidArgument when a probability is outside [0,1], num < 1, the vector
    /// length differs from num, or MVP is given an even num.
    void validate() const;
    double failure_probability() const;
    /// Extra VM images beyond the primary that the strategy keeps placed.
    int extra_images() const { return num - 1; }
};

struct SelectionResult {
    int vm_id = 0;
    std::optional<StrategyKind> chosen;
    double failure_probability = 1.0;  // of the chosen strategy; 1 when unprotected
    std::vector<StrategyKind> feasible_set;
    bool below_threshold = false;
};

/// Chooses the minimal-failure strategy among those meeting the budget and the deadline.
/// VMs whose significance is below `sig_threshold` are left unprotected. Ties on failure
/// probability go to lower cost, then lower response time, then ARP < MVP < PE.
/// Throws InvalidArgument for an empty pool or non-positive budget/deadline, and
/// InfeasibleError when a significant VM has no feasible strategy.
SelectionResult select_strategy(int vm_id, double significance, std::span<const HAStrategy> pool, double budget,
                                double deadline, double sig_threshold);

}  // namespace srehm

#endif  // SREHM_HA_STRATEGY_HPP
