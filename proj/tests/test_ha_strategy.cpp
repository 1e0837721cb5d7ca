#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "srehm/error.hpp"
#include "srehm/ha_strategy.hpp"

using namespace srehm;

namespace {

HAStrategy make(StrategyKind k, double cost, double time, double p, int num = 3) {
    return {k, num, std::vector<double>(static_cast<std::size_t>(num), p), cost, time};
}

}  // namespace

TEST(FailureArp, Examples) {
    const std::vector<double> three{0.1, 0.1, 0.1};
    EXPECT_NEAR(failure_arp(three), 0.001, 1e-15);
    const std::vector<double> one{0.37};
    EXPECT_DOUBLE_EQ(failure_arp(one), 0.37);
    const std::vector<double> zero{0.4, 0.0, 0.9};
    EXPECT_EQ(failure_arp(zero), 0.0);
    EXPECT_THROW(failure_arp(std::vector<double>{}), InvalidArgument);
    EXPECT_THROW(failure_arp(std::vector<double>{1.2}), InvalidArgument);
}

TEST(FailureMvp, Examples) {
    EXPECT_NEAR(failure_mvp(0.1, 3), 0.028, 1e-15);
    EXPECT_DOUBLE_EQ(failure_mvp(0.42, 1), 0.42);
    EXPECT_EQ(failure_mvp(0.0, 5), 0.0);
    EXPECT_THROW(failure_mvp(0.1, 4), InvalidArgument);
    EXPECT_THROW(failure_mvp(0.1, 0), InvalidArgument);
    EXPECT_THROW(failure_mvp(-0.1, 3), InvalidArgument);
}

TEST(FailurePe, Examples) {
    const std::vector<double> two{0.2, 0.3};
    EXPECT_NEAR(failure_pe(two), 0.06, 1e-15);
    const std::vector<double> one{0.8};
    EXPECT_DOUBLE_EQ(failure_pe(one), 0.8);
    const std::vector<double> certain{1.0, 1.0, 1.0};
    EXPECT_EQ(failure_pe(certain), 1.0);
    EXPECT_THROW(failure_pe(std::vector<double>{}), InvalidArgument);
}

TEST(FailureProbabilities, MatchEnumerationOnGrid) {
    for (int num : {1, 3, 5, 7}) {
        for (int k = 0; k <= 10; ++k) {
            const double p = k / 10.0;
            const std::vector<double> v(static_cast<std::size_t>(num), p);
            EXPECT_NEAR(failure_arp(v), oracle::all_fail(v), 1e-12);
            EXPECT_NEAR(failure_pe(v), oracle::all_fail(v), 1e-12);
            EXPECT_NEAR(failure_mvp(p, num), oracle::majority_fail(v), 1e-12);
            EXPECT_NEAR(failure_mvp(v), oracle::majority_fail(v), 1e-12);
        }
    }
}

TEST(FailureProbabilities, HeterogeneousMatchEnumeration) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int num = 1 + 2 * static_cast<int>(rng() % 4);
        std::vector<double> v(static_cast<std::size_t>(num));
        for (double& x : v) x = u(rng);
        EXPECT_NEAR(failure_arp(v), oracle::all_fail(v), 1e-12);
        EXPECT_NEAR(failure_pe(v), oracle::all_fail(v), 1e-12);
        EXPECT_NEAR(failure_mvp(v), oracle::majority_fail(v), 1e-12);
    }
}

TEST(FailureProbabilities, ArpEqualsPeAndMonotone) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> v(1 + rng() % 5);
        for (double& x : v) x = u(rng);
        EXPECT_EQ(failure_arp(v), failure_pe(v));
        const std::size_t i = rng() % v.size();
        auto raised = v;
        raised[i] = std::min(1.0, v[i] + u(rng) * (1.0 - v[i]));
        EXPECT_GE(failure_arp(raised), failure_arp(v));
        if (v.size() % 2 == 1) {
            EXPECT_GE(failure_mvp(raised) + 1e-15, failure_mvp(v));
        }
    }
    for (int num : {1, 3, 5, 7}) {
        double prev = -1.0;
        for (int k = 0; k <= 20; ++k) {
            const double f = failure_mvp(k / 20.0, num);
            EXPECT_GE(f, prev);
            prev = f;
        }
    }
}

TEST(HAStrategy, Validate) {
    EXPECT_THROW(make(StrategyKind::MVP, 1, 1, 0.1, 2).validate(), InvalidArgument);
    HAStrategy bad = make(StrategyKind::ARP, 1, 1, 0.1);
    bad.per_replica_failure.pop_back();
    EXPECT_THROW(bad.validate(), InvalidArgument);
    EXPECT_NO_THROW(make(StrategyKind::PE, 1, 1, 0.1, 2).validate());
    EXPECT_NEAR(make(StrategyKind::MVP, 1, 1, 0.1).failure_probability(), 0.028, 1e-15);
    EXPECT_EQ(make(StrategyKind::ARP, 1, 1, 0.1).extra_images(), 2);
}

TEST(StrategyKind, Names) {
    EXPECT_EQ(parse_strategy_kind("mvp"), StrategyKind::MVP);
    EXPECT_EQ(to_string(StrategyKind::PE), "PE");
    EXPECT_THROW(parse_strategy_kind("raid"), InvalidArgument);
}

class SelectStrategy : public ::testing::Test {
protected:
    // F: ARP 0.001, MVP 0.028, PE 0.001
    std::vector<HAStrategy> pool{make(StrategyKind::ARP, 3, 5, 0.1), make(StrategyKind::MVP, 5, 4, 0.1),
                                 make(StrategyKind::PE, 6, 2, 0.1)};
};

TEST_F(SelectStrategy, TieOnFailureGoesToCheaper) {
    const auto r = select_strategy(4, 0.5, pool, 6, 5, 0.1);
    ASSERT_TRUE(r.chosen);
    EXPECT_EQ(*r.chosen, StrategyKind::ARP);
    EXPECT_NEAR(r.failure_probability, 0.001, 1e-15);
    EXPECT_EQ(r.feasible_set.size(), 3u);
    EXPECT_EQ(r.vm_id, 4);
}

TEST_F(SelectStrategy, DeadlineLeavesOnlyPe) {
    const auto r = select_strategy(4, 0.5, pool, 6, 3, 0.1);
    ASSERT_TRUE(r.chosen);
    EXPECT_EQ(*r.chosen, StrategyKind::PE);
    EXPECT_EQ(r.feasible_set, std::vector<StrategyKind>{StrategyKind::PE});
}

TEST_F(SelectStrategy, BelowThresholdIsUnprotected) {
    const auto r = select_strategy(4, 0.0, pool, 6, 5, 0.1);
    EXPECT_FALSE(r.chosen);
    EXPECT_TRUE(r.below_threshold);
    EXPECT_EQ(r.failure_probability, 1.0);
}

TEST_F(SelectStrategy, NothingFeasibleThrows) {
    EXPECT_THROW(select_strategy(4, 0.5, pool, 2, 5, 0.1), InfeasibleError);
    EXPECT_THROW(select_strategy(4, 0.5, pool, 0, 5, 0.1), InvalidArgument);
    EXPECT_THROW(select_strategy(4, 0.5, std::vector<HAStrategy>{}, 6, 5, 0.1), InvalidArgument);
}

TEST_F(SelectStrategy, TimeBreaksCostTies) {
    std::vector<HAStrategy> p{make(StrategyKind::ARP, 3, 5, 0.1), make(StrategyKind::PE, 3, 2, 0.1)};
    EXPECT_EQ(*select_strategy(0, 1, p, 10, 10, 0).chosen, StrategyKind::PE);
    p[1].response_time = 5;
    EXPECT_EQ(*select_strategy(0, 1, p, 10, 10, 0).chosen, StrategyKind::ARP);
}

TEST_F(SelectStrategy, ChoiceMatchesExhaustiveSearchAndIgnoresDominated) {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const StrategyKind kinds[] = {StrategyKind::ARP, StrategyKind::MVP, StrategyKind::PE};
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<HAStrategy> p;
        for (int i = 0; i < 3; ++i) {
            p.push_back(make(kinds[i], std::round(u(rng) * 8), std::round(u(rng) * 8), std::round(u(rng) * 5) / 10));
        }
        const double budget = 1 + std::round(u(rng) * 8), deadline = 1 + std::round(u(rng) * 8);
        int best = -1;
        for (int i = 0; i < 3; ++i) {
            const auto& s = p[static_cast<std::size_t>(i)];
            if (s.exec_cost > budget || s.response_time > deadline) continue;
            if (best < 0) { best = i; continue; }
            const auto& b = p[static_cast<std::size_t>(best)];
            const auto key = [](const HAStrategy& x) {
                return std::tuple(x.failure_probability(), x.exec_cost, x.response_time);
            };
            if (key(s) < key(b)) best = i;
        }
        if (best < 0) {
            EXPECT_THROW(select_strategy(0, 1, p, budget, deadline, 0), InfeasibleError);
            continue;
        }
        const auto r = select_strategy(0, 1, p, budget, deadline, 0);
        EXPECT_EQ(*r.chosen, kinds[best]);

        // A strategy that is worse on every axis never changes the choice.
        auto extended = p;
        HAStrategy worse = p[static_cast<std::size_t>(best)];
        worse.kind = StrategyKind::MVP;
        worse.per_replica_failure.assign(3, std::min(1.0, worse.per_replica_failure[0] + 0.3));
        worse.exec_cost += 1;
        worse.response_time += 1;
        if (worse.failure_probability() > p[static_cast<std::size_t>(best)].failure_probability()) {
            extended.push_back(worse);
            EXPECT_EQ(*select_strategy(0, 1, extended, budget, deadline, 0).chosen, kinds[best]);
        }
    }
}
