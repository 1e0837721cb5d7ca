#include <gtest/gtest.h>

#include <random>

#include "srehm/error.hpp"
#include "srehm/migration.hpp"

using namespace srehm;

namespace {

PmProfile box(double cpu, double mem) { return {"box", 1, cpu, mem, 200.0, 100.0, 100.0}; }

PmId add_pm(Datacenter& dc, const PmProfile& p, PmState state = PmState::Active, int cluster = 0) {
    const auto id = static_cast<PmId>(dc.pms.size());
    dc.pms.push_back(PhysicalMachine::from_profile(id, cluster, p, state));
    return id;
}

VmId add_vm(Datacenter& dc, double cpu, double mem) {
    const auto id = static_cast<VmId>(dc.vms.size());
    dc.vms.push_back(VirtualMachine::from_profile(id, {"v", VmType::Small, 1, cpu, mem}));
    return id;
}

// Predicted usage equal to the full demand of every VM.
VmLoadForecast full_load(const Datacenter& dc) {
    VmLoadForecast load;
    for (const auto& vm : dc.vms) load.push_back(vm.demand);
    return load;
}

}  // namespace

TEST(DetectOverloads, Filters) {
    Datacenter dc;
    for (int i = 0; i < 3; ++i) add_pm(dc, box(1000, 10));
    dc.place(add_vm(dc, 100, 1), 0);
    dc.place(add_vm(dc, 100, 1), 1);
    std::vector<FailureEstimate> est(3);
    for (int i = 0; i < 3; ++i) est[static_cast<std::size_t>(i)].pm_id = 2 - i;  // unordered input
    EXPECT_TRUE(detect_overloads(est, dc).empty());

    est[1].eta_star = true;
    EXPECT_EQ(detect_overloads(est, dc), std::vector<PmId>{1});
    EXPECT_TRUE(dc.vm(1).status);
    EXPECT_FALSE(dc.vm(0).status);

    est[0].eta_star = true;  // pm 2
    est[1].eta_star = false;
    est[2].eta_star = true;  // pm 0
    EXPECT_EQ(detect_overloads(est, dc), (std::vector<PmId>{0, 2}));
    EXPECT_TRUE(dc.vm(0).status);
    EXPECT_FALSE(dc.vm(1).status);
}

TEST(SelectMigrationVm, LargestWeightLowestId) {
    Datacenter dc;
    add_pm(dc, box(10000, 100));
    dc.place(add_vm(dc, 6, 1), 0);   // W = 6
    dc.place(add_vm(dc, 6, 2), 0);   // W = 12
    dc.place(add_vm(dc, 3, 1), 0);   // W = 3
    EXPECT_EQ(select_migration_vm(dc.pm(0), dc.placement), 1);
    dc.place(add_vm(dc, 4, 3), 0);   // W = 12, higher id
    EXPECT_EQ(select_migration_vm(dc.pm(0), dc.placement), 1);

    Datacenter single;
    add_pm(single, box(100, 10));
    add_pm(single, box(100, 10));
    single.place(add_vm(single, 1, 1), 1);
    EXPECT_EQ(select_migration_vm(single.pm(1), single.placement), 0);
    EXPECT_THROW(select_migration_vm(single.pm(0), single.placement), InvalidArgument);
}

TEST(SelectTargetPm, BestFit) {
    Datacenter dc;
    add_pm(dc, box(1000, 10));
    add_pm(dc, box(1000, 10));
    dc.place(add_vm(dc, 200, 1), 0);
    dc.place(add_vm(dc, 400, 1), 1);
    const VmId v = add_vm(dc, 500, 1);
    // residual CPU after placing: pm0 0.3, pm1 0.1
    const auto choice = select_target_pm(dc.vm(v), dc.pms, dc.placement);
    EXPECT_EQ(choice.pm, 1);
    EXPECT_FALSE(choice.woke);
}

TEST(SelectTargetPm, WakesInactiveWhenNoActiveFits) {
    Datacenter dc;
    add_pm(dc, box(1000, 10));
    add_pm(dc, box(1000, 10), PmState::Failed);
    add_pm(dc, box(100, 10), PmState::Inactive);
    add_pm(dc, box(1000, 10), PmState::Inactive);
    dc.place(add_vm(dc, 900, 1), 0);
    const VmId v = add_vm(dc, 500, 1);
    const auto choice = select_target_pm(dc.vm(v), dc.pms, dc.placement);
    EXPECT_EQ(choice.pm, 3);
    EXPECT_TRUE(choice.woke);

    TargetFilter no_wake;
    no_wake.allow_wake = false;
    EXPECT_THROW(select_target_pm(dc.vm(v), dc.pms, dc.placement, no_wake), InfeasibleError);
}

TEST(SelectTargetPm, NothingFits) {
    Datacenter dc;
    add_pm(dc, box(1000, 10));
    add_pm(dc, box(1000, 10), PmState::Inactive);
    const VmId v = add_vm(dc, 5000, 1);
    EXPECT_THROW(select_target_pm(dc.vm(v), dc.pms, dc.placement), InfeasibleError);
}

TEST(SelectTargetPm, NeverCurrentHostOrExcluded) {
    Datacenter dc;
    add_pm(dc, box(1000, 10));
    add_pm(dc, box(1000, 10));
    add_pm(dc, box(1000, 10));
    const VmId v = add_vm(dc, 100, 1);
    dc.place(v, 0);
    TargetFilter f;
    f.excluded = {1};
    EXPECT_EQ(select_target_pm(dc.vm(v), dc.pms, dc.placement, f).pm, 2);
}

TEST(MigrationCost, Examples) {
    MigrationPlan plan;
    plan.hops = 2;
    plan.vm_weight = 3;
    EXPECT_DOUBLE_EQ(migration_cost(plan, 1.0, 100.0), 6.0);
    plan.woke_dest = true;
    EXPECT_DOUBLE_EQ(migration_cost(plan, 1.0, 100.0), 106.0);
    plan = {};
    plan.hops = 1;
    plan.vm_weight = 0;
    EXPECT_EQ(migration_cost(plan, 1.0, 100.0), 0.0);
}

TEST(HopDistance, SameAndCrossCluster) {
    Datacenter dc;
    add_pm(dc, box(10, 1), PmState::Active, 0);
    add_pm(dc, box(10, 1), PmState::Active, 0);
    add_pm(dc, box(10, 1), PmState::Active, 1);
    EXPECT_EQ(hop_distance(dc.pm(0), dc.pm(1)), 1);
    EXPECT_EQ(hop_distance(dc.pm(0), dc.pm(2)), 2);
}

TEST(MitigateOverloads, ClearsPredictedOverload) {
    Datacenter dc;
    add_pm(dc, box(1000, 10));
    add_pm(dc, box(1000, 10), PmState::Active, 1);
    add_pm(dc, box(1000, 10), PmState::Inactive);
    for (int i = 0; i < 3; ++i) dc.place(add_vm(dc, 300, 1), 0);  // 0.9 cpu predicted
    const auto load = full_load(dc);
    const auto out = mitigate_overloads(dc, load, {});
    ASSERT_EQ(out.overloads.size(), 1u);
    EXPECT_TRUE(out.overloads[0].resolved);
    ASSERT_EQ(out.plans.size(), 1u);
    EXPECT_EQ(out.plans[0].vm_id, 0);
    EXPECT_EQ(out.plans[0].dest_pm, 1);
    EXPECT_EQ(out.plans[0].hops, 2);
    EXPECT_DOUBLE_EQ(out.plans[0].energy, 2 * 300.0);
    EXPECT_LE(predicted_utilization(dc.pm(0), dc.placement, load).cpu, 0.85);
    EXPECT_EQ(dc.placement.host_of(0), 1);
}

TEST(MitigateOverloads, RecordsUnresolvable) {
    Datacenter dc;
    add_pm(dc, box(1000, 10));
    add_pm(dc, box(1000, 10));
    dc.place(add_vm(dc, 950, 1), 0);
    dc.place(add_vm(dc, 900, 1), 1);
    const auto out = mitigate_overloads(dc, full_load(dc), {});
    EXPECT_TRUE(out.plans.empty());
    ASSERT_EQ(out.overloads.size(), 2u);
    EXPECT_FALSE(out.overloads[0].resolved);
}

TEST(MitigateOverloads, RespectsConflicts) {
    Datacenter dc;
    add_pm(dc, box(1000, 10));
    add_pm(dc, box(1000, 10));
    add_pm(dc, box(1000, 10), PmState::Inactive);
    for (int i = 0; i < 3; ++i) dc.place(add_vm(dc, 300, 1), 0);
    const auto out = mitigate_overloads(dc, full_load(dc), {}, [](VmId, PmId pm) { return pm == 1; });
    ASSERT_EQ(out.plans.size(), 1u);
    EXPECT_EQ(out.plans[0].dest_pm, 2);
    EXPECT_TRUE(out.plans[0].woke_dest);
    EXPECT_TRUE(dc.pm(2).active());
    EXPECT_DOUBLE_EQ(out.plans[0].energy, 300.0 + kDefaultTransitionEnergy);
}

TEST(MitigateOverloads, RandomFleetsKeepInvariants) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Datacenter dc;
        for (int i = 0; i < 6; ++i) add_pm(dc, box(1000, 8), i < 4 ? PmState::Active : PmState::Inactive, i % 2);
        for (int i = 0; i < 16; ++i) {
            const VmId v = add_vm(dc, 100 + 150 * u(rng), 0.5 + u(rng));
            for (PmId p = 0; p < 4; ++p) {
                if (check_placement(dc.vm(v), dc.pm(p), dc.placement)) {
                    dc.place(v, p);
                    break;
                }
            }
        }
        VmLoadForecast load;
        for (const auto& vm : dc.vms) load.push_back({vm.demand.cpu * u(rng), vm.demand.mem * u(rng)});
        const MigrationConfig cfg;
        const auto out = mitigate_overloads(dc, load, cfg);
        for (const auto& pm : dc.pms) {
            if (!pm.active()) continue;
            EXPECT_LE(pm_utilization(pm, dc.placement, Resource::Cpu), 1.0 + 1e-12);
            EXPECT_LE(pm_utilization(pm, dc.placement, Resource::Mem), 1.0 + 1e-12);
        }
        for (const auto& rec : out.overloads) {
            if (rec.resolved) {
                EXPECT_FALSE(estimate_failure(rec.predicted_after.cpu, rec.predicted_after.mem));
            }
        }
        for (const auto& plan : out.plans) {
            const double hand = cfg.c_mig * plan.hops * plan.vm_weight + (plan.woke_dest ? kDefaultTransitionEnergy : 0.0);
            EXPECT_NEAR(plan.energy, hand, 1e-9);
            // destinations never become overloaded by the move
            EXPECT_FALSE(estimate_failure(std::min(1.0, predicted_utilization(dc.pm(plan.dest_pm), dc.placement, load).cpu),
                                          std::min(1.0, predicted_utilization(dc.pm(plan.dest_pm), dc.placement, load).mem)));
        }
    }
}

TEST(ConsolidateUnderloaded, DrainsAndDeactivates) {
    Datacenter dc;
    add_pm(dc, box(1000, 10));
    add_pm(dc, box(1000, 10));
    add_pm(dc, box(1000, 10));  // empty, will be deactivated
    dc.place(add_vm(dc, 50, 0.5), 0);
    dc.place(add_vm(dc, 400, 4), 1);
    const auto plans = consolidate_underloaded(dc, full_load(dc), {});
    ASSERT_EQ(plans.size(), 1u);
    EXPECT_EQ(plans[0].dest_pm, 1);
    EXPECT_FALSE(dc.pm(0).active());
    EXPECT_TRUE(dc.pm(1).active());
    EXPECT_FALSE(dc.pm(2).active());
}

TEST(ConsolidateUnderloaded, LeavesPmWhenNotFullyDrainable) {
    Datacenter dc;
    add_pm(dc, box(1000, 10));
    add_pm(dc, box(1000, 10));
    dc.place(add_vm(dc, 50, 0.5), 0);
    dc.place(add_vm(dc, 840, 1), 1);
    const auto plans = consolidate_underloaded(dc, full_load(dc), {});
    EXPECT_TRUE(plans.empty());
    EXPECT_TRUE(dc.pm(0).active());
    EXPECT_EQ(dc.placement.host_of(0), 0);
}
