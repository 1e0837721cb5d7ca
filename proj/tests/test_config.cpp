#include <gtest/gtest.h>

#include "srehm/config.hpp"
#include "srehm/error.hpp"

using namespace srehm;

TEST(Config, DeskDefault) {
    const auto c = SimConfig::desk_default();
    EXPECT_EQ(c.n_pms(), 20u);
    EXPECT_EQ(c.n_vms(), 100u);
    EXPECT_EQ(c.users.count, 10);
    EXPECT_EQ(c.n_slots(), 100u);
    EXPECT_EQ(c.slot_minutes, 5.0);
    EXPECT_EQ(c.migration.threshold, 0.85);
    EXPECT_EQ(c.ranking.critical_threshold, 3);
    EXPECT_EQ(c.observation_minutes, 100.0);
    EXPECT_NO_THROW(c.validate());
}

TEST(Config, EmptyObjectIsDeskDefault) {
    const auto c = parse_config_string("{}");
    EXPECT_EQ(config_to_json(c), config_to_json(SimConfig::desk_default()));
}

TEST(Config, ParsesFields) {
    const auto c = parse_config_string(R"({
        "seed": 7, "horizon_minutes": 100, "mode": "protect_all_pe",
        "pms": [{"profile": "S3", "count": 2}, {"profile": "big", "count": 1}],
        "pm_profiles": {"big": {"pe": 8, "mips": 1000, "ram_gb": 32, "power_max": 300, "power_min": 100, "power_idle": 100}},
        "vms": [{"profile": "v_large", "count": 5}],
        "failures": {"v_fp": 30, "q": 0.1},
        "ranking": {"psi": 0.9},
        "strategies": [{"kind": "PE", "num": 2, "cost_per_image": 0.5}],
        "synthetic": {"pattern": "diurnal", "base": 0.5}
    })");
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.n_slots(), 20u);
    EXPECT_EQ(c.mode, HaMode::ProtectAllPe);
    EXPECT_EQ(c.n_pms(), 3u);
    EXPECT_EQ(c.pm_profile("big").ram_gb, 32.0);
    EXPECT_EQ(c.n_vms(), 5u);
    EXPECT_EQ(c.failures.v_fp, 30.0);
    EXPECT_EQ(c.failures.q, 0.1);
    EXPECT_EQ(*c.ranking.psi, 0.9);
    ASSERT_EQ(c.strategies.size(), 1u);
    EXPECT_EQ(c.strategies[0].kind, StrategyKind::PE);
    EXPECT_EQ(c.synthetic_pattern, TracePattern::Diurnal);
    EXPECT_EQ(c.synthetic.base, 0.5);
}

TEST(Config, JsonRoundTrip) {
    auto c = SimConfig::desk_default();
    c.seed = 99;
    c.mode = HaMode::Disabled;
    c.failures.v_fp = 80;
    c.ranking.sig_threshold = 0.05;
    c.vm_profiles["tiny"] = {"tiny", VmType::Small, 1, 100, 0.25};
    c.vm_fleet.push_back({"tiny", 3});
    const std::string text = config_to_json(c);
    const auto back = parse_config_string(text);
    EXPECT_EQ(config_to_json(back), text);
    EXPECT_EQ(back.n_vms(), 103u);
    EXPECT_EQ(*back.ranking.sig_threshold, 0.05);
}

TEST(Config, Rejects) {
    for (const char* bad : {
             "not json",
             "[]",
             R"({"sed": 1})",
             R"({"failures": {"vfp": 1}})",
             R"({"slot_minutes": "five"})",
             R"({"horizon_minutes": 12})",
             R"({"failures": {"v_fp": 120}})",
             R"({"failures": {"q": -0.1}})",
             R"({"pms": [{"profile": "S7", "count": 1}]})",
             R"({"vms": []})",
             R"({"mode": "turbo"})",
             R"({"strategies": [{"kind": "MVP", "num": 2}]})",
             R"({"ranking": {"damping": 2}})",
             R"({"migration": {"threshold": 0}})",
             R"({"seed": -1})",
         }) {
        EXPECT_THROW(parse_config_string(bad), ConfigError) << bad;
    }
}

TEST(Config, MissingFile) { EXPECT_THROW(load_config("/nonexistent/cfg.json"), ConfigError); }
