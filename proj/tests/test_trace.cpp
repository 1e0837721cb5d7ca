#include <gtest/gtest.h>

#include <sstream>

#include "srehm/error.hpp"
#include "srehm/trace.hpp"

using namespace srehm;

TEST(ParseTrace, WellFormed) {
    std::istringstream in("slot,vm_id,cpu,mem\n0,0,0.25,0.5\n1,0,0.3,0.5\n");
    const auto r = parse_trace(in);
    EXPECT_EQ(r.trace.row_count(), 2u);
    EXPECT_EQ(r.clamped, 0u);
    EXPECT_DOUBLE_EQ(r.trace.of(0).values[1].cpu, 0.3);
}

TEST(ParseTrace, ColumnsInAnyOrder) {
    std::istringstream in("vm_id,mem,slot,cpu\n3,0.1,0,0.2\n");
    const auto r = parse_trace(in);
    EXPECT_DOUBLE_EQ(r.trace.of(3).values[0].cpu, 0.2);
    EXPECT_DOUBLE_EQ(r.trace.of(3).values[0].mem, 0.1);
}

TEST(ParseTrace, ClampsOutOfRange) {
    std::istringstream in("slot,vm_id,cpu,mem\n0,0,1.3,0.5\n");
    const auto r = parse_trace(in);
    EXPECT_EQ(r.clamped, 1u);
    EXPECT_EQ(r.trace.of(0).values[0].cpu, 1.0);
}

TEST(ParseTrace, NonNumericReportsLine) {
    std::istringstream in("slot,vm_id,cpu,mem\n0,0,0.1,0.1\n1,0,abc,0.1\n");
    try {
        parse_trace(in);
        FAIL() << "expected TraceError";
    } catch (const TraceError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(ParseTrace, SchemaErrors) {
    for (const char* bad : {"slot,vm_id,cpu\n0,0,0.1\n", "", "slot,vm_id,cpu,mem\n0,0,0.1\n",
                            "slot,vm_id,cpu,mem\n0,0,0.1,0.1\n2,0,0.1,0.1\n",  // gap
                            "slot,vm_id,cpu,mem\n-1,0,0.1,0.1\n"}) {
        std::istringstream in(bad);
        EXPECT_THROW(parse_trace(in), TraceError) << bad;
    }
}

TEST(Trace, WindowCoverage) {
    const auto t = synth_trace(1, 2, 10, TracePattern::Flat);
    EXPECT_EQ(t.window(1, 10).size(), 10u);
    EXPECT_THROW(t.window(1, 11), TraceError);
    EXPECT_THROW(t.window(5, 1), TraceError);
}

TEST(Trace, WriteLoadRoundTrip) {
    for (auto pattern : {TracePattern::Flat, TracePattern::Diurnal, TracePattern::Bursty}) {
        const auto t = synth_trace(9, 5, 300, pattern);
        std::stringstream buf;
        write_trace(buf, t);
        const auto back = parse_trace(buf);
        EXPECT_EQ(back.clamped, 0u);
        EXPECT_TRUE(back.trace == t) << to_string(pattern);
    }
}

TEST(SynthTrace, FlatEqualsBase) {
    SynthOptions opt;
    for (const auto& row : synth_trace(4, 3, 50, TracePattern::Flat, opt).rows()) {
        EXPECT_EQ(row.cpu, 0.4);
        EXPECT_EQ(row.mem, 0.4);
    }
    opt.base = 0.7;
    EXPECT_EQ(synth_trace(4, 1, 1, TracePattern::Flat, opt).rows()[0].cpu, 0.7);
}

TEST(SynthTrace, Deterministic) {
    for (auto pattern : {TracePattern::Diurnal, TracePattern::Bursty}) {
        EXPECT_TRUE(synth_trace(11, 4, 200, pattern) == synth_trace(11, 4, 200, pattern));
        EXPECT_FALSE(synth_trace(11, 4, 200, pattern) == synth_trace(12, 4, 200, pattern));
    }
}

TEST(SynthTrace, BurstySpikeCount) {
    // Binomial(1000, 0.1): 99% interval around 100 is roughly [76, 124].
    SynthOptions opt;
    opt.spike_probability = 0.1;
    int inside = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto t = synth_trace(seed, 1, 1000, TracePattern::Bursty, opt);
        int spikes = 0;
        for (const auto& v : t.of(0).values) spikes += v.cpu > 0.85 ? 1 : 0;
        if (spikes >= 76 && spikes <= 124) ++inside;
        if (seed == 0) {
            EXPECT_GE(spikes, 76);
            EXPECT_LE(spikes, 124);
        }
    }
    EXPECT_GE(inside, 9);
}

TEST(SynthTrace, DiurnalPeriod) {
    SynthOptions opt;
    opt.noise = 0.0;
    const auto t = synth_trace(2, 1, 600, TracePattern::Diurnal, opt);
    const auto& v = t.of(0).values;
    for (std::size_t s = 0; s + 288 < v.size(); ++s) EXPECT_NEAR(v[s].cpu, v[s + 288].cpu, 1e-9);
}

TEST(SynthTrace, PassesValidationAndRejectsEmpty) {
    const auto t = synth_trace(3, 7, 40, TracePattern::Bursty);
    EXPECT_NO_THROW(UsageTrace::from_rows(t.rows()));
    EXPECT_EQ(t.row_count(), 7u * 40u);
    EXPECT_THROW(synth_trace(3, 0, 10, TracePattern::Flat), InvalidArgument);
    EXPECT_THROW(synth_trace(3, 1, 0, TracePattern::Flat), InvalidArgument);
    EXPECT_EQ(parse_trace_pattern("bursty"), TracePattern::Bursty);
    EXPECT_THROW(parse_trace_pattern("spiky"), InvalidArgument);
}
