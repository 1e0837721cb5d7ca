#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "srehm/error.hpp"
#include "srehm/ranking.hpp"

using namespace srehm;

namespace {

Matrix counts(std::size_t n, std::initializer_list<std::tuple<int, int, double>> edges) {
    Matrix m(n);
    for (auto [a, b, c] : edges) m(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) = c;
    return m;
}

InvocationGraph random_graph(std::mt19937_64& rng, std::size_t max_n) {
    std::uniform_int_distribution<std::size_t> size(1, max_n);
    std::uniform_int_distribution<int> count(0, 6);
    const std::size_t n = size(rng);
    Matrix fq(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (a != b) fq(a, b) = count(rng);
    return build_wdg(fq, classify_critical(in_invocations(fq)));
}

}  // namespace

TEST(BuildWdg, CriticalSourceAndDanglingRow) {
    const auto g = build_wdg(counts(2, {{0, 1, 1}}), {true, false});
    EXPECT_EQ(g.weights(0, 0), 0.0);
    EXPECT_EQ(g.weights(0, 1), 1.0);
    EXPECT_EQ(g.weights(1, 0), 0.5);
    EXPECT_EQ(g.weights(1, 1), 0.5);
}

TEST(BuildWdg, NormalizesCriticalRow) {
    const auto g = build_wdg(counts(3, {{0, 1, 2}, {0, 2, 1}}), {true, false, false});
    EXPECT_EQ(g.weights(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(g.weights(0, 1), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(g.weights(0, 2), 1.0 / 3.0);
}

TEST(BuildWdg, SingleNode) {
    const auto g = build_wdg(Matrix(1), {true});
    EXPECT_EQ(g.weights(0, 0), 1.0);
    EXPECT_EQ(g.node_ids, std::vector<int>{0});
}

TEST(BuildWdg, RejectsBadInput) {
    EXPECT_THROW(build_wdg(counts(2, {{0, 1, -1}}), {true, true}), InvalidArgument);
    EXPECT_THROW(build_wdg(counts(2, {{0, 0, 1}}), {true, true}), InvalidArgument);
    EXPECT_THROW(build_wdg(Matrix(2), {true}), InvalidArgument);
    EXPECT_THROW(build_wdg(Matrix(0), {}), InvalidArgument);
}

TEST(BuildWdg, RowsAreStochasticAndMatchOracle) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const auto g = random_graph(rng, 7);
        const auto expect = oracle::edge_weights(g.fq.data, g.critical);
        for (std::size_t a = 0; a < g.n; ++a) {
            double sum = 0.0;
            for (std::size_t b = 0; b < g.n; ++b) {
                EXPECT_GE(g.weights(a, b), 0.0);
                EXPECT_NEAR(g.weights(a, b), expect[a * g.n + b], 1e-15);
                sum += g.weights(a, b);
            }
            EXPECT_NEAR(sum, 1.0, 1e-12);
        }
    }
}

TEST(Significance, SingleCriticalNode) {
    const auto g = build_wdg(Matrix(1), {true});
    for (double d : {0.0, 0.5, 0.85, 1.0}) {
        SignificanceOptions opt;
        opt.damping = d;
        opt.psi = 1.0;
        EXPECT_NEAR(significance(g, opt).values[0], 1.0, 1e-12);
    }
}

TEST(Significance, MutualPairIsSymmetric) {
    const auto g = build_wdg(counts(2, {{0, 1, 1}, {1, 0, 1}}), {true, true});
    SignificanceOptions opt;
    opt.psi = 1.0;
    const auto s = significance(g, opt);
    EXPECT_TRUE(s.converged);
    EXPECT_NEAR(s.values[0], 0.5, 1e-12);
    EXPECT_NEAR(s.values[1], 0.5, 1e-12);
}

TEST(Significance, ThreeNodeMatchesLinearSolve) {
    const auto g = build_wdg(counts(3, {{0, 1, 4}, {1, 2, 1}, {2, 0, 5}, {0, 2, 2}}), {true, false, true});
    SignificanceOptions opt;
    opt.tol = 1e-13;
    const auto s = significance(g, opt);
    const double psi = default_psi(g);
    EXPECT_DOUBLE_EQ(psi, 0.8);
    const auto expect = oracle::significance_direct(g.weights.data, g.critical, 0.85, psi);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(s.values[i], expect[i], 1e-10);
}

TEST(Significance, RandomGraphsMatchOracleAndSumToOne) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> damp(0.0, 0.95);
    for (int trial = 0; trial < 200; ++trial) {
        const auto g = random_graph(rng, 6);
        SignificanceOptions opt;
        opt.damping = damp(rng);
        opt.tol = 1e-12;
        const auto s = significance(g, opt);
        const auto expect = oracle::significance_direct(g.weights.data, g.critical, opt.damping, s.psi);
        double sum = 0.0;
        for (std::size_t i = 0; i < g.n; ++i) {
            EXPECT_NEAR(s.values[i], expect[i], 1e-8);
            EXPECT_GE(s.values[i], 0.0);
            sum += s.values[i];
        }
        EXPECT_NEAR(sum, 1.0, 1e-9);
    }
}

TEST(Significance, CriticalOutranksNonCriticalUnderSymmetry) {
    // Critical nodes invoke nobody and non-critical rows are uniform, so every row of the
    // weight matrix is 1/n and only the teleport vector separates the classes.
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<int> count(0, 6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng() % 6;
        std::vector<bool> crit(n);
        std::size_t n_crit = 0;
        for (std::size_t a = 0; a < n; ++a) {
            crit[a] = a == 0 || u(rng) < 0.4;
            n_crit += crit[a];
        }
        if (n_crit == n) crit[n - 1] = false, --n_crit;
        Matrix fq(n);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                if (a != b && !crit[a]) fq(a, b) = count(rng);
        const double floor = static_cast<double>(n_crit) / static_cast<double>(n);
        SignificanceOptions opt;
        opt.psi = floor + (1.0 - floor) * (0.01 + 0.99 * u(rng));
        const auto s = significance(build_wdg(fq, crit), opt);
        for (std::size_t c = 0; c < n; ++c) {
            if (!crit[c]) continue;
            for (std::size_t i = 0; i < n; ++i) {
                if (!crit[i]) {
                    EXPECT_GT(s.values[c], s.values[i]) << "trial " << trial;
                }
            }
        }
    }
}

TEST(Significance, TeleportHandlesEmptyClass) {
    const auto none = build_wdg(Matrix(3), {false, false, false});
    const auto t = teleport_vector(none, 1.0);
    for (double v : t) EXPECT_DOUBLE_EQ(v, 1.0 / 3.0);
    const auto all = build_wdg(Matrix(2), {true, true});
    EXPECT_DOUBLE_EQ(default_psi(all), 1.0);
}

TEST(Significance, RejectsBadParameters) {
    const auto g = build_wdg(counts(3, {{0, 1, 4}}), {true, false, false});
    SignificanceOptions opt;
    opt.psi = 0.2;  // below |C|/n = 1/3
    EXPECT_THROW(significance(g, opt), InvalidArgument);
    opt.psi = 1.1;
    EXPECT_THROW(significance(g, opt), InvalidArgument);
    opt.psi.reset();
    opt.damping = 1.5;
    EXPECT_THROW(significance(g, opt), InvalidArgument);
}

TEST(Significance, NonConvergenceCarriesLastIterate) {
    const auto g = build_wdg(counts(3, {{0, 1, 4}, {0, 2, 2}, {1, 2, 1}, {2, 0, 5}}), {true, false, true});
    SignificanceOptions opt;
    opt.damping = 0.99;
    opt.tol = 1e-15;
    opt.max_iter = 2;
    try {
        significance(g, opt);
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
        ASSERT_EQ(e.last_iterate().size(), 3u);
        EXPECT_NEAR(std::accumulate(e.last_iterate().begin(), e.last_iterate().end(), 0.0), 1.0, 1e-9);
    }
}

TEST(Rank, Examples) {
    SignificanceVector s;
    s.values = {0.2, 0.5, 0.3};
    s.node_ids = {0, 1, 2};
    EXPECT_EQ(rank(s), (std::vector<int>{1, 2, 0}));
    s.values = {0.25, 0.25, 0.25, 0.25};
    s.node_ids = {7, 3, 9, 1};
    EXPECT_EQ(rank(s), (std::vector<int>{1, 3, 7, 9}));
    s.values = {1.0};
    s.node_ids = {0};
    EXPECT_EQ(rank(s), std::vector<int>{0});
}

TEST(Rank, InvariantUnderPositiveScaling) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        SignificanceVector s;
        for (int i = 0; i < 8; ++i) {
            s.values.push_back(std::round(u(rng) * 4) / 4);  // forces ties
            s.node_ids.push_back(i);
        }
        SignificanceVector scaled = s;
        for (double& v : scaled.values) v *= 3.5;
        EXPECT_EQ(rank(s), rank(scaled));
    }
}

TEST(ClassifyCritical, Examples) {
    const std::vector<int> a{5, 3, 0};
    EXPECT_EQ(classify_critical(a, 3), (std::vector<bool>{true, false, false}));
    const std::vector<int> zeros{0, 0, 0};
    EXPECT_EQ(classify_critical(zeros), (std::vector<bool>{false, false, false}));
    const std::vector<int> four{4};
    EXPECT_EQ(classify_critical(four), std::vector<bool>{true});
}

TEST(InInvocations, ColumnSums) {
    const auto fq = counts(3, {{0, 1, 2}, {2, 1, 3}, {1, 0, 1}});
    EXPECT_EQ(in_invocations(fq), (std::vector<int>{1, 5, 0}));
}

TEST(GraphText, ParseWithHeader) {
    std::istringstream in("# demo\ncritical: 0,2\n0 1 3\n1 2 1\n\n2 0 4  # trailing\n");
    const auto g = parse_graph(in);
    EXPECT_EQ(g.n, 3u);
    EXPECT_EQ(g.critical, (std::vector<bool>{true, false, true}));
    EXPECT_EQ(g.fq(0, 1), 3.0);
    EXPECT_EQ(g.fq(2, 0), 4.0);
}

TEST(GraphText, DerivesCriticality) {
    std::istringstream in("0 1 4\n2 1 1\n1 0 2\n");
    const auto g = parse_graph(in);
    EXPECT_EQ(g.critical, (std::vector<bool>{false, true, false}));
}

TEST(GraphText, RoundTrip) {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 20; ++i) {
        const auto g = random_graph(rng, 6);
        std::stringstream buf;
        write_graph(buf, g);
        const bool blank = std::none_of(g.critical.begin(), g.critical.end(), [](bool c) { return c; }) &&
                           std::all_of(g.fq.data.begin(), g.fq.data.end(), [](double c) { return c == 0.0; });
        if (blank) {
            EXPECT_THROW(parse_graph(buf), InvalidArgument);
            continue;
        }
        const auto back = parse_graph(buf);
        // trailing isolated nodes are not representable in the edge list
        ASSERT_LE(back.n, g.n);
        for (std::size_t a = 0; a < back.n; ++a) {
            EXPECT_EQ(back.critical[a], g.critical[a]);
            for (std::size_t b = 0; b < back.n; ++b) EXPECT_EQ(back.fq(a, b), g.fq(a, b));
        }
    }
}

TEST(GraphText, Rejects) {
    for (const char* bad : {"", "# nothing\n", "0 1\n", "0 x 2\n", "0 1 -2\n", "1 1 1\n", "critical: a\n0 1 1\n"}) {
        std::istringstream in(bad);
        EXPECT_THROW(parse_graph(in), InvalidArgument) << bad;
    }
}
