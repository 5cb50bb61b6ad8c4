#include <gtest/gtest.h>

#include <random>

#include "beetle/baselines/baselines.hpp"
#include "helpers.hpp"

using namespace beetle;
using namespace beetle::baselines;

namespace {

EnvironmentDataset random_env(const std::string& id, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(10, 100);
    std::vector<double> w(5);
    for (auto& x : w) x = u(rng) - 55;
    return test::binary_env(id, 5, [&](const std::vector<double>& r) {
        double v = 200;
        for (std::size_t j = 0; j < 5; ++j) v += w[j] * r[j] + 0.3 * w[j] * r[j] * r[(j + 1) % 5];
        return v;
    });
}

}  // namespace

TEST(Valov, IdentityTransferFindsOptimum) {
    const auto s = random_env("s", 1);
    const auto t = s.transformed([](double v) { return v; }, "t");
    ValovParams p;
    p.training_coefficient = 5;
    const auto out = valov_transfer(s, t, p);
    EXPECT_NEAR(out.map.slope, 1.0, 1e-9);
    EXPECT_NEAR(out.map.intercept, 0.0, 1e-6);
    // Sobol training rows plus any transfer rows not already among them.
    EXPECT_GE(out.outcome.source_measurements, 10u);
    EXPECT_LE(out.outcome.source_measurements, 35u);
    EXPECT_EQ(out.outcome.target_measurements, 10u);
}

TEST(Valov, RecoversAffineMap) {
    const auto s = random_env("s", 2);
    const auto t = s.transformed([](double v) { return 2 * v + 3; }, "t");
    const auto out = valov_transfer(s, t, ValovParams{});
    EXPECT_NEAR(out.map.slope, 2.0, 1e-9);
    EXPECT_NEAR(out.map.intercept, 3.0, 1e-6);
}

TEST(Valov, InvariantToTargetAffineMaps) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto s = random_env("s", seed);
        const auto t = random_env("t", seed + 50);
        const auto t2 = t.transformed([](double v) { return 4 * v - 7; }, "t2");
        ValovParams p;
        p.seed = seed;
        EXPECT_EQ(valov_transfer(s, t, p).outcome.target_row, valov_transfer(s, t2, p).outcome.target_row);
    }
}

TEST(Valov, Errors) {
    const auto s = random_env("s", 1);
    const auto small = test::make_env("t", {{0, 0, 0, 0, 0}, {1, 1, 1, 1, 1}}, {1, 2});
    EXPECT_EQ(test::error_kind([&] { valov_transfer(s, small, ValovParams{}); }), ErrorKind::pairing);
    ValovParams bad;
    bad.training_coefficient = 2;
    EXPECT_EQ(test::error_kind([&] { valov_transfer(s, s, bad); }), ErrorKind::config);
    const auto other = test::binary_env("o", 4, [](auto& r) { return r[0]; });
    EXPECT_EQ(test::error_kind([&] { valov_transfer(s, other, ValovParams{}); }), ErrorKind::schema);
}

TEST(GPTransfer, SameSourceIsFullyCorrelated) {
    const auto s = random_env("s", 3);
    const auto t = s.transformed([](double v) { return v; }, "t");
    GPTransferParams p;
    p.source_budget = 32;
    const auto out = gp_transfer(s, t, p);
    EXPECT_NEAR(out.correlation, 1.0, 1e-12);
    EXPECT_FALSE(out.correlation_fallback);
    EXPECT_DOUBLE_EQ(out.outcome.nar, 0.0);
    EXPECT_EQ(out.outcome.source_measurements, 32u);
    EXPECT_EQ(out.outcome.target_measurements, 10u);
}

TEST(GPTransfer, NegatedSourceInvertsThePick) {
    const auto s = random_env("s", 4);
    const auto t = s.transformed([](double v) { return -v; }, "t");
    GPTransferParams p;
    p.source_budget = 32;
    const auto out = gp_transfer(s, t, p);
    EXPECT_NEAR(out.correlation, -1.0, 1e-12);
    EXPECT_DOUBLE_EQ(out.outcome.nar, 0.0);
}

TEST(GPTransfer, FlatPairsFallBackToFullCorrelation) {
    const auto s = random_env("s", 5);
    const auto t = test::binary_env("t", 5, [](auto& r) { return r[0] == 1 && r[1] == 1 && r[2] == 1 ? 1.0 : 5.0; });
    GPTransferParams p;
    p.source_budget = 4;
    p.target_budget = 4;
    bool seen = false;
    for (std::uint64_t seed = 0; seed < 20 && !seen; ++seed) {
        p.seed = seed;
        const auto out = gp_transfer(s, t, p);
        if (out.correlation_fallback) {
            seen = true;
            EXPECT_EQ(out.correlation, 1.0);
        }
    }
    EXPECT_TRUE(seen);
}

TEST(GPTransfer, UnitCorrelationMatchesPlainGP) {
    const auto s = random_env("s", 6);
    const auto t = s.transformed([](double v) { return 3 * v + 1; }, "t");
    GPTransferParams p;
    p.source_budget = 20;
    const auto out = gp_transfer(s, t, p);
    ASSERT_NEAR(out.correlation, 1.0, 1e-12);
    const auto& gp = out.model;
    for (const auto& c : t.configurations()) {
        EXPECT_NEAR(gp.predict(c, learners::Task::target), gp.predict(c, learners::Task::source), 1e-9);
    }
}

TEST(GPTransfer, Errors) {
    const auto s = random_env("s", 1);
    GPTransferParams p;
    p.source_budget = 1;
    EXPECT_EQ(test::error_kind([&] { gp_transfer(s, s, p); }), ErrorKind::config);
}

TEST(Nair, FullSampleIsExact) {
    const auto t = random_env("t", 7);
    EXPECT_DOUBLE_EQ(nair_optimize(t, t.size(), 0).nar, 0.0);
    EXPECT_EQ(nair_optimize(t, t.size() + 10, 0).target_measurements, t.size());
}

TEST(Nair, TwoRowTargetIsExact) {
    const auto t = test::make_env("t", {{0}, {1}}, {9, 4});
    const auto out = nair_optimize(t, 2, 3);
    EXPECT_EQ(out.target_row, 1u);
    EXPECT_DOUBLE_EQ(out.nar, 0.0);
}

TEST(Nair, DeterministicAndBudgeted) {
    const auto t = random_env("t", 8);
    for (std::size_t n : {2, 5, 12}) {
        const auto a = nair_optimize(t, n, 42);
        const auto b = nair_optimize(t, n, 42);
        EXPECT_EQ(a.target_row, b.target_row);
        EXPECT_EQ(a.target_measurements, n);
        EXPECT_EQ(a.source_measurements, 0u);
    }
    EXPECT_EQ(test::error_kind([&] { nair_optimize(t, 1, 0); }), ErrorKind::config);
}
