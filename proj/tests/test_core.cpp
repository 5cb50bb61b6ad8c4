#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "beetle/core/csv.hpp"
#include "beetle/core/manifest.hpp"
#include "beetle/core/sampling.hpp"
#include "helpers.hpp"

using namespace beetle;
using beetle::test::TempDir;

TEST(Csv, LoadsRows) {
    TempDir dir;
    const auto p = dir.write("a.csv", "o1,o2,perf\n0,0,10.0\n1,0,5.0\n");
    const auto ds = load_environment_csv(p, "perf", Sense::minimize);
    ASSERT_EQ(ds.size(), 2u);
    EXPECT_EQ(ds.objective_name(), "perf");
    EXPECT_EQ(ds.env_id(), "a");
    EXPECT_EQ(ds.performance(0), 10.0);
    EXPECT_EQ(ds.performance(1), 5.0);
    EXPECT_EQ(ds.configuration(1), (Configuration{{1, 0}}));
}

TEST(Csv, DuplicatesCollapseToMean) {
    std::istringstream in("o1,o2,perf\n0,0,10.0\n0,0,20.0\n1,1,3\n");
    const auto ds = make_dataset(parse_environment_csv(in, "perf"), "e", "s", "perf", Sense::minimize);
    ASSERT_EQ(ds.size(), 2u);
    EXPECT_EQ(ds.performance(0), 15.0);
}

TEST(Csv, SingleDistinctRowIsInsufficient) {
    std::istringstream in("o1,o2,perf\n0,0,10.0\n0,0,20.0\n");
    EXPECT_EQ(test::error_kind([&] {
                  make_dataset(parse_environment_csv(in, "perf"), "e", "s", "perf", Sense::minimize);
              }),
              ErrorKind::insufficient_data);
}

TEST(Csv, MissingObjectiveNamesColumn) {
    std::istringstream in("o1,o2,time\n0,0,1\n1,0,2\n");
    try {
        parse_environment_csv(in, "perf");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::schema);
        EXPECT_NE(std::string(e.what()).find("perf"), std::string::npos);
    }
}

TEST(Csv, ParseErrorReportsRow) {
    std::istringstream in("o1,perf\n0,1\nx,2\n");
    try {
        parse_environment_csv(in, "perf");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::parse);
        EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos);
    }
}

TEST(Csv, MeasurementColumnsAreNotOptions) {
    std::istringstream in("o1,o2,$<perf,$energy\n0,1,4,9\n1,0,2,8\n");
    const auto t = parse_environment_csv(in, "perf");
    EXPECT_EQ(t.option_names, (std::vector<std::string>{"o1", "o2"}));
    EXPECT_EQ(t.performance, (std::vector<double>{4, 2}));
}

TEST(Csv, RoundTripIsBitExact) {
    TempDir dir;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    std::vector<double> perf;
    const auto rows = test::binary_rows(4);
    for (std::size_t i = 0; i < rows.size(); ++i) perf.push_back(u(rng) / 3.0);
    for (Sense sense : {Sense::minimize, Sense::maximize}) {
        const auto ds = test::make_env("rt", rows, perf, sense);
        save_environment_csv(dir / "rt.csv", ds);
        const auto back = load_environment_csv(dir / "rt.csv", "perf", sense);
        ASSERT_EQ(back.size(), ds.size());
        EXPECT_EQ(back.sense(), sense);
        EXPECT_EQ(back.objective_name(), "perf");
        for (std::size_t r = 0; r < ds.size(); ++r) {
            EXPECT_EQ(back.configuration(r), ds.configuration(r));
            EXPECT_EQ(back.performance(r), ds.performance(r));
            EXPECT_EQ(back.value(r), ds.value(r));
        }
    }
}

TEST(Manifest, LoadsSystemOverSharedSpace) {
    TempDir dir;
    dir.write("a.csv", "o1,o2,perf\n0,0,1\n1,0,2\n");
    dir.write("b.csv", "o1,o2,perf\n0,1,3\n1,1,4\n0,0,5\n");
    dir.write("m.json",
              R"({"system":"s","objective":"perf","sense":"max","environments":{"b":"b.csv","a":"a.csv"}})");
    const auto m = load_manifest(dir / "m.json");
    EXPECT_EQ(m.sense, Sense::maximize);
    const auto envs = load_system(m);
    ASSERT_EQ(envs.size(), 2u);
    EXPECT_EQ(envs[0].env_id(), "a");
    EXPECT_EQ(envs[0].space().domain(1).values(), (std::vector<double>{0, 1}));
    EXPECT_EQ(envs[1].value(0), -3.0);

    const auto again = parse_manifest(to_json(m, dir.path()), dir.path());
    EXPECT_EQ(again.environments.size(), 2u);
    EXPECT_EQ(again.sense, Sense::maximize);
}

TEST(Manifest, Errors) {
    TempDir dir;
    EXPECT_EQ(test::error_kind([&] { load_manifest(dir / "none.json"); }), ErrorKind::config);
    dir.write("bad.json", "{not json");
    EXPECT_EQ(test::error_kind([&] { load_manifest(dir / "bad.json"); }), ErrorKind::schema);
    dir.write("a.csv", "o1,o2,perf\n0,0,1\n1,0,2\n");
    dir.write("b.csv", "o1,o3,perf\n0,0,1\n1,0,2\n");
    dir.write("m.json", R"({"environments":{"a":"a.csv","b":"b.csv"}})");
    EXPECT_EQ(test::error_kind([&] { load_system(dir / "m.json"); }), ErrorKind::schema);
}

TEST(Sampling, RandomZeroIsEmpty) {
    const auto ds = test::binary_env("e", 3, [](auto& r) { return r[0]; });
    SampleLedger ledger(ds);
    EXPECT_TRUE(sample_random(ds, ledger, 0, 1).empty());
    EXPECT_EQ(ledger.cost(), 0u);
}

TEST(Sampling, RandomExhausts) {
    const auto ds = test::binary_env("e", 3, [](auto& r) { return r[0]; });
    SampleLedger ledger(ds);
    const auto rows = sample_random(ds, ledger, 100, 1);
    EXPECT_EQ(rows.size(), ds.size());
    EXPECT_EQ(ledger.cost(), ds.size());
    EXPECT_EQ(std::set<std::size_t>(rows.begin(), rows.end()).size(), ds.size());
}

TEST(Sampling, RandomIsDeterministicAndNeverRepeats) {
    const auto ds = test::binary_env("e", 5, [](auto& r) { return r[0] + r[3]; });
    SampleLedger a(ds), b(ds);
    std::size_t last = 0;
    for (int round = 0; round < 8; ++round) {
        EXPECT_EQ(sample_random(ds, a, 3, 40 + round), sample_random(ds, b, 3, 40 + round));
        EXPECT_GE(a.cost(), last);
        last = a.cost();
    }
    std::set<std::size_t> seen(a.revealed().begin(), a.revealed().end());
    EXPECT_EQ(seen.size(), a.revealed().size());
}

TEST(Sampling, SobolPointsMatchReference) {
    // Leading points of the 2-D Sobol sequence (direction numbers from Joe and Kuo).
    const std::vector<std::vector<double>> expected{{0, 0}, {0.5, 0.5}, {0.75, 0.25}, {0.25, 0.75}};
    EXPECT_EQ(sobol_points(2, 4), expected);
}

TEST(Sampling, SobolCoversBinarySquare) {
    const auto ds = test::binary_env("e", 2, [](auto& r) { return r[0] * 2 + r[1]; });
    auto rows = sample_sobol(ds, 4, 0);
    std::sort(rows.begin(), rows.end());
    EXPECT_EQ(rows, (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(Sampling, SobolBounds) {
    const auto ds = test::binary_env("e", 4, [](auto& r) { return r[1]; });
    EXPECT_EQ(sample_sobol(ds, 1, 0).size(), 1u);
    const auto all = sample_sobol(ds, ds.size(), 0);
    EXPECT_EQ(std::set<std::size_t>(all.begin(), all.end()).size(), all.size());
    EXPECT_LE(all.size(), ds.size());
    EXPECT_EQ(test::error_kind([&] { sample_sobol(ds, 0, 0); }), ErrorKind::config);
}

TEST(Optimum, Examples) {
    const std::vector<std::vector<double>> rows{{0}, {1}, {2}};
    const auto min = test::make_env("m", rows, {10, 5, 7});
    EXPECT_EQ(true_optimum(min).row, 1u);
    EXPECT_EQ(true_optimum(min).performance, 5.0);
    const auto max = test::make_env("m", rows, {10, 5, 7}, Sense::maximize);
    EXPECT_EQ(true_optimum(max).row, 0u);
    EXPECT_EQ(true_optimum(max).performance, 10.0);
    const auto flat = test::make_env("m", rows, {3, 3, 3});
    EXPECT_EQ(true_optimum(flat).row, 0u);
}

TEST(Optimum, NoRowBeatsIt) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 100);
    for (int trial = 0; trial < 50; ++trial) {
        const auto ds = test::binary_env("e", 3, [&](auto&) { return std::floor(u(rng)); });
        const auto opt = true_optimum(ds);
        for (std::size_t r = 0; r < ds.size(); ++r) EXPECT_LE(opt.performance, ds.performance(r));
    }
}

TEST(Ledger, RevealOnceAndCosts) {
    const auto ds = test::binary_env("e", 2, [](auto& r) { return r[0]; });
    SampleLedger ledger(ds, {1, 2, 3, 4});
    EXPECT_TRUE(ledger.reveal(2));
    EXPECT_FALSE(ledger.reveal(2));
    ledger.reveal(3);
    EXPECT_EQ(ledger.cost(), 2u);
    EXPECT_EQ(ledger.weighted_cost(), 7.0);
    EXPECT_EQ(ledger.unrevealed(), (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(test::error_kind([&] { ledger.reveal(9); }), ErrorKind::lookup);
}

TEST(Errors, ConfigurationKinds) {
    EXPECT_TRUE(Error(ErrorKind::config, "x").is_configuration());
    EXPECT_TRUE(Error(ErrorKind::budget, "x").is_configuration());
    EXPECT_FALSE(Error(ErrorKind::parse, "x").is_configuration());
    EXPECT_FALSE(Error(ErrorKind::schema, "x").is_configuration());
}
