#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "beetle/learners/correlation.hpp"
#include "beetle/learners/model.hpp"
#include "helpers.hpp"

using namespace beetle;
using namespace beetle::learners;

namespace {

std::vector<Configuration> configs(const std::vector<std::vector<double>>& rows) {
    std::vector<Configuration> out;
    for (const auto& r : rows) out.push_back(Configuration{r});
    return out;
}

struct Candidate {
    std::size_t feature;
    double threshold;
    double sse;
};

double sse_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s;
}

// Every admissible split of `rows`, in (feature, threshold) order.
std::vector<Candidate> brute_splits(const std::vector<Configuration>& xs, const std::vector<double>& ys,
                                    const std::vector<std::size_t>& rows, std::size_t min_leaf) {
    std::vector<Candidate> out;
    for (std::size_t f = 0; f < xs[0].size(); ++f) {
        std::vector<double> vals;
        for (auto r : rows) vals.push_back(xs[r][f]);
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
            const double t = vals[i] + (vals[i + 1] - vals[i]) / 2.0;
            std::vector<double> l, rr;
            for (auto r : rows) (xs[r][f] <= t ? l : rr).push_back(ys[r]);
            if (l.size() < min_leaf || rr.size() < min_leaf) continue;
            out.push_back({f, t, sse_of(l) + sse_of(rr)});
        }
    }
    return out;
}

}  // namespace

TEST(Tree, SplitsOnTheInformativeOption) {
    const auto xs = configs({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    const std::vector<double> ys{1, 1, 9, 9};
    const auto t = train_regression_tree(xs, ys);
    ASSERT_EQ(t.nodes().size(), 3u);
    EXPECT_EQ(t.nodes()[0].feature, 0);
    EXPECT_DOUBLE_EQ(t.nodes()[0].threshold, 0.5);
    EXPECT_EQ(t.predict(Configuration{{0, 1}}), 1.0);
    EXPECT_EQ(t.predict(Configuration{{1, 0}}), 9.0);
}

TEST(Tree, ConstantTargetIsOneLeaf) {
    const auto xs = configs({{0}, {1}, {2}});
    const std::vector<double> ys{4, 4, 4};
    const auto t = train_regression_tree(xs, ys);
    EXPECT_EQ(t.leaf_count(), 1u);
    EXPECT_EQ(t.predict(Configuration{{7}}), 4.0);
}

TEST(Tree, SingleRowPredictsIt) {
    const auto xs = configs({{1, 0}});
    const std::vector<double> ys{3.5};
    EXPECT_EQ(train_regression_tree(xs, ys).predict(Configuration{{0, 1}}), 3.5);
}

TEST(Tree, Errors) {
    std::vector<Configuration> none;
    std::vector<double> no_y;
    EXPECT_EQ(test::error_kind([&] { train_regression_tree(none, no_y); }), ErrorKind::insufficient_data);
    const auto xs = configs({{0, 1}, {1, 1}});
    const std::vector<double> ys{1, 2};
    const auto t = train_regression_tree(xs, ys);
    EXPECT_EQ(test::error_kind([&] { t.predict(Configuration{{0}}); }), ErrorKind::schema);
    EXPECT_EQ(test::error_kind([&] { train_regression_tree(xs, ys, TreeParams{0, 0}); }), ErrorKind::config);
}

TEST(Tree, TiesGoToTheLowerFeature) {
    // Options 1 and 2 are copies, so both splits are equally good.
    const auto xs = configs({{0, 0}, {0, 0}, {1, 1}, {1, 1}});
    const std::vector<double> ys{1, 2, 8, 9};
    EXPECT_EQ(train_regression_tree(xs, ys).nodes()[0].feature, 0);
    const auto ys2 = std::vector<double>{5, 5, 5, 6};
    const auto t = train_regression_tree(configs({{0}, {1}, {2}, {3}}), ys2);
    EXPECT_DOUBLE_EQ(t.nodes()[0].threshold, 2.5);
}

TEST(Tree, ReproducesDistinctTrainingRowsExactly) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-50, 50);
    const auto rows = test::binary_rows(5);
    std::vector<double> ys;
    for (std::size_t i = 0; i < rows.size(); ++i) ys.push_back(u(rng));
    const auto xs = configs(rows);
    const auto t = train_regression_tree(xs, ys);
    for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(t.predict(xs[i]), ys[i]);
}

// Each internal node must carry the best split available to its rows.
TEST(Tree, MatchesExhaustiveSplitSearch) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t options = 2 + static_cast<std::size_t>(trial % 5);
        auto all = test::binary_rows(options);
        std::shuffle(all.begin(), all.end(), rng);
        const std::size_t n = std::min<std::size_t>(all.size(), 4 + static_cast<std::size_t>(rng() % 60));
        all.resize(n);
        const auto xs = configs(all);
        std::vector<double> ys;
        std::uniform_int_distribution<int> val(0, 20);
        for (std::size_t i = 0; i < n; ++i) ys.push_back(val(rng));
        const std::size_t min_leaf = 1 + static_cast<std::size_t>(trial % 3);
        const auto t = train_regression_tree(xs, ys, TreeParams{min_leaf, 0});

        // Route rows to nodes.
        std::vector<std::vector<std::size_t>> node_rows(t.nodes().size());
        for (std::size_t r = 0; r < n; ++r) {
            std::size_t i = 0;
            node_rows[0].push_back(r);
            while (!t.nodes()[i].is_leaf()) {
                const auto& nd = t.nodes()[i];
                i = static_cast<std::size_t>(xs[r][static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left
                                                                                                        : nd.right);
                node_rows[i].push_back(r);
            }
        }
        for (std::size_t i = 0; i < t.nodes().size(); ++i) {
            const auto& nd = t.nodes()[i];
            const auto cands = brute_splits(xs, ys, node_rows[i], min_leaf);
            if (nd.is_leaf()) {
                bool pure = true;
                for (auto r : node_rows[i]) pure = pure && ys[r] == ys[node_rows[i][0]];
                EXPECT_TRUE(pure || cands.empty()) << "leaf " << i << " could still split";
                continue;
            }
            ASSERT_FALSE(cands.empty());
            double best = cands[0].sse;
            for (const auto& c : cands) best = std::min(best, c.sse);
            const double tol = 1e-9 * (1.0 + best);
            const Candidate* chosen = nullptr;
            for (const auto& c : cands) {
                if (c.feature == static_cast<std::size_t>(nd.feature) && c.threshold == nd.threshold) chosen = &c;
            }
            ASSERT_NE(chosen, nullptr) << "node " << i << " split is not a candidate";
            EXPECT_LE(chosen->sse, best + tol);
            for (const auto& c : cands) {
                if (&c == chosen) break;
                EXPECT_GE(c.sse, chosen->sse - tol) << "an earlier split was strictly better";
            }
        }
    }
}

TEST(Tree, LargerMinLeafNeverAddsLeaves) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0, 100);
    for (int trial = 0; trial < 30; ++trial) {
        const auto xs = configs(test::binary_rows(6));
        std::vector<double> ys;
        for (std::size_t i = 0; i < xs.size(); ++i) ys.push_back(u(rng));
        std::size_t prev = std::numeric_limits<std::size_t>::max();
        for (std::size_t leaf : {1, 2, 3, 5, 8, 16, 32}) {
            const auto count = train_regression_tree(xs, ys, TreeParams{leaf, 0}).leaf_count();
            EXPECT_LE(count, prev) << "min_leaf " << leaf;
            prev = count;
        }
    }
}

TEST(Tree, TrainingErrorShrinksWithSmallerLeaves) {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0, 100);
    for (int trial = 0; trial < 30; ++trial) {
        const auto xs = configs(test::binary_rows(6));
        std::vector<double> ys;
        for (std::size_t i = 0; i < xs.size(); ++i) ys.push_back(u(rng));
        double prev = -1.0;
        for (std::size_t leaf : {32, 16, 8, 5, 3, 2, 1}) {
            const auto t = train_regression_tree(xs, ys, TreeParams{leaf, 0});
            double sse = 0.0;
            for (std::size_t i = 0; i < xs.size(); ++i) sse += std::pow(t.predict(xs[i]) - ys[i], 2);
            if (prev >= 0.0) EXPECT_LE(sse, prev + 1e-9) << "min_leaf " << leaf;
            prev = sse;
        }
    }
}

TEST(Tree, FirstOptionTargetIsLearnedExactly) {
    const auto xs = configs(test::binary_rows(2));
    std::vector<double> ys;
    for (const auto& x : xs) ys.push_back(x[0]);
    const auto t = train_regression_tree(xs, ys);
    for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(t.predict(xs[i]), ys[i]);
}

TEST(LinearMapFit, Line) {
    const std::vector<double> x{0, 1, 2, 3}, y{3, 5, 7, 9};
    const auto m = train_linear_map(x, y);
    EXPECT_NEAR(m.slope, 2.0, 1e-12);
    EXPECT_NEAR(m.intercept, 3.0, 1e-12);
    EXPECT_NEAR(m(10), 23.0, 1e-12);
}

TEST(LinearMapFit, ConstantTargetHasZeroSlope) {
    const std::vector<double> x{1, 2, 3}, y{4, 4, 4};
    const auto m = train_linear_map(x, y);
    EXPECT_EQ(m.slope, 0.0);
    EXPECT_EQ(m.intercept, 4.0);
}

TEST(LinearMapFit, Degenerate) {
    const std::vector<double> one{1}, two{1, 1}, y2{1, 2};
    EXPECT_EQ(test::error_kind([&] { train_linear_map(one, one); }), ErrorKind::degenerate_fit);
    EXPECT_EQ(test::error_kind([&] { train_linear_map(two, y2); }), ErrorKind::degenerate_fit);
}

TEST(LinearMapFit, ResidualsAreOrthogonal) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g;
    std::vector<double> x, y;
    for (int i = 0; i < 40; ++i) {
        x.push_back(g(rng));
        y.push_back(1.5 * x.back() + g(rng));
    }
    const auto m = train_linear_map(x, y);
    double sum = 0.0, dot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - m(x[i]);
        sum += e;
        dot += e * x[i];
    }
    double norm = 0.0;
    for (double v : y) norm += v * v;
    EXPECT_NEAR(sum, 0.0, 1e-9);
    EXPECT_LE(std::abs(dot), 1e-6 * std::sqrt(norm));
}

TEST(Correlation, Examples) {
    const std::vector<double> a{1, 2, 3, 4}, b{2, 4, 6, 8}, c{4, 3, 2, 1};
    EXPECT_NEAR(performance_correlation(a, b), 1.0, 1e-12);
    EXPECT_NEAR(performance_correlation(a, c), -1.0, 1e-12);
    const std::vector<double> s3{1, 2, 3}, t3{2, 4, 7};
    // Sums: 5 / sqrt(2 * 12.6667).
    EXPECT_NEAR(performance_correlation(s3, t3), 0.99340, 1e-3);
    EXPECT_NEAR(performance_correlation(a, a), 1.0, 1e-12);
    const std::vector<double> flat{3, 3, 3, 3};
    EXPECT_EQ(test::error_kind([&] { performance_correlation(a, flat); }), ErrorKind::undefined_metric);
}

namespace {

ConfigurationSpace line_space() {
    return ConfigurationSpace({"x"}, {OptionDomain({0, 1, 2, 3, 4})});
}

// Posterior mean by dense Gaussian elimination, written independently of the library.
double gp_oracle(const std::vector<double>& x, const std::vector<double>& y, double q, double len, double noise) {
    const std::size_t n = x.size();
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : y) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    auto k = [&](double a, double b) { return std::exp(-(a - b) * (a - b) / (2 * len * len)); };
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i][j] = k(x[i], x[j]) + (i == j ? noise : 0.0);
        a[i][n] = (y[i] - mean) / sd;
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
        }
        std::swap(a[c], a[p]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = a[r][c] / a[c][c];
            for (std::size_t j = c; j <= n; ++j) a[r][j] -= f * a[c][j];
        }
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += k(q, x[i]) * a[i][n] / a[i][i];
    return mean + sd * acc;
}

}  // namespace

TEST(GP, InterpolatesTrainingRows) {
    const auto xs = configs({{0}, {1}, {2}, {3}, {4}});
    const std::vector<double> ys{1, 3, 5, 4, 2};
    const auto gp = train_gp(line_space(), xs, ys, TransferKernel{1.0, 0.0, 1.0});
    EXPECT_NEAR(gp.predict(Configuration{{2}}), 5.0, 1e-4);
}

TEST(GP, ZeroScaleGivesPriorMean) {
    const auto xs = configs({{0}, {1}, {2}, {3}, {4}});
    const std::vector<double> ys{1, 3, 5, 4, 2};
    const auto gp = train_gp(line_space(), xs, ys, TransferKernel{0.0, 0.0, 1.0});
    EXPECT_DOUBLE_EQ(gp.predict(Configuration{{2}}), 3.0);
    EXPECT_NEAR(gp.predict(Configuration{{2}}, Task::source), 5.0, 1e-4);
}

TEST(GP, MatchesDenseSolve) {
    const auto xs = configs({{0}, {1}, {2}, {3}, {4}});
    const std::vector<double> ys{0, 1, 2, 3, 4};
    const auto gp = train_gp(line_space(), xs, ys, TransferKernel{1.0, 0.0, 1.0});
    // Scaled inputs are 0, .25, .5, .75, 1: the median pairwise distance is 0.5.
    EXPECT_DOUBLE_EQ(gp.kernel().length_scale, 0.5);
    const std::vector<double> sx{0, 0.25, 0.5, 0.75, 1.0};
    const double noise = GPParams{}.noise_variance + gp.jitter();
    for (double q : {0.5, 1.5, 2.5, 3.7}) {
        EXPECT_NEAR(gp.predict(Configuration{{q}}), gp_oracle(sx, ys, q / 4.0, 0.5, noise), 1e-6) << q;
    }
}

TEST(GP, SmoothLineAtMidpoint) {
    const auto xs = configs({{0}, {1}, {2}, {3}, {4}});
    const std::vector<double> ys{0, 0.25, 0.5, 0.75, 1.0};
    const auto gp = train_gp(line_space(), xs, ys, TransferKernel{1.0, 0.0, 1.0});
    EXPECT_NEAR(gp.predict(Configuration{{2}}), 0.5, 1e-2);
}

TEST(GP, FullCorrelationEqualsPlainGP) {
    const auto xs = configs({{0}, {1}, {2}, {3}, {4}});
    const std::vector<double> ys{2, 7, 1, 8, 2};
    const auto a = train_gp(line_space(), xs, ys, TransferKernel{1.0, 0.0, 1.0});
    for (double q : {0.5, 2.0, 3.5}) {
        EXPECT_NEAR(a.predict(Configuration{{q}}, Task::target), a.predict(Configuration{{q}}, Task::source), 1e-12);
    }
}

TEST(GP, Errors) {
    const auto one = configs({{0}});
    const std::vector<double> y1{1};
    EXPECT_EQ(test::error_kind([&] { train_gp(line_space(), one, y1, TransferKernel{}); }),
              ErrorKind::insufficient_data);
}

TEST(Model, JsonRoundTrip) {
    const auto xs = configs({{0}, {1}, {2}, {3}, {4}});
    const std::vector<double> ys{2, 7, 1, 8, 2};
    const auto tree = train_regression_tree(xs, ys);
    const std::vector<PerformanceModel> models{
        PerformanceModel(tree), PerformanceModel(MappedTree{tree, LinearMap{2.0, -1.0}}),
        PerformanceModel(train_gp(line_space(), xs, ys, TransferKernel{0.7, 0.0, 1.0}))};
    for (const auto& m : models) {
        const auto j = to_json(m);
        const auto back = model_from_json(nlohmann::json::parse(j.dump()));
        EXPECT_EQ(back.kind(), m.kind());
        for (double q : {0.0, 1.5, 3.0, 4.0}) EXPECT_EQ(back.predict(Configuration{{q}}), m.predict(Configuration{{q}}));
    }
    EXPECT_EQ(test::error_kind([] { model_from_json(nlohmann::json{{"kind", "forest"}}); }), ErrorKind::schema);
    EXPECT_EQ(test::error_kind([] { model_from_json(nlohmann::json::object()); }), ErrorKind::schema);
}
