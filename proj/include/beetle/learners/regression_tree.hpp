#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "beetle/core/dataset.hpp"

namespace beetle::learners {

struct TreeParams {
    std::size_t min_samples_leaf = 1;
    std::size_t max_depth = 0;  // 0: unlimited
};

struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;     // go left when x[feature] <= threshold
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;         // mean target of the node's training rows
    std::size_t samples = 0;

    bool is_leaf() const noexcept { return feature < 0; }
};

/// Candidate partition of a node's rows.
struct Split {
    std::size_t feature;
    double threshold;
    double sse;  // summed squared deviation of both children from their means
};

namespace detail {

// Mean that is exact when every value is equal.
inline double stable_mean(std::span<const double> ys, std::span<const std::size_t> rows) {
    const double first = ys[rows[0]];
    double acc = 0.0;
    for (auto r : rows) acc += ys[r] - first;
    return first + acc / static_cast<double>(rows.size());
}

inline bool all_equal(std::span<const double> ys, std::span<const std::size_t> rows) {
    for (auto r : rows) {
        if (ys[r] != ys[rows[0]]) return false;
    }
    return true;
}

}  // namespace detail

/// Best variance-reducing split of `rows` (lowest children SSE; ties go to the
/// lower feature, then the lower threshold). Thresholds sit midway between
/// adjacent distinct values. Returns nullopt when no split leaves at least
/// `min_leaf` rows on each side.
inline std::optional<Split> find_best_split(std::span<const Configuration> xs, std::span<const double> ys,
                                            std::span<const std::size_t> rows, std::size_t min_leaf) {
    const std::size_t n = rows.size();
    if (n < 2 * std::max<std::size_t>(min_leaf, 1)) return std::nullopt;
    const double center = detail::stable_mean(ys, rows);
    const std::size_t features = xs[rows[0]].size();

    std::optional<Split> best;
    std::vector<std::size_t> order(rows.begin(), rows.end());
    for (std::size_t f = 0; f < features; ++f) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return xs[a][f] < xs[b][f]; });
        double total_sum = 0.0, total_sq = 0.0;
        for (auto r : order) {
            const double y = ys[r] - center;
            total_sum += y;
            total_sq += y * y;
        }
        double left_sum = 0.0, left_sq = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double y = ys[order[i]] - center;
            left_sum += y;
            left_sq += y * y;
            const double lo = xs[order[i]][f];
            const double hi = xs[order[i + 1]][f];
            if (lo == hi) continue;
            const std::size_t nl = i + 1, nr = n - nl;
            if (nl < min_leaf || nr < min_leaf) continue;
            const double right_sum = total_sum - left_sum;
            const double right_sq = total_sq - left_sq;
            double sse = (left_sq - left_sum * left_sum / static_cast<double>(nl)) +
                         (right_sq - right_sum * right_sum / static_cast<double>(nr));
            sse = std::max(sse, 0.0);
            if (!best || sse < best->sse) best = Split{f, lo + (hi - lo) / 2.0, sse};
        }
    }
    return best;
}

/// CART regression tree: binary splits minimizing children SSE, grown until
/// nodes are pure, too small to split, or at max depth. Leaves predict the
/// mean of their training targets.
class RegressionTree {
public:
    RegressionTree() = default;

    static RegressionTree fit(std::span<const Configuration> xs, std::span<const double> ys,
                              const TreeParams& params = {}) {
        if (xs.empty()) throw Error(ErrorKind::insufficient_data, "cannot train a tree on zero rows");
        if (xs.size() != ys.size()) throw Error(ErrorKind::schema, "tree inputs and targets differ in length");
        if (params.min_samples_leaf == 0) throw Error(ErrorKind::config, "min_samples_leaf must be >= 1");
        RegressionTree tree;
        tree.option_count_ = xs[0].size();
        for (const auto& x : xs) {
            if (x.size() != tree.option_count_) throw Error(ErrorKind::schema, "ragged training configurations");
        }

        struct Pending {
            std::int32_t node;
            std::vector<std::size_t> rows;
            std::size_t depth;
        };
        std::vector<std::size_t> all(xs.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        tree.nodes_.push_back({});
        std::vector<Pending> stack;
        stack.push_back({0, std::move(all), 0});
        while (!stack.empty()) {
            Pending job = std::move(stack.back());
            stack.pop_back();
            auto& node = tree.nodes_[static_cast<std::size_t>(job.node)];
            node.samples = job.rows.size();
            node.value = detail::stable_mean(ys, job.rows);
            if (detail::all_equal(ys, job.rows)) continue;
            if (params.max_depth != 0 && job.depth >= params.max_depth) continue;
            auto split = find_best_split(xs, ys, job.rows, params.min_samples_leaf);
            if (!split) continue;

            std::vector<std::size_t> left, right;
            for (auto r : job.rows) (xs[r][split->feature] <= split->threshold ? left : right).push_back(r);
            node.feature = static_cast<std::int32_t>(split->feature);
            node.threshold = split->threshold;
            node.left = static_cast<std::int32_t>(tree.nodes_.size());
            node.right = node.left + 1;
            const std::int32_t l = node.left, r = node.right;
            tree.nodes_.push_back({});
            tree.nodes_.push_back({});
            // Right pushed first so the left subtree is built first.
            stack.push_back({r, std::move(right), job.depth + 1});
            stack.push_back({l, std::move(left), job.depth + 1});
        }
        return tree;
    }

    double predict(const Configuration& c) const {
        if (nodes_.empty()) throw Error(ErrorKind::config, "tree is not trained");
        if (c.size() != option_count_) {
            throw Error(ErrorKind::schema, "configuration has " + std::to_string(c.size()) +
                                               " options, tree was trained on " +
                                               std::to_string(option_count_));
        }
        std::size_t i = 0;
        while (!nodes_[i].is_leaf()) {
            const auto& n = nodes_[i];
            i = static_cast<std::size_t>(c[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
        }
        return nodes_[i].value;
    }

    std::vector<double> predict(std::span<const Configuration> cs) const {
        std::vector<double> out;
        out.reserve(cs.size());
        for (const auto& c : cs) out.push_back(predict(c));
        return out;
    }

    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
    std::size_t option_count() const noexcept { return option_count_; }

    std::size_t leaf_count() const {
        return static_cast<std::size_t>(
            std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.is_leaf(); }));
    }

    static RegressionTree from_nodes(std::vector<TreeNode> nodes, std::size_t option_count) {
        RegressionTree t;
        t.nodes_ = std::move(nodes);
        t.option_count_ = option_count;
        for (const auto& n : t.nodes_) {
            if (!n.is_leaf() && (n.left < 0 || n.right < 0 || static_cast<std::size_t>(n.right) >= t.nodes_.size() ||
                                 static_cast<std::size_t>(n.feature) >= option_count)) {
                throw Error(ErrorKind::schema, "malformed tree node");
            }
        }
        return t;
    }

private:
    std::vector<TreeNode> nodes_;
    std::size_t option_count_ = 0;
};

inline RegressionTree train_regression_tree(std::span<const Configuration> xs, std::span<const double> ys,
                                            const TreeParams& params = {}) {
    return RegressionTree::fit(xs, ys, params);
}

/// Tree over the given rows of a dataset, trained on lower-is-better values.
inline RegressionTree train_regression_tree(const EnvironmentDataset& ds, std::span<const std::size_t> rows,
                                            const TreeParams& params = {}) {
    std::vector<Configuration> xs;
    std::vector<double> ys;
    xs.reserve(rows.size());
    ys.reserve(rows.size());
    for (auto r : rows) {
        xs.push_back(ds.configuration(r));
        ys.push_back(ds.value(r));
    }
    return RegressionTree::fit(xs, ys, params);
}

}  // namespace beetle::learners
