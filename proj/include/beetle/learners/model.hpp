#pragma once

#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "beetle/learners/gaussian_process.hpp"
#include "beetle/learners/linear_map.hpp"
#include "beetle/learners/regression_tree.hpp"

namespace beetle::learners {

/// A tree whose predictions pass through a linear source-to-target map.
struct MappedTree {
    RegressionTree tree;
    LinearMap map;

    double predict(const Configuration& c) const { return map(tree.predict(c)); }
};

enum class ModelKind { regression_tree, linear_map, gaussian_process };

inline const char* to_string(ModelKind k) {
    switch (k) {
    case ModelKind::regression_tree: return "regression-tree";
    case ModelKind::linear_map: return "linear-map";
    case ModelKind::gaussian_process: return "gaussian-process";
    }
    return "unknown";
}

/// Any trained configuration -> performance predictor.
class PerformanceModel {
public:
    PerformanceModel(RegressionTree t) : impl_(std::move(t)) {}
    PerformanceModel(MappedTree t) : impl_(std::move(t)) {}
    PerformanceModel(GaussianProcess gp) : impl_(std::move(gp)) {}

    ModelKind kind() const noexcept { return static_cast<ModelKind>(impl_.index()); }

    double predict(const Configuration& c) const {
        return std::visit([&](const auto& m) { return m.predict(c); }, impl_);
    }

    std::vector<double> predict(std::span<const Configuration> cs) const {
        std::vector<double> out;
        out.reserve(cs.size());
        for (const auto& c : cs) out.push_back(predict(c));
        return out;
    }

    template <typename T>
    const T& as() const {
        return std::get<T>(impl_);
    }

private:
    std::variant<RegressionTree, MappedTree, GaussianProcess> impl_;
};

// JSON schema (documented in README):
//   {"kind": "regression-tree", "options": n,
//    "nodes": [{"feature": f, "threshold": t, "left": l, "right": r, "value": v, "samples": s}, ...]}
//   {"kind": "linear-map", "slope": a, "intercept": b, "tree": {...regression-tree...}}
//   {"kind": "gaussian-process", "kernel": {"scale", "length_scale", "signal_variance"},
//    "lower": [...], "range": [...], "inputs": [[...]], "tasks": ["source"|"target"],
//    "alpha": [...], "mean": m, "sd": s}

inline nlohmann::json tree_to_json(const RegressionTree& t) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : t.nodes()) {
        nodes.push_back({{"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right},
                         {"value", n.value},
                         {"samples", n.samples}});
    }
    return {{"kind", "regression-tree"}, {"options", t.option_count()}, {"nodes", nodes}};
}

inline RegressionTree tree_from_json(const nlohmann::json& j) {
    std::vector<TreeNode> nodes;
    for (const auto& n : j.at("nodes")) {
        TreeNode node;
        node.feature = n.at("feature").get<std::int32_t>();
        node.threshold = n.at("threshold").get<double>();
        node.left = n.at("left").get<std::int32_t>();
        node.right = n.at("right").get<std::int32_t>();
        node.value = n.at("value").get<double>();
        node.samples = n.at("samples").get<std::size_t>();
        nodes.push_back(node);
    }
    return RegressionTree::from_nodes(std::move(nodes), j.at("options").get<std::size_t>());
}

inline nlohmann::json to_json(const PerformanceModel& m) {
    switch (m.kind()) {
    case ModelKind::regression_tree:
        return tree_to_json(m.as<RegressionTree>());
    case ModelKind::linear_map: {
        const auto& mt = m.as<MappedTree>();
        return {{"kind", "linear-map"},
                {"slope", mt.map.slope},
                {"intercept", mt.map.intercept},
                {"tree", tree_to_json(mt.tree)}};
    }
    case ModelKind::gaussian_process: {
        const auto& gp = m.as<GaussianProcess>();
        nlohmann::json tasks = nlohmann::json::array();
        for (auto t : gp.tasks()) tasks.push_back(t == Task::source ? "source" : "target");
        return {{"kind", "gaussian-process"},
                {"kernel",
                 {{"scale", gp.kernel().scale},
                  {"length_scale", gp.kernel().length_scale},
                  {"signal_variance", gp.kernel().signal_variance}}},
                {"lower", gp.scaler().lower()},
                {"range", gp.scaler().range()},
                {"inputs", gp.scaled_inputs()},
                {"tasks", tasks},
                {"alpha", gp.alpha()},
                {"mean", gp.prior_mean()},
                {"sd", gp.target_scale()}};
    }
    }
    return {};
}

inline PerformanceModel model_from_json(const nlohmann::json& j) {
    try {
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "regression-tree") return tree_from_json(j);
        if (kind == "linear-map") {
            return MappedTree{tree_from_json(j.at("tree")),
                              LinearMap{j.at("slope").get<double>(), j.at("intercept").get<double>()}};
        }
        if (kind == "gaussian-process") {
            const auto& k = j.at("kernel");
            TransferKernel kernel{k.at("scale").get<double>(), k.at("length_scale").get<double>(),
                                  k.at("signal_variance").get<double>()};
            std::vector<Task> tasks;
            for (const auto& t : j.at("tasks")) tasks.push_back(t.get<std::string>() == "source" ? Task::source : Task::target);
            return GaussianProcess::restore(
                InputScaler(j.at("lower").get<std::vector<double>>(), j.at("range").get<std::vector<double>>()), kernel,
                j.at("inputs").get<std::vector<std::vector<double>>>(), std::move(tasks),
                j.at("alpha").get<std::vector<double>>(), j.at("mean").get<double>(), j.at("sd").get<double>());
        }
        throw Error(ErrorKind::schema, "unknown model kind '" + kind + "'");
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::schema, std::string("malformed model JSON: ") + e.what());
    }
}

}  // namespace beetle::learners
