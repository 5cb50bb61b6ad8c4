#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "beetle/bellwether/discovery.hpp"

namespace beetle {

struct TransferOutcome {
    Configuration configuration;  // predicted optimum in the target
    std::size_t target_row = 0;
    double nar = 0.0;             // against the full target dataset
    std::size_t train_rows = 0;
    std::size_t new_measurements = 0;  // source rows revealed beyond the ledger's prior state
};

/// Trains a tree on `train_budget` rows of the source, reusing rows already
/// revealed in `ledger` first and sampling the remainder, then returns the
/// target configuration with the lowest prediction.
inline TransferOutcome transfer_to_target(const EnvironmentDataset& source, SampleLedger& ledger,
                                          const EnvironmentDataset& target, std::size_t train_budget,
                                          std::uint64_t seed, const learners::TreeParams& tree = {}) {
    if (!source.space().same_options(target.space())) {
        throw Error(ErrorKind::schema, "source and target have different options");
    }
    TransferOutcome out;
    const std::size_t before = ledger.cost();
    if (ledger.revealed_count() < train_budget) {
        sample_random(source, ledger, train_budget - ledger.revealed_count(), seed);
    }
    const auto& revealed = ledger.revealed();
    const std::size_t n = std::min(train_budget, revealed.size());
    std::vector<std::size_t> rows(revealed.begin(), revealed.begin() + static_cast<std::ptrdiff_t>(n));
    const auto model = learners::train_regression_tree(source, rows, tree);
    const auto predicted = model.predict(target.configurations());
    out.target_row = argbest(predicted);
    out.configuration = target.configuration(out.target_row);
    out.nar = metrics::nar_row(target, out.target_row);
    out.train_rows = n;
    out.new_measurements = ledger.cost() - before;
    return out;
}

struct BeetleResult {
    Discovery discovery;
    TransferOutcome transfer;

    std::size_t total_measurements() const { return discovery.report.total_cost + transfer.new_measurements; }
};

/// Finds the bellwether among `sources` and transfers a tree trained on it to `target`.
inline BeetleResult beetle_optimize(std::span<const EnvironmentDataset> sources, const EnvironmentDataset& target,
                                    const DiscoveryParams& params, std::size_t train_budget) {
    params.validate();
    if (train_budget < params.min_train) {
        throw Error(ErrorKind::config, "train budget " + std::to_string(train_budget) + " is below the minimum of " +
                                           std::to_string(params.min_train) + " rows");
    }
    for (const auto& s : sources) {
        if (s.env_id() == target.env_id()) {
            throw Error(ErrorKind::config, "target '" + target.env_id() + "' is also listed as a source");
        }
    }
    BeetleResult result{find_bellwether(sources, params), {}};
    auto& d = result.discovery;
    result.transfer = transfer_to_target(sources[d.bellwether], d.ledgers[d.bellwether], target, train_budget,
                                         derive_seed(params.seed, 0xbee71e), params.tree);
    return result;
}

}  // namespace beetle
