// Generates a small synthetic family in memory, finds its bellwether and
// transfers to one target.

#include <iostream>

#include "beetle/bellwether/beetle.hpp"
#include "beetle/harness/synthetic.hpp"

int main() {
    using namespace beetle;
    harness::SyntheticFamilySpec spec;
    spec.seed = 7;
    const auto family = harness::generate_synthetic(spec);

    // Hold out the first environment as the target.
    const auto& target = family.environments.front();
    std::vector<EnvironmentDataset> sources(family.environments.begin() + 1, family.environments.end());

    DiscoveryParams params;
    params.seed = 1;
    const auto result = beetle_optimize(sources, target, params, 26);

    std::cout << "planted bellwether:   " << family.planted_id << "\n"
              << "discovered:           " << result.discovery.report.bellwether_id << "\n"
              << "measurements:         " << result.total_measurements() << "\n"
              << "NAR on " << target.env_id() << ":           " << result.transfer.nar << "\n";
}
