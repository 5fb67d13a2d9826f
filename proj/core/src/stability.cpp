#include <cmath>
#include <tuple>
#include <utility>

#include "sirp/tree_fit.hpp"

namespace sirp {

namespace {

std::pair<double, double> mean_std(const std::vector<double>& v) {
    double mean = 0.0, sd = 0.0;
    if (!v.empty()) {
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        if (v.size() > 1) {
            for (double x : v) sd += (x - mean) * (x - mean);
            sd = std::sqrt(sd / static_cast<double>(v.size() - 1));
        }
    }
    return {mean, sd};
}

} // namespace

StabilityTable stability_batch(const TrajectoryBank& bank,
                               const std::vector<BranchingStructure>& structures,
                               int runs_per_structure, const SolveHook& hook,
                               std::uint64_t seed, long long fit_iterations) {
    if (runs_per_structure < 1) throw BuildError("stability batch needs runs >= 1");
    StabilityTable table;
    for (std::size_t s = 0; s < structures.size(); ++s) {
        StabilityRow row;
        row.structure = structures[s].to_string();
        row.scenarios = structures[s].num_scenarios();
        row.runs = runs_per_structure;

        std::vector<double> profit, weight, dist, cpu;
        for (int r = 0; r < runs_per_structure; ++r) {
            const std::uint64_t run_seed =
                seed +
                static_cast<std::uint64_t>(s) * static_cast<std::uint64_t>(runs_per_structure) +
                static_cast<std::uint64_t>(r);
            FitResult fit = fit_tree(bank, structures[s], fit_iterations, run_seed);
            StabilityOutcome oc = hook(fit.tree);
            if (!oc.ok) {
                ++row.failures;
                continue;
            }
            profit.push_back(oc.profit);
            weight.push_back(oc.collected_kg);
            dist.push_back(oc.distance_km);
            cpu.push_back(oc.cpu_seconds);
        }
        std::tie(row.mean_profit, row.std_profit) = mean_std(profit);
        std::tie(row.mean_collected, row.std_collected) = mean_std(weight);
        std::tie(row.mean_distance, row.std_distance) = mean_std(dist);
        std::tie(row.mean_cpu, row.std_cpu) = mean_std(cpu);
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace sirp
