#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sirp/sampler.hpp"
#include "sirp/scenario_tree.hpp"

namespace sirp {

struct FitResult {
    ScenarioTree tree;
    std::vector<std::string> warnings; // never-visited branches etc.
    SamplerStats sampler_stats;
    long long iterations = 0;
};

// Fit a scenario tree of the given branching structure to the bank by
// stochastic approximation: each sampled trajectory descends the tree
// greedily (nearest child in Euclidean distance, ties to the lowest node
// id) and drags the matched states towards the sample with step size
// 1/(visits+1). Branch probabilities are visit frequencies; never-visited
// branches stay in the tree with probability 0 and produce a warning.
// Deterministic in (bank, structure, iterations, seed).
FitResult fit_tree(const TrajectoryBank& bank, const BranchingStructure& structure,
                   long long iterations, std::uint64_t seed);

// One stability-table row hook result (model solved on a fitted tree).
struct StabilityOutcome {
    bool ok = false;
    double profit = 0.0;
    double collected_kg = 0.0;
    double distance_km = 0.0;
    double cpu_seconds = 0.0;
};

struct StabilityRow {
    std::string structure;
    long long scenarios = 0;
    int runs = 0;
    int failures = 0;
    double mean_profit = 0.0, std_profit = 0.0;
    double mean_collected = 0.0, std_collected = 0.0;
    double mean_distance = 0.0, std_distance = 0.0;
    double mean_cpu = 0.0, std_cpu = 0.0;
    // Nested-distance style tree metric: not provided by this toolkit.
    std::string multistage_distance = "unavailable";
};

struct StabilityTable {
    std::vector<StabilityRow> rows;
};

using SolveHook = std::function<StabilityOutcome(const ScenarioTree&)>;

// Fit `runs_per_structure` trees per structure (run seeds derived from
// `seed`) and push each through the hook; per-structure rows aggregate
// mean and sample standard deviation over the successful runs, failed
// runs are counted and excluded.
StabilityTable stability_batch(const TrajectoryBank& bank,
                               const std::vector<BranchingStructure>& structures,
                               int runs_per_structure, const SolveHook& hook,
                               std::uint64_t seed, long long fit_iterations = 10000);

} // namespace sirp
