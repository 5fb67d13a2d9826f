#pragma once

#include <string>
#include <vector>

#include "sirp/instance.hpp"
#include "sirp/milp.hpp"
#include "sirp/model_build.hpp"
#include "sirp/scenario_tree.hpp"

namespace sirp {

// Routes driven on the day of stage t+1, decided at stage t. Bins appear
// in visit order; the depot endpoints are implicit.
struct DayPlan {
    int day = 1; // decision stage t
    std::vector<std::vector<int>> routes;
    std::vector<int> visited; // ascending bin ids
    double distance_km = 0.0;
};

struct NodeQuantities {
    int node = 0;
    int stage = 1;
    double probability = 1.0;
    std::vector<double> collected_kg; // empty at root nodes
    std::vector<double> inventory_kg;
};

struct PlanTotals {
    double expected_profit = 0.0;
    double expected_collected_kg = 0.0;
    double total_distance_km = 0.0;
    double collected_per_km = 0.0;

    bool operator==(const PlanTotals&) const = default;
};

struct CollectionPlan {
    std::string variant = "M";
    int num_bins = 0;
    int horizon = 0;
    std::vector<DayPlan> days;
    std::vector<NodeQuantities> nodes; // ascending node id
    PlanTotals totals;
};

// Deterministic per-day route grids handed over by the solvers: arc (or
// edge) indicators over the routing vertices and visit flags per bin.
struct StageRouting {
    std::vector<std::vector<std::vector<bool>>> x; // [t-1][i][j]
    std::vector<std::vector<bool>> y;              // [t-1][i-1]
};

// Turns raw indicator grids plus per-node quantities into routes and
// KPIs. Throws DataError on structurally broken routing (subtours away
// from the depot, bins with dangling arcs, visit flags that disagree
// with the routes).
CollectionPlan assemble_plan(const Instance& inst, const ScenarioTree& tree,
                             ModelVariant variant, const StageRouting& routing,
                             const std::vector<std::vector<double>>& collected_by_node,
                             const std::vector<std::vector<double>>& inventory_by_node);

// Reads the named variables of a solved model back into a plan.
CollectionPlan decode_solution(const MilpProblem& p, const std::vector<double>& values,
                               const Instance& inst, const ScenarioTree& tree,
                               ModelVariant variant);

// KPIs recomputed from nothing but the plan and the instance; equality
// with the stored totals (and with the solver objective) is the round-trip
// integrity check.
PlanTotals recompute_totals(const CollectionPlan& plan, const Instance& inst);

void save_plan(const CollectionPlan& plan, const std::string& path);
CollectionPlan load_plan(const std::string& path);

} // namespace sirp
