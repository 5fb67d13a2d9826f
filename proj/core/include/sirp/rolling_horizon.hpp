#pragma once

#include <string>
#include <vector>

#include "sirp/instance.hpp"
#include "sirp/milp.hpp"
#include "sirp/model_build.hpp"
#include "sirp/plan.hpp"
#include "sirp/scenario_tree.hpp"

namespace sirp {

// Total profit of a truncated-horizon run. An infeasible subproblem makes
// the whole policy worthless; that outcome is carried as an explicit
// minus-infinity marker, never as a floating-point sentinel.
struct Profit {
    bool neg_infinity = false;
    double value = 0.0;

    static Profit negative_infinity() { return {true, 0.0}; }
    static Profit finite(double v) { return {false, v}; }
    bool operator==(const Profit&) const = default;
};

struct RhConfig {
    int window = 1;             // W, lookahead stages past the decision stage
    double time_limit = 7200.0; // total seconds across all subproblems
    ModelVariant variant = ModelVariant::M;
    SolverConfig solver;        // per-subproblem settings; time_limit is managed
};

struct RhStep {
    int first_stage = 0;
    int last_stage = 0;
    SolveStatus status = SolveStatus::Infeasible;
    double budget_seconds = 0.0;
    double used_seconds = 0.0;
    double objective = 0.0; // subproblem objective when an incumbent exists
    long long nodes = 0;
};

struct RhResult {
    Profit profit;      // recomposed full-horizon objective
    bool failed = false; // a subproblem ran out of budget with no incumbent
    std::string failure;
    std::vector<RhStep> steps;
    CollectionPlan plan; // populated when the run finished with finite profit
    double seconds = 0.0;
};

// Budget for the upcoming step given the per-step spendings so far: every
// step gets total/num_steps plus whatever the previous step left unused.
// As long as each step honors its budget the sum of spendings stays
// within `total`.
double next_step_budget(double total, int num_steps, const std::vector<double>& used_so_far);

// One conditional subtree per stage-`first_stage` node, covering stages
// first_stage..last_stage. Each subtree is renumbered to stages 1.., its
// root gets probability one and zero rates, and descendant probabilities
// are divided by the root mass.
std::vector<ScenarioTree> subtree_restriction(const ScenarioTree& tree, int first_stage,
                                              int last_stage);

// Truncated-horizon heuristic: for k = 1..T-1 solve one joint model over
// stages k..min(k+W, T) (all stage-k nodes as roots, inventories handed
// over from the previous step), keep only the first-stage decisions, and
// recompose the full-horizon objective from the kept pieces.
RhResult run_rolling_horizon(const Instance& inst, const ScenarioTree& tree, const RhConfig& cfg);

} // namespace sirp
