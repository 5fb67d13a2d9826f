#pragma once

#include <vector>

#include "sirp/instance.hpp"
#include "sirp/scenario_tree.hpp"

namespace sirp {

// Zero-travel-cost optimum: with C = 0 every bin can be emptied at every
// stage, so the optimal expected profit is the revenue on everything that
// ever arrives,
//   R * sum_i E_i B (S_i + sum_{stage>=2} sum_{n in stage} pi_n a_i_n).
double closed_form_profit_C0(const Instance& inst, const ScenarioTree& tree);

// The closed form is the true optimum only when free collection keeps
// every path overflow-free on its own: per-bin root-to-leaf rate sums
// (plus the initial fill) at most 1, and no bin bigger than the vehicle.
bool c0_closed_form_applies(const Instance& inst, const ScenarioTree& tree);

// Deterministic-chain family on which one-stage lookahead fails: nothing
// accumulates up to stage T-2, a fraction alpha_i arrives at stage T-1,
// and the remainder plus eps_i (m^3) at stage T. Skipping the stage-(T-1)
// collection overflows the bins at stage T, but a window that ends at
// stage T-1 never sees a reason to pay for a tour (R = 0), so the
// truncated plan runs into an infeasible final subproblem while the full
// model stays finite.
struct WorstCase {
    Instance instance;
    ScenarioTree tree;
};

WorstCase worst_case_instance(int num_bins, int horizon, const std::vector<double>& alpha,
                              const std::vector<double>& eps_m3,
                              double travel_cost_per_km = 1.0);

} // namespace sirp
