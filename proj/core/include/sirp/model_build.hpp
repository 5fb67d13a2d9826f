#pragma once

#include <string>
#include <vector>

#include "sirp/instance.hpp"
#include "sirp/milp.hpp"
#include "sirp/scenario_tree.hpp"

namespace sirp {

enum class ModelVariant { M, Msym };

ModelVariant parse_variant(const std::string& text); // "M" / "Msym"
const char* to_string(ModelVariant v);

// Stage-aligned window of a scenario tree, the unit the model builders
// work on. A full tree is the common case; the rolling-horizon heuristic
// builds views over stage spans k..l, whose stage-1 layer may hold
// several roots (all stage-k nodes). Probabilities stay the original
// unconditional ones. `root_inventory_kg[r][i]` pins the initial
// inventory of the r-th root (defaults to E_i*B*S_i when empty).
struct TreeView {
    const ScenarioTree* tree = nullptr;
    std::vector<std::vector<int>> stages; // original node ids per view stage
    std::vector<std::vector<double>> root_inventory_kg;

    static TreeView full(const ScenarioTree& tree);
    static TreeView span(const ScenarioTree& tree, int first_stage, int last_stage);

    int num_stages() const { return static_cast<int>(stages.size()); }
};

// Variable names follow the model notation: x_t_i_j and y_t_i carry the
// decision stage t (view-relative), f_n_i_j / w_n_i / u_n_i carry the
// original tree node id n.
std::string var_x(int t, int i, int j);
std::string var_y(int t, int i);
std::string var_f(int node, int i, int j);
std::string var_w(int node, int i);
std::string var_u(int node, int i);

// Asymmetric flow formulation (model with directed arc binaries and
// single-commodity loads). Flow variables leaving the depot exist but are
// fixed to zero (outgoing depot flow is null by assumption); they are
// kept as columns so model dimensions match the reference formulation.
MilpProblem build_model_M(const Instance& inst, const TreeView& view);
MilpProblem build_model_M(const Instance& inst, const ScenarioTree& tree);

// Symmetric two-commodity variant: a copy depot N+1 closes every route,
// paired flows f_ij + f_ji = Q x_ij carry load and residual capacity, and
// the travel cost is C/2 per directed arc. Requires a symmetric distance
// matrix (BuildError otherwise).
MilpProblem build_model_Msym(const Instance& inst, const TreeView& view);
MilpProblem build_model_Msym(const Instance& inst, const ScenarioTree& tree);

MilpProblem build_model(const Instance& inst, const TreeView& view, ModelVariant v);

struct ModelSizes {
    int binaries = 0;
    int continuous = 0;
    int equalities = 0;
    int inequalities = 0;
};
ModelSizes model_sizes(const MilpProblem& p);

} // namespace sirp
