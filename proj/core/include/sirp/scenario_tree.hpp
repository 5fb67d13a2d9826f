#pragma once

#include <string>
#include <vector>

#include "sirp/common.hpp"

namespace sirp {

// One node of a scenario tree. `prob` is the unconditional probability pi;
// `rates` holds the per-bin accumulation fractions a_i of the day this
// node reveals. Node ids are dense 0-based indices, parents precede
// children, the root has id 0, stage 1 and zero rates.
struct TreeNode {
    int id = 0;
    int stage = 1;
    int parent = -1;
    double prob = 1.0;
    std::vector<double> rates;

    bool operator==(const TreeNode&) const = default;
};

struct TreeIssue {
    std::string code;    // short machine tag, e.g. "stage_mass"
    int node = -1;       // offending node id, -1 for tree-level issues
    std::string message;
};

struct TreeDiagnostics {
    std::vector<TreeIssue> issues;
    bool ok() const { return issues.empty(); }
};

class ScenarioTree {
public:
    ScenarioTree() = default;
    ScenarioTree(int num_bins, std::vector<TreeNode> nodes);

    int num_bins() const { return num_bins_; }
    int num_stages() const { return num_stages_; }
    int num_nodes() const { return static_cast<int>(nodes_.size()); }

    const TreeNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
    const std::vector<TreeNode>& nodes() const { return nodes_; }
    const std::vector<int>& stage_nodes(int stage) const {
        return stage_nodes_[static_cast<std::size_t>(stage - 1)];
    }
    const std::vector<int>& children(int id) const {
        return children_[static_cast<std::size_t>(id)];
    }
    const std::vector<int>& leaves() const { return stage_nodes(num_stages_); }

    double conditional_prob(int id) const;

    // Probability-weighted mean rate vector of one stage.
    std::vector<double> expected_rates(int stage) const;

    // Node ids along the root..leaf path, root first.
    std::vector<int> path_to_root(int leaf) const;

    bool operator==(const ScenarioTree&) const = default;

private:
    int num_bins_ = 0;
    int num_stages_ = 0;
    std::vector<TreeNode> nodes_;
    std::vector<std::vector<int>> stage_nodes_;
    std::vector<std::vector<int>> children_;
};

// Structural sanity of a tree: single root with probability one and zero
// rates, per-stage probability mass 1, children mass matching the parent,
// rates inside [0,1]. Collects problems instead of throwing.
TreeDiagnostics validate_tree(const ScenarioTree& tree);

// Branching factors per stage, e.g. {1,2,2,2,2,2} ("1x2x2x2x2x2").
struct BranchingStructure {
    std::vector<int> factors;

    static BranchingStructure parse(const std::string& text);
    std::string to_string() const;
    int stages() const { return static_cast<int>(factors.size()); }
    long long num_scenarios() const;
    long long num_nodes() const;
    void validate() const; // throws LoadError
};

// Degenerate single-path tree; rates_per_stage[t-1] is the rate vector of
// stage t (stage 1 must be all zero), every node has probability 1.
ScenarioTree make_chain_tree(int num_bins,
                             const std::vector<std::vector<double>>& rates_per_stage);

// Single-scenario tree holding the path through `leaf` (used for WS).
ScenarioTree extract_scenario_path(const ScenarioTree& tree, int leaf);

// Subset of bins (0-based positions); rates vectors are restricted,
// structure and probabilities preserved.
ScenarioTree restrict_tree_to_bins(const ScenarioTree& tree,
                                   const std::vector<int>& bin_positions);

ScenarioTree load_tree(const std::string& path);
void save_tree(const ScenarioTree& tree, const std::string& path);

} // namespace sirp
