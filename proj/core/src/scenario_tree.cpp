#include "sirp/scenario_tree.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sirp {

ScenarioTree::ScenarioTree(int num_bins, std::vector<TreeNode> nodes)
    : num_bins_(num_bins), nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw DataError("scenario tree has no nodes");
    num_stages_ = 0;
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        const TreeNode& n = nodes_[k];
        if (n.id != static_cast<int>(k))
            throw DataError("tree node ids must be dense and ordered");
        if (n.parent >= n.id)
            throw DataError("tree parents must precede children");
        num_stages_ = std::max(num_stages_, n.stage);
    }
    stage_nodes_.assign(static_cast<std::size_t>(num_stages_), {});
    children_.assign(nodes_.size(), {});
    for (const TreeNode& n : nodes_) {
        if (n.stage < 1 || n.stage > num_stages_)
            throw DataError("tree node with bad stage");
        stage_nodes_[static_cast<std::size_t>(n.stage - 1)].push_back(n.id);
        if (n.parent >= 0) children_[static_cast<std::size_t>(n.parent)].push_back(n.id);
    }
}

double ScenarioTree::conditional_prob(int id) const {
    const TreeNode& n = node(id);
    if (n.parent < 0) return n.prob;
    const double pp = node(n.parent).prob;
    return pp > 0.0 ? n.prob / pp : 0.0;
}

std::vector<double> ScenarioTree::expected_rates(int stage) const {
    std::vector<double> mean(static_cast<std::size_t>(num_bins_), 0.0);
    for (int id : stage_nodes(stage)) {
        const TreeNode& n = node(id);
        for (int i = 0; i < num_bins_; ++i)
            mean[static_cast<std::size_t>(i)] +=
                n.prob * n.rates[static_cast<std::size_t>(i)];
    }
    return mean;
}

std::vector<int> ScenarioTree::path_to_root(int leaf) const {
    std::vector<int> path;
    for (int id = leaf; id >= 0; id = node(id).parent) path.push_back(id);
    std::reverse(path.begin(), path.end());
    return path;
}

TreeDiagnostics validate_tree(const ScenarioTree& tree) {
    TreeDiagnostics diag;
    auto add = [&diag](std::string code, int node, std::string msg) {
        diag.issues.push_back({std::move(code), node, std::move(msg)});
    };

    const std::vector<int>& roots = tree.stage_nodes(1);
    if (roots.size() != 1) {
        add("root_count", -1,
            "expected exactly one stage-1 node, found " + std::to_string(roots.size()));
    } else {
        const TreeNode& root = tree.node(roots.front());
        if (std::fabs(root.prob - 1.0) > 1e-12)
            add("root_prob", root.id, "root probability must be 1");
        for (double r : root.rates)
            if (r != 0.0) {
                add("root_rates", root.id, "root rates must be zero");
                break;
            }
    }

    for (const TreeNode& n : tree.nodes()) {
        if (static_cast<int>(n.rates.size()) != tree.num_bins())
            add("rate_dim", n.id, "rate vector has wrong dimension");
        for (double r : n.rates)
            if (r < 0.0 || r > 1.0) {
                add("rate_range", n.id, "rate outside [0,1]");
                break;
            }
        if (n.prob < -1e-12 || n.prob > 1.0 + 1e-12)
            add("prob_range", n.id, "probability outside [0,1]");
        if (n.stage > 1 && n.parent < 0)
            add("orphan", n.id, "non-root node without parent");
        if (n.parent >= 0 && tree.node(n.parent).stage != n.stage - 1)
            add("stage_link", n.id, "parent is not one stage earlier");
    }

    for (int t = 1; t <= tree.num_stages(); ++t) {
        double mass = 0.0;
        for (int id : tree.stage_nodes(t)) mass += tree.node(id).prob;
        if (std::fabs(mass - 1.0) > 1e-9)
            add("stage_mass", -1,
                "stage " + std::to_string(t) + " mass " + std::to_string(mass));
    }

    for (const TreeNode& n : tree.nodes()) {
        const std::vector<int>& kids = tree.children(n.id);
        if (kids.empty()) {
            if (n.stage != tree.num_stages())
                add("short_branch", n.id, "non-leaf node without children");
            continue;
        }
        double mass = 0.0;
        for (int c : kids) mass += tree.node(c).prob;
        if (std::fabs(mass - n.prob) > 1e-9)
            add("child_mass", n.id, "children mass does not match parent");
    }
    return diag;
}

BranchingStructure BranchingStructure::parse(const std::string& text) {
    BranchingStructure s;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, 'x')) {
        try {
            s.factors.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw LoadError("bad branching structure '" + text + "'");
        }
    }
    s.validate();
    return s;
}

std::string BranchingStructure::to_string() const {
    std::string out;
    for (std::size_t k = 0; k < factors.size(); ++k) {
        if (k) out += 'x';
        out += std::to_string(factors[k]);
    }
    return out;
}

long long BranchingStructure::num_scenarios() const {
    long long n = 1;
    for (int f : factors) n *= f;
    return n;
}

long long BranchingStructure::num_nodes() const {
    long long total = 0, level = 1;
    for (int f : factors) {
        level *= f;
        total += level;
    }
    return total;
}

void BranchingStructure::validate() const {
    if (factors.empty()) throw LoadError("empty branching structure");
    if (factors.front() != 1)
        throw LoadError("branching structure must start with 1 (single root)");
    for (int f : factors)
        if (f < 1) throw LoadError("branching factors must be >= 1");
}

ScenarioTree make_chain_tree(int num_bins,
                             const std::vector<std::vector<double>>& rates_per_stage) {
    if (rates_per_stage.empty()) throw DataError("chain tree needs at least one stage");
    std::vector<TreeNode> nodes;
    for (std::size_t t = 0; t < rates_per_stage.size(); ++t) {
        TreeNode n;
        n.id = static_cast<int>(t);
        n.stage = static_cast<int>(t) + 1;
        n.parent = static_cast<int>(t) - 1;
        n.prob = 1.0;
        n.rates = rates_per_stage[t];
        if (static_cast<int>(n.rates.size()) != num_bins)
            throw DataError("chain tree rate vector has wrong dimension");
        nodes.push_back(std::move(n));
    }
    for (double r : nodes.front().rates)
        if (r != 0.0) throw DataError("stage-1 rates must be zero");
    return ScenarioTree(num_bins, std::move(nodes));
}

ScenarioTree extract_scenario_path(const ScenarioTree& tree, int leaf) {
    if (leaf < 0 || leaf >= tree.num_nodes() ||
        tree.node(leaf).stage != tree.num_stages())
        throw DataError("extract_scenario_path: not a leaf node");
    std::vector<std::vector<double>> rates;
    for (int id : tree.path_to_root(leaf)) rates.push_back(tree.node(id).rates);
    return make_chain_tree(tree.num_bins(), rates);
}

ScenarioTree restrict_tree_to_bins(const ScenarioTree& tree,
                                   const std::vector<int>& bin_positions) {
    std::vector<TreeNode> nodes = tree.nodes();
    for (TreeNode& n : nodes) {
        std::vector<double> sub;
        sub.reserve(bin_positions.size());
        for (int pos : bin_positions) {
            if (pos < 0 || pos >= tree.num_bins())
                throw DataError("restrict_tree_to_bins: bin position out of range");
            sub.push_back(n.rates[static_cast<std::size_t>(pos)]);
        }
        n.rates = std::move(sub);
    }
    return ScenarioTree(static_cast<int>(bin_positions.size()), std::move(nodes));
}

ScenarioTree load_tree(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open tree file " + path);
    nlohmann::ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw LoadError("tree " + path + ": " + e.what());
    }
    if (!j.contains("schema_version") || j["schema_version"].get<int>() != 1)
        throw LoadError("tree " + path + ": unsupported schema_version");

    const int bins = j.at("bins").get<int>();
    std::vector<TreeNode> nodes;
    for (const auto& jn : j.at("nodes")) {
        TreeNode n;
        n.id = jn.at("id").get<int>();
        n.stage = jn.at("stage").get<int>();
        n.parent = jn.at("parent").get<int>();
        n.prob = jn.at("probability").get<double>();
        n.rates = jn.at("rates").get<std::vector<double>>();
        nodes.push_back(std::move(n));
    }
    ScenarioTree tree(bins, std::move(nodes));
    if (j.contains("stages") && j["stages"].get<int>() != tree.num_stages())
        throw LoadError("tree " + path + ": stage count does not match nodes");
    return tree;
}

void save_tree(const ScenarioTree& tree, const std::string& path) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["stages"] = tree.num_stages();
    j["bins"] = tree.num_bins();
    j["nodes"] = nlohmann::ordered_json::array();
    for (const TreeNode& n : tree.nodes()) {
        j["nodes"].push_back({{"id", n.id},
                              {"stage", n.stage},
                              {"parent", n.parent},
                              {"probability", n.prob},
                              {"rates", n.rates}});
    }
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write " + path);
    out << j.dump(2) << '\n';
}

} // namespace sirp
