#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "sirp/scenario_tree.hpp"
#include "sirp/tree_fit.hpp"
#include "support.hpp"

using namespace sirp;

namespace {

std::string temp_path(const std::string& stem) {
    return (std::filesystem::temp_directory_path() / stem).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("branching structure: parse and round trip") {
    const BranchingStructure s = BranchingStructure::parse("1x2x3");
    CHECK(s.factors == std::vector<int>{1, 2, 3});
    CHECK(s.stages() == 3);
    CHECK(s.num_scenarios() == 6);
    CHECK(s.num_nodes() == 1 + 2 + 6);
    CHECK(s.to_string() == "1x2x3");
    CHECK_THROWS_AS(BranchingStructure::parse("2x2"), LoadError);   // root must be single
    CHECK_THROWS_AS(BranchingStructure::parse("1x0x2"), LoadError);
    CHECK_THROWS_AS(BranchingStructure::parse(""), LoadError);
    CHECK_THROWS_AS(BranchingStructure::parse("1xax2"), LoadError);
}

TEST_CASE("scenario tree: stage bookkeeping and path extraction") {
    const ScenarioTree tree = testsup::make_tree(2, {1, 2, 2}, 31);
    CHECK(tree.num_stages() == 3);
    CHECK(tree.num_nodes() == 7);
    CHECK(tree.stage_nodes(1).size() == 1);
    CHECK(tree.stage_nodes(2).size() == 2);
    CHECK(tree.stage_nodes(3).size() == 4);
    CHECK(tree.leaves().size() == 4);
    CHECK(tree.children(0).size() == 2);

    const auto path = tree.path_to_root(tree.leaves()[2]);
    REQUIRE(path.size() == 3);
    CHECK(path[0] == 0);
    CHECK(tree.node(path[1]).stage == 2);
    CHECK(path[2] == tree.leaves()[2]);

    // conditional probabilities: mass of a child over the parent's
    for (int id = 1; id < tree.num_nodes(); ++id) {
        const TreeNode& nd = tree.node(id);
        CHECK(tree.conditional_prob(id) ==
              doctest::Approx(nd.prob / tree.node(nd.parent).prob).epsilon(1e-12));
    }
    CHECK(tree.conditional_prob(0) == 1.0);
}

TEST_CASE("scenario tree: expected rates are the probability mix") {
    const ScenarioTree tree = testsup::make_tree(2, {1, 2}, 8);
    const auto er = tree.expected_rates(2);
    REQUIRE(er.size() == 2);
    for (int i = 0; i < 2; ++i) {
        double mix = 0.0;
        for (int id : tree.stage_nodes(2))
            mix += tree.node(id).prob * tree.node(id).rates[static_cast<std::size_t>(i)];
        CHECK(er[static_cast<std::size_t>(i)] == doctest::Approx(mix).epsilon(1e-12));
    }
}

TEST_CASE("validate_tree: collects probability-mass and rate violations") {
    const ScenarioTree good = testsup::make_tree(2, {1, 2, 2}, 5);
    CHECK(validate_tree(good).ok());

    std::vector<TreeNode> nodes = good.nodes();
    nodes[1].prob = 0.9; // stage mass and sibling mass both break
    const ScenarioTree bad(2, nodes);
    const TreeDiagnostics diag = validate_tree(bad);
    CHECK(!diag.ok());
    bool stage_issue = false;
    for (const TreeIssue& is : diag.issues)
        if (is.code == "stage_mass") stage_issue = true;
    CHECK(stage_issue);

    std::vector<TreeNode> nodes2 = good.nodes();
    nodes2[3].rates[0] = 1.5;
    CHECK(!validate_tree(ScenarioTree(2, nodes2)).ok());
}

TEST_CASE("make_chain_tree and extract_scenario_path") {
    const ScenarioTree chain = make_chain_tree(2, {{0.0, 0.0}, {0.1, 0.2}, {0.3, 0.4}});
    CHECK(chain.num_stages() == 3);
    CHECK(chain.num_nodes() == 3);
    for (const TreeNode& nd : chain.nodes()) CHECK(nd.prob == 1.0);
    CHECK(validate_tree(chain).ok());

    const ScenarioTree tree = testsup::make_tree(2, {1, 2, 2}, 77);
    const int leaf = tree.leaves()[1];
    const ScenarioTree path = extract_scenario_path(tree, leaf);
    CHECK(path.num_stages() == 3);
    CHECK(path.num_nodes() == 3);
    CHECK(validate_tree(path).ok());
    // the path reproduces the rates along root..leaf
    const auto ids = tree.path_to_root(leaf);
    for (int s = 2; s <= 3; ++s)
        CHECK(path.node(s - 1).rates ==
              tree.node(ids[static_cast<std::size_t>(s - 1)]).rates);
}

TEST_CASE("restrict_tree_to_bins keeps structure, probabilities and order") {
    const ScenarioTree tree = testsup::make_tree(4, {1, 2, 2}, 13);
    const ScenarioTree sub = restrict_tree_to_bins(tree, {0, 2});
    CHECK(sub.num_bins() == 2);
    CHECK(sub.num_nodes() == tree.num_nodes());
    for (int id = 0; id < sub.num_nodes(); ++id) {
        CHECK(sub.node(id).prob == tree.node(id).prob);
        REQUIRE(sub.node(id).rates.size() == 2);
        CHECK(sub.node(id).rates[0] == tree.node(id).rates[0]);
        CHECK(sub.node(id).rates[1] == tree.node(id).rates[2]);
    }
    CHECK(validate_tree(sub).ok());
    CHECK_THROWS_AS(restrict_tree_to_bins(tree, {0, 4}), DataError);
}

TEST_CASE("tree json: round trip is byte identical") {
    const ScenarioTree tree = testsup::make_tree(3, {1, 2, 2}, 101);
    const std::string p1 = temp_path("sirp_tree_rt1.json");
    const std::string p2 = temp_path("sirp_tree_rt2.json");
    save_tree(tree, p1);
    const ScenarioTree back = load_tree(p1);
    CHECK(back == tree);
    save_tree(back, p2);
    CHECK(slurp(p1) == slurp(p2));
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
}

TEST_CASE("fit_tree: structure, validity and determinism") {
    const TrajectoryBank bank = testsup::make_bank(4, 6, 14, 71);
    const BranchingStructure structure = BranchingStructure::parse("1x2x2x2x2x2");
    const FitResult a = fit_tree(bank, structure, 2000, 9);
    CHECK(a.tree.num_nodes() == 63);
    CHECK(a.tree.num_stages() == 6);
    CHECK(a.tree.leaves().size() == 32);
    CHECK(validate_tree(a.tree).ok());
    CHECK(a.iterations == 2000);

    const FitResult b = fit_tree(bank, structure, 2000, 9);
    CHECK(b.tree == a.tree); // same seed, same tree, bit for bit

    const FitResult c = fit_tree(bank, structure, 2000, 10);
    CHECK(c.tree != a.tree);
}

TEST_CASE("fit_tree: branch probabilities track cluster frequencies") {
    // four flat trajectories far apart with zero in-cluster spread: the
    // kernel bandwidths vanish, sampling reduces to uniform draws over the
    // bank and the fitted stage-2 probabilities approach the cluster
    // shares 0.28 / 0.42 / 0.24 / 0.06
    const int counts[4] = {14, 21, 12, 3};
    const double levels[4] = {0.1, 0.35, 0.6, 0.85};
    std::vector<std::vector<std::vector<double>>> obs;
    for (int c = 0; c < 4; ++c)
        for (int k = 0; k < counts[c]; ++k)
            obs.push_back({{0.0}, {levels[c]}});
    const TrajectoryBank bank(1, 2, std::move(obs));

    const FitResult fr = fit_tree(bank, BranchingStructure::parse("1x4"), 10000, 4);
    REQUIRE(fr.tree.stage_nodes(2).size() == 4);
    std::map<double, double> prob_by_state; // state value -> fitted mass
    for (int id : fr.tree.stage_nodes(2))
        prob_by_state[fr.tree.node(id).rates[0]] += fr.tree.node(id).prob;
    REQUIRE(prob_by_state.size() == 4);
    const double want[4] = {0.28, 0.42, 0.24, 0.06};
    int k = 0;
    for (const auto& [state, prob] : prob_by_state) {
        CHECK(state == doctest::Approx(levels[k]).epsilon(1e-9));
        CHECK(prob == doctest::Approx(want[k]).epsilon(0.15)); // binomial noise
        ++k;
    }
}

TEST_CASE("stability_batch aggregates per-structure run statistics") {
    const TrajectoryBank bank = testsup::make_bank(2, 3, 8, 55);
    const std::vector<BranchingStructure> structures = {
        BranchingStructure::parse("1x2x2"), BranchingStructure::parse("1x3x3")};
    int calls = 0;
    const SolveHook hook = [&](const ScenarioTree& tree) {
        ++calls;
        StabilityOutcome out;
        out.ok = tree.leaves().size() != 9 || calls % 2 == 0; // fail half of 1x3x3
        out.profit = static_cast<double>(tree.num_nodes());
        out.collected_kg = 1.0;
        out.distance_km = 2.0;
        out.cpu_seconds = 0.1;
        return out;
    };
    const StabilityTable table = stability_batch(bank, structures, 4, hook, 21, 200);
    REQUIRE(table.rows.size() == 2);
    CHECK(calls == 8);
    CHECK(table.rows[0].structure == "1x2x2");
    CHECK(table.rows[0].scenarios == 4);
    CHECK(table.rows[0].runs == 4);
    CHECK(table.rows[0].failures == 0);
    CHECK(table.rows[0].mean_profit == doctest::Approx(7.0)); // 7 nodes each
    CHECK(table.rows[0].std_profit == doctest::Approx(0.0));
    CHECK(table.rows[0].multistage_distance == "unavailable");
    CHECK(table.rows[1].scenarios == 9);
    CHECK(table.rows[1].failures == 2);
    CHECK(table.rows[1].runs == 4);
}
