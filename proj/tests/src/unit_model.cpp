#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "sirp/analytic.hpp"
#include "sirp/milp.hpp"
#include "sirp/model_build.hpp"
#include "sirp/plan.hpp"
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

struct SizeRow {
    int bins;
    ModelSizes m, msym;
};

// frozen dimension table for the 63-node tree (1x2x2x2x2x2, horizon 6)
const SizeRow kSizeTable[] = {
    {9, {495, 6705, 1220, 16182}, {595, 7263, 8052, 6138}},
    {10, {600, 8070, 1355, 19840}, {710, 8690, 9546, 7440}},
    {11, {715, 9559, 1490, 23870}, {835, 10241, 11164, 8866}},
    {50, {13000, 164350, 6755, 471200}, {13510, 167450, 170986, 161200}},
};

} // namespace

TEST_CASE("variable names follow the model notation") {
    CHECK(var_x(2, 0, 3) == "x_2_0_3");
    CHECK(var_y(1, 4) == "y_1_4");
    CHECK(var_f(17, 3, 0) == "f_17_3_0");
    CHECK(var_w(5, 2) == "w_5_2");
    CHECK(var_u(5, 2) == "u_5_2");
}

TEST_CASE("parse_variant accepts both spellings and rejects junk") {
    CHECK(parse_variant("M") == ModelVariant::M);
    CHECK(parse_variant("Msym") == ModelVariant::Msym);
    CHECK(parse_variant("msym") == ModelVariant::Msym);
    CHECK_THROWS_AS(parse_variant("Q"), DataError);
    CHECK(std::string(to_string(ModelVariant::Msym)) == "Msym");
}

TEST_CASE("model sizes reproduce the frozen dimension table") {
    for (const SizeRow& row : kSizeTable) {
        const Instance inst = testsup::make_instance(row.bins, 6, 1000 + row.bins);
        const ScenarioTree tree = testsup::make_tree(row.bins, {1, 2, 2, 2, 2, 2}, 2000 + row.bins);
        const MilpProblem pm = build_model(inst, TreeView::full(tree), ModelVariant::M);
        const ModelSizes sm = model_sizes(pm);
        CHECK(sm.binaries == row.m.binaries);
        CHECK(sm.continuous == row.m.continuous);
        CHECK(sm.equalities == row.m.equalities);
        CHECK(sm.inequalities == row.m.inequalities);

        const MilpProblem ps = build_model(inst, TreeView::full(tree), ModelVariant::Msym);
        const ModelSizes ss = model_sizes(ps);
        CHECK(ss.binaries == row.msym.binaries);
        CHECK(ss.continuous == row.msym.continuous);
        CHECK(ss.equalities == row.msym.equalities);
        CHECK(ss.inequalities == row.msym.inequalities);
    }
}

TEST_CASE("symmetric builder rejects asymmetric distances") {
    Instance inst = testsup::make_instance(2, 3, 4);
    std::vector<double> d = inst.distances.raw();
    d[1] += 0.25;
    inst.distances = DistanceMatrix(3, std::move(d));
    const ScenarioTree tree = testsup::make_tree(2, {1, 2, 2}, 4);
    CHECK_THROWS_AS(build_model(inst, TreeView::full(tree), ModelVariant::Msym), BuildError);
    // the asymmetric variant does not care
    CHECK(build_model(inst, TreeView::full(tree), ModelVariant::M).num_vars() > 0);
}

TEST_CASE("closed form matches the hand-computed zero-cost profit") {
    Instance inst = testsup::make_instance(2, 2, 1, {.travel_cost = 0.0});
    inst.bins[0].initial_fill = 0.2;
    inst.bins[1].initial_fill = 0.4;
    std::vector<TreeNode> nodes;
    nodes.push_back({0, 1, -1, 1.0, {0.0, 0.0}});
    nodes.push_back({1, 2, 0, 0.6, {0.1, 0.3}});
    nodes.push_back({2, 2, 0, 0.4, {0.5, 0.0}});
    const ScenarioTree tree(2, nodes);

    // R * sum_i E_i B (S_i + sum_n pi_n a_i_n)
    //   = 0.3 * 75 * [(0.2 + 0.06 + 0.2) + (0.4 + 0.18)] = 23.4
    CHECK(closed_form_profit_C0(inst, tree) == doctest::Approx(23.4).epsilon(1e-12));
    CHECK(c0_closed_form_applies(inst, tree));

    const MilpSolution s = solve_milp(build_model(inst, TreeView::full(tree), ModelVariant::M));
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective == doctest::Approx(23.4).epsilon(1e-9));

    Instance overflow = inst;
    overflow.bins[0].initial_fill = 0.9; // 0.9 + 0.5 > 1 on one path
    CHECK(!c0_closed_form_applies(overflow, tree));

    Instance big = inst;
    big.params.vehicle_capacity_kg = 50.0; // bin (75 kg) no longer fits the truck
    CHECK(!c0_closed_form_applies(big, tree));
}

TEST_CASE("asymmetric and symmetric formulations agree on symmetric data") {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        const Instance inst = testsup::make_instance(3, 3, seed, {.vehicle_q = 120.0});
        const ScenarioTree tree = testsup::make_tree(3, {1, 2, 2}, seed + 100);

        const MilpProblem pm = build_model(inst, TreeView::full(tree), ModelVariant::M);
        const MilpProblem ps = build_model(inst, TreeView::full(tree), ModelVariant::Msym);
        const MilpSolution sm = solve_milp(pm);
        const MilpSolution ss = solve_milp(ps);
        REQUIRE(sm.status == SolveStatus::Optimal);
        REQUIRE(ss.status == SolveStatus::Optimal);
        CHECK(sm.objective == doctest::Approx(ss.objective).epsilon(1e-6));

        const CollectionPlan plm = decode_solution(pm, sm.values, inst, tree, ModelVariant::M);
        const CollectionPlan pls = decode_solution(ps, ss.values, inst, tree, ModelVariant::Msym);
        REQUIRE(plm.days.size() == pls.days.size());
        for (std::size_t t = 0; t < plm.days.size(); ++t)
            CHECK(plm.days[t].visited == pls.days[t].visited);
        CHECK(plm.totals.expected_profit ==
              doctest::Approx(pls.totals.expected_profit).epsilon(1e-6));
        CHECK(plm.totals.expected_collected_kg ==
              doctest::Approx(pls.totals.expected_collected_kg).epsilon(1e-6));
    }
}

TEST_CASE("two-commodity pairing carries Q on every active edge") {
    const Instance inst = testsup::make_instance(3, 3, 21, {.vehicle_q = 120.0});
    const ScenarioTree tree = testsup::make_tree(3, {1, 2, 2}, 22);
    const MilpProblem p = build_model(inst, TreeView::full(tree), ModelVariant::Msym);
    const MilpSolution s = solve_milp(p);
    REQUIRE(s.status == SolveStatus::Optimal);

    const int N = inst.num_bins();
    const int D2 = N + 1;
    const double Q = inst.params.vehicle_capacity_kg;
    auto val = [&](const std::string& name) {
        const int j = p.var_index(name);
        return j < 0 ? -1.0 : s.values[static_cast<std::size_t>(j)];
    };

    int active_edges = 0;
    for (int id = 0; id < tree.num_nodes(); ++id) {
        const TreeNode& nd = tree.node(id);
        if (nd.stage == 1) continue;
        const int t = nd.stage - 1;
        for (int i = 0; i <= D2; ++i)
            for (int j = 0; j <= D2; ++j) {
                if (i == j) continue;
                const double x = val(var_x(t, i, j));
                REQUIRE(x >= -1e-9);
                double flow = 0.0;
                const double fij = val(var_f(id, i, j));
                const double fji = val(var_f(id, j, i));
                if (fij >= 0.0) flow += fij;
                if (fji >= 0.0) flow += fji;
                if (x > 0.5) {
                    ++active_edges;
                    CHECK(flow == doctest::Approx(Q).epsilon(1e-6));
                } else {
                    CHECK(flow == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
                }
            }
    }
    CHECK(active_edges > 0);
}

TEST_CASE("decoded plans reproduce the solver objective and round trip as json") {
    const Instance inst = testsup::make_instance(2, 3, 77);
    const ScenarioTree tree = testsup::make_tree(2, {1, 2, 2}, 78);
    const MilpProblem p = build_model(inst, TreeView::full(tree), ModelVariant::M);
    const MilpSolution s = solve_milp(p);
    REQUIRE(s.status == SolveStatus::Optimal);

    const CollectionPlan plan = decode_solution(p, s.values, inst, tree, ModelVariant::M);
    CHECK(plan.totals.expected_profit == doctest::Approx(s.objective).epsilon(1e-7));

    const PlanTotals re = recompute_totals(plan, inst);
    CHECK(re.expected_profit == doctest::Approx(plan.totals.expected_profit).epsilon(1e-12));
    CHECK(re.expected_collected_kg ==
          doctest::Approx(plan.totals.expected_collected_kg).epsilon(1e-12));

    const std::string p1 = temp_path("sirp_plan_rt1.json");
    const std::string p2 = temp_path("sirp_plan_rt2.json");
    save_plan(plan, p1);
    const CollectionPlan back = load_plan(p1);
    CHECK(back.totals == plan.totals);
    CHECK(back.days.size() == plan.days.size());
    save_plan(back, p2);
    CHECK(slurp(p1) == slurp(p2));
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
}

TEST_CASE("assemble_plan rejects routes that never touch the depot") {
    const Instance inst = testsup::make_instance(2, 2, 5);
    const ScenarioTree tree = testsup::make_tree(2, {1, 2}, 5);
    StageRouting routing;
    // day 1, vertices {depot,1,2}: a 1<->2 cycle with no depot arc
    routing.x = {std::vector<std::vector<bool>>(3, std::vector<bool>(3, false))};
    routing.x[0][1][2] = routing.x[0][2][1] = true;
    routing.y = {{true, true}};
    const std::vector<std::vector<double>> collected = {{}, {10.0, 10.0}, {10.0, 10.0}};
    const std::vector<std::vector<double>> inventory = {
        {5.0, 5.0}, {0.0, 0.0}, {0.0, 0.0}};
    CHECK_THROWS_AS(
        assemble_plan(inst, tree, ModelVariant::M, routing, collected, inventory),
        DataError);
}

TEST_CASE("tree views can window a stage span with handed-over inventories") {
    const Instance inst = testsup::make_instance(2, 4, 61);
    const ScenarioTree tree = testsup::make_tree(2, {1, 2, 1, 2}, 62);
    const TreeView view = TreeView::span(tree, 2, 3);
    CHECK(view.num_stages() == 2);
    CHECK(view.stages[0].size() == 2); // both stage-2 nodes become roots
    const MilpProblem p = build_model_M(inst, view);
    // decision stage 1 of the view exists, stage 2 does not
    CHECK(p.var_index(var_y(1, 1)) >= 0);
    CHECK(p.var_index(var_y(2, 1)) < 0);
}
