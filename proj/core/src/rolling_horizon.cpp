#include "sirp/rolling_horizon.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace sirp {

double next_step_budget(double total, int num_steps, const std::vector<double>& used_so_far) {
    if (num_steps < 1) throw DataError("budget schedule needs at least one step");
    if (!(total > 0.0)) throw DataError("budget schedule needs a positive total");
    const double base = total / num_steps;
    double budget = base;
    for (double used : used_so_far) {
        const double leftover = std::max(0.0, budget - used);
        budget = base + leftover;
    }
    return budget;
}

std::vector<ScenarioTree> subtree_restriction(const ScenarioTree& tree, int first_stage,
                                              int last_stage) {
    if (first_stage < 1 || last_stage > tree.num_stages() || first_stage >= last_stage)
        throw DataError("invalid restriction span [" + std::to_string(first_stage) + "," +
                        std::to_string(last_stage) + "]");
    std::vector<ScenarioTree> out;
    for (int root : tree.stage_nodes(first_stage)) {
        const double root_mass = tree.node(root).prob;
        if (!(root_mass > 0.0))
            throw DataError("stage-" + std::to_string(first_stage) + " node " +
                            std::to_string(root) + " has zero probability");
        std::vector<TreeNode> nodes;
        std::vector<int> frontier = {root};
        std::vector<int> remap(static_cast<std::size_t>(tree.num_nodes()), -1);
        for (int s = first_stage; s <= last_stage && !frontier.empty(); ++s) {
            std::vector<int> next;
            for (int id : frontier) {
                const TreeNode& src = tree.node(id);
                TreeNode nd;
                nd.id = static_cast<int>(nodes.size());
                nd.stage = s - first_stage + 1;
                nd.parent = id == root ? -1 : remap[static_cast<std::size_t>(src.parent)];
                nd.prob = id == root ? 1.0 : src.prob / root_mass;
                nd.rates = id == root ? std::vector<double>(src.rates.size(), 0.0) : src.rates;
                remap[static_cast<std::size_t>(id)] = nd.id;
                nodes.push_back(std::move(nd));
                if (s < last_stage)
                    for (int c : tree.children(id)) next.push_back(c);
            }
            frontier = std::move(next);
        }
        out.emplace_back(tree.num_bins(), std::move(nodes));
    }
    return out;
}

RhResult run_rolling_horizon(const Instance& inst, const ScenarioTree& tree, const RhConfig& cfg) {
    const int T = tree.num_stages();
    const int N = inst.num_bins();
    if (tree.num_bins() != N) throw DataError("tree and instance disagree on the bin count");
    if (T < 3)
        throw DataError("rolling horizon needs at least 3 stages (got " + std::to_string(T) + ")");
    if (cfg.window < 1 || cfg.window > T - 2)
        throw DataError("window must lie in [1, " + std::to_string(T - 2) + "], got " +
                        std::to_string(cfg.window));
    if (!(cfg.time_limit > 0.0)) throw DataError("rolling horizon needs a positive time limit");

    const int V = cfg.variant == ModelVariant::M ? N + 1 : N + 2;
    const int num_steps = T - 1;

    RhResult res;
    StageRouting routing;
    std::vector<std::vector<double>> collected(static_cast<std::size_t>(tree.num_nodes()));
    std::vector<std::vector<double>> inventory(static_cast<std::size_t>(tree.num_nodes()));
    for (int r : tree.stage_nodes(1)) {
        std::vector<double> u0(static_cast<std::size_t>(N), 0.0);
        for (int i = 0; i < N; ++i)
            u0[static_cast<std::size_t>(i)] = inst.bins[static_cast<std::size_t>(i)].capacity_kg *
                                              inst.bins[static_cast<std::size_t>(i)].initial_fill;
        inventory[static_cast<std::size_t>(r)] = std::move(u0);
    }

    std::vector<double> used_log;
    const auto run_start = std::chrono::steady_clock::now();

    for (int k = 1; k <= num_steps; ++k) {
        const int l = std::min(k + cfg.window, T);
        TreeView view = TreeView::span(tree, k, l);
        for (int r : tree.stage_nodes(k))
            view.root_inventory_kg.push_back(inventory[static_cast<std::size_t>(r)]);

        MilpProblem sub = build_model(inst, view, cfg.variant);

        RhStep step;
        step.first_stage = k;
        step.last_stage = l;
        step.budget_seconds = next_step_budget(cfg.time_limit, num_steps, used_log);

        SolverConfig scfg = cfg.solver;
        scfg.time_limit = step.budget_seconds;
        const auto t0 = std::chrono::steady_clock::now();
        MilpSolution sol = solve_milp(sub, scfg);
        step.used_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        step.status = sol.status;
        step.nodes = sol.stats.nodes;
        used_log.push_back(step.used_seconds);

        if (sol.status == SolveStatus::Unbounded)
            throw SolveError("subproblem over stages " + std::to_string(k) + ".." +
                             std::to_string(l) + " is unbounded");
        if (sol.status == SolveStatus::Infeasible) {
            res.steps.push_back(step);
            res.profit = Profit::negative_infinity();
            res.seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - run_start).count();
            return res;
        }
        if (sol.values.empty()) {
            res.steps.push_back(step);
            res.failed = true;
            res.failure = "subproblem over stages " + std::to_string(k) + ".." +
                          std::to_string(l) + " exhausted its budget of " +
                          std::to_string(step.budget_seconds) + "s without an incumbent";
            res.seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - run_start).count();
            return res;
        }
        step.objective = sol.objective;
        res.steps.push_back(step);

        auto value_of = [&](const std::string& name) {
            const int idx = sub.var_index(name);
            if (idx < 0) throw SolveError("subproblem is missing variable " + name);
            return sol.values[static_cast<std::size_t>(idx)];
        };

        // keep the first-stage decisions: day-k routing ...
        std::vector<std::vector<bool>> grid(static_cast<std::size_t>(V),
                                            std::vector<bool>(static_cast<std::size_t>(V), false));
        for (int i = 0; i < V; ++i)
            for (int j = 0; j < V; ++j)
                if (i != j)
                    grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                        value_of(var_x(1, i, j)) > 0.5;
        routing.x.push_back(std::move(grid));
        std::vector<bool> yrow(static_cast<std::size_t>(N), false);
        for (int i = 1; i <= N; ++i)
            yrow[static_cast<std::size_t>(i - 1)] = value_of(var_y(1, i)) > 0.5;
        routing.y.push_back(std::move(yrow));

        // ... and the resulting stage-(k+1) quantities, which seed step k+1
        for (int node : tree.stage_nodes(k + 1)) {
            std::vector<double> wv(static_cast<std::size_t>(N), 0.0);
            std::vector<double> uv(static_cast<std::size_t>(N), 0.0);
            for (int i = 1; i <= N; ++i) {
                wv[static_cast<std::size_t>(i - 1)] = std::max(0.0, value_of(var_w(node, i)));
                uv[static_cast<std::size_t>(i - 1)] = std::max(0.0, value_of(var_u(node, i)));
            }
            collected[static_cast<std::size_t>(node)] = std::move(wv);
            inventory[static_cast<std::size_t>(node)] = std::move(uv);
        }
    }

    res.plan = assemble_plan(inst, tree, cfg.variant, routing, collected, inventory);
    res.profit = Profit::finite(res.plan.totals.expected_profit);
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - run_start).count();
    return res;
}

} // namespace sirp
