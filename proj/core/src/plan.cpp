#include "sirp/plan.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "json.hpp"

namespace sirp {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string itos(int v) { return std::to_string(v); }

double route_distance(const std::vector<int>& route, const DistanceMatrix& d) {
    if (route.empty()) return 0.0;
    double total = d.at(0, route.front());
    for (std::size_t k = 0; k + 1 < route.size(); ++k) total += d.at(route[k], route[k + 1]);
    total += d.at(route.back(), 0);
    return total;
}

// directed arcs, tours through vertex 0
std::vector<std::vector<int>> extract_routes_m(const std::vector<std::vector<bool>>& x, int N,
                                               int day) {
    std::vector<int> succ(static_cast<std::size_t>(N) + 1, -1);
    for (int i = 1; i <= N; ++i)
        for (int j = 0; j <= N; ++j) {
            if (i == j || !x[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) continue;
            if (succ[static_cast<std::size_t>(i)] != -1)
                throw DataError("day " + itos(day) + ": bin " + itos(i) +
                                " has two outgoing arcs");
            succ[static_cast<std::size_t>(i)] = j;
        }

    std::vector<std::vector<int>> routes;
    std::vector<bool> used(static_cast<std::size_t>(N) + 1, false);
    for (int j = 1; j <= N; ++j) {
        if (!x[0][static_cast<std::size_t>(j)]) continue;
        std::vector<int> route;
        int cur = j;
        while (cur != 0) {
            if (used[static_cast<std::size_t>(cur)])
                throw DataError("day " + itos(day) + ": bin " + itos(cur) +
                                " appears on two routes");
            used[static_cast<std::size_t>(cur)] = true;
            route.push_back(cur);
            const int nxt = succ[static_cast<std::size_t>(cur)];
            if (nxt < 0)
                throw DataError("day " + itos(day) + ": route strands at bin " + itos(cur));
            cur = nxt;
        }
        routes.push_back(std::move(route));
    }
    for (int i = 1; i <= N; ++i)
        if (succ[static_cast<std::size_t>(i)] >= 0 && !used[static_cast<std::size_t>(i)])
            throw DataError("day " + itos(day) + ": bin " + itos(i) +
                            " lies on a tour that avoids the depot");
    return routes;
}

// undirected edges over vertices 0..N+1; chains between the two depot
// copies (either copy may close a route)
std::vector<std::vector<int>> extract_routes_msym(const std::vector<std::vector<bool>>& x, int N,
                                                  int day) {
    const int V = N + 2;
    std::vector<std::vector<bool>> edge(static_cast<std::size_t>(V),
                                        std::vector<bool>(static_cast<std::size_t>(V), false));
    for (int i = 0; i < V; ++i)
        for (int j = i + 1; j < V; ++j) {
            const bool a = x[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            const bool b = x[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
            if (a != b)
                throw DataError("day " + itos(day) + ": arc values of edge {" + itos(i) + "," +
                                itos(j) + "} disagree");
            edge[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = a;
            edge[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = a;
        }

    auto unused_neighbors = [&](int v) {
        std::vector<int> out;
        for (int j = 0; j < V; ++j)
            if (edge[static_cast<std::size_t>(v)][static_cast<std::size_t>(j)]) out.push_back(j);
        return out;
    };
    auto consume = [&](int a, int b) {
        edge[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = false;
        edge[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = false;
    };

    std::vector<std::vector<int>> routes;
    for (int start : {0, V - 1}) {
        for (;;) {
            const std::vector<int> nb = unused_neighbors(start);
            if (nb.empty()) break;
            int cur = nb.front();
            consume(start, cur);
            std::vector<int> route;
            while (cur != 0 && cur != V - 1) {
                route.push_back(cur);
                const std::vector<int> nxt = unused_neighbors(cur);
                if (nxt.size() != 1)
                    throw DataError("day " + itos(day) + ": bin " + itos(cur) + " has " +
                                    itos(static_cast<int>(nxt.size()) + 1) +
                                    " incident edges on its route");
                consume(cur, nxt.front());
                cur = nxt.front();
            }
            if (route.empty())
                throw DataError("day " + itos(day) + ": empty depot-to-depot route");
            routes.push_back(std::move(route));
        }
    }
    for (int i = 0; i < V; ++i)
        for (int j = i + 1; j < V; ++j)
            if (edge[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
                throw DataError("day " + itos(day) + ": leftover edge {" + itos(i) + "," +
                                itos(j) + "} forms a tour that avoids the depot");
    return routes;
}

} // namespace

CollectionPlan assemble_plan(const Instance& inst, const ScenarioTree& tree,
                             ModelVariant variant, const StageRouting& routing,
                             const std::vector<std::vector<double>>& collected_by_node,
                             const std::vector<std::vector<double>>& inventory_by_node) {
    const int N = inst.num_bins();
    const int T = tree.num_stages();
    if (static_cast<int>(routing.x.size()) != T - 1 ||
        static_cast<int>(routing.y.size()) != T - 1)
        throw DataError("routing grids cover " + itos(static_cast<int>(routing.x.size())) +
                        " days, expected " + itos(T - 1));
    if (static_cast<int>(collected_by_node.size()) != tree.num_nodes() ||
        static_cast<int>(inventory_by_node.size()) != tree.num_nodes())
        throw DataError("per-node quantities do not match the tree size");

    CollectionPlan plan;
    plan.variant = to_string(variant);
    plan.num_bins = N;
    plan.horizon = T;

    const int V = variant == ModelVariant::M ? N + 1 : N + 2;
    for (int t = 1; t < T; ++t) {
        const auto& grid = routing.x[static_cast<std::size_t>(t - 1)];
        if (static_cast<int>(grid.size()) != V)
            throw DataError("day " + itos(t) + ": arc grid has wrong vertex count");
        DayPlan day;
        day.day = t;
        day.routes = variant == ModelVariant::M ? extract_routes_m(grid, N, t)
                                                : extract_routes_msym(grid, N, t);
        for (const auto& r : day.routes) day.distance_km += route_distance(r, inst.distances);

        std::set<int> on_routes;
        for (const auto& r : day.routes)
            for (int b : r)
                on_routes.insert(b);
        for (int i = 1; i <= N; ++i)
            if (routing.y[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(i - 1)])
                day.visited.push_back(i);
        if (std::set<int>(day.visited.begin(), day.visited.end()) != on_routes)
            throw DataError("day " + itos(t) + ": visit flags disagree with the routes");
        plan.days.push_back(std::move(day));
    }

    for (int id = 0; id < tree.num_nodes(); ++id) {
        const TreeNode& nd = tree.node(id);
        NodeQuantities q;
        q.node = id;
        q.stage = nd.stage;
        q.probability = nd.prob;
        q.collected_kg = collected_by_node[static_cast<std::size_t>(id)];
        q.inventory_kg = inventory_by_node[static_cast<std::size_t>(id)];
        if (nd.stage == 1 && !q.collected_kg.empty())
            throw DataError("root node " + itos(id) + " carries collected quantities");
        if (nd.stage > 1 && static_cast<int>(q.collected_kg.size()) != N)
            throw DataError("node " + itos(id) + ": collected vector has wrong size");
        if (static_cast<int>(q.inventory_kg.size()) != N)
            throw DataError("node " + itos(id) + ": inventory vector has wrong size");
        plan.nodes.push_back(std::move(q));
    }

    plan.totals = recompute_totals(plan, inst);
    return plan;
}

CollectionPlan decode_solution(const MilpProblem& p, const std::vector<double>& values,
                               const Instance& inst, const ScenarioTree& tree,
                               ModelVariant variant) {
    if (static_cast<int>(values.size()) != p.num_vars())
        throw DataError("solution vector does not match the model");
    const int N = inst.num_bins();
    const int T = tree.num_stages();
    const int V = variant == ModelVariant::M ? N + 1 : N + 2;

    auto value_of = [&](const std::string& name) {
        const int idx = p.var_index(name);
        if (idx < 0) throw DataError("model is missing variable " + name);
        return values[static_cast<std::size_t>(idx)];
    };

    StageRouting routing;
    for (int t = 1; t < T; ++t) {
        std::vector<std::vector<bool>> grid(static_cast<std::size_t>(V),
                                            std::vector<bool>(static_cast<std::size_t>(V), false));
        for (int i = 0; i < V; ++i)
            for (int j = 0; j < V; ++j) {
                if (i == j) continue;
                grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    value_of(var_x(t, i, j)) > 0.5;
            }
        routing.x.push_back(std::move(grid));
        std::vector<bool> yrow(static_cast<std::size_t>(N), false);
        for (int i = 1; i <= N; ++i)
            yrow[static_cast<std::size_t>(i - 1)] = value_of(var_y(t, i)) > 0.5;
        routing.y.push_back(std::move(yrow));
    }

    std::vector<std::vector<double>> w(static_cast<std::size_t>(tree.num_nodes()));
    std::vector<std::vector<double>> u(static_cast<std::size_t>(tree.num_nodes()));
    for (int id = 0; id < tree.num_nodes(); ++id) {
        const bool root = tree.node(id).stage == 1;
        for (int i = 1; i <= N; ++i) {
            if (!root) w[static_cast<std::size_t>(id)].push_back(value_of(var_w(id, i)));
            u[static_cast<std::size_t>(id)].push_back(value_of(var_u(id, i)));
        }
    }
    return assemble_plan(inst, tree, variant, routing, w, u);
}

PlanTotals recompute_totals(const CollectionPlan& plan, const Instance& inst) {
    PlanTotals t;
    for (const DayPlan& d : plan.days)
        for (const auto& r : d.routes) t.total_distance_km += route_distance(r, inst.distances);
    for (const NodeQuantities& q : plan.nodes)
        for (double wkg : q.collected_kg) t.expected_collected_kg += q.probability * wkg;
    t.expected_profit = inst.params.selling_price_per_kg * t.expected_collected_kg -
                        inst.params.travel_cost_per_km * t.total_distance_km;
    t.collected_per_km =
        t.total_distance_km > 0.0 ? t.expected_collected_kg / t.total_distance_km : 0.0;
    return t;
}

void save_plan(const CollectionPlan& plan, const std::string& path) {
    ordered_json j;
    j["schema_version"] = 1;
    j["variant"] = plan.variant;
    j["num_bins"] = plan.num_bins;
    j["horizon"] = plan.horizon;
    j["days"] = ordered_json::array();
    for (const DayPlan& d : plan.days) {
        ordered_json day;
        day["day"] = d.day;
        day["distance_km"] = d.distance_km;
        day["visited"] = d.visited;
        day["routes"] = d.routes;
        j["days"].push_back(std::move(day));
    }
    j["nodes"] = ordered_json::array();
    for (const NodeQuantities& q : plan.nodes) {
        ordered_json nd;
        nd["node"] = q.node;
        nd["stage"] = q.stage;
        nd["probability"] = q.probability;
        nd["collected_kg"] = q.collected_kg;
        nd["inventory_kg"] = q.inventory_kg;
        j["nodes"].push_back(std::move(nd));
    }
    j["totals"] = {{"expected_profit", plan.totals.expected_profit},
                   {"expected_collected_kg", plan.totals.expected_collected_kg},
                   {"total_distance_km", plan.totals.total_distance_km},
                   {"collected_per_km", plan.totals.collected_per_km}};

    std::ofstream out(path);
    if (!out) throw LoadError("cannot write plan file " + path);
    out << j.dump(2) << "\n";
}

CollectionPlan load_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open plan file " + path);
    ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw LoadError("plan file " + path + ": " + e.what());
    }
    try {
        if (j.at("schema_version").get<int>() != 1)
            throw LoadError("plan file " + path + ": unsupported schema_version");
        CollectionPlan plan;
        plan.variant = j.at("variant").get<std::string>();
        parse_variant(plan.variant); // validates
        plan.num_bins = j.at("num_bins").get<int>();
        plan.horizon = j.at("horizon").get<int>();
        for (const auto& dj : j.at("days")) {
            DayPlan d;
            d.day = dj.at("day").get<int>();
            d.distance_km = dj.at("distance_km").get<double>();
            d.visited = dj.at("visited").get<std::vector<int>>();
            d.routes = dj.at("routes").get<std::vector<std::vector<int>>>();
            plan.days.push_back(std::move(d));
        }
        for (const auto& nj : j.at("nodes")) {
            NodeQuantities q;
            q.node = nj.at("node").get<int>();
            q.stage = nj.at("stage").get<int>();
            q.probability = nj.at("probability").get<double>();
            q.collected_kg = nj.at("collected_kg").get<std::vector<double>>();
            q.inventory_kg = nj.at("inventory_kg").get<std::vector<double>>();
            plan.nodes.push_back(std::move(q));
        }
        const auto& tj = j.at("totals");
        plan.totals.expected_profit = tj.at("expected_profit").get<double>();
        plan.totals.expected_collected_kg = tj.at("expected_collected_kg").get<double>();
        plan.totals.total_distance_km = tj.at("total_distance_km").get<double>();
        plan.totals.collected_per_km = tj.at("collected_per_km").get<double>();
        return plan;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw LoadError("plan file " + path + ": " + e.what());
    }
}

} // namespace sirp
