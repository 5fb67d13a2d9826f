#include "sirp/analytic.hpp"

#include <cmath>
#include <cstdlib>

namespace sirp {

double closed_form_profit_C0(const Instance& inst, const ScenarioTree& tree) {
    const int N = inst.num_bins();
    if (tree.num_bins() != N) throw DataError("tree and instance disagree on the bin count");
    double total = 0.0;
    for (int i = 0; i < N; ++i) {
        double mass = inst.bins[static_cast<std::size_t>(i)].initial_fill;
        for (int s = 2; s <= tree.num_stages(); ++s)
            for (int id : tree.stage_nodes(s))
                mass += tree.node(id).prob * tree.node(id).rates[static_cast<std::size_t>(i)];
        total += inst.bins[static_cast<std::size_t>(i)].capacity_kg * mass;
    }
    return inst.params.selling_price_per_kg * total;
}

bool c0_closed_form_applies(const Instance& inst, const ScenarioTree& tree) {
    const int N = inst.num_bins();
    if (tree.num_bins() != N) return false;
    for (const Bin& b : inst.bins)
        if (b.capacity_kg > inst.params.vehicle_capacity_kg + 1e-9) return false;
    for (int leaf : tree.leaves()) {
        std::vector<double> sum(static_cast<std::size_t>(N), 0.0);
        for (int id : tree.path_to_root(leaf))
            for (int i = 0; i < N; ++i)
                sum[static_cast<std::size_t>(i)] += tree.node(id).rates[static_cast<std::size_t>(i)];
        for (int i = 0; i < N; ++i)
            if (inst.bins[static_cast<std::size_t>(i)].initial_fill + sum[static_cast<std::size_t>(i)] >
                1.0 + 1e-12)
                return false;
    }
    return true;
}

WorstCase worst_case_instance(int num_bins, int horizon, const std::vector<double>& alpha,
                              const std::vector<double>& eps_m3, double travel_cost_per_km) {
    if (num_bins < 1) throw DataError("worst-case family needs at least one bin");
    if (horizon < 3) throw DataError("worst-case family needs a horizon of at least 3 stages");
    if (static_cast<int>(alpha.size()) != num_bins || static_cast<int>(eps_m3.size()) != num_bins)
        throw DataError("alpha/eps vectors must have one entry per bin");
    if (!(travel_cost_per_km > 0.0))
        throw DataError("worst-case family needs a positive travel cost");

    WorstCase wc;
    Instance& inst = wc.instance;
    inst.name = "worst_case_" + std::to_string(num_bins) + "x" + std::to_string(horizon);
    inst.params.travel_cost_per_km = travel_cost_per_km;
    inst.params.selling_price_per_kg = 0.0;
    inst.params.horizon = horizon;

    double total_kg = 0.0;
    for (int i = 0; i < num_bins; ++i) {
        Bin b;
        b.id = i + 1;
        b.capacity_m3 = 2.5;
        b.initial_fill = 0.0;
        b.capacity_kg = b.capacity_m3 * inst.params.waste_density_kg_m3;
        const double a = alpha[static_cast<std::size_t>(i)];
        const double e = eps_m3[static_cast<std::size_t>(i)];
        if (!(a > 0.0) || !(a < 1.0))
            throw DataError("alpha of bin " + std::to_string(b.id) + " must lie in (0,1)");
        if (!(e > 0.0) || e > a * b.capacity_m3 + 1e-12)
            throw DataError("eps of bin " + std::to_string(b.id) +
                            " must lie in (0, alpha*capacity]");
        total_kg += b.capacity_kg;
        inst.bins.push_back(b);
    }
    inst.params.vehicle_capacity_kg = total_kg + 1.0; // one tour can always take everything

    const int V = num_bins + 1;
    std::vector<double> d(static_cast<std::size_t>(V) * V, 0.0);
    for (int i = 0; i < V; ++i)
        for (int j = 0; j < V; ++j)
            d[static_cast<std::size_t>(i) * V + j] = std::abs(i - j);
    inst.distances = DistanceMatrix(V, std::move(d));

    std::vector<std::vector<double>> stage_rates;
    for (int t = 1; t <= horizon; ++t) {
        std::vector<double> r(static_cast<std::size_t>(num_bins), 0.0);
        if (t == horizon - 1) {
            for (int i = 0; i < num_bins; ++i) r[static_cast<std::size_t>(i)] = alpha[static_cast<std::size_t>(i)];
        } else if (t == horizon) {
            for (int i = 0; i < num_bins; ++i)
                r[static_cast<std::size_t>(i)] =
                    1.0 - alpha[static_cast<std::size_t>(i)] +
                    eps_m3[static_cast<std::size_t>(i)] / inst.bins[static_cast<std::size_t>(i)].capacity_m3;
        }
        stage_rates.push_back(std::move(r));
    }
    wc.tree = make_chain_tree(num_bins, stage_rates);
    return wc;
}

} // namespace sirp
