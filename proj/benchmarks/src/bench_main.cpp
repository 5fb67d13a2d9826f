#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "sirp/instance.hpp"
#include "sirp/milp.hpp"
#include "sirp/model_build.hpp"
#include "sirp/rng.hpp"
#include "sirp/sampler.hpp"
#include "sirp/scenario_tree.hpp"
#include "sirp/tree_fit.hpp"

namespace {

using namespace sirp;

// deterministic synthetic family shared by all benches: unit-square bin
// coordinates around a central depot, logistic-free uniform fill rates
Instance make_instance(int n, int horizon, std::uint64_t seed) {
    Rng rng(seed);
    Instance inst;
    inst.name = "bench";
    inst.params.travel_cost_per_km = 0.7;
    inst.params.selling_price_per_kg = 0.3;
    inst.params.vehicle_capacity_kg = 200.0;
    inst.params.waste_density_kg_m3 = 30.0;
    inst.params.big_m = 1e5;
    inst.params.horizon = horizon;
    std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
    for (int i = 0; i < n; ++i) {
        Bin b;
        b.id = i + 1;
        b.capacity_m3 = 2.5;
        b.capacity_kg = b.capacity_m3 * inst.params.waste_density_kg_m3;
        b.initial_fill = 0.3 * rng.uniform01();
        inst.bins.push_back(b);
        pts.push_back({4.0 * rng.uniform01() - 2.0, 4.0 * rng.uniform01() - 2.0});
    }
    std::vector<double> d(static_cast<std::size_t>((n + 1) * (n + 1)), 0.0);
    for (int a = 0; a <= n; ++a)
        for (int b = 0; b <= n; ++b)
            d[static_cast<std::size_t>(a * (n + 1) + b)] =
                std::hypot(pts[static_cast<std::size_t>(a)].first -
                               pts[static_cast<std::size_t>(b)].first,
                           pts[static_cast<std::size_t>(a)].second -
                               pts[static_cast<std::size_t>(b)].second);
    inst.distances = DistanceMatrix(n + 1, std::move(d));
    return inst;
}

ScenarioTree make_tree(int n, const std::vector<int>& factors, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<TreeNode> nodes;
    std::vector<int> frontier; // node ids of the previous stage
    int next_id = 0;
    for (std::size_t s = 0; s < factors.size(); ++s) {
        std::vector<int> level;
        const int k = factors[s];
        const auto parents = s == 0 ? std::vector<int>{-1} : frontier;
        for (int parent : parents) {
            // prob is unconditional: the parent's mass split evenly
            const double mass =
                parent < 0 ? 1.0 : nodes[static_cast<std::size_t>(parent)].prob / k;
            for (int c = 0; c < k; ++c) {
                std::vector<double> rates(static_cast<std::size_t>(n), 0.0);
                if (s > 0)
                    for (double& r : rates) r = 0.4 * rng.uniform01();
                nodes.push_back({next_id, static_cast<int>(s) + 1, parent, mass,
                                 std::move(rates)});
                level.push_back(next_id++);
            }
        }
        frontier = std::move(level);
    }
    return ScenarioTree(n, nodes);
}

TrajectoryBank make_bank(int n, int horizon, int weeks, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<DailyRates> rates;
    for (int i = 0; i < n; ++i) {
        DailyRates r;
        r.bin_id = i + 1;
        r.first_day = 1;
        for (int d = 0; d < horizon * weeks; ++d)
            r.rates.push_back(0.4 * rng.uniform01());
        rates.push_back(std::move(r));
    }
    return TrajectoryBank::from_daily_rates(rates, horizon);
}

void bm_build_model_m(benchmark::State& state) {
    const Instance inst = make_instance(10, 6, 11);
    const ScenarioTree tree = make_tree(10, {1, 2, 2, 2, 2, 2}, 12);
    for (auto _ : state) {
        MilpProblem p = build_model(inst, TreeView::full(tree), ModelVariant::M);
        benchmark::DoNotOptimize(p.num_rows());
    }
}
BENCHMARK(bm_build_model_m)->Unit(benchmark::kMillisecond);

void bm_build_model_msym(benchmark::State& state) {
    const Instance inst = make_instance(10, 6, 11);
    const ScenarioTree tree = make_tree(10, {1, 2, 2, 2, 2, 2}, 12);
    for (auto _ : state) {
        MilpProblem p = build_model(inst, TreeView::full(tree), ModelVariant::Msym);
        benchmark::DoNotOptimize(p.num_rows());
    }
}
BENCHMARK(bm_build_model_msym)->Unit(benchmark::kMillisecond);

void bm_lp_relaxation(benchmark::State& state) {
    const Instance inst = make_instance(3, 3, 21);
    const ScenarioTree tree = make_tree(3, {1, 2, 2}, 22);
    const MilpProblem p = build_model(inst, TreeView::full(tree), ModelVariant::M);
    SolverConfig cfg;
    for (auto _ : state) {
        MilpSolution s = solve_lp(p, cfg);
        benchmark::DoNotOptimize(s.objective);
    }
}
BENCHMARK(bm_lp_relaxation)->Unit(benchmark::kMillisecond);

void bm_milp_small(benchmark::State& state) {
    const Instance inst = make_instance(2, 3, 31);
    const ScenarioTree tree = make_tree(2, {1, 2, 2}, 32);
    const MilpProblem p = build_model(inst, TreeView::full(tree), ModelVariant::M);
    SolverConfig cfg;
    for (auto _ : state) {
        MilpSolution s = solve_milp(p, cfg);
        benchmark::DoNotOptimize(s.objective);
    }
}
BENCHMARK(bm_milp_small)->Unit(benchmark::kMillisecond);

void bm_sample_trajectory(benchmark::State& state) {
    const TrajectoryBank bank = make_bank(4, 6, 14, 41);
    const SamplerState st = SamplerState::init(bank);
    Rng rng(42);
    for (auto _ : state) {
        auto traj = sample_trajectory(bank, st, rng);
        benchmark::DoNotOptimize(traj);
    }
}
BENCHMARK(bm_sample_trajectory)->Unit(benchmark::kMicrosecond);

void bm_fit_tree(benchmark::State& state) {
    const TrajectoryBank bank = make_bank(4, 6, 14, 51);
    const BranchingStructure structure = BranchingStructure::parse("1x2x2x2x2x2");
    for (auto _ : state) {
        FitResult fr = fit_tree(bank, structure, state.range(0), 52);
        benchmark::DoNotOptimize(fr.tree.num_nodes());
    }
}
BENCHMARK(bm_fit_tree)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
