#include "sirp/tree_fit.hpp"

#include <algorithm>
#include <cmath>

namespace sirp {

namespace {

// Empirical quantile (linear interpolation between order statistics).
double quantile(std::vector<double> sorted_values, double q) {
    const std::size_t n = sorted_values.size();
    if (n == 0) return 0.0;
    const double pos = q * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted_values[lo] * (1.0 - frac) + sorted_values[hi] * frac;
}

} // namespace

FitResult fit_tree(const TrajectoryBank& bank, const BranchingStructure& structure,
                   long long iterations, std::uint64_t seed) {
    structure.validate();
    if (structure.stages() != bank.horizon())
        throw BuildError("branching structure has " + std::to_string(structure.stages()) +
                         " stages, bank has " + std::to_string(bank.horizon()));
    if (iterations < 1) throw BuildError("fit_tree needs at least one iteration");

    const int T = structure.stages();
    const int N = bank.num_bins();

    // Skeleton, breadth-first ids; states seeded from per-stage empirical
    // quantiles by sibling rank so equal siblings start apart and the fit
    // does not depend on child enumeration order.
    struct FitNode {
        int stage, parent, rank;
        std::vector<double> state;
        long long visits = 0;
    };
    std::vector<FitNode> nodes;
    nodes.push_back({1, -1, 0, std::vector<double>(static_cast<std::size_t>(N), 0.0), 0});
    int level_begin = 0, level_end = 1;
    for (int t = 2; t <= T; ++t) {
        const int b = structure.factors[static_cast<std::size_t>(t - 1)];
        std::vector<std::vector<double>> init(static_cast<std::size_t>(b));
        for (int r = 0; r < b; ++r) {
            init[static_cast<std::size_t>(r)].resize(static_cast<std::size_t>(N));
            const double q = (r + 0.5) / b;
            for (int i = 0; i < N; ++i) {
                std::vector<double> sample(static_cast<std::size_t>(bank.num_observations()));
                for (int o = 0; o < bank.num_observations(); ++o)
                    sample[static_cast<std::size_t>(o)] = bank.value(o, t, i);
                std::sort(sample.begin(), sample.end());
                init[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] =
                    quantile(sample, q);
            }
        }
        const int next_begin = static_cast<int>(nodes.size());
        for (int p = level_begin; p < level_end; ++p)
            for (int r = 0; r < b; ++r)
                nodes.push_back({t, p, r, init[static_cast<std::size_t>(r)], 0});
        level_begin = next_begin;
        level_end = static_cast<int>(nodes.size());
    }

    // Children are contiguous: first_child(p) = level offset arithmetic is
    // messy across stages, keep explicit lists instead.
    std::vector<std::vector<int>> children(nodes.size());
    for (std::size_t id = 0; id < nodes.size(); ++id)
        if (nodes[id].parent >= 0)
            children[static_cast<std::size_t>(nodes[id].parent)].push_back(static_cast<int>(id));

    FitResult res;
    Rng rng(seed);
    const SamplerState sampler = SamplerState::init(bank);

    for (long long k = 0; k < iterations; ++k) {
        const auto traj = sample_trajectory(bank, sampler, rng, &res.sampler_stats);
        int cur = 0;
        ++nodes[0].visits; // root state stays zero, trajectories start at zero
        for (int t = 2; t <= T; ++t) {
            const std::vector<double>& x = traj[static_cast<std::size_t>(t - 1)];
            int best = -1;
            double best_d = kInf;
            for (int c : children[static_cast<std::size_t>(cur)]) {
                double d = 0.0;
                for (int i = 0; i < N; ++i) {
                    const double diff = nodes[static_cast<std::size_t>(c)]
                                            .state[static_cast<std::size_t>(i)] -
                                        x[static_cast<std::size_t>(i)];
                    d += diff * diff;
                }
                if (d < best_d) { // strict: ties keep the lowest id
                    best_d = d;
                    best = c;
                }
            }
            FitNode& m = nodes[static_cast<std::size_t>(best)];
            ++m.visits;
            const double step = 1.0 / static_cast<double>(m.visits);
            for (int i = 0; i < N; ++i)
                m.state[static_cast<std::size_t>(i)] +=
                    step * (x[static_cast<std::size_t>(i)] - m.state[static_cast<std::size_t>(i)]);
            cur = best;
        }
    }
    res.iterations = iterations;

    // Probabilities from visit frequencies; exact products by construction.
    std::vector<TreeNode> out(nodes.size());
    for (std::size_t id = 0; id < nodes.size(); ++id) {
        TreeNode& n = out[id];
        n.id = static_cast<int>(id);
        n.stage = nodes[id].stage;
        n.parent = nodes[id].parent;
        n.rates = nodes[id].state;
        if (nodes[id].parent < 0) {
            n.prob = 1.0;
        } else {
            const FitNode& pa = nodes[static_cast<std::size_t>(nodes[id].parent)];
            const double cond =
                pa.visits > 0
                    ? static_cast<double>(nodes[id].visits) / static_cast<double>(pa.visits)
                    : 0.0;
            n.prob = out[static_cast<std::size_t>(nodes[id].parent)].prob * cond;
        }
        if (nodes[id].visits == 0)
            res.warnings.push_back("branch node " + std::to_string(id) + " (stage " +
                                   std::to_string(nodes[id].stage) +
                                   ") never visited; probability 0");
    }
    res.tree = ScenarioTree(N, std::move(out));
    return res;
}

} // namespace sirp
