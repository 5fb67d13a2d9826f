#pragma once

// shared synthetic problem builders and tiny verification oracles

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "sirp/instance.hpp"
#include "sirp/milp.hpp"
#include "sirp/rng.hpp"
#include "sirp/sampler.hpp"
#include "sirp/scenario_tree.hpp"

namespace testsup {

using namespace sirp;

struct InstanceOpts {
    double travel_cost = 0.7;
    double price = 0.3;
    double vehicle_q = 200.0;
    double fill_scale = 0.3;  // initial fill ~ U[0, fill_scale]
};

inline Instance make_instance(int n, int horizon, std::uint64_t seed,
                              const InstanceOpts& opt = {}) {
    Rng rng(seed);
    Instance inst;
    inst.name = "synthetic";
    inst.params.travel_cost_per_km = opt.travel_cost;
    inst.params.selling_price_per_kg = opt.price;
    inst.params.vehicle_capacity_kg = opt.vehicle_q;
    inst.params.waste_density_kg_m3 = 30.0;
    inst.params.big_m = 1e5;
    inst.params.horizon = horizon;
    std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
    for (int i = 0; i < n; ++i) {
        Bin b;
        b.id = i + 1;
        b.capacity_m3 = 2.5;
        b.capacity_kg = b.capacity_m3 * inst.params.waste_density_kg_m3;
        b.initial_fill = opt.fill_scale * rng.uniform01();
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

// uniform tree of the given branching structure; unconditional node
// probabilities split the parent mass evenly, rates ~ U[0, rate_scale]
inline ScenarioTree make_tree(int n, const std::vector<int>& factors, std::uint64_t seed,
                              double rate_scale = 0.4) {
    Rng rng(seed);
    std::vector<TreeNode> nodes;
    std::vector<int> frontier;
    int next_id = 0;
    for (std::size_t s = 0; s < factors.size(); ++s) {
        std::vector<int> level;
        const int k = factors[s];
        const auto parents = s == 0 ? std::vector<int>{-1} : frontier;
        for (int parent : parents) {
            const double mass =
                parent < 0 ? 1.0 : nodes[static_cast<std::size_t>(parent)].prob / k;
            for (int c = 0; c < k; ++c) {
                std::vector<double> rates(static_cast<std::size_t>(n), 0.0);
                if (s > 0)
                    for (double& r : rates) r = rate_scale * rng.uniform01();
                nodes.push_back({next_id, static_cast<int>(s) + 1, parent, mass,
                                 std::move(rates)});
                level.push_back(next_id++);
            }
        }
        frontier = std::move(level);
    }
    return ScenarioTree(n, nodes);
}

inline TrajectoryBank make_bank(int n, int horizon, int weeks, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<DailyRates> rates;
    for (int i = 0; i < n; ++i) {
        DailyRates r;
        r.bin_id = i + 1;
        r.first_day = 1;
        for (int d = 0; d < horizon * weeks; ++d) r.rates.push_back(0.4 * rng.uniform01());
        rates.push_back(std::move(r));
    }
    return TrajectoryBank::from_daily_rates(rates, horizon);
}

// Brute-force LP oracle for problems with at most 3 structural variables,
// finite bounds on every variable and arbitrary rows: enumerates every
// candidate vertex as an intersection of d tight constraints (rows or
// bounds), keeps the feasible ones and returns the best objective. A
// bounded nonempty polytope always has an optimal vertex, so an empty
// candidate set means infeasible.
struct LpOracleResult {
    bool feasible = false;
    double objective = 0.0;
};

inline LpOracleResult lp_vertex_oracle(const MilpProblem& p) {
    const int d = p.num_vars();
    struct Ct {
        double a[3] = {0, 0, 0};
        double b = 0.0;
        int kind; // 0: <=, 1: >=, 2: ==
    };
    std::vector<Ct> cts;
    for (int r = 0; r < p.num_rows(); ++r) {
        Ct c;
        for (const auto& [var, coef] : p.row(r).terms) c.a[var] += coef;
        c.b = p.row(r).rhs;
        c.kind = p.row(r).sense == Sense::LessEqual ? 0
                 : p.row(r).sense == Sense::GreaterEqual ? 1
                                                         : 2;
        cts.push_back(c);
    }
    for (int j = 0; j < d; ++j) {
        Ct lo{}, up{};
        lo.a[j] = 1.0;
        lo.b = p.var(j).lower;
        lo.kind = 1;
        up.a[j] = 1.0;
        up.b = p.var(j).upper;
        up.kind = 0;
        cts.push_back(lo);
        cts.push_back(up);
    }

    auto feasible_point = [&](const double* x) {
        for (const Ct& c : cts) {
            double act = 0.0;
            for (int j = 0; j < d; ++j) act += c.a[j] * x[j];
            if (c.kind == 0 && act > c.b + 1e-7) return false;
            if (c.kind == 1 && act < c.b - 1e-7) return false;
            if (c.kind == 2 && std::fabs(act - c.b) > 1e-7) return false;
        }
        return true;
    };

    auto solve3 = [&](const std::vector<int>& pick, double* x) {
        double A[9] = {0}, rhs[3] = {0};
        for (int r = 0; r < d; ++r) {
            const Ct& c = cts[static_cast<std::size_t>(pick[static_cast<std::size_t>(r)])];
            for (int j = 0; j < d; ++j) A[r * 3 + j] = c.a[j];
            rhs[r] = c.b;
        }
        // gaussian elimination, 3x3 max
        int perm[3] = {0, 1, 2};
        for (int k = 0; k < d; ++k) {
            int piv = k;
            for (int r = k + 1; r < d; ++r)
                if (std::fabs(A[perm[r] * 3 + k]) > std::fabs(A[perm[piv] * 3 + k])) piv = r;
            std::swap(perm[k], perm[piv]);
            if (std::fabs(A[perm[k] * 3 + k]) < 1e-11) return false;
            for (int r = k + 1; r < d; ++r) {
                const double f = A[perm[r] * 3 + k] / A[perm[k] * 3 + k];
                for (int j = k; j < d; ++j) A[perm[r] * 3 + j] -= f * A[perm[k] * 3 + j];
                rhs[perm[r]] -= f * rhs[perm[k]];
            }
        }
        for (int k = d - 1; k >= 0; --k) {
            double s = rhs[perm[k]];
            for (int j = k + 1; j < d; ++j) s -= A[perm[k] * 3 + j] * x[j];
            x[k] = s / A[perm[k] * 3 + k];
        }
        return true;
    };

    LpOracleResult out;
    const int nc = static_cast<int>(cts.size());
    std::vector<int> pick(static_cast<std::size_t>(d));
    auto consider = [&](const std::vector<int>& sel) {
        double x[3] = {0, 0, 0};
        if (!solve3(sel, x)) return;
        if (!feasible_point(x)) return;
        double obj = 0.0;
        for (int j = 0; j < d; ++j) obj += p.obj_coef(j) * x[j];
        if (!out.feasible || obj > out.objective) {
            out.feasible = true;
            out.objective = obj;
        }
    };
    if (d == 1) {
        for (int a = 0; a < nc; ++a) consider({a});
    } else if (d == 2) {
        for (int a = 0; a < nc; ++a)
            for (int b = a + 1; b < nc; ++b) consider({a, b});
    } else {
        for (int a = 0; a < nc; ++a)
            for (int b = a + 1; b < nc; ++b)
                for (int c = b + 1; c < nc; ++c) consider({a, b, c});
    }
    return out;
}

// random micro MILP: a couple of binaries over a random LP skeleton;
// equality rows get their rhs from a random feasible point so they stay
// satisfiable
inline MilpProblem random_micro_milp(Rng& rng) {
    MilpProblem p;
    const int nb = rng.uniform_int(1, 4);
    const int nc = rng.uniform_int(0, 2);
    for (int j = 0; j < nb; ++j)
        p.add_var("b" + std::to_string(j), 0.0, 1.0, -2.0 + 4.0 * rng.uniform01(), true);
    for (int j = 0; j < nc; ++j) {
        const double lo = 0.0;
        const double up = 1.0 + 2.0 * rng.uniform01();
        p.add_var("c" + std::to_string(j), lo, up, -2.0 + 4.0 * rng.uniform01(), false);
    }
    const int m = rng.uniform_int(1, 4);
    for (int r = 0; r < m; ++r) {
        const int kind = rng.uniform_int(0, 2);
        const Sense s = kind == 0 ? Sense::LessEqual
                        : kind == 1 ? Sense::GreaterEqual
                                    : Sense::Equal;
        std::vector<double> coef(static_cast<std::size_t>(p.num_vars()), 0.0);
        double act = 0.0;
        for (int j = 0; j < p.num_vars(); ++j) {
            if (rng.uniform01() < 0.3) continue;
            coef[static_cast<std::size_t>(j)] = -2.0 + 4.0 * rng.uniform01();
            const double v = p.var(j).integer
                                 ? static_cast<double>(rng.uniform_int(0, 1))
                                 : p.var(j).upper * rng.uniform01();
            act += coef[static_cast<std::size_t>(j)] * v;
        }
        const double slack = s == Sense::Equal ? 0.0 : 0.5 * rng.uniform01();
        const int row = p.add_row("r" + std::to_string(r), s,
                                  s == Sense::GreaterEqual ? act - slack : act + slack);
        for (int j = 0; j < p.num_vars(); ++j)
            if (coef[static_cast<std::size_t>(j)] != 0.0)
                p.add_term(row, j, coef[static_cast<std::size_t>(j)]);
    }
    return p;
}

// random micro LP with finite bounds everywhere (so the oracle applies)
inline MilpProblem random_micro_lp(Rng& rng, int max_vars = 3) {
    MilpProblem p;
    const int d = 1 + rng.uniform_int(0, max_vars - 1);
    for (int j = 0; j < d; ++j) {
        const double lo = -2.0 + 2.0 * rng.uniform01();
        const double up = lo + 0.5 + 3.0 * rng.uniform01();
        p.add_var("x" + std::to_string(j), lo, up, -2.0 + 4.0 * rng.uniform01(), false);
    }
    const int m = rng.uniform_int(1, 4);
    for (int r = 0; r < m; ++r) {
        const int kind = rng.uniform_int(0, 2);
        const Sense s = kind == 0 ? Sense::LessEqual
                        : kind == 1 ? Sense::GreaterEqual
                                    : Sense::Equal;
        const int row = p.add_row("r" + std::to_string(r), s,
                                  -2.0 + 4.0 * rng.uniform01());
        for (int j = 0; j < d; ++j)
            if (rng.uniform01() < 0.8)
                p.add_term(row, j, -2.0 + 4.0 * rng.uniform01());
    }
    return p;
}

} // namespace testsup
