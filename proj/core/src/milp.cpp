#include "sirp/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <queue>

#include "simplex.hpp"

namespace sirp {

int MilpProblem::add_var(std::string name, double lower, double upper,
                         double obj_coef, bool integer) {
    if (lower > upper)
        throw BuildError("variable " + name + ": empty bound interval");
    const int idx = num_vars();
    if (!index_.emplace(name, idx).second)
        throw BuildError("duplicate variable name " + name);
    vars_.push_back({std::move(name), lower, upper, integer});
    obj_.push_back(obj_coef);
    return idx;
}

int MilpProblem::add_row(std::string name, Sense sense, double rhs) {
    const int idx = num_rows();
    rows_.push_back({std::move(name), sense, rhs, {}});
    return idx;
}

void MilpProblem::add_term(int row, int var, double coef) {
    if (row < 0 || row >= num_rows() || var < 0 || var >= num_vars())
        throw BuildError("add_term: index out of range");
    if (coef != 0.0)
        rows_[static_cast<std::size_t>(row)].terms.emplace_back(var, coef);
}

int MilpProblem::num_integer_vars() const {
    int k = 0;
    for (const Variable& v : vars_)
        if (v.integer) ++k;
    return k;
}

int MilpProblem::var_index(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

double MilpProblem::eval_objective(const std::vector<double>& x) const {
    double s = 0.0;
    for (std::size_t j = 0; j < obj_.size(); ++j) s += obj_[j] * x[j];
    return s;
}

double MilpProblem::row_activity(int r, const std::vector<double>& x) const {
    double s = 0.0;
    for (const auto& [var, coef] : rows_[static_cast<std::size_t>(r)].terms)
        s += coef * x[static_cast<std::size_t>(var)];
    return s;
}

const char* to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Feasible: return "Feasible";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::TimeLimit: return "TimeLimit";
    }
    return "?";
}

double MilpSolution::gap() const {
    if (status == SolveStatus::Infeasible || status == SolveStatus::Unbounded) return 0.0;
    if (values.empty()) return kInf;
    if (bound == kInf) return kInf;
    return std::fabs(bound - objective) / std::max(1e-10, std::fabs(objective));
}

std::vector<std::string> check_solution(const MilpProblem& p,
                                        const std::vector<double>& x,
                                        double feas_tol, double int_tol) {
    std::vector<std::string> out;
    if (static_cast<int>(x.size()) != p.num_vars()) {
        out.push_back("assignment has wrong dimension");
        return out;
    }
    for (int j = 0; j < p.num_vars(); ++j) {
        const Variable& v = p.var(j);
        const double xv = x[static_cast<std::size_t>(j)];
        if (xv < v.lower - feas_tol)
            out.push_back("var " + v.name + " below lower bound");
        if (xv > v.upper + feas_tol)
            out.push_back("var " + v.name + " above upper bound");
        if (v.integer && std::fabs(xv - std::round(xv)) > int_tol)
            out.push_back("var " + v.name + " not integral");
    }
    for (int r = 0; r < p.num_rows(); ++r) {
        const Constraint& row = p.row(r);
        const double act = p.row_activity(r, x);
        const double diff = act - row.rhs;
        switch (row.sense) {
        case Sense::LessEqual:
            if (diff > feas_tol) out.push_back("row " + row.name + " violated");
            break;
        case Sense::GreaterEqual:
            if (diff < -feas_tol) out.push_back("row " + row.name + " violated");
            break;
        case Sense::Equal:
            if (std::fabs(diff) > feas_tol) out.push_back("row " + row.name + " violated");
            break;
        }
    }
    return out;
}

namespace {

using detail::LpStatus;
using detail::SimplexEngine;

std::pair<std::vector<double>, std::vector<double>> base_bounds(const MilpProblem& p) {
    std::vector<double> lo(static_cast<std::size_t>(p.num_vars()));
    std::vector<double> up(static_cast<std::size_t>(p.num_vars()));
    for (int j = 0; j < p.num_vars(); ++j) {
        lo[static_cast<std::size_t>(j)] = p.var(j).lower;
        up[static_cast<std::size_t>(j)] = p.var(j).upper;
    }
    return {std::move(lo), std::move(up)};
}

} // namespace

MilpSolution solve_lp(const MilpProblem& p, const SolverConfig& cfg) {
    (void)cfg;
    const auto t0 = std::chrono::steady_clock::now();
    SimplexEngine engine(p);
    const LpStatus st = engine.fresh_solve();

    MilpSolution sol;
    sol.stats.lp_pivots = engine.pivots();
    switch (st) {
    case LpStatus::Optimal:
        sol.status = SolveStatus::Optimal;
        sol.values = engine.structural_values();
        sol.objective = engine.objective();
        sol.bound = sol.objective;
        break;
    case LpStatus::Infeasible:
        sol.status = SolveStatus::Infeasible;
        sol.objective = -kInf;
        sol.bound = -kInf;
        break;
    case LpStatus::Unbounded:
        sol.status = SolveStatus::Unbounded;
        sol.objective = kInf;
        sol.bound = kInf;
        break;
    case LpStatus::IterLimit:
        throw SolveError("simplex iteration cap reached (after Bland fallback)");
    }
    sol.stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
}

MilpSolution solve_milp(const MilpProblem& p, const SolverConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&t0] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    MilpSolution sol;
    SimplexEngine engine(p);
    auto [base_lo, base_up] = base_bounds(p);

    std::vector<int> int_vars;
    for (int j = 0; j < p.num_vars(); ++j)
        if (p.var(j).integer) int_vars.push_back(j);

    engine.load_bounds(base_lo, base_up);
    LpStatus st = engine.fresh_solve();
    if (st == LpStatus::IterLimit)
        throw SolveError("simplex iteration cap reached (after Bland fallback)");
    if (st == LpStatus::Infeasible) {
        sol.status = SolveStatus::Infeasible;
        sol.objective = -kInf;
        sol.bound = -kInf;
        sol.stats.lp_pivots = engine.pivots();
        sol.stats.seconds = elapsed();
        return sol;
    }
    if (st == LpStatus::Unbounded) {
        sol.status = SolveStatus::Unbounded;
        sol.objective = kInf;
        sol.bound = kInf;
        sol.stats.lp_pivots = engine.pivots();
        sol.stats.seconds = elapsed();
        return sol;
    }

    // chain of single-bound changes; bounds of a node = base + overrides
    // walking root -> node
    struct Node {
        int parent;
        int var;
        double lo, up;
        double est; // parent's solved LP bound
    };
    std::deque<Node> nodes;
    struct QItem {
        double est;
        long long seq;
        int node;
        bool operator<(const QItem& o) const {
            if (est != o.est) return est < o.est;
            return seq < o.seq; // newest first on ties: dives after branching
        }
    };
    std::priority_queue<QItem> queue;

    double incumbent = -kInf;
    std::vector<double> best_values;
    bool stopped_early = false;
    SolveStatus stop_status = SolveStatus::Optimal;
    long long seq = 0;
    long long processed = 0;

    std::vector<double> node_lo, node_up, chain_scratch;

    auto assemble_bounds = [&](int node_idx) {
        node_lo = base_lo;
        node_up = base_up;
        // collect chain indices (node -> root), then apply root -> node so
        // deeper cuts win
        chain_scratch.clear();
        for (int k = node_idx; k >= 0; k = nodes[static_cast<std::size_t>(k)].parent)
            chain_scratch.push_back(k);
        for (auto it = chain_scratch.rbegin(); it != chain_scratch.rend(); ++it) {
            const Node& nd = nodes[static_cast<std::size_t>(*it)];
            node_lo[static_cast<std::size_t>(nd.var)] = nd.lo;
            node_up[static_cast<std::size_t>(nd.var)] = nd.up;
        }
    };

    auto gap_threshold = [&cfg](double inc) {
        return std::max(cfg.abs_gap, cfg.rel_gap * std::max(1e-10, std::fabs(inc)));
    };

    auto try_incumbent = [&](const std::vector<double>& cur_lo,
                             const std::vector<double>& cur_up,
                             const std::vector<double>& x) {
        // re-solve with the integer variables pinned so the reported value
        // is the exact residual-LP optimum (matches the oracle bitwise-ish)
        std::vector<double> flo = cur_lo, fup = cur_up;
        for (int j : int_vars) {
            const double v = std::round(x[static_cast<std::size_t>(j)]);
            flo[static_cast<std::size_t>(j)] = v;
            fup[static_cast<std::size_t>(j)] = v;
        }
        engine.load_bounds(flo, fup);
        if (engine.resolve() != LpStatus::Optimal) return;
        std::vector<double> vals = engine.structural_values();
        for (int j : int_vars)
            vals[static_cast<std::size_t>(j)] =
                std::round(vals[static_cast<std::size_t>(j)]);
        if (!check_solution(p, vals, cfg.feas_tol, cfg.int_tol).empty()) return;
        const double obj = engine.objective();
        if (obj > incumbent + 1e-12) {
            incumbent = obj;
            best_values = std::move(vals);
        }
    };

    // most fractional: largest distance to integrality, ties to the lowest
    // variable index (strict > keeps the first seen)
    auto pick_branch_var = [&](const std::vector<double>& x) {
        int bvar = -1;
        double bscore = cfg.int_tol;
        for (int j : int_vars) {
            const double v = x[static_cast<std::size_t>(j)];
            const double dist = std::fabs(v - std::round(v));
            if (dist > bscore + 1e-12) {
                bscore = dist;
                bvar = j;
            }
        }
        return bvar;
    };

    // root node: virtual index -1 handled inline
    {
        const double root_obj = engine.objective();
        const std::vector<double> x = engine.structural_values();
        const int bvar = pick_branch_var(x);
        if (bvar < 0) {
            if (int_vars.empty()) {
                // pure LP: the relaxation solution is the answer
                incumbent = root_obj;
                best_values = x;
            } else {
                try_incumbent(base_lo, base_up, x);
            }
        } else {
            const double v = x[static_cast<std::size_t>(bvar)];
            nodes.push_back({-1, bvar, base_lo[static_cast<std::size_t>(bvar)],
                             std::floor(v), root_obj});
            queue.push({root_obj, seq++, static_cast<int>(nodes.size()) - 1});
            nodes.push_back({-1, bvar, std::ceil(v),
                             base_up[static_cast<std::size_t>(bvar)], root_obj});
            queue.push({root_obj, seq++, static_cast<int>(nodes.size()) - 1});
        }
    }

    // dive: after branching, one child is processed right away and only the
    // other goes through the queue.  Along a dive the bounds only tighten,
    // which keeps the warm starts dual-feasible and the resolves short; the
    // queue pops (subtree switches) are where the engine pays full price.
    int dive_node = -1;
    double dive_est = kInf;

    while (dive_node >= 0 || !queue.empty()) {
        int cur;
        double cur_est;
        if (dive_node >= 0) {
            cur = dive_node;
            cur_est = dive_est;
            dive_node = -1;
            if (!best_values.empty() && cur_est <= incumbent + gap_threshold(incumbent))
                continue;
        } else {
            const QItem top = queue.top();
            if (!best_values.empty() && top.est <= incumbent + gap_threshold(incumbent))
                break; // best-first: nothing left that can beat the incumbent
            queue.pop();
            cur = top.node;
            cur_est = top.est;
        }
        if (elapsed() > cfg.time_limit) {
            stopped_early = true;
            stop_status = SolveStatus::TimeLimit;
            dive_est = cur_est; // still open, counts towards the bound
            dive_node = cur;
            break;
        }
        if (processed >= cfg.node_limit) {
            stopped_early = true;
            stop_status = best_values.empty() ? SolveStatus::TimeLimit : SolveStatus::Feasible;
            dive_est = cur_est;
            dive_node = cur;
            break;
        }
        ++processed;

        assemble_bounds(cur);
        engine.load_bounds(node_lo, node_up);
        st = engine.resolve();
        if (st == LpStatus::Infeasible) continue;
        if (st == LpStatus::IterLimit)
            throw SolveError("simplex iteration cap reached (after Bland fallback)");
        if (st == LpStatus::Unbounded)
            throw SolveError("unexpected unbounded subproblem");

        const double obj = engine.objective();
        if (!best_values.empty() && obj <= incumbent + gap_threshold(incumbent)) continue;

        const std::vector<double> x = engine.structural_values();
        const int bvar = pick_branch_var(x);
        if (bvar < 0) {
            try_incumbent(node_lo, node_up, x);
            continue;
        }

        const double v = x[static_cast<std::size_t>(bvar)];
        nodes.push_back({cur, bvar, node_lo[static_cast<std::size_t>(bvar)],
                         std::floor(v), obj});
        const int down = static_cast<int>(nodes.size()) - 1;
        nodes.push_back({cur, bvar, std::ceil(v),
                         node_up[static_cast<std::size_t>(bvar)], obj});
        const int up = static_cast<int>(nodes.size()) - 1;
        // dive towards the nearer integer, queue the other side
        const bool down_first = v - std::floor(v) < 0.5;
        queue.push({obj, seq++, down_first ? up : down});
        dive_node = down_first ? down : up;
        dive_est = obj;
    }

    sol.stats.nodes = processed;
    sol.stats.lp_pivots = engine.pivots();
    sol.stats.seconds = elapsed();

    if (stopped_early) {
        sol.status = stop_status;
        sol.objective = best_values.empty() ? -kInf : incumbent;
        sol.values = std::move(best_values);
        double bound = sol.values.empty() ? kInf : incumbent;
        if (!queue.empty()) bound = std::max(bound, queue.top().est);
        if (dive_node >= 0) bound = std::max(bound, dive_est);
        sol.bound = bound;
        return sol;
    }
    if (best_values.empty()) {
        sol.status = SolveStatus::Infeasible;
        sol.objective = -kInf;
        sol.bound = -kInf;
        return sol;
    }
    // proven within gap tolerance: report as optimal with a closed gap
    sol.status = SolveStatus::Optimal;
    sol.objective = incumbent;
    sol.bound = incumbent;
    sol.values = std::move(best_values);
    return sol;
}

MilpSolution enumerate_oracle(const MilpProblem& p, const SolverConfig& cfg,
                              int max_binaries) {
    (void)cfg; // the oracle runs on its own fixed tolerances by design
    std::vector<int> bins;
    for (int j = 0; j < p.num_vars(); ++j) {
        const Variable& v = p.var(j);
        if (!v.integer) continue;
        if (v.lower < -1e-9 || v.upper > 1.0 + 1e-9)
            throw DataError("enumerate_oracle: integer variable " + v.name +
                            " is not binary");
        bins.push_back(j);
    }
    if (static_cast<int>(bins.size()) > max_binaries)
        throw DataError("enumerate_oracle: " + std::to_string(bins.size()) +
                        " binaries exceed the cap of " + std::to_string(max_binaries));

    // rows whose support is entirely binary can be checked per assignment
    // without an LP
    std::vector<int> pure_rows;
    for (int r = 0; r < p.num_rows(); ++r) {
        bool pure = true;
        for (const auto& [var, coef] : p.row(r).terms) {
            (void)coef;
            if (!p.var(var).integer) {
                pure = false;
                break;
            }
        }
        if (pure && !p.row(r).terms.empty()) pure_rows.push_back(r);
    }

    const auto t0 = std::chrono::steady_clock::now();
    SimplexEngine engine(p);
    auto [lo, up] = base_bounds(p);

    MilpSolution best;
    best.status = SolveStatus::Infeasible;
    best.objective = -kInf;
    best.bound = -kInf;
    bool engine_started = false;

    std::vector<double> assign(static_cast<std::size_t>(p.num_vars()), 0.0);
    const std::uint64_t count = 1ull << bins.size();
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        bool admissible = true;
        for (std::size_t k = 0; k < bins.size(); ++k) {
            const double v = (mask >> k) & 1 ? 1.0 : 0.0;
            const Variable& var = p.var(bins[k]);
            if (v < var.lower - 1e-9 || v > var.upper + 1e-9) {
                admissible = false;
                break;
            }
            assign[static_cast<std::size_t>(bins[k])] = v;
        }
        if (!admissible) continue;

        for (int r : pure_rows) {
            const Constraint& row = p.row(r);
            double act = 0.0;
            for (const auto& [var, coef] : row.terms)
                act += coef * assign[static_cast<std::size_t>(var)];
            const double diff = act - row.rhs;
            if ((row.sense == Sense::LessEqual && diff > 1e-9) ||
                (row.sense == Sense::GreaterEqual && diff < -1e-9) ||
                (row.sense == Sense::Equal && std::fabs(diff) > 1e-9)) {
                admissible = false;
                break;
            }
        }
        if (!admissible) continue;

        std::vector<double> flo = lo, fup = up;
        for (std::size_t k = 0; k < bins.size(); ++k) {
            const double v = (mask >> k) & 1 ? 1.0 : 0.0;
            flo[static_cast<std::size_t>(bins[k])] = v;
            fup[static_cast<std::size_t>(bins[k])] = v;
        }
        engine.load_bounds(flo, fup);
        const LpStatus st = engine_started ? engine.resolve() : engine.fresh_solve();
        engine_started = true;
        if (st == LpStatus::IterLimit)
            throw SolveError("simplex iteration cap reached (after Bland fallback)");
        if (st == LpStatus::Unbounded) {
            best.status = SolveStatus::Unbounded;
            best.objective = kInf;
            best.bound = kInf;
            best.values.clear();
            return best;
        }
        if (st != LpStatus::Optimal) continue;

        const double obj = engine.objective();
        if (best.values.empty() || obj > best.objective + 1e-12) {
            best.objective = obj;
            best.bound = obj;
            best.values = engine.structural_values();
            for (std::size_t k = 0; k < bins.size(); ++k)
                best.values[static_cast<std::size_t>(bins[k])] =
                    (mask >> k) & 1 ? 1.0 : 0.0;
            best.status = SolveStatus::Optimal;
        }
    }
    best.stats.lp_pivots = 0;
    best.stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (best.status == SolveStatus::Infeasible) {
        best.objective = -kInf;
        best.bound = -kInf;
    }
    return best;
}

} // namespace sirp
