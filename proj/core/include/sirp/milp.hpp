#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "sirp/common.hpp"

namespace sirp {

enum class Sense { LessEqual, Equal, GreaterEqual };

struct Variable {
    std::string name;
    double lower = 0.0;
    double upper = kInf;
    bool integer = false;
};

struct Constraint {
    std::string name;
    Sense sense = Sense::LessEqual;
    double rhs = 0.0;
    std::vector<std::pair<int, double>> terms; // (var index, coef)
};

// Maximization MILP in sparse row form. Variable and row names double as
// the model metadata (x_t_i_j, y_t_i, f_n_i_j, w_n_i, u_n_i for the
// routing models).
class MilpProblem {
public:
    std::string name = "problem";

    int add_var(std::string name, double lower, double upper, double obj_coef,
                bool integer);
    int add_row(std::string name, Sense sense, double rhs);
    void add_term(int row, int var, double coef);

    int num_vars() const { return static_cast<int>(vars_.size()); }
    int num_rows() const { return static_cast<int>(rows_.size()); }
    int num_integer_vars() const;

    const Variable& var(int j) const { return vars_[static_cast<std::size_t>(j)]; }
    Variable& var(int j) { return vars_[static_cast<std::size_t>(j)]; }
    const Constraint& row(int r) const { return rows_[static_cast<std::size_t>(r)]; }
    const std::vector<Variable>& vars() const { return vars_; }
    const std::vector<Constraint>& rows() const { return rows_; }
    double obj_coef(int j) const { return obj_[static_cast<std::size_t>(j)]; }
    const std::vector<double>& objective() const { return obj_; }

    // -1 when absent.
    int var_index(const std::string& name) const;

    double eval_objective(const std::vector<double>& x) const;
    double row_activity(int r, const std::vector<double>& x) const;

private:
    std::vector<Variable> vars_;
    std::vector<Constraint> rows_;
    std::vector<double> obj_;
    std::unordered_map<std::string, int> index_;
};

enum class SolveStatus { Optimal, Feasible, Infeasible, Unbounded, TimeLimit };

const char* to_string(SolveStatus s);

struct MilpSolution {
    SolveStatus status = SolveStatus::Infeasible;
    double objective = -kInf;   // incumbent value; -inf when none found
    double bound = kInf;        // valid dual (upper) bound
    std::vector<double> values; // empty when no incumbent exists

    // |bound - objective| / max(1e-10, |objective|); 0 for proven optima,
    // infinity when no incumbent exists.
    double gap() const;

    struct Stats {
        long long nodes = 0;
        long long lp_pivots = 0;
        double seconds = 0.0;
    } stats;
};

struct SolverConfig {
    double feas_tol = 1e-6;  // final validation of returned assignments
    double int_tol = 1e-6;
    double rel_gap = 1e-6;   // branch & bound termination
    double abs_gap = 1e-9;
    double time_limit = kInf; // seconds, wall clock
    long long node_limit = 50'000'000;
};

// LP relaxation (integrality ignored). Status is Optimal, Infeasible or
// Unbounded; `values` holds the optimal vertex when Optimal.
MilpSolution solve_lp(const MilpProblem& p, const SolverConfig& cfg = {});

// Exact branch & bound on the bounded-variable simplex: best-bound node
// selection (ties towards the most recent node), most-fractional
// branching with lowest-index tiebreak. Deterministic for a fixed
// problem and config. Integral incumbents are re-solved with the integer
// variables fixed so reported objectives are exact residual-LP optima.
MilpSolution solve_milp(const MilpProblem& p, const SolverConfig& cfg = {});

// Independent reference path: enumerate every assignment of the binary
// variables (after a pre-screen on rows containing only binaries) and
// solve the residual LP of each survivor. Refuses problems with more
// than `max_binaries` binaries or with non-binary integer variables.
MilpSolution enumerate_oracle(const MilpProblem& p, const SolverConfig& cfg = {},
                              int max_binaries = 24);

// Violation report (empty = feasible within tolerances).
std::vector<std::string> check_solution(const MilpProblem& p,
                                        const std::vector<double>& x,
                                        double feas_tol = 1e-6,
                                        double int_tol = 1e-6);

} // namespace sirp
