#pragma once

// Internal bounded-variable simplex engine (dense explicit basis inverse,
// sparse columns). Not installed; the public entry points live in
// sirp/milp.hpp.

#include <cstdint>
#include <vector>

#include "sirp/milp.hpp"

namespace sirp::detail {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterLimit };

class SimplexEngine {
public:
    explicit SimplexEngine(const MilpProblem& p);

    // Replace the structural variable bounds (size = number of structural
    // variables). Keeps the current basis; reduced costs do not depend on
    // bounds, but releasing a previously fixed column can leave its
    // reduced cost with the wrong sign for its bound -- resolve() repairs
    // that by bound flipping before the dual iteration starts.
    void load_bounds(const std::vector<double>& lo, const std::vector<double>& up);

    // Two-phase primal simplex from a slack/artificial basis.
    LpStatus fresh_solve();

    // Dual simplex from the current basis after bound changes; falls back
    // to fresh_solve() internally when no valid basis exists or the dual
    // iteration stalls.
    LpStatus resolve();

    double objective() const;
    std::vector<double> structural_values() const;
    long long pivots() const { return pivots_; }

private:
    enum Stat : std::uint8_t { Basic = 0, AtLower = 1, AtUpper = 2, FreeAtZero = 3 };

    int m_ = 0;      // rows
    int n_ = 0;      // structural columns
    int ncols_ = 0;  // structural + slacks + artificials
    std::vector<std::vector<std::pair<int, double>>> cols_;
    std::vector<double> lo_, up_;
    std::vector<double> cost_;  // phase-2 objective, maximize
    std::vector<double> rhs_;

    std::vector<std::uint8_t> stat_;
    std::vector<int> basis_;   // row -> column
    std::vector<int> rowof_;   // column -> row (-1 when nonbasic)
    std::vector<double> x_;    // authoritative for nonbasic columns
    std::vector<double> xb_;   // basic values by row
    std::vector<double> binv_; // m x m row-major
    std::vector<double> d_;    // reduced costs for the active objective

    long long pivots_ = 0;
    int since_factor_ = 0; // inverse updates since the last factorization
    bool basis_valid_ = false;

    double col_value(int j) const { return stat_[static_cast<std::size_t>(j)] == Basic
                                            ? xb_[static_cast<std::size_t>(rowof_[static_cast<std::size_t>(j)])]
                                            : x_[static_cast<std::size_t>(j)]; }
    void snap_nonbasic();
    void compute_xb();
    void price(const std::vector<double>& c);
    void ftran(int col, std::vector<double>& alpha) const;
    void pivot_update(int row, int col, const std::vector<double>& alpha,
                      const std::vector<double>& c);
    bool refactorize();

    LpStatus primal_optimize(const std::vector<double>& c);
    LpStatus dual_optimize();
};

} // namespace sirp::detail
