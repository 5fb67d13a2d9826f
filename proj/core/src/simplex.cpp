#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace sirp::detail {

namespace {
constexpr double kPivTol = 1e-9;   // smallest pivot considered nonzero
// Pivots below this are only accepted through a freshly factorized
// inverse: pivoting on drift noise once made the basis exactly singular.
constexpr double kPivAccept = 1e-7;
constexpr double kDualTol = 1e-9;  // reduced-cost optimality tolerance
constexpr double kFeasTol = 1e-9;  // internal primal feasibility
constexpr double kPhase1Tol = 1e-7;
// Factorize from scratch this many inverse updates after the last one.
// Pure backstop: the per-pivot drift monitors below catch trouble much
// earlier, so this can stay long enough not to dominate runtime.
constexpr int kRefreshInterval = 4000;
constexpr double kDriftTol = 1e-6; // disagreement that triggers refactorization
} // namespace

SimplexEngine::SimplexEngine(const MilpProblem& p) {
    m_ = p.num_rows();
    n_ = p.num_vars();
    ncols_ = n_ + 2 * m_;
    if (m_ > 4000)
        throw SolveError("problem too large for the dense in-process solver "
                         "(" + std::to_string(m_) + " rows); export MPS instead");

    cols_.assign(static_cast<std::size_t>(ncols_), {});
    lo_.assign(static_cast<std::size_t>(ncols_), 0.0);
    up_.assign(static_cast<std::size_t>(ncols_), 0.0);
    cost_.assign(static_cast<std::size_t>(ncols_), 0.0);
    rhs_.assign(static_cast<std::size_t>(m_), 0.0);

    for (int j = 0; j < n_; ++j) {
        const Variable& v = p.var(j);
        if (v.lower > v.upper)
            throw BuildError("variable " + v.name + " has empty bound interval");
        lo_[static_cast<std::size_t>(j)] = v.lower;
        up_[static_cast<std::size_t>(j)] = v.upper;
        cost_[static_cast<std::size_t>(j)] = p.obj_coef(j);
    }
    for (int r = 0; r < m_; ++r) {
        const Constraint& row = p.row(r);
        rhs_[static_cast<std::size_t>(r)] = row.rhs;
        for (const auto& [var, coef] : row.terms)
            cols_[static_cast<std::size_t>(var)].emplace_back(r, coef);

        const int s = n_ + r;     // slack
        const int a = n_ + m_ + r; // artificial
        cols_[static_cast<std::size_t>(s)].emplace_back(r, 1.0);
        cols_[static_cast<std::size_t>(a)].emplace_back(r, 1.0);
        switch (row.sense) {
        case Sense::LessEqual:
            lo_[static_cast<std::size_t>(s)] = 0.0;
            up_[static_cast<std::size_t>(s)] = kInf;
            break;
        case Sense::GreaterEqual:
            lo_[static_cast<std::size_t>(s)] = -kInf;
            up_[static_cast<std::size_t>(s)] = 0.0;
            break;
        case Sense::Equal:
            lo_[static_cast<std::size_t>(s)] = 0.0;
            up_[static_cast<std::size_t>(s)] = 0.0;
            break;
        }
        lo_[static_cast<std::size_t>(a)] = 0.0;
        up_[static_cast<std::size_t>(a)] = 0.0;
    }
    // merge duplicate (row, var) entries
    for (auto& col : cols_) {
        std::sort(col.begin(), col.end());
        std::size_t w = 0;
        for (std::size_t k = 0; k < col.size(); ++k) {
            if (w > 0 && col[w - 1].first == col[k].first)
                col[w - 1].second += col[k].second;
            else
                col[w++] = col[k];
        }
        col.resize(w);
    }

    stat_.assign(static_cast<std::size_t>(ncols_), AtLower);
    basis_.assign(static_cast<std::size_t>(m_), -1);
    rowof_.assign(static_cast<std::size_t>(ncols_), -1);
    x_.assign(static_cast<std::size_t>(ncols_), 0.0);
    xb_.assign(static_cast<std::size_t>(m_), 0.0);
    binv_.assign(static_cast<std::size_t>(m_) * static_cast<std::size_t>(m_), 0.0);
    d_.assign(static_cast<std::size_t>(ncols_), 0.0);
}

void SimplexEngine::load_bounds(const std::vector<double>& lo,
                                const std::vector<double>& up) {
    if (static_cast<int>(lo.size()) != n_ || static_cast<int>(up.size()) != n_)
        throw BuildError("load_bounds: wrong dimension");
    for (int j = 0; j < n_; ++j) {
        if (lo[static_cast<std::size_t>(j)] > up[static_cast<std::size_t>(j)])
            throw BuildError("load_bounds: empty interval");
        lo_[static_cast<std::size_t>(j)] = lo[static_cast<std::size_t>(j)];
        up_[static_cast<std::size_t>(j)] = up[static_cast<std::size_t>(j)];
    }
}

void SimplexEngine::snap_nonbasic() {
    for (int j = 0; j < ncols_; ++j) {
        const std::size_t js = static_cast<std::size_t>(j);
        if (stat_[js] == Basic) continue;
        const double lo = lo_[js], up = up_[js];
        switch (stat_[js]) {
        case AtLower:
            if (lo == -kInf) stat_[js] = up < kInf ? AtUpper : FreeAtZero;
            break;
        case AtUpper:
            if (up == kInf) stat_[js] = lo > -kInf ? AtLower : FreeAtZero;
            break;
        case FreeAtZero:
            if (lo > -kInf)
                stat_[js] = AtLower;
            else if (up < kInf)
                stat_[js] = AtUpper;
            break;
        default:
            break;
        }
        x_[js] = stat_[js] == AtLower ? lo : stat_[js] == AtUpper ? up : 0.0;
    }
}

void SimplexEngine::compute_xb() {
    std::vector<double> eff = rhs_;
    for (int j = 0; j < ncols_; ++j) {
        const std::size_t js = static_cast<std::size_t>(j);
        if (stat_[js] == Basic || x_[js] == 0.0) continue;
        for (const auto& [r, v] : cols_[js]) eff[static_cast<std::size_t>(r)] -= v * x_[js];
    }
    for (int i = 0; i < m_; ++i) {
        const double* row = &binv_[static_cast<std::size_t>(i) * m_];
        double s = 0.0;
        for (int k = 0; k < m_; ++k) s += row[k] * eff[static_cast<std::size_t>(k)];
        xb_[static_cast<std::size_t>(i)] = s;
    }
}

void SimplexEngine::price(const std::vector<double>& c) {
    std::vector<double> y(static_cast<std::size_t>(m_), 0.0);
    for (int i = 0; i < m_; ++i) {
        const double cb = c[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])];
        if (cb == 0.0) continue;
        const double* row = &binv_[static_cast<std::size_t>(i) * m_];
        for (int k = 0; k < m_; ++k) y[static_cast<std::size_t>(k)] += cb * row[k];
    }
    for (int j = 0; j < ncols_; ++j) {
        const std::size_t js = static_cast<std::size_t>(j);
        if (stat_[js] == Basic) {
            d_[js] = 0.0;
            continue;
        }
        double s = c[js];
        for (const auto& [r, v] : cols_[js]) s -= y[static_cast<std::size_t>(r)] * v;
        d_[js] = s;
    }
}

void SimplexEngine::ftran(int col, std::vector<double>& alpha) const {
    std::fill(alpha.begin(), alpha.end(), 0.0);
    for (const auto& [r, v] : cols_[static_cast<std::size_t>(col)]) {
        const std::size_t rc = static_cast<std::size_t>(r);
        for (int i = 0; i < m_; ++i)
            alpha[static_cast<std::size_t>(i)] += v * binv_[static_cast<std::size_t>(i) * m_ + rc];
    }
}

// Reduced-cost transformation + explicit inverse update for a pivot on
// (row, col); alpha = B^-1 a_col for the outgoing basis.
void SimplexEngine::pivot_update(int row, int col, const std::vector<double>& alpha,
                                 const std::vector<double>& c) {
    (void)c;
    const std::size_t rs = static_cast<std::size_t>(row);
    const double piv = alpha[rs];
    const double theta = d_[static_cast<std::size_t>(col)] / piv;

    std::vector<double> rho(static_cast<std::size_t>(m_));
    std::copy_n(&binv_[rs * m_], m_, rho.begin());

    if (theta != 0.0) {
        for (int j = 0; j < ncols_; ++j) {
            const std::size_t js = static_cast<std::size_t>(j);
            double s = 0.0;
            for (const auto& [r, v] : cols_[js]) s += rho[static_cast<std::size_t>(r)] * v;
            if (s != 0.0) d_[js] -= theta * s;
        }
    }
    d_[static_cast<std::size_t>(col)] = 0.0;

    double* rowr = &binv_[rs * m_];
    for (int k = 0; k < m_; ++k) rowr[k] /= piv;
    for (int i = 0; i < m_; ++i) {
        if (i == row) continue;
        const double f = alpha[static_cast<std::size_t>(i)];
        if (f == 0.0) continue;
        double* rowi = &binv_[static_cast<std::size_t>(i) * m_];
        for (int k = 0; k < m_; ++k) rowi[k] -= f * rowr[k];
    }
    ++pivots_;
    ++since_factor_;
}

bool SimplexEngine::refactorize() {
    const std::size_t mm = static_cast<std::size_t>(m_);
    std::vector<double> B(mm * mm, 0.0);
    for (int r = 0; r < m_; ++r)
        for (const auto& [i, v] : cols_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])])
            B[static_cast<std::size_t>(i) * mm + static_cast<std::size_t>(r)] = v;

    std::fill(binv_.begin(), binv_.end(), 0.0);
    for (std::size_t i = 0; i < mm; ++i) binv_[i * mm + i] = 1.0;

    for (std::size_t k = 0; k < mm; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < mm; ++i)
            if (std::fabs(B[i * mm + k]) > std::fabs(B[p * mm + k])) p = i;
        if (std::fabs(B[p * mm + k]) < 1e-11) {
            if (std::getenv("SIRP_LP_DEBUG") != nullptr)
                std::fprintf(stderr, "[fact] singular at k=%zu/%zu basis col %d |piv|=%.3e\n", k,
                             mm, basis_[k], std::fabs(B[p * mm + k]));
            return false;
        }
        if (p != k) {
            for (std::size_t c = 0; c < mm; ++c) {
                std::swap(B[p * mm + c], B[k * mm + c]);
                std::swap(binv_[p * mm + c], binv_[k * mm + c]);
            }
        }
        const double piv = B[k * mm + k];
        for (std::size_t c = 0; c < mm; ++c) {
            B[k * mm + c] /= piv;
            binv_[k * mm + c] /= piv;
        }
        for (std::size_t i = 0; i < mm; ++i) {
            if (i == k) continue;
            const double f = B[i * mm + k];
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < mm; ++c) {
                B[i * mm + c] -= f * B[k * mm + c];
                binv_[i * mm + c] -= f * binv_[k * mm + c];
            }
        }
    }
    since_factor_ = 0;
    return true;
}

LpStatus SimplexEngine::primal_optimize(const std::vector<double>& c) {
    const long long cap = 200LL * m_ + 20LL * ncols_ + 20000;
    long long iter = 0, degen = 0;
    int monitor_hits = 0;
    bool bland = false;
    const bool dbg = std::getenv("SIRP_LP_DEBUG") != nullptr;
    std::vector<double> alpha(static_cast<std::size_t>(m_));
    std::vector<double> lims(static_cast<std::size_t>(m_));

    while (true) {
        if (++iter > cap) {
            if (dbg) std::fprintf(stderr, "[lp] global cap: iter=%lld degen=%lld\n", iter, degen);
            return LpStatus::IterLimit;
        }
        if (dbg && iter % 2000 == 0) {
            double obj = 0.0;
            for (int j = 0; j < ncols_; ++j)
                if (c[static_cast<std::size_t>(j)] != 0.0)
                    obj += c[static_cast<std::size_t>(j)] * col_value(j);
            std::fprintf(stderr, "[lp] iter=%lld degen=%lld bland=%d obj=%.9f\n", iter, degen,
                         bland ? 1 : 0, obj);
        }

        // entering column
        int q = -1, qdir = 0;
        double best = kDualTol;
        for (int j = 0; j < ncols_; ++j) {
            const std::size_t js = static_cast<std::size_t>(j);
            if (stat_[js] == Basic || lo_[js] == up_[js]) continue;
            const double dj = d_[js];
            double score = -1.0;
            int dir = 0;
            if (stat_[js] == AtLower && dj > kDualTol) {
                score = dj;
                dir = +1;
            } else if (stat_[js] == AtUpper && dj < -kDualTol) {
                score = -dj;
                dir = -1;
            } else if (stat_[js] == FreeAtZero && std::fabs(dj) > kDualTol) {
                score = std::fabs(dj);
                dir = dj > 0 ? +1 : -1;
            }
            if (score > best) {
                best = score;
                q = j;
                qdir = dir;
                if (bland) break; // lowest eligible index
            }
        }
        if (q < 0) return LpStatus::Optimal;

        ftran(q, alpha);
        const std::size_t qs = static_cast<std::size_t>(q);

        // drift monitor: the incrementally updated reduced cost has to
        // agree with the one implied by the freshly transformed column;
        // disagreement means the inverse has decayed, so rebuild it
        double dchk = c[qs];
        for (int i = 0; i < m_; ++i) {
            const double cb = c[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])];
            if (cb != 0.0) dchk -= cb * alpha[static_cast<std::size_t>(i)];
        }
        if (std::fabs(dchk - d_[qs]) > kDriftTol * (1.0 + std::fabs(d_[qs]))) {
            if (dbg)
                std::fprintf(stderr, "[lp] drift: iter=%lld q=%d d=%.3e direct=%.3e\n", iter, q,
                             d_[qs], dchk);
            if (++monitor_hits > 50) return LpStatus::IterLimit;
            if (!refactorize()) return LpStatus::IterLimit;
            compute_xb();
            price(c);
            continue;
        }

        // ratio test: move t >= 0 along qdir from the current bound
        double t_own = (lo_[qs] > -kInf && up_[qs] < kInf) ? up_[qs] - lo_[qs] : kInf;
        double t_min = t_own;
        for (int i = 0; i < m_; ++i) {
            const std::size_t is = static_cast<std::size_t>(i);
            lims[is] = kInf;
            const double a = alpha[is];
            if (std::fabs(a) <= kPivTol) continue;
            const double rate = -qdir * a;
            const std::size_t b = static_cast<std::size_t>(basis_[is]);
            double lim;
            if (rate > 0) {
                if (up_[b] == kInf) continue;
                lim = (up_[b] - xb_[is]) / rate;
            } else {
                if (lo_[b] == -kInf) continue;
                lim = (xb_[is] - lo_[b]) / (-rate);
            }
            if (lim < 0.0) lim = 0.0;
            lims[is] = lim;
            t_min = std::min(t_min, lim);
        }
        if (t_min == kInf) {
            if (dbg)
                std::fprintf(stderr, "[lp] unbounded: iter=%lld q=%d d=%.3e stat=%d\n", iter, q,
                             d_[qs], static_cast<int>(stat_[qs]));
            return LpStatus::Unbounded;
        }

        if (t_own <= t_min && t_own < kInf) {
            // entering variable runs to its opposite bound: bound flip
            for (int i = 0; i < m_; ++i)
                if (alpha[static_cast<std::size_t>(i)] != 0.0)
                    xb_[static_cast<std::size_t>(i)] -=
                        qdir * alpha[static_cast<std::size_t>(i)] * t_own;
            stat_[qs] = stat_[qs] == AtLower ? AtUpper : AtLower;
            x_[qs] = stat_[qs] == AtLower ? lo_[qs] : up_[qs];
            if (t_own <= 1e-11) {
                if (++degen > 200) bland = true;
            } else {
                degen = 0;
                bland = false;
            }
            continue;
        }

        // blocking row: within tolerance of the minimum, largest pivot;
        // under Bland, lowest leaving index among ties with a usable pivot
        int r = -1;
        double besta = 0.0;
        if (bland) {
            for (int i = 0; i < m_; ++i) {
                const std::size_t is = static_cast<std::size_t>(i);
                if (lims[is] > t_min + 1e-9) continue;
                if (std::fabs(alpha[is]) < kPivAccept) continue;
                if (r < 0 || basis_[is] < basis_[static_cast<std::size_t>(r)]) r = i;
            }
            if (r >= 0) besta = std::fabs(alpha[static_cast<std::size_t>(r)]);
        }
        if (r < 0) {
            for (int i = 0; i < m_; ++i) {
                const std::size_t is = static_cast<std::size_t>(i);
                if (lims[is] > t_min + 1e-9) continue;
                const double a = std::fabs(alpha[is]);
                if (a > besta) {
                    besta = a;
                    r = i;
                }
            }
        }
        if (r < 0) {
            if (dbg)
                std::fprintf(stderr, "[lp] dead end: iter=%lld q=%d d=%.3e t_min=%.3e\n", iter, q,
                             d_[qs], t_min);
            return LpStatus::IterLimit; // numerical dead end
        }
        if (besta < kPivAccept && since_factor_ > 0) {
            // suspiciously small pivot through a stale inverse: factorize
            // and redo the iteration with exact numbers
            if (++monitor_hits > 50) return LpStatus::IterLimit;
            if (!refactorize()) {
                if (dbg) std::fprintf(stderr, "[lp] singular at tiny-pivot recheck\n");
                return LpStatus::IterLimit;
            }
            compute_xb();
            price(c);
            continue;
        }
        // a genuinely small pivot is taken but poisons the updated
        // inverse quickly; refresh right afterwards
        if (besta < 1e-6) since_factor_ = kRefreshInterval;
        if (dbg && besta < 1e-5)
            std::fprintf(stderr, "[lp] shaky pivot: iter=%lld q=%d r=%d |piv|=%.3e t_min=%.3e\n",
                         iter, q, r, besta, t_min);
        const std::size_t rs = static_cast<std::size_t>(r);
        double t = std::min(lims[rs], t_own);
        if (t < 0.0) t = 0.0;

        for (int i = 0; i < m_; ++i) {
            if (i == r) continue;
            const double a = alpha[static_cast<std::size_t>(i)];
            if (a != 0.0) xb_[static_cast<std::size_t>(i)] -= qdir * a * t;
        }
        const int l = basis_[rs];
        const std::size_t ls = static_cast<std::size_t>(l);
        const double rate_r = -qdir * alpha[rs];
        if (rate_r > 0) {
            stat_[ls] = AtUpper;
            x_[ls] = up_[ls];
        } else {
            stat_[ls] = AtLower;
            x_[ls] = lo_[ls];
        }
        rowof_[ls] = -1;
        const double enter_start =
            stat_[qs] == AtLower ? lo_[qs] : stat_[qs] == AtUpper ? up_[qs] : 0.0;

        pivot_update(r, q, alpha, c);
        basis_[rs] = q;
        rowof_[qs] = r;
        stat_[qs] = Basic;
        xb_[rs] = enter_start + qdir * t;

        if (t <= 1e-11) {
            if (++degen > 200) bland = true;
            if (degen > 10000) {
                if (dbg)
                    std::fprintf(stderr, "[lp] degen bail: iter=%lld q=%d leave=%d t=%.3e\n",
                                 iter, q, l, t);
                return LpStatus::IterLimit;
            }
        } else {
            degen = 0;
            bland = false;
        }
        if (since_factor_ >= kRefreshInterval) {
            if (!refactorize()) {
                if (dbg) std::fprintf(stderr, "[lp] refresh hit a singular basis: iter=%lld\n", iter);
                return LpStatus::IterLimit;
            }
            compute_xb();
            price(c);
        }
    }
}

LpStatus SimplexEngine::dual_optimize() {
    const long long cap = 200LL * m_ + 20LL * ncols_ + 20000;
    long long iter = 0;
    int rebuilds = 0;
    const bool dbg = std::getenv("SIRP_LP_DEBUG") != nullptr;
    std::vector<double> alpha(static_cast<std::size_t>(m_));
    std::vector<double> rho(static_cast<std::size_t>(m_));

    while (true) {
        if (++iter > cap) {
            if (dbg) std::fprintf(stderr, "[dual] global cap: iter=%lld\n", iter);
            return LpStatus::IterLimit;
        }

        // most violated basic variable leaves
        int r = -1, dir = 0;
        double bestv = kFeasTol;
        for (int i = 0; i < m_; ++i) {
            const std::size_t is = static_cast<std::size_t>(i);
            const std::size_t b = static_cast<std::size_t>(basis_[is]);
            const double below = lo_[b] - xb_[is];
            const double above = xb_[is] - up_[b];
            if (below > bestv) {
                bestv = below;
                r = i;
                dir = +1;
            }
            if (above > bestv) {
                bestv = above;
                r = i;
                dir = -1;
            }
        }
        if (r < 0) return LpStatus::Optimal;
        const std::size_t rs = static_cast<std::size_t>(r);
        const std::size_t lb = static_cast<std::size_t>(basis_[rs]);
        const double target = dir > 0 ? lo_[lb] : up_[lb];

        std::copy_n(&binv_[rs * m_], m_, rho.begin());

        // dual ratio test
        int q = -1;
        double best_ratio = kInf, besta = 0.0;
        for (int j = 0; j < ncols_; ++j) {
            const std::size_t js = static_cast<std::size_t>(j);
            if (stat_[js] == Basic || lo_[js] == up_[js]) continue;
            double ar = 0.0;
            for (const auto& [row, v] : cols_[js]) ar += rho[static_cast<std::size_t>(row)] * v;
            if (std::fabs(ar) <= kPivTol) continue;
            const bool ok = stat_[js] == FreeAtZero ||
                            (stat_[js] == AtLower && dir * ar < 0) ||
                            (stat_[js] == AtUpper && dir * ar > 0);
            if (!ok) continue;
            const double ratio = std::fabs(d_[js] / ar);
            if (ratio < best_ratio - 1e-12 ||
                (ratio <= best_ratio + 1e-12 && std::fabs(ar) > besta)) {
                best_ratio = ratio;
                besta = std::fabs(ar);
                q = j;
            }
        }
        if (q < 0) return LpStatus::Infeasible;
        const std::size_t qs = static_cast<std::size_t>(q);

        ftran(q, alpha);
        // refuse to pivot on a number that might be drift noise: factorize
        // first, and only go through with it when the fresh inverse agrees
        if (std::fabs(alpha[rs]) < kPivTol ||
            (std::fabs(alpha[rs]) < kPivAccept && since_factor_ > 0)) {
            if (++rebuilds > 50) {
                if (dbg) std::fprintf(stderr, "[dual] rebuild limit: iter=%lld\n", iter);
                return LpStatus::IterLimit;
            }
            if (!refactorize()) {
                if (dbg) std::fprintf(stderr, "[dual] singular basis: iter=%lld\n", iter);
                return LpStatus::IterLimit;
            }
            compute_xb();
            price(cost_);
            continue;
        }

        const double dxq = -(target - xb_[rs]) / alpha[rs];
        for (int i = 0; i < m_; ++i) {
            if (i == r) continue;
            const double a = alpha[static_cast<std::size_t>(i)];
            if (a != 0.0) xb_[static_cast<std::size_t>(i)] -= a * dxq;
        }
        stat_[lb] = dir > 0 ? AtLower : AtUpper;
        x_[lb] = target;
        rowof_[lb] = -1;
        const double enter_new = x_[qs] + dxq;

        if (std::fabs(alpha[rs]) < 1e-6) since_factor_ = kRefreshInterval;
        pivot_update(r, q, alpha, cost_);
        basis_[rs] = q;
        rowof_[qs] = r;
        stat_[qs] = Basic;
        xb_[rs] = enter_new;

        if (since_factor_ >= kRefreshInterval) {
            if (!refactorize()) {
                if (dbg) std::fprintf(stderr, "[dual] refresh hit a singular basis\n");
                return LpStatus::IterLimit;
            }
            compute_xb();
            price(cost_);
        }
    }
}

LpStatus SimplexEngine::fresh_solve() {
    basis_valid_ = false;

    // nonbasic start for structural columns
    for (int j = 0; j < n_; ++j) {
        const std::size_t js = static_cast<std::size_t>(j);
        if (lo_[js] > -kInf) {
            stat_[js] = AtLower;
            x_[js] = lo_[js];
        } else if (up_[js] < kInf) {
            stat_[js] = AtUpper;
            x_[js] = up_[js];
        } else {
            stat_[js] = FreeAtZero;
            x_[js] = 0.0;
        }
        rowof_[js] = -1;
    }

    std::vector<double> res = rhs_;
    for (int j = 0; j < n_; ++j) {
        const std::size_t js = static_cast<std::size_t>(j);
        if (x_[js] == 0.0) continue;
        for (const auto& [r, v] : cols_[js]) res[static_cast<std::size_t>(r)] -= v * x_[js];
    }

    bool need_phase1 = false;
    for (int r = 0; r < m_; ++r) {
        const std::size_t rr = static_cast<std::size_t>(r);
        const int s = n_ + r;
        const int a = n_ + m_ + r;
        const std::size_t ss = static_cast<std::size_t>(s);
        const std::size_t as = static_cast<std::size_t>(a);
        rowof_[ss] = rowof_[as] = -1;

        if (res[rr] >= lo_[ss] - kFeasTol && res[rr] <= up_[ss] + kFeasTol) {
            basis_[rr] = s;
            stat_[ss] = Basic;
            rowof_[ss] = r;
            lo_[as] = up_[as] = 0.0;
            stat_[as] = AtLower;
            x_[as] = 0.0;
        } else {
            lo_[as] = std::min(0.0, res[rr]);
            up_[as] = std::max(0.0, res[rr]);
            basis_[rr] = a;
            stat_[as] = Basic;
            rowof_[as] = r;
            stat_[ss] = lo_[ss] == 0.0 ? AtLower : AtUpper;
            x_[ss] = 0.0;
            need_phase1 = true;
        }
        xb_[rr] = res[rr];
    }

    std::fill(binv_.begin(), binv_.end(), 0.0);
    for (int i = 0; i < m_; ++i)
        binv_[static_cast<std::size_t>(i) * m_ + static_cast<std::size_t>(i)] = 1.0;
    since_factor_ = 0;

    if (need_phase1) {
        // maximize -sum |artificial|: each active artificial is one-sided
        // towards zero, so the objective is linear
        std::vector<double> c1(static_cast<std::size_t>(ncols_), 0.0);
        for (int r = 0; r < m_; ++r) {
            const int a = n_ + m_ + r;
            if (basis_[static_cast<std::size_t>(r)] == a)
                c1[static_cast<std::size_t>(a)] =
                    xb_[static_cast<std::size_t>(r)] > 0 ? -1.0 : 1.0;
        }
        price(c1);
        const LpStatus st1 = primal_optimize(c1);
        if (st1 == LpStatus::IterLimit || st1 == LpStatus::Unbounded) {
            if (std::getenv("SIRP_LP_DEBUG") != nullptr)
                std::fprintf(stderr, "[p1] phase-1 ended %s\n",
                             st1 == LpStatus::Unbounded ? "unbounded" : "iterlimit");
            return LpStatus::IterLimit;
        }

        double infeas = 0.0;
        for (int r = 0; r < m_; ++r) {
            const int a = n_ + m_ + r;
            infeas += std::fabs(col_value(a));
        }
        if (infeas > kPhase1Tol) return LpStatus::Infeasible;

        // lock the artificials at zero
        for (int r = 0; r < m_; ++r) {
            const std::size_t as = static_cast<std::size_t>(n_ + m_ + r);
            lo_[as] = up_[as] = 0.0;
            if (stat_[as] == Basic)
                xb_[static_cast<std::size_t>(rowof_[as])] = 0.0;
            else {
                stat_[as] = AtLower;
                x_[as] = 0.0;
            }
        }
    }

    price(cost_);
    const LpStatus st = primal_optimize(cost_);
    basis_valid_ = st == LpStatus::Optimal;
    return st;
}

LpStatus SimplexEngine::resolve() {
    if (!basis_valid_) return fresh_solve();
    snap_nonbasic();
    price(cost_);
    // the dual needs a dual-feasible start.  A variable that sat at a fixed
    // bound in the previous solve is exempt from the sign condition there,
    // so once its bounds are released again its reduced cost can point the
    // wrong way; flip it to the bound that matches the sign, or give up on
    // warm starting when there is no finite bound to flip to
    for (int j = 0; j < ncols_; ++j) {
        const std::size_t js = static_cast<std::size_t>(j);
        if (stat_[js] == Basic || lo_[js] == up_[js]) continue;
        if (stat_[js] == AtLower && d_[js] > kDualTol) {
            if (up_[js] >= kInf) return fresh_solve();
            stat_[js] = AtUpper;
            x_[js] = up_[js];
        } else if (stat_[js] == AtUpper && d_[js] < -kDualTol) {
            if (lo_[js] <= -kInf) return fresh_solve();
            stat_[js] = AtLower;
            x_[js] = lo_[js];
        } else if (stat_[js] == FreeAtZero && std::fabs(d_[js]) > kDualTol) {
            return fresh_solve();
        }
    }
    compute_xb();
    LpStatus st = dual_optimize();
    if (st == LpStatus::IterLimit) st = fresh_solve();
    if (st == LpStatus::Optimal) basis_valid_ = true;
    return st;
}

double SimplexEngine::objective() const {
    double s = 0.0;
    for (int j = 0; j < n_; ++j) {
        const double c = cost_[static_cast<std::size_t>(j)];
        if (c != 0.0) s += c * col_value(j);
    }
    return s;
}

std::vector<double> SimplexEngine::structural_values() const {
    std::vector<double> out(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) out[static_cast<std::size_t>(j)] = col_value(j);
    return out;
}

} // namespace sirp::detail
