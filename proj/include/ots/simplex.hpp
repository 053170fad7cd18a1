#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "ots/error.hpp"

namespace ots::lp {

enum class Status { optimal, infeasible, unbounded, iteration_limit };

/// min cost.x  s.t.  row_lower <= A x <= row_upper,  lower <= x <= upper.
struct Problem {
    struct Entry {
        int col = 0;
        double val = 0;
    };
    std::vector<double> cost;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<std::vector<Entry>> rows;
    std::vector<double> row_lower;
    std::vector<double> row_upper;

    int cols() const { return static_cast<int>(cost.size()); }
    int row_count() const { return static_cast<int>(rows.size()); }
};

enum class VarState : std::uint8_t { basic, lower, upper, free };

/// Basis snapshot: basic column per row plus the state of every column (structural then slack).
struct Basis {
    std::vector<int> head;
    std::vector<VarState> state;
};

/// Bounded-variable simplex on a dense tableau. Rows are turned into equalities
/// A_i x - s_i = 0 with the slack s_i carrying the row range as bounds, so the slack
/// basis is always a valid start. solve() restores dual feasibility, runs the dual
/// simplex to primal feasibility and finishes with primal simplex clean-up, which lets
/// the same engine reoptimise after bound changes from any stored basis.
class Simplex {
public:
    explicit Simplex(Problem p) : prob_(std::move(p)) {
        n_ = prob_.cols();
        m_ = prob_.row_count();
        width_ = n_ + m_;
        if (static_cast<int>(prob_.lower.size()) != n_ || static_cast<int>(prob_.upper.size()) != n_ ||
            static_cast<int>(prob_.row_lower.size()) != m_ || static_cast<int>(prob_.row_upper.size()) != m_)
            throw ModelError("lp: inconsistent problem dimensions");
        lb_.resize(width_);
        ub_.resize(width_);
        cost_.assign(width_, 0.0);
        for (int j = 0; j < n_; ++j) {
            lb_[j] = prob_.lower[j];
            ub_[j] = prob_.upper[j];
            cost_[j] = prob_.cost[j];
        }
        for (int i = 0; i < m_; ++i) {
            lb_[n_ + i] = prob_.row_lower[i];
            ub_[n_ + i] = prob_.row_upper[i];
        }
        true_cost_ = cost_;
        x_.assign(width_, 0.0);
        state_.assign(width_, VarState::lower);
        reset_tableau();
    }

    int cols() const { return n_; }
    int rows() const { return m_; }

    void set_bounds(int j, double lo, double hi) {
        lb_.at(static_cast<std::size_t>(j)) = lo;
        ub_.at(static_cast<std::size_t>(j)) = hi;
    }
    double lower(int j) const { return lb_.at(static_cast<std::size_t>(j)); }
    double upper(int j) const { return ub_.at(static_cast<std::size_t>(j)); }

    Status solve() {
        status_ = run();
        if (status_ != Status::optimal && pivots_since_reset_ > 0) {
            // A warm-started tableau can drift enough to fake infeasibility or stall;
            // only a verdict reached on a freshly built tableau is trusted.
            refactor(snapshot());
            status_ = run();
        }
        if (status_ == Status::optimal && !residual_ok()) {
            // Accumulated round-off: rebuild the tableau for the current basis and polish.
            refactor(snapshot());
            status_ = run();
        }
        return status_;
    }

    Status status() const { return status_; }
    long iterations() const { return iterations_; }

    std::vector<double> values() const { return {x_.begin(), x_.begin() + n_}; }

    double objective() const {
        double s = 0;
        for (int j = 0; j < n_; ++j) s += cost_[j] * x_[j];
        return s;
    }

    Basis snapshot() const { return {head_, state_}; }

    /// Moves to the given basis by pivoting from the current tableau.
    void load_basis(const Basis& b) {
        if (static_cast<int>(b.head.size()) != m_ || static_cast<int>(b.state.size()) != width_)
            throw ModelError("lp: basis dimension mismatch");
        if (pivots_since_reset_ > 4 * m_ + 200) {
            refactor(b);
            return;
        }
        transfer(b);
    }

private:
    static constexpr double pivot_tol = 1e-9;
    static constexpr double primal_tol = 1e-9;
    static constexpr double dual_tol = 1e-9;
    static constexpr double zero_tol = 1e-13;
    static constexpr double perturb_scale = 1e-7;

    double& t(int r, int j) { return tab_[static_cast<std::size_t>(r) * width_ + j]; }
    double t(int r, int j) const { return tab_[static_cast<std::size_t>(r) * width_ + j]; }

    void reset_tableau() {
        tab_.assign(static_cast<std::size_t>(m_) * width_, 0.0);
        rhs_.assign(m_, 0.0);
        head_.resize(m_);
        for (int i = 0; i < m_; ++i) {
            for (const auto& e : prob_.rows[i]) {
                if (e.col < 0 || e.col >= n_) throw ModelError("lp: row entry references unknown column");
                t(i, e.col) -= e.val;
            }
            t(i, n_ + i) = 1.0;
            head_[i] = n_ + i;
            state_[n_ + i] = VarState::basic;
        }
        pivots_since_reset_ = 0;
    }

    void refactor(const Basis& b) {
        reset_tableau();
        for (int j = 0; j < n_; ++j) state_[j] = b.state[j] == VarState::basic ? VarState::lower : b.state[j];
        transfer(b);
    }

    // Pivot the target basic columns in, one at a time, choosing the row whose current
    // basic column is not wanted and whose entry is largest. A column that cannot be
    // placed (numerically singular target) is left nonbasic.
    void transfer(const Basis& b) {
        std::vector<char> wanted(static_cast<std::size_t>(width_), 0);
        for (int q : b.head) wanted[q] = 1;
        for (int q : b.head) {
            if (state_[q] == VarState::basic) continue;
            int best = -1;
            double best_abs = 1e-7;
            for (int r = 0; r < m_; ++r) {
                if (wanted[head_[r]]) continue;
                const double a = std::abs(t(r, q));
                if (a > best_abs) {
                    best_abs = a;
                    best = r;
                }
            }
            if (best < 0) continue;
            const int leaving = head_[best];
            pivot(best, q);
            state_[q] = VarState::basic;
            state_[leaving] = VarState::lower; // fixed up below
        }
        for (int j = 0; j < width_; ++j) {
            if (state_[j] == VarState::basic) continue;
            const VarState s = b.state[j] == VarState::basic ? VarState::lower : b.state[j];
            state_[j] = s;
        }
        normalise_nonbasic();
    }

    // Bring every nonbasic column to a value consistent with its state and bounds.
    void normalise_nonbasic() {
        for (int j = 0; j < width_; ++j) {
            if (state_[j] == VarState::basic) continue;
            const bool lf = std::isfinite(lb_[j]), uf = std::isfinite(ub_[j]);
            switch (state_[j]) {
            case VarState::lower:
                if (lf) x_[j] = lb_[j];
                else if (uf) { state_[j] = VarState::upper; x_[j] = ub_[j]; }
                else { state_[j] = VarState::free; x_[j] = 0; }
                break;
            case VarState::upper:
                if (uf) x_[j] = ub_[j];
                else if (lf) { state_[j] = VarState::lower; x_[j] = lb_[j]; }
                else { state_[j] = VarState::free; x_[j] = 0; }
                break;
            case VarState::free:
                if (lf && uf) {
                    state_[j] = VarState::lower;
                    x_[j] = lb_[j];
                } else if (lf) {
                    x_[j] = std::max(x_[j], lb_[j]);
                    if (x_[j] == lb_[j]) state_[j] = VarState::lower;
                } else if (uf) {
                    x_[j] = std::min(x_[j], ub_[j]);
                    if (x_[j] == ub_[j]) state_[j] = VarState::upper;
                }
                break;
            case VarState::basic: break;
            }
        }
    }

    void pivot(int p, int q) {
        const double piv = t(p, q);
        double* prow = &tab_[static_cast<std::size_t>(p) * width_];
        nz_.clear();
        for (int j = 0; j < width_; ++j) {
            if (prow[j] == 0.0) continue;
            prow[j] /= piv;
            if (std::abs(prow[j]) < zero_tol) prow[j] = 0.0;
            else nz_.push_back(j);
        }
        prow[q] = 1.0;
        rhs_[p] /= piv;
        for (int r = 0; r < m_; ++r) {
            if (r == p) continue;
            double* row = &tab_[static_cast<std::size_t>(r) * width_];
            const double f = row[q];
            if (f == 0.0) continue;
            for (int j : nz_) {
                double v = row[j] - f * prow[j];
                row[j] = std::abs(v) < zero_tol ? 0.0 : v;
            }
            row[q] = 0.0;
            rhs_[r] -= f * rhs_[p];
        }
        head_[p] = q;
        ++pivots_since_reset_;
    }

    void compute_basic_values() {
        for (int r = 0; r < m_; ++r) {
            double v = rhs_[r];
            const double* row = &tab_[static_cast<std::size_t>(r) * width_];
            for (int j = 0; j < width_; ++j)
                if (state_[j] != VarState::basic && x_[j] != 0.0 && row[j] != 0.0) v -= row[j] * x_[j];
            x_[head_[r]] = v;
        }
    }

    void compute_reduced_costs() {
        d_ = cost_;
        for (int r = 0; r < m_; ++r) {
            const double cb = cost_[head_[r]];
            if (cb == 0.0) continue;
            const double* row = &tab_[static_cast<std::size_t>(r) * width_];
            for (int j = 0; j < width_; ++j)
                if (row[j] != 0.0) d_[j] -= cb * row[j];
        }
        for (int r = 0; r < m_; ++r) d_[head_[r]] = 0.0;
    }

    bool can_increase(int j) const {
        switch (state_[j]) {
        case VarState::lower: return ub_[j] > lb_[j];
        case VarState::upper: return false;
        case VarState::free: return x_[j] < ub_[j];
        default: return false;
        }
    }
    bool can_decrease(int j) const {
        switch (state_[j]) {
        case VarState::lower: return false;
        case VarState::upper: return lb_[j] < ub_[j];
        case VarState::free: return x_[j] > lb_[j];
        default: return false;
        }
    }

    double infeasibility(int j) const {
        const double v = x_[j];
        if (v < lb_[j] - primal_tol * std::max(1.0, std::abs(lb_[j]))) return lb_[j] - v;
        if (v > ub_[j] + primal_tol * std::max(1.0, std::abs(ub_[j]))) return v - ub_[j];
        return 0.0;
    }

    // Put every nonbasic column at the bound its reduced cost asks for. Fails when a
    // column would need a bound it does not have.
    bool make_dual_feasible() {
        for (int j = 0; j < width_; ++j) {
            if (state_[j] == VarState::basic) continue;
            const double d = d_[j];
            if (lb_[j] == ub_[j]) {
                state_[j] = VarState::lower;
                x_[j] = lb_[j];
            } else if (d > dual_tol) {
                if (!std::isfinite(lb_[j])) return false;
                state_[j] = VarState::lower;
                x_[j] = lb_[j];
            } else if (d < -dual_tol) {
                if (!std::isfinite(ub_[j])) return false;
                state_[j] = VarState::upper;
                x_[j] = ub_[j];
            }
        }
        return true;
    }

    // Deterministic cost perturbation in the direction that keeps nonbasic columns dual
    // feasible; breaks the ties that zero-cost columns create in the dual ratio test.
    void perturb_costs() {
        for (int j = 0; j < width_; ++j) {
            if (state_[j] == VarState::basic || lb_[j] == ub_[j]) continue;
            std::uint64_t h = static_cast<std::uint64_t>(j) * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL;
            h ^= h >> 31;
            h *= 0xBF58476D1CE4E5B9ULL;
            h ^= h >> 29;
            const double u = 0.5 + 0.5 * static_cast<double>(h >> 11) * 0x1.0p-53;
            const double delta = perturb_scale * (1.0 + std::abs(true_cost_[j])) * u;
            if (state_[j] == VarState::lower) cost_[j] += delta;
            else if (state_[j] == VarState::upper) cost_[j] -= delta;
        }
    }

    Status run() {
        normalise_nonbasic();
        cost_ = true_cost_;
        perturb_costs();
        compute_reduced_costs();
        const long limit = 50L * (m_ + width_) + 10000;
        long local_iters = 0;
        if (make_dual_feasible()) {
            compute_basic_values();
            double detected = 0;
            const Status st = dual_phase(local_iters, limit, detected);
            cost_ = true_cost_;
            if (st == Status::optimal) {
                compute_reduced_costs();
                return primal_phase(local_iters, limit);
            }
            // A clear infeasibility certificate is accepted; a marginal one is rechecked.
            if (st == Status::infeasible && detected > 1e-6) return st;
            normalise_nonbasic();
        }
        cost_ = true_cost_;
        compute_basic_values();
        const Status st = primal_feasibility_phase(local_iters, limit);
        if (st != Status::optimal) return st;
        compute_reduced_costs();
        return primal_phase(local_iters, limit);
    }

    Status dual_phase(long& iters, long limit, double& detected) {
        int degenerate_run = 0;
        while (true) {
            if (iters >= limit) return Status::iteration_limit;
            const bool bland = degenerate_run > 50;
            int p = -1;
            double worst = 0;
            for (int r = 0; r < m_; ++r) {
                const double inf_r = infeasibility(head_[r]);
                if (inf_r <= 0) continue;
                if (bland) {
                    if (p < 0 || head_[r] < head_[p]) p = r;
                } else if (inf_r > worst) {
                    worst = inf_r;
                    p = r;
                }
            }
            if (p < 0) return Status::optimal;
            const int leaving = head_[p];
            const bool below = x_[leaving] < lb_[leaving];
            const double target = below ? lb_[leaving] : ub_[leaving];
            // below: need -T_pj * delta_j > 0; above: < 0. Harris two-pass ratio test:
            // bound the step with relaxed dual feasibility, then take the largest pivot.
            const double* prow = &tab_[static_cast<std::size_t>(p) * width_];
            auto eligible = [&](int j) {
                if (state_[j] == VarState::basic) return false;
                const double a = prow[j];
                if (std::abs(a) <= pivot_tol) return false;
                const bool want_increase = below ? a < 0 : a > 0;
                return want_increase ? can_increase(j) : can_decrease(j);
            };
            double bound = std::numeric_limits<double>::infinity();
            for (int j = 0; j < width_; ++j)
                if (eligible(j))
                    bound = std::min(bound, (std::abs(d_[j]) + (bland ? 1e-12 : dual_tol)) / std::abs(prow[j]));
            double max_abs = 0;
            if (bland)
                for (int j = 0; j < width_; ++j)
                    if (eligible(j) && std::abs(d_[j]) / std::abs(prow[j]) <= bound)
                        max_abs = std::max(max_abs, std::abs(prow[j]));
            int q = -1;
            double best_abs = 0, best_ratio = 0;
            for (int j = 0; j < width_; ++j) {
                if (!eligible(j)) continue;
                const double ratio = std::abs(d_[j]) / std::abs(prow[j]);
                if (ratio > bound) continue;
                // Bland: first column in index order among those with a usable pivot
                if (bland ? (q < 0 && std::abs(prow[j]) >= 1e-3 * max_abs) : std::abs(prow[j]) > best_abs) {
                    best_abs = std::abs(prow[j]);
                    best_ratio = ratio;
                    q = j;
                }
            }
            if (q < 0) {
                detected = infeasibility(leaving) / std::max(1.0, std::abs(target));
                return Status::infeasible;
            }
            const double step = (x_[leaving] - target) / prow[q];
            for (int r = 0; r < m_; ++r) {
                const double a = t(r, q);
                if (a != 0.0) x_[head_[r]] -= a * step;
            }
            x_[q] += step;
            x_[leaving] = target;
            state_[leaving] = below ? VarState::lower : VarState::upper;
            update_duals(p, q);
            pivot(p, q);
            state_[q] = VarState::basic;
            ++iters;
            ++iterations_;
            degenerate_run = best_ratio <= 1e-12 ? degenerate_run + 1 : 0;
        }
    }

    void update_duals(int p, int q) {
        const double* prow = &tab_[static_cast<std::size_t>(p) * width_];
        const double f = d_[q] / prow[q];
        if (f != 0.0)
            for (int j = 0; j < width_; ++j)
                if (prow[j] != 0.0) d_[j] -= f * prow[j];
        d_[q] = 0.0;
    }

    // Pricing + ratio test with the given per-column costs; shared by both primal phases.
    Status primal_iterate(long& iters, long limit, bool phase_one) {
        int degenerate_run = 0;
        while (true) {
            if (iters >= limit) return Status::iteration_limit;
            if (phase_one) {
                set_phase_one_costs();
                if (phase_one_done()) return Status::optimal;
            }
            const bool bland = degenerate_run > 50;
            int q = -1;
            double best = 0;
            int dir = 0;
            for (int j = 0; j < width_; ++j) {
                if (state_[j] == VarState::basic) continue;
                const double d = d_[j];
                int s = 0;
                if (d < -dual_tol && can_increase(j)) s = 1;
                else if (d > dual_tol && can_decrease(j)) s = -1;
                if (!s) continue;
                if (bland) {
                    q = j;
                    dir = s;
                    break;
                }
                if (std::abs(d) > best) {
                    best = std::abs(d);
                    q = j;
                    dir = s;
                }
            }
            if (q < 0) return phase_one ? Status::infeasible : Status::optimal;

            // Harris two-pass ratio test: the step may overshoot bounds by the feasibility
            // tolerance, and among rows that block within that step the largest pivot wins.
            auto row_limit = [&](int r, double a, double slack) {
                const int b = head_[r];
                const double v = x_[b];
                auto tol = [&](double bnd) { return slack * primal_tol * std::max(1.0, std::abs(bnd)); };
                if (phase_one) {
                    // infeasible basics may move up to the violated bound only
                    if (a < 0) {
                        if (v > ub_[b]) return (v - ub_[b] + tol(ub_[b])) / -a;
                        if (std::isfinite(lb_[b]) && v >= lb_[b]) return (v - lb_[b] + tol(lb_[b])) / -a;
                    } else {
                        if (v < lb_[b]) return (lb_[b] - v + tol(lb_[b])) / a;
                        if (std::isfinite(ub_[b]) && v <= ub_[b]) return (ub_[b] - v + tol(ub_[b])) / a;
                    }
                    return std::numeric_limits<double>::infinity();
                }
                if (a < 0 && std::isfinite(lb_[b])) return (std::max(0.0, v - lb_[b]) + tol(lb_[b])) / -a;
                if (a > 0 && std::isfinite(ub_[b])) return (std::max(0.0, ub_[b] - v) + tol(ub_[b])) / a;
                return std::numeric_limits<double>::infinity();
            };
            double own = std::numeric_limits<double>::infinity();
            if (dir > 0 && std::isfinite(ub_[q])) own = ub_[q] - x_[q];
            if (dir < 0 && std::isfinite(lb_[q])) own = x_[q] - lb_[q];
            double bound = own;
            for (int r = 0; r < m_; ++r) {
                const double a = -t(r, q) * dir; // change of basic r per unit step
                if (std::abs(a) <= pivot_tol) continue;
                bound = std::min(bound, row_limit(r, a, bland ? 0.0 : 1.0));
            }
            int p = -1;
            double p_abs = 0;
            double step = own;
            if (!(own <= bound)) {
                for (int r = 0; r < m_; ++r) {
                    const double a = -t(r, q) * dir;
                    if (std::abs(a) <= pivot_tol) continue;
                    const double lim = row_limit(r, a, 0.0);
                    if (lim > bound + (bland ? 1e-12 : 0.0)) continue;
                    const bool better = bland ? (p < 0 || head_[r] < head_[p]) : std::abs(a) > p_abs;
                    if (better) {
                        p = r;
                        p_abs = std::abs(a);
                        step = std::max(0.0, lim);
                    }
                }
            }
            if (!std::isfinite(step)) return Status::unbounded;
            for (int r = 0; r < m_; ++r) {
                const double a = t(r, q);
                if (a != 0.0) x_[head_[r]] -= a * dir * step;
            }
            x_[q] += dir * step;
            ++iters;
            ++iterations_;
            degenerate_run = step <= 1e-12 ? degenerate_run + 1 : 0;
            if (p < 0) {
                // bound flip
                state_[q] = dir > 0 ? VarState::upper : VarState::lower;
                x_[q] = dir > 0 ? ub_[q] : lb_[q];
                continue;
            }
            const int leaving = head_[p];
            const double a = -t(p, q) * dir;
            if (phase_one) {
                const double v = x_[leaving];
                const bool to_lower = std::abs(v - lb_[leaving]) <= std::abs(v - ub_[leaving]);
                x_[leaving] = to_lower ? lb_[leaving] : ub_[leaving];
                state_[leaving] = to_lower ? VarState::lower : VarState::upper;
            } else {
                x_[leaving] = a < 0 ? lb_[leaving] : ub_[leaving];
                state_[leaving] = a < 0 ? VarState::lower : VarState::upper;
            }
            update_duals(p, q);
            pivot(p, q);
            state_[q] = VarState::basic;
        }
    }

    Status primal_phase(long& iters, long limit) { return primal_iterate(iters, limit, false); }

    // Minimise the sum of bound violations of basic columns, never letting a feasible
    // basic column become infeasible.
    Status primal_feasibility_phase(long& iters, long limit) {
        const auto saved = cost_;
        const Status st = primal_iterate(iters, limit, true);
        cost_ = saved;
        return st;
    }

    void set_phase_one_costs() {
        std::fill(cost_.begin(), cost_.end(), 0.0);
        for (int r = 0; r < m_; ++r) {
            const int b = head_[r];
            if (x_[b] < lb_[b] - primal_tol * std::max(1.0, std::abs(lb_[b]))) cost_[b] = -1.0;
            else if (x_[b] > ub_[b] + primal_tol * std::max(1.0, std::abs(ub_[b]))) cost_[b] = 1.0;
        }
        compute_reduced_costs();
    }

    bool phase_one_done() const {
        for (int r = 0; r < m_; ++r)
            if (infeasibility(head_[r]) > 0) return false;
        return true;
    }

    bool residual_ok() const {
        for (int i = 0; i < m_; ++i) {
            double s = 0;
            double scale = 1.0;
            for (const auto& e : prob_.rows[i]) {
                s += e.val * x_[e.col];
                scale = std::max(scale, std::abs(e.val * x_[e.col]));
            }
            if (std::abs(s - x_[n_ + i]) > 1e-8 * scale) return false;
        }
        return true;
    }

    Problem prob_;
    int n_ = 0, m_ = 0, width_ = 0;
    std::vector<double> lb_, ub_, cost_, true_cost_, x_, d_, rhs_, tab_;
    std::vector<int> head_, nz_;
    std::vector<VarState> state_;
    long iterations_ = 0;
    long pivots_since_reset_ = 0;
    Status status_ = Status::iteration_limit;
};

} // namespace ots::lp
