#pragma once

// Bounded-variable primal simplex with an explicit dense basis inverse.
//
// Every row gets a logical column: a slack in [0, inf) for <= rows and a
// fixed [0, 0] logical for = rows. Any basis (cold or warm) is made feasible
// by a composite phase 1 that minimizes the sum of bound violations of the
// basic variables, so the same loop handles cold starts, column additions
// and bound changes in branch-and-bound.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "paperplan/solvekit/lp.hpp"

namespace paperplan::solvekit {

class SimplexEngine {
 public:
  explicit SimplexEngine(const LinearProgram& lp, LpOptions opts = {}) : opts_(opts) {
    if (auto err = lp.check(); !err.empty()) throw std::invalid_argument("malformed LP: " + err);
    m_ = lp.num_rows();
    n_ = lp.num_vars();
    cost_ = lp.cost;
    base_lower_ = lp.lower;
    base_upper_ = lp.upper;
    rhs_.resize(m_);
    rel_.resize(m_);
    std::vector<int> counts(n_, 0);
    for (int i = 0; i < m_; ++i) {
      rhs_[i] = lp.rows[i].rhs;
      rel_[i] = lp.rows[i].relation;
      for (const Term& t : lp.rows[i].terms) ++counts[t.var];
    }
    col_start_.assign(n_ + 1, 0);
    for (int j = 0; j < n_; ++j) col_start_[j + 1] = col_start_[j] + counts[j];
    col_row_.resize(col_start_[n_]);
    col_val_.resize(col_start_[n_]);
    std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
    for (int i = 0; i < m_; ++i)
      for (const Term& t : lp.rows[i].terms) {
        // duplicate terms are summed
        bool merged = false;
        for (int p = col_start_[t.var]; p < fill[t.var]; ++p)
          if (col_row_[p] == i) {
            col_val_[p] += t.coef;
            merged = true;
            break;
          }
        if (!merged) {
          col_row_[fill[t.var]] = i;
          col_val_[fill[t.var]] = t.coef;
          ++fill[t.var];
        }
      }
    // Compact columns whose duplicates were merged.
    std::vector<int> start(n_ + 1, 0);
    std::vector<int> rows;
    std::vector<double> vals;
    for (int j = 0; j < n_; ++j) {
      start[j] = static_cast<int>(rows.size());
      for (int p = col_start_[j]; p < fill[j]; ++p) {
        rows.push_back(col_row_[p]);
        vals.push_back(col_val_[p]);
      }
    }
    start[n_] = static_cast<int>(rows.size());
    col_start_ = std::move(start);
    col_row_ = std::move(rows);
    col_val_ = std::move(vals);
  }

  int num_rows() const { return m_; }
  int num_vars() const { return n_; }
  const std::vector<double>& lower() const { return base_lower_; }
  const std::vector<double>& upper() const { return base_upper_; }

  LpSolution solve(const Basis* warm = nullptr) { return solve(base_lower_, base_upper_, warm); }

  LpSolution solve(const std::vector<double>& lower, const std::vector<double>& upper, const Basis* warm = nullptr) {
    const int total = n_ + m_;
    lb_.assign(total, 0.0);
    ub_.assign(total, kInfinity);
    for (int j = 0; j < n_; ++j) {
      lb_[j] = lower[j];
      ub_[j] = upper[j];
    }
    for (int i = 0; i < m_; ++i) {
      lb_[n_ + i] = 0.0;
      ub_[n_ + i] = rel_[i] == Relation::kEqual ? 0.0 : kInfinity;
    }
    for (int j = 0; j < total; ++j)
      if (ub_[j] < lb_[j]) {
        LpSolution s;
        s.status = LpStatus::kInfeasible;
        return s;
      }

    bool started = false;
    if (warm != nullptr && static_cast<int>(warm->status.size()) == total) {
      state_ = warm->status;
      head_.clear();
      for (int j = 0; j < total; ++j)
        if (state_[j] == VarStatus::kBasic) head_.push_back(j);
      if (static_cast<int>(head_.size()) == m_ && refactor()) started = true;
    }
    if (!started) cold_start();
    for (int j = 0; j < total; ++j)
      if (state_[j] == VarStatus::kAtUpper && !std::isfinite(ub_[j])) state_[j] = VarStatus::kAtLower;
    x_.assign(total, 0.0);
    compute_basic_values();
    return iterate();
  }

 private:
  void cold_start() {
    const int total = n_ + m_;
    state_.assign(total, VarStatus::kAtLower);
    head_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      head_[i] = n_ + i;
      state_[n_ + i] = VarStatus::kBasic;
    }
    refactor();
  }

  double var_cost(int j) const { return j < n_ ? cost_[j] : 0.0; }

  double dot_column(int j, const std::vector<double>& y) const {
    if (j >= n_) return y[j - n_];
    double s = 0.0;
    for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) s += col_val_[p] * y[col_row_[p]];
    return s;
  }

  // alpha = B^-1 A_j
  void ftran(int j, std::vector<double>& alpha) const {
    alpha.assign(m_, 0.0);
    if (j >= n_) {
      const int r = j - n_;
      for (int i = 0; i < m_; ++i) alpha[i] = binv_[static_cast<std::size_t>(i) * m_ + r];
      return;
    }
    for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) {
      const int r = col_row_[p];
      const double v = col_val_[p];
      for (int i = 0; i < m_; ++i) alpha[i] += binv_[static_cast<std::size_t>(i) * m_ + r] * v;
    }
  }

  // y = cb^T B^-1
  void btran(const std::vector<double>& cb, std::vector<double>& y) const {
    y.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      const double c = cb[i];
      if (c == 0.0) continue;
      const double* row = &binv_[static_cast<std::size_t>(i) * m_];
      for (int k = 0; k < m_; ++k) y[k] += c * row[k];
    }
  }

  bool refactor() {
    const std::size_t m = m_;
    std::vector<double> a(m * m, 0.0);
    for (std::size_t c = 0; c < m; ++c) {
      const int j = head_[c];
      if (j >= n_) {
        a[(j - n_) * m + c] = 1.0;
      } else {
        for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) a[col_row_[p] * m + c] = col_val_[p];
      }
    }
    binv_.assign(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) binv_[i * m + i] = 1.0;
    // Gauss-Jordan with partial pivoting.
    for (std::size_t c = 0; c < m; ++c) {
      std::size_t piv = c;
      double best = std::abs(a[c * m + c]);
      for (std::size_t r = c + 1; r < m; ++r)
        if (std::abs(a[r * m + c]) > best) {
          best = std::abs(a[r * m + c]);
          piv = r;
        }
      if (best < 1e-11) return false;
      if (piv != c) {
        for (std::size_t k = 0; k < m; ++k) {
          std::swap(a[c * m + k], a[piv * m + k]);
          std::swap(binv_[c * m + k], binv_[piv * m + k]);
        }
      }
      const double inv = 1.0 / a[c * m + c];
      for (std::size_t k = 0; k < m; ++k) {
        a[c * m + k] *= inv;
        binv_[c * m + k] *= inv;
      }
      for (std::size_t r = 0; r < m; ++r) {
        if (r == c) continue;
        const double f = a[r * m + c];
        if (f == 0.0) continue;
        for (std::size_t k = 0; k < m; ++k) {
          a[r * m + k] -= f * a[c * m + k];
          binv_[r * m + k] -= f * binv_[c * m + k];
        }
      }
    }
    return true;
  }

  void compute_basic_values() {
    const int total = n_ + m_;
    std::vector<double> r(rhs_);
    for (int j = 0; j < total; ++j) {
      if (state_[j] == VarStatus::kBasic) continue;
      const double v = state_[j] == VarStatus::kAtUpper ? ub_[j] : lb_[j];
      x_[j] = v;
      if (v == 0.0) continue;
      if (j >= n_) {
        r[j - n_] -= v;
      } else {
        for (int p = col_start_[j]; p < col_start_[j + 1]; ++p) r[col_row_[p]] -= col_val_[p] * v;
      }
    }
    for (int i = 0; i < m_; ++i) {
      double s = 0.0;
      const double* row = &binv_[static_cast<std::size_t>(i) * m_];
      for (int k = 0; k < m_; ++k) s += row[k] * r[k];
      x_[head_[i]] = s;
    }
  }

  void pivot(int r, const std::vector<double>& alpha) {
    const std::size_t m = m_;
    double* prow = &binv_[r * m];
    const double inv = 1.0 / alpha[r];
    for (std::size_t k = 0; k < m; ++k) prow[k] *= inv;
    for (std::size_t i = 0; i < m; ++i) {
      if (static_cast<int>(i) == r) continue;
      const double f = alpha[i];
      if (f == 0.0) continue;
      double* row = &binv_[i * m];
      for (std::size_t k = 0; k < m; ++k) row[k] -= f * prow[k];
    }
  }

  LpSolution finish(LpStatus status, int iterations, const std::vector<double>& y) {
    LpSolution s;
    s.status = status;
    s.iterations = iterations;
    s.primal.assign(x_.begin(), x_.begin() + n_);
    s.duals = y;
    s.objective = 0.0;
    for (int j = 0; j < n_; ++j) s.objective += cost_[j] * s.primal[j];
    s.basis.status = state_;
    return s;
  }

  LpSolution iterate() {
    const int total = n_ + m_;
    const double tol_feas = opts_.tol.feasibility;
    const double tol_opt = opts_.tol.optimality;
    constexpr double kPivotTol = 1e-9;
    const int max_iter = opts_.max_iterations > 0 ? opts_.max_iterations : 100 * total + 10000;

    std::vector<double> cb(m_), y(m_), alpha(m_);
    int since_refactor = 0;
    int stall = 0;
    bool bland = false;
    int final_checks = 0;

    for (int iter = 0; iter < max_iter; ++iter) {
      if (since_refactor >= opts_.refactor_interval) {
        if (!refactor()) return finish(LpStatus::kNumericalError, iter, {});
        compute_basic_values();
        since_refactor = 0;
      }

      bool phase1 = false;
      for (int i = 0; i < m_; ++i) {
        const int j = head_[i];
        if (x_[j] < lb_[j] - tol_feas) {
          cb[i] = -1.0;
          phase1 = true;
        } else if (x_[j] > ub_[j] + tol_feas) {
          cb[i] = 1.0;
          phase1 = true;
        } else {
          cb[i] = 0.0;
        }
      }
      if (!phase1)
        for (int i = 0; i < m_; ++i) cb[i] = var_cost(head_[i]);
      btran(cb, y);

      int q = -1;
      double best = 0.0;
      for (int j = 0; j < total; ++j) {
        if (state_[j] == VarStatus::kBasic || lb_[j] == ub_[j]) continue;
        const double d = (phase1 ? 0.0 : var_cost(j)) - dot_column(j, y);
        double score = 0.0;
        if (state_[j] == VarStatus::kAtLower && d < -tol_opt) score = -d;
        if (state_[j] == VarStatus::kAtUpper && d > tol_opt) score = d;
        if (score <= 0.0) continue;
        if (bland) {
          q = j;
          break;
        }
        if (score > best) {
          best = score;
          q = j;
        }
      }

      if (q < 0) {
        // Confirm on a fresh factorization before declaring a verdict.
        if (since_refactor > 0 && final_checks < 3) {
          ++final_checks;
          if (!refactor()) return finish(LpStatus::kNumericalError, iter, {});
          compute_basic_values();
          since_refactor = 0;
          continue;
        }
        if (phase1) return finish(LpStatus::kInfeasible, iter, {});
        return finish(LpStatus::kOptimal, iter, y);
      }

      const double dir = state_[q] == VarStatus::kAtLower ? 1.0 : -1.0;
      ftran(q, alpha);

      double theta = kInfinity;
      int leave = -1;
      VarStatus leave_to = VarStatus::kAtLower;
      double leave_pivot = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double a = alpha[i];
        if (std::abs(a) <= kPivotTol) continue;
        const int j = head_[i];
        const double delta = -dir * a;
        const double v = x_[j];
        double limit = kInfinity;
        VarStatus to = VarStatus::kAtLower;
        if (v < lb_[j] - tol_feas) {
          if (delta > 0) {
            limit = (lb_[j] - v) / delta;
            to = VarStatus::kAtLower;
          }
        } else if (v > ub_[j] + tol_feas) {
          if (delta < 0) {
            limit = (v - ub_[j]) / -delta;
            to = VarStatus::kAtUpper;
          }
        } else if (delta < 0) {
          limit = std::max(0.0, (v - lb_[j]) / -delta);
          to = VarStatus::kAtLower;
        } else if (std::isfinite(ub_[j])) {
          limit = std::max(0.0, (ub_[j] - v) / delta);
          to = VarStatus::kAtUpper;
        }
        if (!std::isfinite(limit)) continue;
        bool take = false;
        if (leave < 0 || limit < theta - 1e-12) {
          take = true;
        } else if (limit <= theta + 1e-12) {
          take = bland ? j < head_[leave] : std::abs(a) > std::abs(leave_pivot);
        }
        if (take) {
          theta = limit;
          leave = i;
          leave_to = to;
          leave_pivot = a;
        }
      }

      const double span = ub_[q] - lb_[q];
      const bool flip = std::isfinite(span) && span <= theta;
      if (flip) theta = span;
      if (!std::isfinite(theta)) {
        if (phase1) return finish(LpStatus::kNumericalError, iter, {});
        return finish(LpStatus::kUnbounded, iter, {});
      }

      if (theta <= 1e-12) {
        if (++stall >= opts_.stall_threshold) bland = true;
      } else {
        stall = 0;
        bland = false;
      }

      x_[q] += dir * theta;
      for (int i = 0; i < m_; ++i)
        if (alpha[i] != 0.0) x_[head_[i]] -= dir * alpha[i] * theta;

      if (flip) {
        state_[q] = dir > 0 ? VarStatus::kAtUpper : VarStatus::kAtLower;
        x_[q] = dir > 0 ? ub_[q] : lb_[q];
        continue;
      }
      const int out = head_[leave];
      state_[out] = leave_to;
      x_[out] = leave_to == VarStatus::kAtLower ? lb_[out] : ub_[out];
      head_[leave] = q;
      state_[q] = VarStatus::kBasic;
      pivot(leave, alpha);
      ++since_refactor;
      final_checks = 0;
    }
    return finish(LpStatus::kIterationLimit, max_iter, {});
  }

  LpOptions opts_;
  int m_ = 0;
  int n_ = 0;
  std::vector<int> col_start_;
  std::vector<int> col_row_;
  std::vector<double> col_val_;
  std::vector<double> cost_;
  std::vector<double> rhs_;
  std::vector<Relation> rel_;
  std::vector<double> base_lower_;
  std::vector<double> base_upper_;

  std::vector<double> lb_;
  std::vector<double> ub_;
  std::vector<double> x_;
  std::vector<VarStatus> state_;
  std::vector<int> head_;
  std::vector<double> binv_;
};

inline LpSolution solve_lp(const LinearProgram& lp, const LpOptions& opts = {}, const Basis* warm = nullptr) {
  SimplexEngine engine(lp, opts);
  return engine.solve(warm);
}

}  // namespace paperplan::solvekit
