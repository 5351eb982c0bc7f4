#pragma once

// Depth-first branch-and-bound on top of the simplex engine.
//
// Branching variable: most fractional integer variable, ties to the lowest
// index. The child on the side of the nearest integer is explored first.
// Every `restart_interval` nodes the open node with the best bound is moved
// to the top of the stack. Node and time limits truncate the search; the
// node limit is deterministic, the time limit is a safety net.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "paperplan/solvekit/lp.hpp"
#include "paperplan/solvekit/simplex.hpp"

namespace paperplan::solvekit {

enum class MipStatus : std::uint8_t {
  kOptimal,
  kFeasibleIncumbent,  // search truncated by a limit, incumbent available
  kInfeasible,
  kTimeoutNoIncumbent,
  kUnbounded,
  kNumericalError,
};

inline const char* to_string(MipStatus s) {
  switch (s) {
    case MipStatus::kOptimal: return "optimal";
    case MipStatus::kFeasibleIncumbent: return "feasible-incumbent";
    case MipStatus::kInfeasible: return "infeasible";
    case MipStatus::kTimeoutNoIncumbent: return "timeout-no-incumbent";
    case MipStatus::kUnbounded: return "unbounded";
    case MipStatus::kNumericalError: return "numerical-error";
  }
  return "?";
}

struct MipOptions {
  double time_limit_seconds = 60.0;
  long node_limit = 1'000'000;
  double relative_gap = 1e-9;
  double absolute_gap = 1e-9;
  int restart_interval = 1000;
  LpOptions lp;
  const Basis* warm_basis = nullptr;
};

struct MipResult {
  MipStatus status = MipStatus::kInfeasible;
  std::vector<double> values;
  double objective = kInfinity;
  double bound = -kInfinity;
  long nodes = 0;
  double elapsed_seconds = 0.0;
  bool truncated = false;
  Basis basis;  // basis of the LP that produced the incumbent

  bool has_incumbent() const {
    return status == MipStatus::kOptimal || status == MipStatus::kFeasibleIncumbent;
  }
};

namespace detail {

struct BoundChange {
  int var;
  double lower;
  double upper;
};

struct Node {
  std::vector<BoundChange> changes;
  Basis basis;
  double bound;
};

}  // namespace detail

inline MipResult solve_mip(const LinearProgram& lp, const MipOptions& opts = {}) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

  SimplexEngine engine(lp, opts.lp);
  const int n = lp.num_vars();
  const double int_tol = opts.lp.tol.integrality;

  MipResult result;
  std::vector<double> lower = lp.lower;
  std::vector<double> upper = lp.upper;
  // Integer variables get integral bounds.
  for (int j = 0; j < n; ++j)
    if (lp.integer[j]) {
      lower[j] = std::ceil(lower[j] - int_tol);
      if (std::isfinite(upper[j])) upper[j] = std::floor(upper[j] + int_tol);
      if (upper[j] < lower[j]) {
        result.status = MipStatus::kInfeasible;
        return result;
      }
    }
  const std::vector<double> root_lower = lower;
  const std::vector<double> root_upper = upper;

  auto cutoff = [&](double incumbent) {
    return incumbent - std::max(opts.absolute_gap, opts.relative_gap * std::abs(incumbent));
  };

  std::vector<detail::Node> open;
  open.push_back(detail::Node{{}, opts.warm_basis ? *opts.warm_basis : Basis{}, -kInfinity});
  bool root = true;
  bool limit_hit = false;

  while (!open.empty()) {
    if (result.nodes >= opts.node_limit || elapsed() > opts.time_limit_seconds) {
      limit_hit = true;
      break;
    }
    if (opts.restart_interval > 0 && result.nodes > 0 && result.nodes % opts.restart_interval == 0) {
      auto best = std::min_element(open.begin(), open.end(),
                                   [](const detail::Node& a, const detail::Node& b) { return a.bound < b.bound; });
      std::iter_swap(best, open.end() - 1);
    }
    detail::Node node = std::move(open.back());
    open.pop_back();
    if (result.has_incumbent() && node.bound >= cutoff(result.objective)) continue;
    ++result.nodes;

    lower = root_lower;
    upper = root_upper;
    for (const auto& c : node.changes) {
      lower[c.var] = c.lower;
      upper[c.var] = c.upper;
    }
    LpSolution sol = engine.solve(lower, upper, node.basis.empty() ? nullptr : &node.basis);
    if (sol.status == LpStatus::kInfeasible) {
      root = false;
      continue;
    }
    if (sol.status == LpStatus::kUnbounded) {
      if (root) {
        result.status = MipStatus::kUnbounded;
        result.elapsed_seconds = elapsed();
        return result;
      }
      continue;
    }
    if (sol.status != LpStatus::kOptimal) {
      if (root) {
        result.status = MipStatus::kNumericalError;
        result.elapsed_seconds = elapsed();
        return result;
      }
      continue;
    }
    if (root) result.bound = sol.objective;
    root = false;
    if (result.has_incumbent() && sol.objective >= cutoff(result.objective)) continue;

    int branch = -1;
    double best_frac = 0.0;
    for (int j = 0; j < n; ++j) {
      if (!lp.integer[j]) continue;
      const double v = sol.primal[j];
      const double frac = v - std::floor(v);
      const double dist = std::min(frac, 1.0 - frac);
      if (dist <= int_tol) continue;
      if (dist > best_frac + 1e-12) {
        best_frac = dist;
        branch = j;
      }
    }

    if (branch < 0) {
      // Integral: pin integers exactly and re-solve for the continuous part.
      std::vector<double> lo = lower, hi = upper;
      bool any_continuous = false;
      for (int j = 0; j < n; ++j) {
        if (lp.integer[j]) {
          lo[j] = hi[j] = std::round(sol.primal[j]);
        } else {
          any_continuous = true;
        }
      }
      LpSolution polished = sol;
      if (any_continuous) {
        polished = engine.solve(lo, hi, &sol.basis);
        if (polished.status != LpStatus::kOptimal) continue;
      } else {
        for (int j = 0; j < n; ++j) polished.primal[j] = lo[j];
        polished.objective = 0.0;
        for (int j = 0; j < n; ++j) polished.objective += lp.cost[j] * polished.primal[j];
      }
      for (int j = 0; j < n; ++j)
        if (lp.integer[j]) polished.primal[j] = lo[j];
      bool feasible = true;
      for (const Row& row : lp.rows) {
        const double act = row_activity(row, polished.primal);
        const double tol = opts.lp.tol.feasibility * (1.0 + std::abs(row.rhs));
        if (row.relation == Relation::kEqual ? std::abs(act - row.rhs) > tol : act > row.rhs + tol) {
          feasible = false;
          break;
        }
      }
      if (!feasible) continue;
      if (!result.has_incumbent() || polished.objective < result.objective) {
        result.status = MipStatus::kFeasibleIncumbent;
        result.objective = polished.objective;
        result.values = polished.primal;
        result.basis = sol.basis;
      }
      continue;
    }

    const double v = sol.primal[branch];
    const double down_hi = std::floor(v);
    const double up_lo = std::ceil(v);
    detail::Node down{node.changes, sol.basis, sol.objective};
    down.changes.push_back({branch, lower[branch], down_hi});
    detail::Node up{std::move(node.changes), sol.basis, sol.objective};
    up.changes.push_back({branch, up_lo, upper[branch]});
    const bool up_first = v - down_hi >= 0.5;
    if (up_first) {
      open.push_back(std::move(down));
      open.push_back(std::move(up));
    } else {
      open.push_back(std::move(up));
      open.push_back(std::move(down));
    }
  }

  result.elapsed_seconds = elapsed();
  if (limit_hit) {
    result.truncated = true;
    double bound = result.has_incumbent() ? result.objective : kInfinity;
    for (const auto& node : open) bound = std::min(bound, node.bound);
    if (std::isfinite(bound)) result.bound = std::max(result.bound, bound);
    result.status = result.has_incumbent() ? MipStatus::kFeasibleIncumbent : MipStatus::kTimeoutNoIncumbent;
    return result;
  }
  if (result.has_incumbent()) {
    result.status = MipStatus::kOptimal;
    result.bound = std::max(result.bound, cutoff(result.objective));
    result.bound = std::min(result.bound, result.objective);
  } else {
    result.status = MipStatus::kInfeasible;
  }
  return result;
}

inline MipResult solve_mip(const LinearProgram& lp, double time_limit_seconds) {
  MipOptions opts;
  opts.time_limit_seconds = time_limit_seconds;
  return solve_mip(lp, opts);
}

}  // namespace paperplan::solvekit
