#pragma once

// Self-contained LP/MIP kernel: bounded primal simplex with duals and a
// branch-and-bound MIP driver, behind a small backend interface so another
// solver can be substituted.

#include "paperplan/solvekit/lp.hpp"
#include "paperplan/solvekit/mip.hpp"
#include "paperplan/solvekit/simplex.hpp"

namespace paperplan::solvekit {

class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual LpSolution solve_lp(const LinearProgram& lp, const LpOptions& opts, const Basis* warm) const = 0;
  virtual MipResult solve_mip(const LinearProgram& lp, const MipOptions& opts) const = 0;
};

class BuiltinBackend final : public SolverBackend {
 public:
  LpSolution solve_lp(const LinearProgram& lp, const LpOptions& opts, const Basis* warm) const override {
    return solvekit::solve_lp(lp, opts, warm);
  }
  MipResult solve_mip(const LinearProgram& lp, const MipOptions& opts) const override {
    return solvekit::solve_mip(lp, opts);
  }
};

inline const SolverBackend& builtin_backend() {
  static const BuiltinBackend backend;
  return backend;
}

}  // namespace paperplan::solvekit
