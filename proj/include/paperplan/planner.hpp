#pragma once

// Solution strategies over the master problem: relax-and-fix rounding of a
// column generation relaxation, the demand linkage between phases and the
// four ways of chaining or integrating the phases.

#include <chrono>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "paperplan/master.hpp"

namespace paperplan::planner {

using master::ColumnKey;
using master::ColumnKind;
using master::DemandShift;
using master::MasterProblem;
using master::Origin;
using master::RelaxedSolution;
using master::Scope;

enum class Strategy : std::uint8_t {
  kS123,   // phases solved one after another: 3, then 2, then 1
  kS1_23,  // phases 2 and 3 together, then phase 1
  kS12_3,  // phase 3, then phases 1 and 2 together
  kS123I,  // one master over all three phases
};

inline constexpr Strategy kAllStrategies[] = {Strategy::kS123, Strategy::kS1_23, Strategy::kS12_3, Strategy::kS123I};

inline const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::kS123: return "S123";
    case Strategy::kS1_23: return "S1_23";
    case Strategy::kS12_3: return "S12_3";
    case Strategy::kS123I: return "S123I";
  }
  return "?";
}

inline Strategy parse_strategy(const std::string& name) {
  for (Strategy s : kAllStrategies)
    if (name == to_string(s)) return s;
  throw std::invalid_argument("unknown strategy '" + name + "' (expected S123, S1_23, S12_3 or S123I)");
}

// ---------------------------------------------------------------------------
// Options and results.

struct RoundingOptions {
  double time_limit_per_block = 60.0;
  long node_limit = 2000;
  double relative_gap = 1e-4;
};

struct PlannerOptions {
  master::ColgenOptions colgen;
  RoundingOptions rounding;
};

struct PhaseMetrics {
  double cut_or_production_cost = 0.0;  // x1 production for phase 1, trim loss for phases 2-3
  double stock_cost = 0.0;
  double waste = 0.0;               // cm (phase 2) or cm^2 (phase 3); zero for phase 1
  std::vector<double> stock_units;  // per period (sub-period for phase 3)
  double max_capacity_fraction = 0.0;
  bool present = false;
};

// Cost of a block's integer columns at the moment the block was fixed.
struct BlockRecord {
  std::string name;
  std::vector<int> columns;
  double fixed_cost = 0.0;
};

struct PlanSolution {
  Scope scope;
  std::vector<ColumnKey> keys;
  std::vector<Origin> origins;
  std::vector<double> relaxed;
  std::vector<double> rounded;
  double relaxed_objective = 0.0;
  double rounded_objective = 0.0;
  PhaseMetrics phase[3];
  master::ColumnStats columns;
  int used_initial = 0;    // pattern columns with rounded value >= 1
  int used_generated = 0;
  int colgen_iterations = 0;
  bool colgen_truncated = false;
  std::vector<double> history;
  long nodes = 0;
  int truncated_blocks = 0;
  int backtracks = 0;
  std::vector<BlockRecord> blocks;
  double relaxation_seconds = 0.0;
  double rounding_seconds = 0.0;
};

class RoundingFailure : public std::runtime_error {
 public:
  RoundingFailure(const std::string& what, std::string block, bool timeout)
      : std::runtime_error(what), block_(std::move(block)), timeout_(timeout) {}
  const std::string& block() const { return block_; }
  bool timeout() const { return timeout_; }

 private:
  std::string block_;
  bool timeout_;
};

// ---------------------------------------------------------------------------
// Demand linkage.

struct DemandLink {
  std::vector<double> delta2;  // [i2]
  Array3 delta1;               // [k][m1][t]
  std::vector<std::optional<double>> alpha;  // [i2], empty where d2 = 0
};

// Reels of each type consumed by the phase-3 cutting plan.
inline std::vector<double> compute_delta2(const std::vector<ColumnKey>& keys, const std::vector<double>& values,
                                          int reel_types) {
  std::vector<double> delta(reel_types, 0.0);
  for (std::size_t j = 0; j < keys.size(); ++j)
    if (keys[j].kind == ColumnKind::kY3) delta[keys[j].a] += values[j];
  return delta;
}

inline std::vector<double> compute_delta2(const PlanSolution& plan, int reel_types) {
  return compute_delta2(plan.keys, plan.rounded, reel_types);
}

// Jumbos of each (k, m1, t) consumed by the phase-2 cutting plan.
inline Array3 compute_delta1(const std::vector<ColumnKey>& keys, const std::vector<double>& values,
                             const Dimensions& d) {
  Array3 delta(d.grammages, d.paper_machines, d.periods);
  for (std::size_t j = 0; j < keys.size(); ++j)
    if (keys[j].kind == ColumnKind::kY2) delta(keys[j].a, keys[j].b, keys[j].d) += values[j];
  return delta;
}

inline Array3 compute_delta1(const PlanSolution& plan, const Dimensions& d) {
  return compute_delta1(plan.keys, plan.rounded, d);
}

inline std::vector<std::optional<double>> compute_alpha(const std::vector<double>& d2_first_period,
                                                        const std::vector<double>& delta2) {
  std::vector<std::optional<double>> alpha(delta2.size());
  for (std::size_t i = 0; i < delta2.size(); ++i)
    if (d2_first_period[i] > 0.0) alpha[i] = (d2_first_period[i] + delta2[i]) / d2_first_period[i] - 1.0;
  return alpha;
}

// ---------------------------------------------------------------------------
// Metrics of a (rounded or relaxed) column assignment.

inline void fill_metrics(const MasterProblem& mp, const std::vector<double>& values, PlanSolution& plan) {
  const Instance& inst = mp.instance();
  const Dimensions& d = inst.dims;
  const Scope& s = mp.scope();
  plan.phase[0] = {};
  plan.phase[1] = {};
  plan.phase[2] = {};
  plan.phase[0].present = s.phase1;
  plan.phase[1].present = s.phase2;
  plan.phase[2].present = s.phase3;
  if (s.phase1) plan.phase[0].stock_units.assign(d.periods, 0.0);
  if (s.phase2) plan.phase[1].stock_units.assign(d.periods, 0.0);
  if (s.phase3) plan.phase[2].stock_units.assign(d.subperiods, 0.0);
  std::vector<double> load1(d.periods, 0.0), load2(d.periods, 0.0), load3(d.subperiods, 0.0);
  plan.used_initial = plan.used_generated = 0;
  for (int j = 0; j < mp.num_columns(); ++j) {
    const auto& col = mp.columns()[j];
    const ColumnKey& key = col.key;
    const double v = values[j];
    const double cost = col.cost * v;
    switch (key.kind) {
      case ColumnKind::kX1:
        plan.phase[0].cut_or_production_cost += cost;
        load1[key.c] += inst.phase1.production_time(key.a, key.b) * v;
        break;
      case ColumnKind::kE1:
        plan.phase[0].stock_cost += cost;
        plan.phase[0].stock_units[key.c] += v;
        break;
      case ColumnKind::kY2:
        plan.phase[1].cut_or_production_cost += cost;
        plan.phase[1].waste += pricing::waste_1d(inst, key.b, key.counts) * v;
        load2[key.d] += inst.phase2.cutting_time(key.a, key.b, key.c) * v;
        break;
      case ColumnKind::kE2:
        plan.phase[1].stock_cost += cost;
        plan.phase[1].stock_units[key.b] += v;
        break;
      case ColumnKind::kY3:
        plan.phase[2].cut_or_production_cost += cost;
        plan.phase[2].waste += pricing::waste_2d(inst, key.a, key.counts) * v;
        load3[key.c] += inst.phase3.cutting_time(key.a, key.b) * v;
        break;
      case ColumnKind::kE3:
        plan.phase[2].stock_cost += cost;
        plan.phase[2].stock_units[key.b] += v;
        break;
    }
    if (key.is_pattern() && v >= 1.0 - 1e-6) (col.origin == Origin::kInitial ? plan.used_initial : plan.used_generated)++;
  }
  auto max_fraction = [](const std::vector<double>& load, const std::vector<double>& cap) {
    double f = 0.0;
    for (std::size_t t = 0; t < load.size(); ++t)
      if (cap[t] > 0.0) f = std::max(f, load[t] / cap[t]);
    return f;
  };
  if (s.phase1) plan.phase[0].max_capacity_fraction = max_fraction(load1, inst.phase1.capacity);
  if (s.phase2) plan.phase[1].max_capacity_fraction = max_fraction(load2, inst.phase2.capacity);
  if (s.phase3) plan.phase[2].max_capacity_fraction = max_fraction(load3, inst.phase3.capacity);
}

// ---------------------------------------------------------------------------
// Relax-and-fix.

namespace detail {

struct Block {
  std::string name;
  std::vector<int> columns;
};

// Phase-3 patterns by sub-period, then phase-2 patterns by period, then
// phase-1 production by period. Blocks without columns are dropped.
inline std::vector<Block> rounding_blocks(const MasterProblem& mp) {
  const Dimensions& d = mp.instance().dims;
  std::vector<Block> blocks;
  auto collect = [&](ColumnKind kind, int period, std::string name) {
    Block b{std::move(name), {}};
    for (int j = 0; j < mp.num_columns(); ++j) {
      const ColumnKey& key = mp.columns()[j].key;
      if (key.kind == kind && key.period() == period) b.columns.push_back(j);
    }
    if (!b.columns.empty()) blocks.push_back(std::move(b));
  };
  if (mp.scope().phase3)
    for (int tau = 0; tau < d.subperiods; ++tau) collect(ColumnKind::kY3, tau, "phase 3, sub-period " + std::to_string(tau));
  if (mp.scope().phase2)
    for (int t = 0; t < d.periods; ++t) collect(ColumnKind::kY2, t, "phase 2, period " + std::to_string(t));
  if (mp.scope().phase1)
    for (int t = 0; t < d.periods; ++t) collect(ColumnKind::kX1, t, "phase 1, period " + std::to_string(t));
  return blocks;
}

}  // namespace detail

// Rounds the relaxation block by block: earlier blocks fixed at their integer
// values, the current block integer, later blocks continuous. A block with no
// integer solution triggers one backtrack that re-solves it merged with the
// previous block; a second failure throws RoundingFailure.
inline PlanSolution relax_and_fix(const MasterProblem& mp, const RelaxedSolution& relaxed,
                                  const RoundingOptions& opts = {}) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const int n = mp.num_columns();
  PlanSolution plan;
  plan.scope = mp.scope();
  for (const auto& c : mp.columns()) {
    plan.keys.push_back(c.key);
    plan.origins.push_back(c.origin);
  }
  plan.relaxed = relaxed.values;
  plan.relaxed_objective = relaxed.objective;
  plan.columns = relaxed.columns;
  plan.colgen_iterations = relaxed.iterations;
  plan.colgen_truncated = relaxed.max_iterations_reached;
  plan.history = relaxed.history;

  const auto blocks = detail::rounding_blocks(mp);
  solvekit::LinearProgram lp = mp.lp();
  std::vector<double> values = relaxed.values;
  solvekit::Basis basis = mp.solution().basis;

  auto solve_blocks = [&](const std::vector<int>& block_ids, solvekit::MipResult& res) {
    solvekit::LinearProgram sub = lp;
    for (int b : block_ids)
      for (int j : blocks[b].columns) sub.integer[j] = true;
    solvekit::MipOptions mo;
    mo.time_limit_seconds = opts.time_limit_per_block;
    mo.node_limit = opts.node_limit;
    mo.relative_gap = opts.relative_gap;
    mo.warm_basis = basis.empty() ? nullptr : &basis;
    res = mp.backend().solve_mip(sub, mo);
    plan.nodes += res.nodes;
    if (res.truncated) ++plan.truncated_blocks;
    return res.has_incumbent();
  };
  auto fix = [&](int b, const std::vector<double>& x) {
    BlockRecord rec{blocks[b].name, blocks[b].columns, 0.0};
    for (int j : blocks[b].columns) {
      const double v = std::round(x[j]);
      lp.lower[j] = lp.upper[j] = v;
      rec.fixed_cost += lp.cost[j] * v;
    }
    plan.blocks.push_back(std::move(rec));
  };
  auto unfix = [&](int b) {
    for (int j : blocks[b].columns) {
      lp.lower[j] = 0.0;
      lp.upper[j] = solvekit::kInfinity;
    }
  };

  for (int b = 0; b < static_cast<int>(blocks.size()); ++b) {
    solvekit::MipResult res;
    if (!solve_blocks({b}, res)) {
      bool timeout = res.status == solvekit::MipStatus::kTimeoutNoIncumbent;
      if (b == 0)
        throw RoundingFailure("rounding failed: no integer solution for block '" + blocks[b].name + "'",
                              blocks[b].name, timeout);
      ++plan.backtracks;
      unfix(b - 1);
      if (!solve_blocks({b - 1, b}, res)) {
        timeout = res.status == solvekit::MipStatus::kTimeoutNoIncumbent;
        throw RoundingFailure("rounding failed: no integer solution for block '" + blocks[b].name +
                                  "' even after releasing '" + blocks[b - 1].name + "'",
                              blocks[b].name, timeout);
      }
      plan.blocks.pop_back();
      fix(b - 1, res.values);
    }
    fix(b, res.values);
    values = res.values;
    basis = res.basis;
  }
  if (blocks.empty()) values = relaxed.values;

  // Stock columns are implied integral once every pattern and production
  // count is; clear floating-point noise.
  for (int j = 0; j < n; ++j) {
    const double r = std::round(values[j]);
    if (std::abs(values[j] - r) <= 1e-6) values[j] = r;
  }
  plan.rounded = values;
  plan.rounded_objective = 0.0;
  for (int j = 0; j < n; ++j) plan.rounded_objective += mp.columns()[j].cost * values[j];
  fill_metrics(mp, values, plan);
  plan.rounding_seconds = std::chrono::duration<double>(clock::now() - start).count();
  return plan;
}

// Column generation plus rounding for one master.
inline PlanSolution solve_component(const Instance& inst, Scope scope, DemandShift shift,
                                    const PlannerOptions& opts = {}) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto mp = master::build_initial(inst, scope, std::move(shift));
  const RelaxedSolution relaxed = master::run_colgen(mp, opts.colgen);
  const double relax_seconds = std::chrono::duration<double>(clock::now() - start).count();
  PlanSolution plan = relax_and_fix(mp, relaxed, opts.rounding);
  plan.relaxation_seconds = relax_seconds;
  return plan;
}

// ---------------------------------------------------------------------------
// Strategies.

enum class RunStatus : std::uint8_t { kOk, kInfeasible, kRoundingFailed, kTimeout, kError };

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::kOk: return "ok";
    case RunStatus::kInfeasible: return "infeasible";
    case RunStatus::kRoundingFailed: return "rounding-failed";
    case RunStatus::kTimeout: return "timeout";
    case RunStatus::kError: return "error";
  }
  return "?";
}

struct ComponentResult {
  std::string name;  // e.g. "phase 3", "phases 2+3"
  bool counted = true;  // false for the preliminary phase-3 solve that only supplies delta2
  PlanSolution plan;
};

struct StrategyReport {
  Strategy strategy = Strategy::kS123;
  RunStatus status = RunStatus::kOk;
  std::string message;
  double relaxed_cost = 0.0;
  double rounded_cost = 0.0;
  PhaseMetrics phase[3];
  master::ColumnStats columns;
  int used_initial = 0;
  int used_generated = 0;
  int iterations = 0;
  long nodes = 0;
  int truncated_blocks = 0;
  int backtracks = 0;
  bool colgen_truncated = false;
  double relaxation_seconds = 0.0;
  double rounding_seconds = 0.0;
  DemandLink link;
  std::vector<ComponentResult> components;

  double gap() const {
    return relaxed_cost != 0.0 ? (rounded_cost - relaxed_cost) / std::abs(relaxed_cost) : 0.0;
  }
};

namespace detail {

inline std::string scope_name(Scope s) {
  std::string out;
  for (int p = 1; p <= 3; ++p)
    if ((p == 1 && s.phase1) || (p == 2 && s.phase2) || (p == 3 && s.phase3)) out += (out.empty() ? "" : "+") + std::to_string(p);
  return (out.size() > 1 ? "phases " : "phase ") + out;
}

inline void accumulate(StrategyReport& r, const ComponentResult& c) {
  const PlanSolution& p = c.plan;
  r.relaxation_seconds += p.relaxation_seconds;
  r.rounding_seconds += p.rounding_seconds;
  if (!c.counted) return;
  r.relaxed_cost += p.relaxed_objective;
  r.rounded_cost += p.rounded_objective;
  for (int ph = 0; ph < 3; ++ph)
    if (p.phase[ph].present) r.phase[ph] = p.phase[ph];
  r.columns.initial += p.columns.initial;
  r.columns.generated += p.columns.generated;
  r.columns.inserted += p.columns.inserted;
  r.used_initial += p.used_initial;
  r.used_generated += p.used_generated;
  r.iterations += p.colgen_iterations;
  r.nodes += p.nodes;
  r.truncated_blocks += p.truncated_blocks;
  r.backtracks += p.backtracks;
  r.colgen_truncated = r.colgen_truncated || p.colgen_truncated;
}

}  // namespace detail

// Runs one strategy end to end. Failures are reported through the status
// and message; the exception never escapes.
inline StrategyReport solve_strategy(const Instance& inst, Strategy strategy, const PlannerOptions& opts = {}) {
  StrategyReport report;
  report.strategy = strategy;
  const Dimensions& d = inst.dims;
  std::string current;
  auto run = [&](Scope scope, DemandShift shift, bool counted = true) -> const PlanSolution& {
    current = detail::scope_name(scope);
    report.components.push_back({current, counted, solve_component(inst, scope, std::move(shift), opts)});
    detail::accumulate(report, report.components.back());
    return report.components.back().plan;
  };
  auto first_period_demand = [&] {
    std::vector<double> v(d.reel_types);
    for (int i2 = 0; i2 < d.reel_types; ++i2) v[i2] = inst.phase2.demand(i2, 0);
    return v;
  };
  try {
    // Every strategy starts from the standalone phase-3 plan, which fixes the
    // reel consumption used to inflate later reel demand.
    const bool p3_counted = strategy == Strategy::kS123 || strategy == Strategy::kS12_3;
    const PlanSolution& p3 = run(Scope::only3(), {}, p3_counted);
    report.link.delta2 = compute_delta2(p3, d.reel_types);
    report.link.alpha = compute_alpha(first_period_demand(), report.link.delta2);
    DemandShift with_delta2;
    with_delta2.delta2 = report.link.delta2;
    switch (strategy) {
      case Strategy::kS123: {
        const PlanSolution& p2 = run(Scope::only2(), with_delta2);
        report.link.delta1 = compute_delta1(p2, d);
        DemandShift s1;
        s1.delta1 = report.link.delta1;
        run(Scope::only1(), s1);
        break;
      }
      case Strategy::kS1_23: {
        const PlanSolution& p23 = run(Scope::phases23(), with_delta2);
        report.link.delta1 = compute_delta1(p23, d);
        DemandShift s1;
        s1.delta1 = report.link.delta1;
        run(Scope::only1(), s1);
        break;
      }
      case Strategy::kS12_3: run(Scope::phases12(), with_delta2); break;
      case Strategy::kS123I: run(Scope::full(), with_delta2); break;
    }
  } catch (const master::MasterInfeasible& e) {
    report.status = RunStatus::kInfeasible;
    report.message = current + ": " + e.what();
  } catch (const RoundingFailure& e) {
    report.status = e.timeout() ? RunStatus::kTimeout : RunStatus::kRoundingFailed;
    report.message = current + ": " + e.what();
  } catch (const std::exception& e) {
    report.status = RunStatus::kError;
    report.message = current + ": " + e.what();
  }
  if (report.status != RunStatus::kOk) {
    report.relaxed_cost = report.rounded_cost = 0.0;
    for (auto& ph : report.phase) ph = {};
  }
  return report;
}

}  // namespace paperplan::planner
