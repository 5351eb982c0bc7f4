#pragma once

// Restricted master LP of the relaxed integrated model, optionally limited to
// a subset of the three phases, and the column generation loop around it.
//
// Rows, in this order (zero-based indices, families skipped when their phase
// is out of scope):
//   JumboBalance(k, m1, t):  x1 + e1[t-1] - e1[t] - sum y2 = d1 + delta1
//   Capacity1(t):            sum f1 x1 <= C1
//   ReelDemand(i2, t):       sum a y2 + e2[t-1] - e2[t] - [t=0] sum y3 = d2 (+ delta2)
//   Capacity2(t):            sum f2 y2 <= C2
//   SheetDemand(i3, tau):    sum a y3 + e3[tau-1] - e3[tau] = d3
//   Capacity3(tau):          sum f3 y3 <= C3
// delta2 is added to every ReelDemand row with t > 0, and to t = 0 as well
// when phase 3 is not part of the master.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "paperplan/instances.hpp"
#include "paperplan/pricing.hpp"
#include "paperplan/solvekit.hpp"

namespace paperplan::master {

using pricing::DualView;
using solvekit::LinearProgram;
using solvekit::LpSolution;
using solvekit::LpStatus;
using solvekit::Relation;

struct Scope {
  bool phase1 = true;
  bool phase2 = true;
  bool phase3 = true;

  static Scope full() { return {true, true, true}; }
  static Scope only1() { return {true, false, false}; }
  static Scope only2() { return {false, true, false}; }
  static Scope only3() { return {false, false, true}; }
  static Scope phases12() { return {true, true, false}; }
  static Scope phases23() { return {false, true, true}; }

  bool operator==(const Scope&) const = default;
};

inline std::string to_string(const Scope& s) {
  std::string out;
  if (s.phase1) out += "1";
  if (s.phase2) out += "2";
  if (s.phase3) out += "3";
  return out.empty() ? "none" : out;
}

// ---------------------------------------------------------------------------
// Rows.

enum class RowFamily : std::uint8_t { kJumboBalance, kCapacity1, kReelDemand, kCapacity2, kSheetDemand, kCapacity3 };

struct RowId {
  RowFamily family = RowFamily::kJumboBalance;
  int a = 0;  // k | t | i2 | t | i3 | tau
  int b = 0;  // m1 | - | t | - | tau | -
  int c = 0;  // t for JumboBalance

  static RowId jumbo_balance(int k, int m1, int t) { return {RowFamily::kJumboBalance, k, m1, t}; }
  static RowId capacity1(int t) { return {RowFamily::kCapacity1, t, 0, 0}; }
  static RowId reel_demand(int i2, int t) { return {RowFamily::kReelDemand, i2, t, 0}; }
  static RowId capacity2(int t) { return {RowFamily::kCapacity2, t, 0, 0}; }
  static RowId sheet_demand(int i3, int tau) { return {RowFamily::kSheetDemand, i3, tau, 0}; }
  static RowId capacity3(int tau) { return {RowFamily::kCapacity3, tau, 0, 0}; }

  auto operator<=>(const RowId&) const = default;
};

inline std::string to_string(const RowId& r) {
  const auto s = [](int v) { return std::to_string(v); };
  switch (r.family) {
    case RowFamily::kJumboBalance: return "JumboBalance(k=" + s(r.a) + ",m1=" + s(r.b) + ",t=" + s(r.c) + ")";
    case RowFamily::kCapacity1: return "Capacity1(t=" + s(r.a) + ")";
    case RowFamily::kReelDemand: return "ReelDemand(i2=" + s(r.a) + ",t=" + s(r.b) + ")";
    case RowFamily::kCapacity2: return "Capacity2(t=" + s(r.a) + ")";
    case RowFamily::kSheetDemand: return "SheetDemand(i3=" + s(r.a) + ",tau=" + s(r.b) + ")";
    case RowFamily::kCapacity3: return "Capacity3(tau=" + s(r.a) + ")";
  }
  return "?";
}

class RowLayout {
 public:
  RowLayout() = default;
  RowLayout(const Dimensions& d, Scope scope) : dims_(d), scope_(scope) {
    int at = 0;
    auto place = [&](int fam, bool on, int count) {
      offset_[fam] = on ? at : -1;
      size_[fam] = on ? count : 0;
      at += size_[fam];
    };
    place(0, scope.phase1, d.grammages * d.paper_machines * d.periods);
    place(1, scope.phase1, d.periods);
    place(2, scope.phase2, d.reel_types * d.periods);
    place(3, scope.phase2, d.periods);
    place(4, scope.phase3, d.sheet_types * d.subperiods);
    place(5, scope.phase3, d.subperiods);
    total_ = at;
  }

  int size() const { return total_; }
  const Scope& scope() const { return scope_; }

  // Flat row index, or -1 if the family is not in scope.
  int index(const RowId& r) const {
    const int fam = static_cast<int>(r.family);
    if (offset_[fam] < 0) return -1;
    switch (r.family) {
      case RowFamily::kJumboBalance:
        return offset_[fam] + (r.a * dims_.paper_machines + r.b) * dims_.periods + r.c;
      case RowFamily::kReelDemand: return offset_[fam] + r.a * dims_.periods + r.b;
      case RowFamily::kSheetDemand: return offset_[fam] + r.a * dims_.subperiods + r.b;
      default: return offset_[fam] + r.a;
    }
  }

  RowId at(int index) const {
    for (int fam = 0; fam < 6; ++fam) {
      if (offset_[fam] < 0 || index < offset_[fam] || index >= offset_[fam] + size_[fam]) continue;
      const int i = index - offset_[fam];
      switch (static_cast<RowFamily>(fam)) {
        case RowFamily::kJumboBalance: {
          const int t = i % dims_.periods;
          const int m1 = (i / dims_.periods) % dims_.paper_machines;
          return RowId::jumbo_balance(i / (dims_.periods * dims_.paper_machines), m1, t);
        }
        case RowFamily::kReelDemand: return RowId::reel_demand(i / dims_.periods, i % dims_.periods);
        case RowFamily::kSheetDemand: return RowId::sheet_demand(i / dims_.subperiods, i % dims_.subperiods);
        default: return RowId{static_cast<RowFamily>(fam), i, 0, 0};
      }
    }
    throw std::out_of_range("row index out of range");
  }

 private:
  Dimensions dims_;
  Scope scope_;
  int offset_[6] = {-1, -1, -1, -1, -1, -1};
  int size_[6] = {0, 0, 0, 0, 0, 0};
  int total_ = 0;
};

// ---------------------------------------------------------------------------
// Columns.

enum class ColumnKind : std::uint8_t { kX1, kE1, kY2, kE2, kY3, kE3 };

// Identity of a master column. Index meaning by kind:
//   X1/E1 (k, m1, t)   Y2 (k, m1, m2, t) + counts[i2]   E2 (i2, t)
//   Y3 (i2, m3, tau) + counts[i3]                        E3 (i3, tau)
struct ColumnKey {
  ColumnKind kind = ColumnKind::kX1;
  int a = 0, b = 0, c = 0, d = 0;
  std::vector<int> counts;

  static ColumnKey x1(int k, int m1, int t) { return {ColumnKind::kX1, k, m1, t, 0, {}}; }
  static ColumnKey e1(int k, int m1, int t) { return {ColumnKind::kE1, k, m1, t, 0, {}}; }
  static ColumnKey y2(int k, int m1, int m2, int t, std::vector<int> counts) {
    return {ColumnKind::kY2, k, m1, m2, t, std::move(counts)};
  }
  static ColumnKey e2(int i2, int t) { return {ColumnKind::kE2, i2, t, 0, 0, {}}; }
  static ColumnKey y3(int i2, int m3, int tau, std::vector<int> counts) {
    return {ColumnKind::kY3, i2, m3, tau, 0, std::move(counts)};
  }
  static ColumnKey e3(int i3, int tau) { return {ColumnKind::kE3, i3, tau, 0, 0, {}}; }

  bool is_pattern() const { return kind == ColumnKind::kY2 || kind == ColumnKind::kY3; }
  // Period (phases 1-2) or sub-period (phase 3) the column belongs to.
  int period() const {
    switch (kind) {
      case ColumnKind::kX1:
      case ColumnKind::kE1: return c;
      case ColumnKind::kY2: return d;
      case ColumnKind::kE2:
      case ColumnKind::kE3: return b;
      case ColumnKind::kY3: return c;
    }
    return 0;
  }
  int phase() const {
    switch (kind) {
      case ColumnKind::kX1:
      case ColumnKind::kE1: return 1;
      case ColumnKind::kY2:
      case ColumnKind::kE2: return 2;
      default: return 3;
    }
  }

  auto operator<=>(const ColumnKey&) const = default;
  bool operator==(const ColumnKey&) const = default;
};

inline std::string to_string(const ColumnKey& key) {
  const auto s = [](int v) { return std::to_string(v); };
  auto counts = [&] {
    std::string out = "[";
    for (std::size_t i = 0; i < key.counts.size(); ++i) out += (i ? " " : "") + s(key.counts[i]);
    return out + "]";
  };
  switch (key.kind) {
    case ColumnKind::kX1: return "x1_" + s(key.a) + "_" + s(key.b) + "_" + s(key.c);
    case ColumnKind::kE1: return "e1_" + s(key.a) + "_" + s(key.b) + "_" + s(key.c);
    case ColumnKind::kY2: return "y2_" + s(key.a) + "_" + s(key.b) + "_" + s(key.c) + "_" + s(key.d) + counts();
    case ColumnKind::kE2: return "e2_" + s(key.a) + "_" + s(key.b);
    case ColumnKind::kY3: return "y3_" + s(key.a) + "_" + s(key.b) + "_" + s(key.c) + counts();
    case ColumnKind::kE3: return "e3_" + s(key.a) + "_" + s(key.b);
  }
  return "?";
}

enum class Origin : std::uint8_t { kStructural, kInitial, kGenerated };

struct Entry {
  RowId row;
  double coef = 0.0;
};

// Objective coefficient and row coefficients of a column, built from its key.
struct CanonicalColumn {
  double cost = 0.0;
  std::vector<Entry> entries;
};

struct Column {
  ColumnKey key;
  Origin origin = Origin::kStructural;
  double cost = 0.0;
  std::vector<solvekit::Term> terms;  // (row index, coefficient)
};

// Demand inflation handed down from other phases.
struct DemandShift {
  std::vector<double> delta2;  // [i2], empty means zero
  Array3 delta1;               // [k][m1][t], empty means zero
};

class MasterInfeasible : public std::runtime_error {
 public:
  MasterInfeasible(const std::string& what, std::optional<RowId> row, std::string family)
      : std::runtime_error(what), row_(row), family_(std::move(family)) {}
  const std::optional<RowId>& row() const { return row_; }
  // "Capacity1", "Capacity2", "Capacity3", "Capacity" (several) or "Demand".
  const std::string& family() const { return family_; }

 private:
  std::optional<RowId> row_;
  std::string family_;
};

class MasterProblem {
 public:
  MasterProblem(Instance instance, Scope scope, DemandShift shift = {},
                const solvekit::SolverBackend& backend = solvekit::builtin_backend())
      : inst_(std::move(instance)), scope_(scope), shift_(std::move(shift)), backend_(&backend),
        layout_(inst_.dims, scope) {
    if (auto errs = validate(inst_); !errs.empty()) throw std::invalid_argument("invalid instance: " + errs.front());
    const Dimensions& d = inst_.dims;
    if (!shift_.delta2.empty() && static_cast<int>(shift_.delta2.size()) != d.reel_types)
      throw std::invalid_argument("delta2 must have one entry per reel type");
    if (!shift_.delta1.data().empty() &&
        (shift_.delta1.dim0() != d.grammages || shift_.delta1.dim1() != d.paper_machines ||
         shift_.delta1.dim2() != d.periods))
      throw std::invalid_argument("delta1 must be shaped [K][M1][T]");
    for (int i = 0; i < layout_.size(); ++i) {
      const RowId r = layout_.at(i);
      const bool cap = r.family == RowFamily::kCapacity1 || r.family == RowFamily::kCapacity2 ||
                       r.family == RowFamily::kCapacity3;
      lp_.add_row({}, cap ? Relation::kLessEqual : Relation::kEqual, rhs(r), to_string(r));
    }
  }

  const Instance& instance() const { return inst_; }
  const Scope& scope() const { return scope_; }
  const DemandShift& shift() const { return shift_; }
  const RowLayout& layout() const { return layout_; }
  const LinearProgram& lp() const { return lp_; }
  const std::vector<Column>& columns() const { return columns_; }
  int num_columns() const { return static_cast<int>(columns_.size()); }
  const solvekit::SolverBackend& backend() const { return *backend_; }

  std::optional<int> find(const ColumnKey& key) const {
    auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  double rhs(const RowId& r) const {
    const auto& p1 = inst_.phase1;
    const auto& p2 = inst_.phase2;
    const auto& p3 = inst_.phase3;
    switch (r.family) {
      case RowFamily::kJumboBalance:
        return p1.demand(r.a, r.b, r.c) + (shift_.delta1.data().empty() ? 0.0 : shift_.delta1(r.a, r.b, r.c));
      case RowFamily::kCapacity1: return p1.capacity[r.a];
      case RowFamily::kReelDemand: {
        double v = p2.demand(r.a, r.b);
        if (!shift_.delta2.empty() && (r.b > 0 || !scope_.phase3)) v += shift_.delta2[r.a];
        return v;
      }
      case RowFamily::kCapacity2: return p2.capacity[r.a];
      case RowFamily::kSheetDemand: return p3.demand(r.a, r.b);
      case RowFamily::kCapacity3: return p3.capacity[r.a];
    }
    return 0.0;
  }

  // Builds the column for `key` from the instance data alone. Entries in rows
  // outside the scope are dropped.
  CanonicalColumn canonical_column(const ColumnKey& key) const {
    const Dimensions& d = inst_.dims;
    const auto& p1 = inst_.phase1;
    const auto& p2 = inst_.phase2;
    const auto& p3 = inst_.phase3;
    CanonicalColumn col;
    auto put = [&](RowId r, double v) {
      if (layout_.index(r) >= 0 && v != 0.0) col.entries.push_back({r, v});
    };
    switch (key.kind) {
      case ColumnKind::kX1: {
        const auto [k, m1, t] = std::tuple{key.a, key.b, key.c};
        col.cost = p1.production_cost(k, m1, t) * p1.jumbo_weight(k, m1);
        put(RowId::jumbo_balance(k, m1, t), 1.0);
        put(RowId::capacity1(t), p1.production_time(k, m1));
        break;
      }
      case ColumnKind::kE1: {
        const auto [k, m1, t] = std::tuple{key.a, key.b, key.c};
        col.cost = p1.stock_cost(k, t) * p1.jumbo_weight(k, m1);
        put(RowId::jumbo_balance(k, m1, t), -1.0);
        if (t + 1 < d.periods) put(RowId::jumbo_balance(k, m1, t + 1), 1.0);
        break;
      }
      case ColumnKind::kY2: {
        const auto [k, m1, m2, t] = std::tuple{key.a, key.b, key.c, key.d};
        col.cost = p2.waste_cost(k, t) * pricing::waste_1d(inst_, m1, key.counts);
        put(RowId::jumbo_balance(k, m1, t), -1.0);
        for (int i2 = 0; i2 < d.reel_types; ++i2) put(RowId::reel_demand(i2, t), key.counts[i2]);
        put(RowId::capacity2(t), p2.cutting_time(k, m1, m2));
        break;
      }
      case ColumnKind::kE2: {
        const auto [i2, t] = std::tuple{key.a, key.b};
        col.cost = p2.stock_cost(i2, t) * p2.reel_weight[i2];
        put(RowId::reel_demand(i2, t), -1.0);
        if (t + 1 < d.periods) put(RowId::reel_demand(i2, t + 1), 1.0);
        break;
      }
      case ColumnKind::kY3: {
        const auto [i2, m3, tau] = std::tuple{key.a, key.b, key.c};
        const int k = p2.grammage[i2];
        col.cost = p3.waste_cost(k, tau) * pricing::waste_2d(inst_, i2, key.counts);
        put(RowId::reel_demand(i2, 0), -1.0);
        for (int i3 = 0; i3 < d.sheet_types; ++i3) put(RowId::sheet_demand(i3, tau), key.counts[i3]);
        put(RowId::capacity3(tau), p3.cutting_time(i2, m3));
        break;
      }
      case ColumnKind::kE3: {
        const auto [i3, tau] = std::tuple{key.a, key.b};
        col.cost = p3.stock_cost(i3, tau) * p3.sheet_weight[i3];
        put(RowId::sheet_demand(i3, tau), -1.0);
        if (tau + 1 < d.subperiods) put(RowId::sheet_demand(i3, tau + 1), 1.0);
        break;
      }
    }
    // Keep entries in row order so stored columns are canonical.
    std::sort(col.entries.begin(), col.entries.end(),
              [&](const Entry& x, const Entry& y) { return layout_.index(x.row) < layout_.index(y.row); });
    return col;
  }

  // Throws std::invalid_argument when the key does not describe a column of
  // this master (wrong indices, phase out of scope, infeasible pattern).
  void check_key(const ColumnKey& key) const {
    const Dimensions& d = inst_.dims;
    auto in = [](int v, int n) { return v >= 0 && v < n; };
    bool ok = true;
    switch (key.kind) {
      case ColumnKind::kX1:
      case ColumnKind::kE1:
        ok = scope_.phase1 && in(key.a, d.grammages) && in(key.b, d.paper_machines) && in(key.c, d.periods);
        break;
      case ColumnKind::kY2:
        ok = scope_.phase2 && in(key.a, d.grammages) && in(key.b, d.paper_machines) && in(key.c, d.rewinders) &&
             in(key.d, d.periods) && static_cast<int>(key.counts.size()) == d.reel_types;
        if (ok) {
          for (int i2 = 0; i2 < d.reel_types; ++i2)
            if (key.counts[i2] < 0 || (key.counts[i2] > 0 && inst_.phase2.grammage[i2] != key.a)) ok = false;
          if (ok && pricing::waste_1d(inst_, key.b, key.counts) < 0.0)
            throw std::invalid_argument("pattern exceeds the jumbo length: " + to_string(key));
        }
        break;
      case ColumnKind::kE2: ok = scope_.phase2 && in(key.a, d.reel_types) && in(key.b, d.periods); break;
      case ColumnKind::kY3:
        ok = scope_.phase3 && in(key.a, d.reel_types) && in(key.b, d.cutters) && in(key.c, d.subperiods) &&
             static_cast<int>(key.counts.size()) == d.sheet_types;
        if (ok) {
          for (int i3 = 0; i3 < d.sheet_types; ++i3)
            if (key.counts[i3] < 0 || (key.counts[i3] > 0 && inst_.phase3.grammage[i3] != inst_.phase2.grammage[key.a]))
              ok = false;
          if (ok && pricing::waste_2d(inst_, key.a, key.counts) < 0.0)
            throw std::invalid_argument("pattern exceeds the reel area: " + to_string(key));
        }
        break;
      case ColumnKind::kE3: ok = scope_.phase3 && in(key.a, d.sheet_types) && in(key.b, d.subperiods); break;
    }
    if (!ok) throw std::invalid_argument("column does not belong to this master: " + to_string(key));
  }

  // Inserts the column; false if an identical key is already present.
  bool add_column(const ColumnKey& key, Origin origin = Origin::kGenerated) {
    check_key(key);
    if (index_.count(key)) return false;
    const CanonicalColumn cc = canonical_column(key);
    Column col{key, origin, cc.cost, {}};
    const int var = lp_.add_variable(cc.cost, 0.0, solvekit::kInfinity, false, to_string(key));
    for (const Entry& e : cc.entries) {
      const int row = layout_.index(e.row);
      col.terms.push_back({row, e.coef});
      lp_.rows[row].terms.push_back({var, e.coef});
    }
    index_.emplace(key, static_cast<int>(columns_.size()));
    columns_.push_back(std::move(col));
    return true;
  }

  // Solves the current restricted master, warm-starting from the previous
  // basis. Throws MasterInfeasible with a diagnosis when infeasible.
  const LpSolution& solve(const solvekit::LpOptions& opts = {}) {
    solvekit::Basis warm;
    const solvekit::Basis* warm_ptr = nullptr;
    if (!basis_.empty()) {
      // Previous basis: structurals, then logicals. New columns start at 0.
      const int old_n = static_cast<int>(basis_.status.size()) - lp_.num_rows();
      warm.status.assign(basis_.status.begin(), basis_.status.begin() + old_n);
      warm.status.resize(lp_.num_vars(), solvekit::VarStatus::kAtLower);
      warm.status.insert(warm.status.end(), basis_.status.begin() + old_n, basis_.status.end());
      warm_ptr = &warm;
    }
    solution_ = backend_->solve_lp(lp_, opts, warm_ptr);
    if (solution_.status == LpStatus::kOptimal) {
      basis_ = solution_.basis;
      solved_ = true;
      return solution_;
    }
    if (solution_.status == LpStatus::kInfeasible) throw diagnose(opts);
    throw std::runtime_error(std::string("master LP failed: ") + solvekit::to_string(solution_.status));
  }

  bool solved() const { return solved_; }
  const LpSolution& solution() const { return solution_; }

  double dual(const RowId& r) const {
    const int i = layout_.index(r);
    return (i < 0 || !solved_) ? 0.0 : solution_.duals[i];
  }

  DualView duals() const {
    DualView v = DualView::zeros(inst_);
    if (!solved_) return v;
    for (int i = 0; i < layout_.size(); ++i) set_dual(v, layout_.at(i), solution_.duals[i]);
    return v;
  }

  double column_reduced_cost(const ColumnKey& key, const DualView& duals) const {
    const CanonicalColumn cc = canonical_column(key);
    double rc = cc.cost;
    for (const Entry& e : cc.entries) rc -= dual_value(duals, e.row) * e.coef;
    return rc;
  }

  // Phase-I problem over the current columns: minimise the total capacity
  // overtime with every column cost set to zero. Its duals price columns that
  // reduce overtime.
  struct OvertimeSolution {
    double total = 0.0;
    std::optional<RowId> worst_row;
    double worst = 0.0;
    DualView duals;
  };

  OvertimeSolution solve_overtime(const solvekit::LpOptions& opts = {}) const {
    LinearProgram ph1 = lp_;
    std::fill(ph1.cost.begin(), ph1.cost.end(), 0.0);
    std::vector<std::pair<int, int>> elastic;  // (row, var)
    for (int i = 0; i < ph1.num_rows(); ++i)
      if (ph1.rows[i].relation == Relation::kLessEqual) {
        const int v = ph1.add_variable(1.0, 0.0, solvekit::kInfinity, false, "Overtime_" + ph1.rows[i].name);
        ph1.rows[i].terms.push_back({v, -1.0});
        elastic.push_back({i, v});
      }
    const LpSolution sol = backend_->solve_lp(ph1, opts, nullptr);
    if (sol.status != LpStatus::kOptimal)
      throw std::runtime_error(std::string("overtime LP failed: ") + solvekit::to_string(sol.status));
    OvertimeSolution out;
    out.total = sol.objective;
    for (const auto& [row, var] : elastic)
      if (sol.primal[var] > out.worst) {
        out.worst = sol.primal[var];
        out.worst_row = layout_.at(row);
      }
    out.duals = DualView::zeros(inst_);
    for (int i = 0; i < layout_.size(); ++i) set_dual(out.duals, layout_.at(i), sol.duals[i]);
    return out;
  }

  static void set_dual(DualView& v, const RowId& r, double y) {
    switch (r.family) {
      case RowFamily::kJumboBalance: v.balance(r.a, r.b, r.c) = y; break;
      case RowFamily::kCapacity1: v.capacity1[r.a] = y; break;
      case RowFamily::kReelDemand: v.reel(r.a, r.b) = y; break;
      case RowFamily::kCapacity2: v.capacity2[r.a] = y; break;
      case RowFamily::kSheetDemand: v.sheet(r.a, r.b) = y; break;
      case RowFamily::kCapacity3: v.capacity3[r.a] = y; break;
    }
  }

  static double dual_value(const DualView& v, const RowId& r) {
    switch (r.family) {
      case RowFamily::kJumboBalance: return v.balance(r.a, r.b, r.c);
      case RowFamily::kCapacity1: return v.capacity1[r.a];
      case RowFamily::kReelDemand: return v.reel(r.a, r.b);
      case RowFamily::kCapacity2: return v.capacity2[r.a];
      case RowFamily::kSheetDemand: return v.sheet(r.a, r.b);
      case RowFamily::kCapacity3: return v.capacity3[r.a];
    }
    return 0.0;
  }

  void write_lp(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    solvekit::write_lp_format(lp_, out);
  }

 private:
  MasterInfeasible diagnose(const solvekit::LpOptions& opts) const {
    auto feasible_without = [&](std::vector<RowFamily> dropped) {
      LinearProgram relaxed = lp_;
      for (int i = 0; i < relaxed.num_rows(); ++i)
        if (std::find(dropped.begin(), dropped.end(), layout_.at(i).family) != dropped.end()) {
          relaxed.rows[i].terms.clear();
          relaxed.rows[i].rhs = 0.0;
        }
      return backend_->solve_lp(relaxed, opts, nullptr).status == LpStatus::kOptimal;
    };
    const std::pair<bool, RowFamily> caps[] = {{scope_.phase3, RowFamily::kCapacity3},
                                               {scope_.phase2, RowFamily::kCapacity2},
                                               {scope_.phase1, RowFamily::kCapacity1}};
    for (const auto& [on, fam] : caps) {
      if (!on || !feasible_without({fam})) continue;
      const std::string name = fam == RowFamily::kCapacity3   ? "Capacity3"
                               : fam == RowFamily::kCapacity2 ? "Capacity2"
                                                              : "Capacity1";
      // Name the first period whose capacity cannot be met on its own.
      std::optional<RowId> row;
      for (int i = 0; i < lp_.num_rows() && !row; ++i)
        if (layout_.at(i).family == fam) row = layout_.at(i);
      return MasterInfeasible("master infeasible: demand exceeds " + name + " capacity", row, name);
    }
    if (feasible_without({RowFamily::kCapacity1, RowFamily::kCapacity2, RowFamily::kCapacity3}))
      return MasterInfeasible("master infeasible: demand exceeds the combined machine capacity of several phases",
                              std::nullopt, "Capacity");
    // Without capacities only an unreachable demand row can block.
    for (int i = 0; i < lp_.num_rows(); ++i) {
      const RowId r = layout_.at(i);
      if (lp_.rows[i].relation != Relation::kEqual || lp_.rows[i].rhs <= 0.0) continue;
      bool supplied = false;
      for (const auto& t : lp_.rows[i].terms) supplied = supplied || t.coef > 0.0;
      if (!supplied)
        return MasterInfeasible("master infeasible: no column can supply " + to_string(r), r, "Demand");
    }
    return MasterInfeasible("master infeasible: demand rows cannot be balanced by the available columns",
                            std::nullopt, "Demand");
  }

  Instance inst_;
  Scope scope_;
  DemandShift shift_;
  const solvekit::SolverBackend* backend_;
  RowLayout layout_;
  LinearProgram lp_;
  std::vector<Column> columns_;
  std::map<ColumnKey, int> index_;
  solvekit::Basis basis_;
  LpSolution solution_;
  bool solved_ = false;
};

// Master with stock and production columns for every phase in scope plus
// the homogeneous patterns on every machine and (sub-)period. Throws
// MasterInfeasible naming the row when some demanded item fits no pattern.
inline MasterProblem build_initial(const Instance& inst, Scope scope, DemandShift shift = {},
                                   const solvekit::SolverBackend& backend = solvekit::builtin_backend()) {
  MasterProblem mp(inst, scope, std::move(shift), backend);
  const Dimensions& d = inst.dims;
  if (scope.phase1)
    for (int k = 0; k < d.grammages; ++k)
      for (int m1 = 0; m1 < d.paper_machines; ++m1)
        for (int t = 0; t < d.periods; ++t) {
          mp.add_column(ColumnKey::x1(k, m1, t), Origin::kStructural);
          mp.add_column(ColumnKey::e1(k, m1, t), Origin::kStructural);
        }
  if (scope.phase2) {
    for (const auto& p : pricing::homogeneous_1d(inst))
      for (int t = 0; t < d.periods; ++t)
        for (int m2 = 0; m2 < d.rewinders; ++m2)
          mp.add_column(ColumnKey::y2(p.k, p.m1, m2, t, p.counts), Origin::kInitial);
    for (int i2 = 0; i2 < d.reel_types; ++i2)
      for (int t = 0; t < d.periods; ++t) mp.add_column(ColumnKey::e2(i2, t), Origin::kStructural);
  }
  if (scope.phase3) {
    for (const auto& p : pricing::homogeneous_2d(inst))
      for (int tau = 0; tau < d.subperiods; ++tau)
        for (int m3 = 0; m3 < d.cutters; ++m3)
          mp.add_column(ColumnKey::y3(p.i2, m3, tau, p.counts), Origin::kInitial);
    for (int i3 = 0; i3 < d.sheet_types; ++i3)
      for (int tau = 0; tau < d.subperiods; ++tau) mp.add_column(ColumnKey::e3(i3, tau), Origin::kStructural);
  }
  // A demand row with positive right-hand side needs some column that
  // produces its item; stock alone only shifts production in time.
  const LinearProgram& lp = mp.lp();
  for (int i = 0; i < lp.num_rows(); ++i) {
    const RowId r = mp.layout().at(i);
    if (r.family != RowFamily::kReelDemand && r.family != RowFamily::kSheetDemand) continue;
    if (lp.rows[i].rhs <= 0.0) continue;
    bool produced = false;
    for (const Column& col : mp.columns()) {
      if (!col.key.is_pattern()) continue;
      if ((r.family == RowFamily::kReelDemand && col.key.kind == ColumnKind::kY2 && col.key.counts[r.a] > 0) ||
          (r.family == RowFamily::kSheetDemand && col.key.kind == ColumnKind::kY3 && col.key.counts[r.a] > 0)) {
        produced = true;
        break;
      }
    }
    if (!produced)
      throw MasterInfeasible("master infeasible by construction: no pattern produces the item of " + to_string(r), r,
                             "Demand");
  }
  return mp;
}

// ---------------------------------------------------------------------------
// Column generation.

struct ColgenOptions {
  int max_iterations = 200;
  double price_tolerance = pricing::kPriceTolerance;
  solvekit::LpOptions lp;
  std::optional<std::filesystem::path> dump_dir;  // LP text per iteration
};

struct ColumnStats {
  int initial = 0;    // homogeneous pattern columns
  int generated = 0;  // improving patterns returned by pricing
  int inserted = 0;   // of those, new to the pool
};

struct RelaxedSolution {
  double objective = 0.0;
  std::vector<double> values;  // per master column
  DualView duals;
  std::vector<double> history;  // master objective after each solve
  int iterations = 0;
  bool max_iterations_reached = false;
  ColumnStats columns;
};

namespace detail {

// Prices every (k, m1, t) and (i2, tau) subproblem against `duals` and
// inserts the improving non-empty patterns. Returns the number inserted.
inline int price_and_insert(MasterProblem& mp, const Instance& priced_inst, const DualView& duals, double tol,
                            ColumnStats& stats) {
  const Dimensions& d = priced_inst.dims;
  int added = 0;
  if (mp.scope().phase2)
    for (int k = 0; k < d.grammages; ++k)
      for (int m1 = 0; m1 < d.paper_machines; ++m1)
        for (int t = 0; t < d.periods; ++t) {
          auto priced = pricing::price_1d(priced_inst, duals, k, m1, t);
          if (priced.pattern.empty() || priced.reduced_cost >= -tol) continue;
          ++stats.generated;
          if (mp.add_column(ColumnKey::y2(k, m1, priced.m2, t, std::move(priced.pattern.counts)))) ++added;
        }
  if (mp.scope().phase3)
    for (int i2 = 0; i2 < d.reel_types; ++i2)
      for (int tau = 0; tau < d.subperiods; ++tau) {
        auto priced = pricing::build_pattern_2d(priced_inst, duals, i2, tau);
        if (priced.pattern.empty() || priced.reduced_cost >= -tol) continue;
        ++stats.generated;
        if (mp.add_column(ColumnKey::y3(i2, priced.m3, tau, std::move(priced.pattern.counts)))) ++added;
      }
  stats.inserted += added;
  return added;
}

// Restores feasibility of a restricted master that fails only on capacity:
// generates columns that lower total overtime until none is left, or throws
// when no pattern can remove it.
inline void restore_capacity_feasibility(MasterProblem& mp, const ColgenOptions& opts, ColumnStats& stats) {
  Instance zero_cost = mp.instance();
  const Dimensions& d = zero_cost.dims;
  zero_cost.phase2.waste_cost = Array2(d.grammages, d.periods, 0.0);
  zero_cost.phase3.waste_cost = Array2(d.grammages, d.subperiods, 0.0);
  for (int iter = 0; iter <= opts.max_iterations; ++iter) {
    const auto ot = mp.solve_overtime(opts.lp);
    if (ot.total <= 1e-6) return;
    if (iter == opts.max_iterations || price_and_insert(mp, zero_cost, ot.duals, opts.price_tolerance, stats) == 0) {
      const RowId r = *ot.worst_row;
      const std::string fam = r.family == RowFamily::kCapacity1   ? "Capacity1"
                              : r.family == RowFamily::kCapacity2 ? "Capacity2"
                                                                  : "Capacity3";
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.1f", ot.worst);
      throw MasterInfeasible("master infeasible: demand exceeds " + fam + " capacity (" + to_string(r) + " short by " +
                                 buf + " minutes)",
                             r, fam);
    }
  }
}

}  // namespace detail

inline RelaxedSolution run_colgen(MasterProblem& mp, const ColgenOptions& opts = {}) {
  RelaxedSolution out;
  for (const Column& c : mp.columns()) out.columns.initial += c.origin == Origin::kInitial;
  if (opts.dump_dir) std::filesystem::create_directories(*opts.dump_dir);
  for (int iter = 0;; ++iter) {
    if (opts.dump_dir) {
      char name[32];
      std::snprintf(name, sizeof name, "master_%03d.lp", iter);
      mp.write_lp(*opts.dump_dir / name);
    }
    try {
      mp.solve(opts.lp);
    } catch (const MasterInfeasible& e) {
      // Homogeneous patterns may overload a machine that better patterns fit.
      if (iter > 0 || e.family().rfind("Capacity", 0) != 0) throw;
      detail::restore_capacity_feasibility(mp, opts, out.columns);
      mp.solve(opts.lp);
    }
    out.history.push_back(mp.solution().objective);
    if (iter >= opts.max_iterations) {
      out.max_iterations_reached = true;
      break;
    }
    const int added = detail::price_and_insert(mp, mp.instance(), mp.duals(), opts.price_tolerance, out.columns);
    out.iterations = iter + 1;
    if (added == 0) break;
  }
  out.objective = mp.solution().objective;
  out.values.assign(mp.solution().primal.begin(), mp.solution().primal.begin() + mp.num_columns());
  out.duals = mp.duals();
  return out;
}

}  // namespace paperplan::master
