#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace paperplan::solvekit {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Tolerances {
  double feasibility = 1e-7;
  double optimality = 1e-7;
  double complementary_slackness = 1e-6;
  double integrality = 1e-6;
};

enum class Relation : std::uint8_t { kEqual, kLessEqual };

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Row {
  std::vector<Term> terms;
  Relation relation = Relation::kLessEqual;
  double rhs = 0.0;
  std::string name;
};

// A minimization problem over variables with finite lower bounds and
// optional upper bounds. The integrality mask is read only by the MIP solver.
struct LinearProgram {
  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<bool> integer;
  std::vector<std::string> names;
  std::vector<Row> rows;

  int num_vars() const { return static_cast<int>(cost.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  int add_variable(double obj, double lb = 0.0, double ub = kInfinity, bool is_integer = false,
                   std::string name = {}) {
    cost.push_back(obj);
    lower.push_back(lb);
    upper.push_back(ub);
    integer.push_back(is_integer);
    names.push_back(std::move(name));
    return num_vars() - 1;
  }

  int add_row(std::vector<Term> terms, Relation rel, double rhs, std::string name = {}) {
    rows.push_back(Row{std::move(terms), rel, rhs, std::move(name)});
    return num_rows() - 1;
  }

  // Empty string when well-formed.
  std::string check() const {
    const int n = num_vars();
    if (static_cast<int>(lower.size()) != n || static_cast<int>(upper.size()) != n ||
        static_cast<int>(integer.size()) != n)
      return "bound/integrality vectors do not match the number of variables";
    for (int j = 0; j < n; ++j) {
      if (!std::isfinite(cost[j])) return "non-finite cost on variable " + std::to_string(j);
      if (!std::isfinite(lower[j])) return "variable " + std::to_string(j) + " needs a finite lower bound";
      if (std::isnan(upper[j]) || upper[j] < lower[j]) return "variable " + std::to_string(j) + " has empty bounds";
    }
    for (int i = 0; i < num_rows(); ++i) {
      if (!std::isfinite(rows[i].rhs)) return "non-finite rhs on row " + std::to_string(i);
      for (const Term& t : rows[i].terms) {
        if (t.var < 0 || t.var >= n) return "row " + std::to_string(i) + " references an unknown variable";
        if (!std::isfinite(t.coef)) return "non-finite coefficient on row " + std::to_string(i);
      }
    }
    return {};
  }
};

enum class VarStatus : std::uint8_t { kBasic, kAtLower, kAtUpper };

// Basis statuses for structural variables followed by one logical
// (slack) variable per row.
struct Basis {
  std::vector<VarStatus> status;
  bool empty() const { return status.empty(); }
};

enum class LpStatus : std::uint8_t { kOptimal, kInfeasible, kUnbounded, kIterationLimit, kNumericalError };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration-limit";
    case LpStatus::kNumericalError: return "numerical-error";
  }
  return "?";
}

struct LpSolution {
  LpStatus status = LpStatus::kNumericalError;
  std::vector<double> primal;
  std::vector<double> duals;  // one per row; reduced cost = c - duals . A_j
  double objective = 0.0;
  int iterations = 0;
  Basis basis;
};

struct LpOptions {
  Tolerances tol;
  int max_iterations = 0;       // 0: automatic
  int stall_threshold = 50;     // degenerate pivots before Bland's rule
  int refactor_interval = 64;
};

inline double row_activity(const Row& row, const std::vector<double>& x) {
  double s = 0.0;
  for (const Term& t : row.terms) s += t.coef * x[t.var];
  return s;
}

// Writes the problem in CPLEX LP text format for cross-checking with
// external solvers.
inline void write_lp_format(const LinearProgram& lp, std::ostream& out) {
  auto var_name = [&](int j) {
    return (j < static_cast<int>(lp.names.size()) && !lp.names[j].empty()) ? lp.names[j] : "x" + std::to_string(j);
  };
  auto put_terms = [&](const std::vector<Term>& terms) {
    bool first = true;
    for (const Term& t : terms) {
      if (t.coef == 0.0) continue;
      out << (t.coef < 0 ? " - " : (first ? " " : " + ")) << std::abs(t.coef) << " " << var_name(t.var);
      first = false;
    }
    if (first) out << " 0 " << var_name(0);
  };
  out.precision(17);
  out << "Minimize\n obj:";
  std::vector<Term> obj;
  for (int j = 0; j < lp.num_vars(); ++j)
    if (lp.cost[j] != 0.0) obj.push_back({j, lp.cost[j]});
  put_terms(obj);
  out << "\nSubject To\n";
  for (int i = 0; i < lp.num_rows(); ++i) {
    const Row& r = lp.rows[i];
    out << " " << (r.name.empty() ? "r" + std::to_string(i) : r.name) << ":";
    put_terms(r.terms);
    out << (r.relation == Relation::kEqual ? " = " : " <= ") << r.rhs << "\n";
  }
  out << "Bounds\n";
  for (int j = 0; j < lp.num_vars(); ++j) {
    out << " " << lp.lower[j] << " <= " << var_name(j);
    if (std::isfinite(lp.upper[j])) out << " <= " << lp.upper[j];
    out << "\n";
  }
  bool any_int = false;
  for (int j = 0; j < lp.num_vars(); ++j) any_int = any_int || lp.integer[j];
  if (any_int) {
    out << "General\n";
    for (int j = 0; j < lp.num_vars(); ++j)
      if (lp.integer[j]) out << " " << var_name(j) << "\n";
  }
  out << "End\n";
}

}  // namespace paperplan::solvekit
