#pragma once

// Re-evaluates a rounded plan against the instance from scratch: every
// constraint of the in-scope phases, integrality and pattern feasibility.
// Shares only the column key type with the library.

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "paperplan/master.hpp"
#include "support/pattern_oracles.hpp"

namespace oracle {

struct PlanScope {
  bool p1 = true, p2 = true, p3 = true;
};

struct PlanCheck {
  std::vector<std::string> violations;
  double cost = 0.0;
  bool ok() const { return violations.empty(); }
  std::string report() const {
    std::string out;
    for (const auto& v : violations) out += v + "\n";
    return out;
  }
};

// `exact_2d` enumerates two-stage patterns to confirm each sheet pattern is
// cuttable; otherwise only area and per-sheet fit are checked.
inline PlanCheck check_plan(const paperplan::Instance& inst, PlanScope sc, const std::vector<double>& delta2,
                            const paperplan::Array3& delta1, const std::vector<paperplan::master::ColumnKey>& keys,
                            const std::vector<double>& values, bool exact_2d = false, double tol = 1e-6) {
  using paperplan::master::ColumnKind;
  const auto& d = inst.dims;
  const auto& p1 = inst.phase1;
  const auto& p2 = inst.phase2;
  const auto& p3 = inst.phase3;
  const int T = d.periods, Th = d.subperiods;
  PlanCheck out;
  auto fail = [&](const std::string& s) { out.violations.push_back(s); };

  std::map<std::tuple<int, int, int>, double> x1, e1, jumbos_used;
  std::map<std::pair<int, int>, double> e2, reels_cut, e3, sheets_cut;
  std::vector<double> reels_for_sheets(d.reel_types, 0.0), load1(T, 0.0), load2(T, 0.0), load3(Th, 0.0);
  std::map<int, std::set<std::vector<int>>> feasible_2d;

  for (std::size_t j = 0; j < keys.size(); ++j) {
    const auto& key = keys[j];
    const double v = values[j];
    if (v < -tol) fail("negative value for column " + to_string(key));
    if (std::abs(v - std::round(v)) > tol) fail("fractional value for column " + to_string(key));
    switch (key.kind) {
      case ColumnKind::kX1:
        x1[{key.a, key.b, key.c}] += v;
        load1[key.c] += p1.production_time(key.a, key.b) * v;
        out.cost += p1.production_cost(key.a, key.b, key.c) * p1.jumbo_weight(key.a, key.b) * v;
        break;
      case ColumnKind::kE1:
        e1[{key.a, key.b, key.c}] += v;
        out.cost += p1.stock_cost(key.a, key.c) * p1.jumbo_weight(key.a, key.b) * v;
        break;
      case ColumnKind::kY2: {
        const int k = key.a, m1 = key.b, m2 = key.c, t = key.d;
        double used = 0;
        for (int i2 = 0; i2 < d.reel_types; ++i2) {
          if (key.counts[i2] < 0) fail("negative count in " + to_string(key));
          if (key.counts[i2] > 0 && p2.grammage[i2] != k) fail("grammage mismatch in " + to_string(key));
          used += p2.reel_length[i2] * key.counts[i2];
          reels_cut[{i2, t}] += key.counts[i2] * v;
        }
        if (used > p1.jumbo_length[m1] + 1e-9) fail("1D pattern too long: " + to_string(key));
        if (used == 0) fail("empty 1D pattern: " + to_string(key));
        jumbos_used[{k, m1, t}] += v;
        load2[t] += p2.cutting_time(k, m1, m2) * v;
        out.cost += p2.waste_cost(k, t) * (p1.jumbo_length[m1] - used) * v;
        break;
      }
      case ColumnKind::kE2:
        e2[{key.a, key.b}] += v;
        out.cost += p2.stock_cost(key.a, key.b) * p2.reel_weight[key.a] * v;
        break;
      case ColumnKind::kY3: {
        const int i2 = key.a, m3 = key.b, tau = key.c, k = p2.grammage[i2];
        double area = 0;
        for (int i3 = 0; i3 < d.sheet_types; ++i3) {
          const int q = key.counts[i3];
          if (q < 0) fail("negative count in " + to_string(key));
          if (q > 0 && p3.grammage[i3] != k) fail("grammage mismatch in " + to_string(key));
          if (q > 0 && (p3.sheet_length[i3] > p2.reel_length[i2] || p3.sheet_width[i3] > p2.reel_width[i2]))
            fail("sheet larger than reel in " + to_string(key));
          area += p3.sheet_length[i3] * p3.sheet_width[i3] * q;
          sheets_cut[{i3, tau}] += q * v;
        }
        const double reel_area = p2.reel_length[i2] * p2.reel_width[i2];
        if (area > reel_area + 1e-6) fail("2D pattern exceeds reel area: " + to_string(key));
        if (area == 0) fail("empty 2D pattern: " + to_string(key));
        if (exact_2d) {
          auto it = feasible_2d.find(i2);
          if (it == feasible_2d.end()) {
            auto all = enumerate_2d(inst, i2);
            it = feasible_2d.emplace(i2, std::set<std::vector<int>>(all.begin(), all.end())).first;
          }
          if (!it->second.count(key.counts)) fail("2D pattern not guillotine-cuttable: " + to_string(key));
        }
        reels_for_sheets[i2] += v;
        load3[tau] += p3.cutting_time(i2, m3) * v;
        out.cost += p3.waste_cost(k, tau) * (reel_area - area) * v;
        break;
      }
      case ColumnKind::kE3:
        e3[{key.a, key.b}] += v;
        out.cost += p3.stock_cost(key.a, key.b) * p3.sheet_weight[key.a] * v;
        break;
    }
  }

  auto near = [&](double a, double b) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); };
  auto num = [](double v) {
    std::ostringstream s;
    s << v;
    return s.str();
  };
  if (sc.p1) {
    for (int k = 0; k < d.grammages; ++k)
      for (int m1 = 0; m1 < d.paper_machines; ++m1)
        for (int t = 0; t < T; ++t) {
          const double prev = t > 0 ? e1[{k, m1, t - 1}] : 0.0;
          double need = p1.demand(k, m1, t);
          if (sc.p2) need += jumbos_used[{k, m1, t}];
          else if (!delta1.data().empty()) need += delta1(k, m1, t);
          const double lhs = x1[{k, m1, t}] + prev - e1[{k, m1, t}];
          if (!near(lhs, need))
            fail("jumbo balance k=" + std::to_string(k) + " m1=" + std::to_string(m1) + " t=" + std::to_string(t) +
                 ": " + num(lhs) + " != " + num(need));
        }
    for (int t = 0; t < T; ++t)
      if (load1[t] > p1.capacity[t] * (1 + tol) + tol)
        fail("capacity 1 exceeded at t=" + std::to_string(t) + ": " + num(load1[t]) + " > " + num(p1.capacity[t]));
  }
  if (sc.p2) {
    for (int i2 = 0; i2 < d.reel_types; ++i2)
      for (int t = 0; t < T; ++t) {
        const double prev = t > 0 ? e2[{i2, t - 1}] : 0.0;
        double need = p2.demand(i2, t);
        const bool inflate = !delta2.empty() && (t > 0 || !sc.p3);
        if (inflate) need += delta2[i2];
        if (t == 0 && sc.p3) need += reels_for_sheets[i2];
        const double lhs = reels_cut[{i2, t}] + prev - e2[{i2, t}];
        if (!near(lhs, need))
          fail("reel balance i2=" + std::to_string(i2) + " t=" + std::to_string(t) + ": " + num(lhs) +
               " != " + num(need));
      }
    for (int t = 0; t < T; ++t)
      if (load2[t] > p2.capacity[t] * (1 + tol) + tol)
        fail("capacity 2 exceeded at t=" + std::to_string(t) + ": " + num(load2[t]) + " > " + num(p2.capacity[t]));
  }
  if (sc.p3) {
    for (int i3 = 0; i3 < d.sheet_types; ++i3)
      for (int tau = 0; tau < Th; ++tau) {
        const double prev = tau > 0 ? e3[{i3, tau - 1}] : 0.0;
        const double lhs = sheets_cut[{i3, tau}] + prev - e3[{i3, tau}];
        if (!near(lhs, p3.demand(i3, tau)))
          fail("sheet balance i3=" + std::to_string(i3) + " tau=" + std::to_string(tau) + ": " + num(lhs) +
               " != " + num(p3.demand(i3, tau)));
      }
    for (int tau = 0; tau < Th; ++tau)
      if (load3[tau] > p3.capacity[tau] * (1 + tol) + tol)
        fail("capacity 3 exceeded at tau=" + std::to_string(tau) + ": " + num(load3[tau]) + " > " +
             num(p3.capacity[tau]));
  }
  return out;
}

}  // namespace oracle
