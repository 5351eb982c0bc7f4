#pragma once

// Cutting patterns and pricing oracles: the unbounded integer knapsack
// kernel, homogeneous seed patterns, 1D pricing of jumbo-to-reel patterns and
// two-stage guillotine pricing of reel-to-sheet patterns.
//
// Reduced costs are taken against the master's column for the pattern:
//   Y2(k, m1, m2, t):  cost c2[k][t] * p2, -1 in JumboBalance(k, m1, t),
//                      +a[i2] in ReelDemand(i2, t), +f2[k][m1][m2] in Capacity2(t)
//   Y3(i2, m3, tau):   cost c3[k][tau] * p3, -1 in ReelDemand(i2, 1),
//                      +a[i3] in SheetDemand(i3, tau), +f3[i2][m3] in Capacity3(tau)
// Rows missing from the master simply carry a zero dual.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "paperplan/array.hpp"
#include "paperplan/instances.hpp"

namespace paperplan::pricing {

inline constexpr double kPriceTolerance = 1e-6;

struct KnapsackSpec {
  std::vector<int> sizes;
  std::vector<double> values;
  int capacity = 0;
};

struct KnapsackResult {
  std::vector<int> counts;
  double value = 0.0;
};

// Exact unbounded integer knapsack by dynamic programming over the integer
// capacity. Items with value <= 0 are never used. Among optimal count
// vectors the lexicographically largest one (by item index) is returned.
inline KnapsackResult solve_knapsack(const KnapsackSpec& spec) {
  const int n = static_cast<int>(spec.sizes.size());
  if (static_cast<int>(spec.values.size()) != n) throw std::invalid_argument("knapsack: sizes/values mismatch");
  if (spec.capacity < 0) throw std::invalid_argument("knapsack: negative capacity");
  for (int s : spec.sizes)
    if (s <= 0) throw std::invalid_argument("knapsack: item sizes must be positive");
  const int C = spec.capacity;
  // best[i][c]: optimum over items i..n-1 with capacity c.
  std::vector<std::vector<double>> best(n + 1, std::vector<double>(C + 1, 0.0));
  for (int i = n - 1; i >= 0; --i) {
    auto& cur = best[i];
    const auto& next = best[i + 1];
    const int s = spec.sizes[i];
    const double v = spec.values[i];
    for (int c = 0; c <= C; ++c) {
      cur[c] = next[c];
      if (v > 0.0 && c >= s) cur[c] = std::max(cur[c], cur[c - s] + v);
    }
  }
  KnapsackResult out;
  out.counts.assign(n, 0);
  int c = C;
  double target = best[0][C];
  for (int i = 0; i < n; ++i) {
    const int s = spec.sizes[i];
    const double v = spec.values[i];
    if (v > 0.0) {
      for (int q = c / s; q > 0; --q) {
        const double got = q * v + best[i + 1][c - q * s];
        if (got >= target - 1e-12 * (1.0 + std::abs(target))) {
          out.counts[i] = q;
          c -= q * s;
          target -= q * v;
          break;
        }
      }
    }
  }
  out.value = 0.0;
  for (int i = 0; i < n; ++i) out.value += out.counts[i] * spec.values[i];
  return out;
}

// ---------------------------------------------------------------------------
// Patterns. Count vectors span all item types; entries outside the grammage
// set are zero.

struct Pattern1D {
  int k = 0;
  int m1 = 0;
  std::vector<int> counts;  // [i2]
  double waste = 0.0;       // cm of jumbo length

  bool empty() const {
    return std::all_of(counts.begin(), counts.end(), [](int a) { return a == 0; });
  }
  bool operator==(const Pattern1D&) const = default;
};

struct StripPattern {
  int i2 = 0;
  int i3_star = 0;           // reference sheet fixing the strip length
  std::vector<int> alpha;    // [i3]
  double value = 0.0;

  bool operator==(const StripPattern&) const = default;
};

struct Pattern2D {
  int i2 = 0;
  std::vector<StripPattern> strips;
  std::vector<int> beta;    // multiplicity of each entry of strips
  std::vector<int> counts;  // [i3]
  double waste = 0.0;       // cm^2 of reel surface

  bool empty() const {
    return std::all_of(counts.begin(), counts.end(), [](int a) { return a == 0; });
  }
  bool operator==(const Pattern2D&) const = default;
};

inline double waste_1d(const Instance& inst, int m1, const std::vector<int>& counts) {
  double used = 0.0;
  for (std::size_t i2 = 0; i2 < counts.size(); ++i2) used += inst.phase2.reel_length[i2] * counts[i2];
  return inst.phase1.jumbo_length[m1] - used;
}

inline double waste_2d(const Instance& inst, int i2, const std::vector<int>& counts) {
  const auto& p3 = inst.phase3;
  double used = 0.0;
  for (std::size_t i3 = 0; i3 < counts.size(); ++i3) used += p3.sheet_length[i3] * p3.sheet_width[i3] * counts[i3];
  return inst.phase2.reel_length[i2] * inst.phase2.reel_width[i2] - used;
}

// Sheets that may share a strip whose length is fixed by i3_star.
inline std::vector<int> strip_members(const Instance& inst, int i3_star) {
  const auto& p3 = inst.phase3;
  std::vector<int> out;
  for (int i3 : inst.sheets_of(p3.grammage[i3_star])) {
    const bool ok = p3.trimming_allowed ? p3.sheet_length[i3] <= p3.sheet_length[i3_star]
                                        : p3.sheet_length[i3] == p3.sheet_length[i3_star];
    if (ok) out.push_back(i3);
  }
  return out;
}

// One reference sheet per distinct sheet length of grammage k (the lowest
// index among sheets of that length), ordered by length.
inline std::vector<int> strip_references(const Instance& inst, int k) {
  std::map<double, int> by_length;
  for (int i3 : inst.sheets_of(k)) by_length.emplace(inst.phase3.sheet_length[i3], i3);
  std::vector<int> out;
  for (const auto& [len, i3] : by_length) out.push_back(i3);
  return out;
}

inline std::vector<Pattern1D> homogeneous_1d(const Instance& inst) {
  std::vector<Pattern1D> out;
  const int N2 = inst.dims.reel_types;
  for (int k = 0; k < inst.dims.grammages; ++k)
    for (int m1 = 0; m1 < inst.dims.paper_machines; ++m1)
      for (int i2 : inst.reels_of(k)) {
        const int q = static_cast<int>(std::floor(inst.phase1.jumbo_length[m1] / inst.phase2.reel_length[i2]));
        if (q == 0) continue;
        Pattern1D p{k, m1, std::vector<int>(N2, 0), 0.0};
        p.counts[i2] = q;
        p.waste = waste_1d(inst, m1, p.counts);
        out.push_back(std::move(p));
      }
  return out;
}

inline std::vector<Pattern2D> homogeneous_2d(const Instance& inst) {
  std::vector<Pattern2D> out;
  const auto& p2 = inst.phase2;
  const auto& p3 = inst.phase3;
  const int N3 = inst.dims.sheet_types;
  for (int i2 = 0; i2 < inst.dims.reel_types; ++i2)
    for (int i3 : inst.sheets_of(p2.grammage[i2])) {
      const int across = static_cast<int>(std::floor(p2.reel_width[i2] / p3.sheet_width[i3]));
      const int along = static_cast<int>(std::floor(p2.reel_length[i2] / p3.sheet_length[i3]));
      if (across == 0 || along == 0) continue;
      StripPattern strip{i2, i3, std::vector<int>(N3, 0), 0.0};
      strip.alpha[i3] = across;
      Pattern2D p{i2, {strip}, {along}, std::vector<int>(N3, 0), 0.0};
      p.counts[i3] = across * along;
      p.waste = waste_2d(inst, i2, p.counts);
      out.push_back(std::move(p));
    }
  return out;
}

// ---------------------------------------------------------------------------
// Duals by semantic row. Absent rows read as zero.

struct DualView {
  Array3 balance;                 // JumboBalance [k][m1][t]
  std::vector<double> capacity1;  // [t]
  Array2 reel;                    // ReelDemand [i2][t]
  std::vector<double> capacity2;  // [t]
  Array2 sheet;                   // SheetDemand [i3][tau]
  std::vector<double> capacity3;  // [tau]

  static DualView zeros(const Instance& inst) {
    const Dimensions& d = inst.dims;
    DualView v;
    v.balance = Array3(d.grammages, d.paper_machines, d.periods);
    v.capacity1.assign(d.periods, 0.0);
    v.reel = Array2(d.reel_types, d.periods);
    v.capacity2.assign(d.periods, 0.0);
    v.sheet = Array2(d.sheet_types, d.subperiods);
    v.capacity3.assign(d.subperiods, 0.0);
    return v;
  }
};

struct Priced1D {
  Pattern1D pattern;
  int m2 = 0;
  double reduced_cost = 0.0;
};

struct Priced2D {
  Pattern2D pattern;
  int m3 = 0;
  double reduced_cost = 0.0;
};

// Reduced cost of Y2(k, m1, m2, t, counts).
inline double reduced_cost_1d(const Instance& inst, const DualView& duals, int k, int m1, int m2, int t,
                              const std::vector<int>& counts) {
  double rc = inst.phase2.waste_cost(k, t) * waste_1d(inst, m1, counts);
  rc += duals.balance(k, m1, t);
  for (std::size_t i2 = 0; i2 < counts.size(); ++i2) rc -= duals.reel(static_cast<int>(i2), t) * counts[i2];
  rc -= duals.capacity2[t] * inst.phase2.cutting_time(k, m1, m2);
  return rc;
}

// Reduced cost of Y3(i2, m3, tau, counts).
inline double reduced_cost_2d(const Instance& inst, const DualView& duals, int i2, int m3, int tau,
                              const std::vector<int>& counts) {
  const int k = inst.phase2.grammage[i2];
  double rc = inst.phase3.waste_cost(k, tau) * waste_2d(inst, i2, counts);
  rc += duals.reel(i2, 0);
  for (std::size_t i3 = 0; i3 < counts.size(); ++i3) rc -= duals.sheet(static_cast<int>(i3), tau) * counts[i3];
  rc -= duals.capacity3[tau] * inst.phase3.cutting_time(i2, m3);
  return rc;
}

inline Priced1D price_1d(const Instance& inst, const DualView& duals, int k, int m1, int t) {
  const auto& p2 = inst.phase2;
  const std::vector<int> items = inst.reels_of(k);
  KnapsackSpec spec;
  spec.capacity = static_cast<int>(inst.phase1.jumbo_length[m1]);
  for (int i2 : items) {
    spec.sizes.push_back(static_cast<int>(p2.reel_length[i2]));
    spec.values.push_back(p2.waste_cost(k, t) * p2.reel_length[i2] + duals.reel(i2, t));
  }
  const KnapsackResult ks = solve_knapsack(spec);
  Priced1D out;
  out.pattern = Pattern1D{k, m1, std::vector<int>(inst.dims.reel_types, 0), 0.0};
  for (std::size_t j = 0; j < items.size(); ++j) out.pattern.counts[items[j]] = ks.counts[j];
  auto settle = [&](Priced1D& p) {
    p.pattern.waste = waste_1d(inst, m1, p.pattern.counts);
    p.reduced_cost = std::numeric_limits<double>::infinity();
    for (int m2 = 0; m2 < inst.dims.rewinders; ++m2) {
      const double rc = reduced_cost_1d(inst, duals, k, m1, m2, t, p.pattern.counts);
      if (rc < p.reduced_cost) {
        p.reduced_cost = rc;
        p.m2 = m2;
      }
    }
  };
  settle(out);
  // Empty patterns are never columns. If the empty pattern still prices out,
  // the best non-empty pattern holds a single reel.
  if (out.pattern.empty() && out.reduced_cost < -kPriceTolerance) {
    std::optional<Priced1D> best;
    for (int i2 : items) {
      if (p2.reel_length[i2] > inst.phase1.jumbo_length[m1]) continue;
      Priced1D cand = out;
      cand.pattern.counts[i2] = 1;
      settle(cand);
      if (!best || cand.reduced_cost < best->reduced_cost) best = std::move(cand);
    }
    if (best) out = std::move(*best);
  }
  return out;
}

inline StripPattern price_strip(const Instance& inst, const DualView& duals, int i2, int i3_star, int tau) {
  const auto& p3 = inst.phase3;
  const int k = inst.phase2.grammage[i2];
  if (p3.grammage[i3_star] != k) throw std::invalid_argument("price_strip: sheet and reel grammages differ");
  const std::vector<int> items = strip_members(inst, i3_star);
  KnapsackSpec spec;
  spec.capacity = static_cast<int>(inst.phase2.reel_width[i2]);
  for (int i3 : items) {
    spec.sizes.push_back(static_cast<int>(p3.sheet_width[i3]));
    spec.values.push_back(p3.waste_cost(k, tau) * p3.sheet_length[i3] * p3.sheet_width[i3] + duals.sheet(i3, tau));
  }
  const KnapsackResult ks = solve_knapsack(spec);
  StripPattern out{i2, i3_star, std::vector<int>(inst.dims.sheet_types, 0), ks.value};
  for (std::size_t j = 0; j < items.size(); ++j) out.alpha[items[j]] = ks.counts[j];
  return out;
}

inline Priced2D build_pattern_2d(const Instance& inst, const DualView& duals, int i2, int tau) {
  const auto& p3 = inst.phase3;
  const int k = inst.phase2.grammage[i2];
  const int N3 = inst.dims.sheet_types;
  std::vector<StripPattern> strips;
  KnapsackSpec spec;
  spec.capacity = static_cast<int>(inst.phase2.reel_length[i2]);
  for (int ref : strip_references(inst, k)) {
    strips.push_back(price_strip(inst, duals, i2, ref, tau));
    spec.sizes.push_back(static_cast<int>(p3.sheet_length[ref]));
    spec.values.push_back(strips.back().value);
  }
  const KnapsackResult ks = solve_knapsack(spec);
  Priced2D out;
  Pattern2D& pat = out.pattern;
  pat.i2 = i2;
  pat.counts.assign(N3, 0);
  for (std::size_t s = 0; s < strips.size(); ++s) {
    if (ks.counts[s] == 0) continue;
    pat.strips.push_back(strips[s]);
    pat.beta.push_back(ks.counts[s]);
    for (int i3 = 0; i3 < N3; ++i3) pat.counts[i3] += strips[s].alpha[i3] * ks.counts[s];
  }
  auto settle = [&](Priced2D& p) {
    p.pattern.waste = waste_2d(inst, i2, p.pattern.counts);
    p.reduced_cost = std::numeric_limits<double>::infinity();
    for (int m3 = 0; m3 < inst.dims.cutters; ++m3) {
      const double rc = reduced_cost_2d(inst, duals, i2, m3, tau, p.pattern.counts);
      if (rc < p.reduced_cost) {
        p.reduced_cost = rc;
        p.m3 = m3;
      }
    }
  };
  settle(out);
  if (pat.empty() && out.reduced_cost < -kPriceTolerance) {
    // Best single sheet, as in price_1d.
    std::optional<Priced2D> best;
    const auto refs = strip_references(inst, k);
    for (int i3 : inst.sheets_of(k)) {
      if (p3.sheet_width[i3] > inst.phase2.reel_width[i2] || p3.sheet_length[i3] > inst.phase2.reel_length[i2])
        continue;
      int ref = i3;
      for (int r : refs)
        if (p3.sheet_length[r] == p3.sheet_length[i3]) ref = r;
      Priced2D cand = out;
      StripPattern strip{i2, ref, std::vector<int>(N3, 0), 0.0};
      strip.alpha[i3] = 1;
      strip.value = p3.waste_cost(k, tau) * p3.sheet_length[i3] * p3.sheet_width[i3] + duals.sheet(i3, tau);
      cand.pattern.strips = {strip};
      cand.pattern.beta = {1};
      cand.pattern.counts = strip.alpha;
      settle(cand);
      if (!best || cand.reduced_cost < best->reduced_cost) best = std::move(cand);
    }
    if (best) out = std::move(*best);
  }
  return out;
}

}  // namespace paperplan::pricing
