#pragma once

// Instance data model for one planning horizon of the three-phase paper
// production process (jumbo production, jumbo-to-reel cutting, reel-to-sheet
// cutting), the random generator for the 24 experiment classes, validation
// and the versioned instance file format.
//
// Canonical units: lengths and widths in cm, areas in cm^2, weights in kg,
// times in minutes, money in currency units. Setup costs and times are
// already folded into the production/cutting costs and times.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "paperplan/array.hpp"

namespace paperplan {

struct Dimensions {
  int grammages = 1;
  int periods = 1;
  int subperiods = 1;  // sub-periods of period 1 (phase 3 horizon)
  int paper_machines = 1;
  int rewinders = 1;
  int cutters = 1;
  int reel_types = 1;
  int sheet_types = 1;

  bool operator==(const Dimensions&) const = default;
};

// Jumbo production (lot-sizing).
struct Phase1Params {
  Array3 production_cost;  // [k][m1][t], per kg
  Array2 stock_cost;       // [k][t], per kg and period
  std::vector<double> jumbo_length;  // [m1], cm
  Array2 jumbo_weight;     // [k][m1], kg
  Array3 demand;           // [k][m1][t], jumbos
  Array2 production_time;  // [k][m1], minutes per jumbo
  std::vector<double> capacity;  // [t], minutes

  bool operator==(const Phase1Params&) const = default;
};

// Jumbo-to-reel cutting (1D cutting stock).
struct Phase2Params {
  Array2 waste_cost;  // [k][t], per cm of jumbo length
  Array2 stock_cost;  // [i2][t], per kg and period
  std::vector<double> reel_length;  // [i2], cm (cut along the jumbo length)
  std::vector<double> reel_width;   // [i2], cm
  std::vector<double> reel_weight;  // [i2], kg
  Array2 demand;                    // [i2][t], reels
  Array3 cutting_time;              // [k][m1][m2], minutes per jumbo
  std::vector<double> capacity;     // [t], minutes
  std::vector<int> grammage;        // [i2] -> k

  bool operator==(const Phase2Params&) const = default;
};

// Reel-to-sheet cutting (two-stage guillotine 2D cutting stock).
struct Phase3Params {
  Array2 waste_cost;  // [k][tau], per cm^2
  Array2 stock_cost;  // [i3][tau], per kg and sub-period
  std::vector<double> sheet_length;  // [i3], cm
  std::vector<double> sheet_width;   // [i3], cm
  std::vector<double> sheet_weight;  // [i3], kg
  Array2 demand;                     // [i3][tau], sheets
  Array2 cutting_time;               // [i2][m3], minutes per reel
  std::vector<double> capacity;      // [tau], minutes
  std::vector<int> grammage;         // [i3] -> k
  bool trimming_allowed = false;

  bool operator==(const Phase3Params&) const = default;
};

// Physical constants drawn once per generated instance. Informational only;
// the solver never reads them.
struct PaperStock {
  double grammage_gsm = 0.0;
  double diameter_cm = 0.0;
  double thickness_um = 0.0;

  bool operator==(const PaperStock&) const = default;
};

struct Instance {
  Dimensions dims;
  Phase1Params phase1;
  Phase2Params phase2;
  Phase3Params phase3;
  PaperStock paper;
  std::uint64_t seed = 0;
  std::optional<int> class_id;

  // Reel types of grammage k, ascending.
  std::vector<int> reels_of(int k) const {
    std::vector<int> out;
    for (int i2 = 0; i2 < dims.reel_types; ++i2)
      if (phase2.grammage[i2] == k) out.push_back(i2);
    return out;
  }
  // Sheet types of grammage k, ascending.
  std::vector<int> sheets_of(int k) const {
    std::vector<int> out;
    for (int i3 = 0; i3 < dims.sheet_types; ++i3)
      if (phase3.grammage[i3] == k) out.push_back(i3);
    return out;
  }

  bool operator==(const Instance&) const = default;
};

enum class StockCostLevel { kNormal, kHigh };

struct ClassConfig {
  int n_items = 5;  // reel types == sheet types
  StockCostLevel stock_cost = StockCostLevel::kNormal;
  bool trimming = true;
  int paper_machines = 3;
  int rewinders = 3;
  int cutters = 2;
  int work_shifts = 1;

  bool operator==(const ClassConfig&) const = default;
};

// Returns the configuration row of experiment class 1..24.
inline ClassConfig class_config(int class_id) {
  if (class_id < 1 || class_id > 24)
    throw std::out_of_range("class id must be in 1..24, got " + std::to_string(class_id));
  const int z = class_id - 1;
  const bool large = z >= 12;
  const int in_group = z % 12;
  ClassConfig cfg;
  cfg.n_items = large ? 9 : 5;
  cfg.stock_cost = in_group < 6 ? StockCostLevel::kNormal : StockCostLevel::kHigh;
  cfg.trimming = (z % 2) == 0;
  cfg.paper_machines = large ? 6 : 3;
  cfg.rewinders = large ? 6 : 3;
  cfg.cutters = large ? 4 : 2;
  cfg.work_shifts = (in_group % 6) / 2 + 1;
  return cfg;
}

// Sampling intervals in canonical units.
struct GeneratorRanges {
  double diameter_cm[2] = {300.0, 500.0};
  double thickness_um[2] = {190.0, 250.0};
  double grammage_gsm[2] = {35.0, 300.0};
  double production_cost[2] = {0.015, 0.025};
  double stock_cost_normal[2] = {0.0075, 0.0125};
  double stock_cost_high[2] = {0.009, 0.015};
  int jumbo_length_cm[2] = {1000, 2000};
  double production_time[2] = {30.0, 60.0};
  int reel_length_cm[2] = {300, 900};
  int reel_width_cm[2] = {800, 1600};
  int reel_demand[2] = {0, 100};
  double reel_cutting_time[2] = {30.0, 60.0};
  int sheet_length_cm[2] = {30, 100};
  int sheet_width_cm[2] = {30, 100};
  int sheet_demand[2] = {0, 500};
  double sheet_cutting_time[2] = {20.0, 40.0};
  double minutes_per_shift = 480.0;
  double shift_cost_increase = 0.20;
};

namespace detail {

// Platform-independent uniform draws on top of the (standardized)
// mt19937_64 engine.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double real(const double (&range)[2]) { return range[0] + unit() * (range[1] - range[0]); }
  int integer(const int (&range)[2]) {
    const auto span = static_cast<std::uint64_t>(range[1] - range[0] + 1);
    return range[0] + static_cast<int>(engine_() % span);
  }

 private:
  std::mt19937_64 engine_;
};

// Weight of a paper cylinder of the given width: width x wound length x
// grammage, where the wound length is pi * D^2 / (4 * thickness).
inline double cylinder_weight_kg(double width_cm, const PaperStock& paper) {
  const double width_m = width_cm / 100.0;
  const double diameter_m = paper.diameter_cm / 100.0;
  const double thickness_m = paper.thickness_um * 1e-6;
  const double grammage_kg = paper.grammage_gsm / 1000.0;
  return width_m * std::numbers::pi / thickness_m * diameter_m * diameter_m / 4.0 * grammage_kg;
}

}  // namespace detail

inline double sheet_weight_kg(double length_cm, double width_cm, double grammage_gsm) {
  return (length_cm / 100.0) * (width_cm / 100.0) * grammage_gsm / 1000.0;
}

// Draws a random instance for one experiment class. A pure function of its
// arguments; the draw sequence does not depend on the trimming flag or the
// stock cost level, so paired classes share every other parameter.
inline Instance generate_instance(const ClassConfig& config, std::uint64_t seed, int periods,
                                  int subperiods, const GeneratorRanges& ranges = {}) {
  if (periods < 1 || subperiods < 1) throw std::invalid_argument("periods and sub-periods must be >= 1");
  detail::Sampler rng(seed);
  Instance inst;
  inst.seed = seed;
  Dimensions& d = inst.dims;
  d.grammages = 1;
  d.periods = periods;
  d.subperiods = subperiods;
  d.paper_machines = config.paper_machines;
  d.rewinders = config.rewinders;
  d.cutters = config.cutters;
  d.reel_types = config.n_items;
  d.sheet_types = config.n_items;
  const int K = d.grammages, T = periods, Th = subperiods;
  const int M1 = d.paper_machines, M2 = d.rewinders, M3 = d.cutters;
  const int N2 = d.reel_types, N3 = d.sheet_types;

  inst.paper.grammage_gsm = rng.real(ranges.grammage_gsm);
  inst.paper.diameter_cm = rng.real(ranges.diameter_cm);
  inst.paper.thickness_um = rng.real(ranges.thickness_um);

  const double shift_factor = 1.0 + ranges.shift_cost_increase * (config.work_shifts - 1);
  const double shifts = config.work_shifts;

  // Phase 1.
  Phase1Params& p1 = inst.phase1;
  Array3 base_cost(K, M1, T);
  for (double& c : base_cost.data()) c = rng.real(ranges.production_cost);
  p1.stock_cost = Array2(K, T);
  const auto& stock_range =
      config.stock_cost == StockCostLevel::kHigh ? ranges.stock_cost_high : ranges.stock_cost_normal;
  for (double& h : p1.stock_cost.data()) h = stock_range[0] + rng.unit() * (stock_range[1] - stock_range[0]);
  p1.jumbo_length.resize(M1);
  for (double& L : p1.jumbo_length) L = rng.integer(ranges.jumbo_length_cm);
  p1.production_time = Array2(K, M1);
  for (double& f : p1.production_time.data()) f = rng.real(ranges.production_time);
  p1.production_cost = base_cost;
  for (double& c : p1.production_cost.data()) c *= shift_factor;
  p1.jumbo_weight = Array2(K, M1);
  for (int k = 0; k < K; ++k)
    for (int m1 = 0; m1 < M1; ++m1)
      p1.jumbo_weight(k, m1) = detail::cylinder_weight_kg(p1.jumbo_length[m1], inst.paper);
  p1.demand = Array3(K, M1, T, 0.0);
  p1.capacity.assign(T, ranges.minutes_per_shift * shifts * M1 * Th);

  // Phase 2.
  Phase2Params& p2 = inst.phase2;
  p2.grammage.assign(N2, 0);
  p2.reel_length.resize(N2);
  p2.reel_width.resize(N2);
  for (int i2 = 0; i2 < N2; ++i2) {
    p2.reel_length[i2] = rng.integer(ranges.reel_length_cm);
    p2.reel_width[i2] = rng.integer(ranges.reel_width_cm);
  }
  p2.demand = Array2(N2, T);
  for (double& dem : p2.demand.data()) dem = rng.integer(ranges.reel_demand);
  p2.cutting_time = Array3(K, M1, M2);
  for (double& f : p2.cutting_time.data()) f = rng.real(ranges.reel_cutting_time);
  p2.reel_weight.resize(N2);
  for (int i2 = 0; i2 < N2; ++i2) p2.reel_weight[i2] = detail::cylinder_weight_kg(p2.reel_length[i2], inst.paper);
  p2.waste_cost = Array2(K, T);
  for (int k = 0; k < K; ++k)
    for (int t = 0; t < T; ++t) {
      double sum = 0.0;
      for (int m1 = 0; m1 < M1; ++m1) sum += base_cost(k, m1, t);
      p2.waste_cost(k, t) = shift_factor * sum / (50000.0 * M1);
    }
  p2.stock_cost = Array2(N2, T);
  for (int i2 = 0; i2 < N2; ++i2)
    for (int t = 0; t < T; ++t) p2.stock_cost(i2, t) = 0.5 * p1.stock_cost(p2.grammage[i2], t);
  p2.capacity.assign(T, ranges.minutes_per_shift * shifts * M2 * Th);

  // Phase 3.
  Phase3Params& p3 = inst.phase3;
  p3.grammage.assign(N3, 0);
  p3.trimming_allowed = config.trimming;
  p3.sheet_length.resize(N3);
  p3.sheet_width.resize(N3);
  for (int i3 = 0; i3 < N3; ++i3) {
    p3.sheet_length[i3] = rng.integer(ranges.sheet_length_cm);
    p3.sheet_width[i3] = rng.integer(ranges.sheet_width_cm);
  }
  p3.demand = Array2(N3, Th);
  for (double& dem : p3.demand.data()) dem = rng.integer(ranges.sheet_demand);
  p3.cutting_time = Array2(N2, M3);
  for (double& f : p3.cutting_time.data()) f = rng.real(ranges.sheet_cutting_time);
  p3.sheet_weight.resize(N3);
  for (int i3 = 0; i3 < N3; ++i3)
    p3.sheet_weight[i3] = sheet_weight_kg(p3.sheet_length[i3], p3.sheet_width[i3], inst.paper.grammage_gsm);
  p3.waste_cost = Array2(K, Th);
  for (int k = 0; k < K; ++k) {
    double sum = 0.0;
    for (int m1 = 0; m1 < M1; ++m1)
      for (int t = 0; t < T; ++t) sum += base_cost(k, m1, t);
    for (int tau = 0; tau < Th; ++tau) p3.waste_cost(k, tau) = shift_factor * 1.5 * sum / (10000.0 * M1 * T);
  }
  double mean_h1 = 0.0;
  for (double h : p1.stock_cost.data()) mean_h1 += h;
  mean_h1 /= static_cast<double>(K * T);
  p3.stock_cost = Array2(N3, Th, 0.5 * mean_h1);
  p3.capacity.assign(Th, ranges.minutes_per_shift * shifts * M3);
  return inst;
}

inline Instance generate_instance(int class_id, std::uint64_t seed, int periods, int subperiods) {
  Instance inst = generate_instance(class_config(class_id), seed, periods, subperiods);
  inst.class_id = class_id;
  return inst;
}

// Returns one human-readable diagnostic per violated invariant, each naming
// the offending index path. Empty iff the instance is well-formed.
inline std::vector<std::string> validate(const Instance& inst) {
  std::vector<std::string> out;
  const Dimensions& d = inst.dims;
  auto fail = [&](std::string msg) { out.push_back(std::move(msg)); };

  if (d.grammages < 1) fail("dims.grammages: must be >= 1");
  if (d.periods < 1) fail("dims.periods: must be >= 1");
  if (d.subperiods < 1) fail("dims.subperiods: must be >= 1");
  if (d.paper_machines < 1) fail("dims.paper_machines: must be >= 1");
  if (d.rewinders < 1) fail("dims.rewinders: must be >= 1");
  if (d.cutters < 1) fail("dims.cutters: must be >= 1");
  if (d.reel_types < 1) fail("dims.reel_types: must be >= 1");
  if (d.sheet_types < 1) fail("dims.sheet_types: must be >= 1");
  if (!out.empty()) return out;

  const int K = d.grammages, T = d.periods, Th = d.subperiods;
  const int M1 = d.paper_machines, M2 = d.rewinders, M3 = d.cutters;
  const int N2 = d.reel_types, N3 = d.sheet_types;
  const Phase1Params& p1 = inst.phase1;
  const Phase2Params& p2 = inst.phase2;
  const Phase3Params& p3 = inst.phase3;

  auto shape2 = [&](const Array2& a, int r, int c, const char* name) {
    if (a.rows() != r || a.cols() != c) {
      fail(std::string(name) + ": expected shape " + std::to_string(r) + "x" + std::to_string(c));
      return false;
    }
    return true;
  };
  auto shape3 = [&](const Array3& a, int x, int y, int z, const char* name) {
    if (a.dim0() != x || a.dim1() != y || a.dim2() != z) {
      fail(std::string(name) + ": expected shape " + std::to_string(x) + "x" + std::to_string(y) + "x" +
           std::to_string(z));
      return false;
    }
    return true;
  };
  auto shape1 = [&](const auto& v, int n, const char* name) {
    if (static_cast<int>(v.size()) != n) {
      fail(std::string(name) + ": expected length " + std::to_string(n));
      return false;
    }
    return true;
  };
  bool shapes = true;
  shapes &= shape3(p1.production_cost, K, M1, T, "phase1.production_cost");
  shapes &= shape2(p1.stock_cost, K, T, "phase1.stock_cost");
  shapes &= shape1(p1.jumbo_length, M1, "phase1.jumbo_length");
  shapes &= shape2(p1.jumbo_weight, K, M1, "phase1.jumbo_weight");
  shapes &= shape3(p1.demand, K, M1, T, "phase1.demand");
  shapes &= shape2(p1.production_time, K, M1, "phase1.production_time");
  shapes &= shape1(p1.capacity, T, "phase1.capacity");
  shapes &= shape2(p2.waste_cost, K, T, "phase2.waste_cost");
  shapes &= shape2(p2.stock_cost, N2, T, "phase2.stock_cost");
  shapes &= shape1(p2.reel_length, N2, "phase2.reel_length");
  shapes &= shape1(p2.reel_width, N2, "phase2.reel_width");
  shapes &= shape1(p2.reel_weight, N2, "phase2.reel_weight");
  shapes &= shape2(p2.demand, N2, T, "phase2.demand");
  shapes &= shape3(p2.cutting_time, K, M1, M2, "phase2.cutting_time");
  shapes &= shape1(p2.capacity, T, "phase2.capacity");
  shapes &= shape1(p2.grammage, N2, "phase2.grammage");
  shapes &= shape2(p3.waste_cost, K, Th, "phase3.waste_cost");
  shapes &= shape2(p3.stock_cost, N3, Th, "phase3.stock_cost");
  shapes &= shape1(p3.sheet_length, N3, "phase3.sheet_length");
  shapes &= shape1(p3.sheet_width, N3, "phase3.sheet_width");
  shapes &= shape1(p3.sheet_weight, N3, "phase3.sheet_weight");
  shapes &= shape2(p3.demand, N3, Th, "phase3.demand");
  shapes &= shape2(p3.cutting_time, N2, M3, "phase3.cutting_time");
  shapes &= shape1(p3.capacity, Th, "phase3.capacity");
  shapes &= shape1(p3.grammage, N3, "phase3.grammage");
  if (!shapes) return out;

  auto nonneg = [&](const std::vector<double>& v, const std::string& name) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!(v[i] >= 0.0) || !std::isfinite(v[i])) fail(name + "[" + std::to_string(i) + "]: must be finite and >= 0");
  };
  auto demand_ok = [&](const Array2& a, const std::string& name) {
    for (int r = 0; r < a.rows(); ++r)
      for (int c = 0; c < a.cols(); ++c) {
        const double v = a(r, c);
        const std::string at = name + "[" + std::to_string(r) + "][" + std::to_string(c) + "]";
        if (!(v >= 0.0) || !std::isfinite(v))
          fail(at + ": demand must be finite and >= 0");
        else if (v != std::floor(v))
          fail(at + ": demand must be integral");
      }
  };
  auto positive_integral = [&](const std::vector<double>& v, const std::string& name) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!(v[i] >= 1.0) || v[i] != std::floor(v[i]) || !std::isfinite(v[i]))
        fail(name + "[" + std::to_string(i) + "]: must be a positive integer number of cm");
  };

  nonneg(p1.production_cost.data(), "phase1.production_cost");
  nonneg(p1.stock_cost.data(), "phase1.stock_cost");
  nonneg(p1.jumbo_weight.data(), "phase1.jumbo_weight");
  nonneg(p1.production_time.data(), "phase1.production_time");
  nonneg(p1.capacity, "phase1.capacity");
  positive_integral(p1.jumbo_length, "phase1.jumbo_length");
  for (int k = 0; k < K; ++k)
    for (int m1 = 0; m1 < M1; ++m1)
      for (int t = 0; t < T; ++t) {
        const double v = p1.demand(k, m1, t);
        const std::string at = "phase1.demand[" + std::to_string(k) + "][" + std::to_string(m1) + "][" +
                               std::to_string(t) + "]";
        if (!(v >= 0.0) || !std::isfinite(v))
          fail(at + ": demand must be finite and >= 0");
        else if (v != std::floor(v))
          fail(at + ": demand must be integral");
      }

  nonneg(p2.waste_cost.data(), "phase2.waste_cost");
  nonneg(p2.stock_cost.data(), "phase2.stock_cost");
  nonneg(p2.reel_weight, "phase2.reel_weight");
  nonneg(p2.cutting_time.data(), "phase2.cutting_time");
  nonneg(p2.capacity, "phase2.capacity");
  positive_integral(p2.reel_length, "phase2.reel_length");
  positive_integral(p2.reel_width, "phase2.reel_width");
  demand_ok(p2.demand, "phase2.demand");

  nonneg(p3.waste_cost.data(), "phase3.waste_cost");
  nonneg(p3.stock_cost.data(), "phase3.stock_cost");
  nonneg(p3.sheet_weight, "phase3.sheet_weight");
  nonneg(p3.cutting_time.data(), "phase3.cutting_time");
  nonneg(p3.capacity, "phase3.capacity");
  positive_integral(p3.sheet_length, "phase3.sheet_length");
  positive_integral(p3.sheet_width, "phase3.sheet_width");
  demand_ok(p3.demand, "phase3.demand");

  for (int i2 = 0; i2 < N2; ++i2)
    if (p2.grammage[i2] < 0 || p2.grammage[i2] >= K)
      fail("phase2.grammage[" + std::to_string(i2) + "]: grammage index out of range");
  for (int i3 = 0; i3 < N3; ++i3)
    if (p3.grammage[i3] < 0 || p3.grammage[i3] >= K)
      fail("phase3.grammage[" + std::to_string(i3) + "]: grammage index out of range");
  if (!out.empty()) return out;

  double longest_jumbo = 0.0;
  for (double L : p1.jumbo_length) longest_jumbo = std::max(longest_jumbo, L);
  for (int i2 = 0; i2 < N2; ++i2)
    if (p2.reel_length[i2] > longest_jumbo)
      fail("phase2.reel[" + std::to_string(i2) + "]: reel length exceeds every jumbo length");
  for (int i3 = 0; i3 < N3; ++i3) {
    bool fits = false;
    for (int i2 = 0; i2 < N2; ++i2)
      if (p2.grammage[i2] == p3.grammage[i3] && p3.sheet_width[i3] <= p2.reel_width[i2] &&
          p3.sheet_length[i3] <= p2.reel_length[i2])
        fits = true;
    if (!fits) fail("phase3.sheet[" + std::to_string(i3) + "]: no reel of the same grammage can hold this sheet");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Instance files: one JSON document with an explicit format tag and version.

inline constexpr const char* kInstanceFormat = "paperplan-instance";
inline constexpr int kInstanceVersion = 1;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

namespace detail {

inline nlohmann::json to_json(const Array2& a) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < a.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < a.cols(); ++c) row.push_back(a(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json to_json(const Array3& a) {
  nlohmann::json out = nlohmann::json::array();
  for (int x = 0; x < a.dim0(); ++x) {
    nlohmann::json plane = nlohmann::json::array();
    for (int y = 0; y < a.dim1(); ++y) {
      nlohmann::json row = nlohmann::json::array();
      for (int z = 0; z < a.dim2(); ++z) row.push_back(a(x, y, z));
      plane.push_back(std::move(row));
    }
    out.push_back(std::move(plane));
  }
  return out;
}

inline const nlohmann::json& field(const nlohmann::json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  return obj.at(key);
}

inline double number(const nlohmann::json& v, const std::string& where) {
  if (!v.is_number()) throw FormatError(where + ": expected a number");
  return v.get<double>();
}

inline std::vector<double> read_vector(const nlohmann::json& v, int n, const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != n)
    throw FormatError(where + ": expected an array of length " + std::to_string(n));
  std::vector<double> out;
  out.reserve(n);
  for (const auto& x : v) out.push_back(number(x, where));
  return out;
}

inline std::vector<int> read_indices(const nlohmann::json& v, int n, const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != n)
    throw FormatError(where + ": expected an array of length " + std::to_string(n));
  std::vector<int> out;
  for (const auto& x : v) {
    if (!x.is_number_integer()) throw FormatError(where + ": expected integers");
    out.push_back(x.get<int>());
  }
  return out;
}

inline Array2 read_array2(const nlohmann::json& v, int r, int c, const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != r)
    throw FormatError(where + ": expected " + std::to_string(r) + " rows");
  Array2 a(r, c);
  for (int i = 0; i < r; ++i) {
    auto row = read_vector(v[i], c, where);
    for (int j = 0; j < c; ++j) a(i, j) = row[j];
  }
  return a;
}

inline Array3 read_array3(const nlohmann::json& v, int x, int y, int z, const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != x)
    throw FormatError(where + ": expected " + std::to_string(x) + " planes");
  Array3 a(x, y, z);
  for (int i = 0; i < x; ++i) {
    Array2 plane = read_array2(v[i], y, z, where);
    for (int j = 0; j < y; ++j)
      for (int k = 0; k < z; ++k) a(i, j, k) = plane(j, k);
  }
  return a;
}

}  // namespace detail

inline nlohmann::json instance_to_json(const Instance& inst) {
  using detail::to_json;
  nlohmann::json j;
  j["format"] = kInstanceFormat;
  j["version"] = kInstanceVersion;
  j["class_id"] = inst.class_id ? nlohmann::json(*inst.class_id) : nlohmann::json(nullptr);
  j["seed"] = inst.seed;
  const Dimensions& d = inst.dims;
  j["dimensions"] = {{"grammages", d.grammages},   {"periods", d.periods},
                     {"subperiods", d.subperiods}, {"paper_machines", d.paper_machines},
                     {"rewinders", d.rewinders},   {"cutters", d.cutters},
                     {"reel_types", d.reel_types}, {"sheet_types", d.sheet_types}};
  j["paper"] = {{"grammage_gsm", inst.paper.grammage_gsm},
                {"diameter_cm", inst.paper.diameter_cm},
                {"thickness_um", inst.paper.thickness_um}};
  const Phase1Params& p1 = inst.phase1;
  j["phase1"] = {{"production_cost", to_json(p1.production_cost)},
                 {"stock_cost", to_json(p1.stock_cost)},
                 {"jumbo_length", p1.jumbo_length},
                 {"jumbo_weight", to_json(p1.jumbo_weight)},
                 {"demand", to_json(p1.demand)},
                 {"production_time", to_json(p1.production_time)},
                 {"capacity", p1.capacity}};
  const Phase2Params& p2 = inst.phase2;
  j["phase2"] = {{"waste_cost", to_json(p2.waste_cost)},   {"stock_cost", to_json(p2.stock_cost)},
                 {"reel_length", p2.reel_length},          {"reel_width", p2.reel_width},
                 {"reel_weight", p2.reel_weight},          {"demand", to_json(p2.demand)},
                 {"cutting_time", to_json(p2.cutting_time)}, {"capacity", p2.capacity},
                 {"grammage", p2.grammage}};
  const Phase3Params& p3 = inst.phase3;
  j["phase3"] = {{"waste_cost", to_json(p3.waste_cost)},     {"stock_cost", to_json(p3.stock_cost)},
                 {"sheet_length", p3.sheet_length},          {"sheet_width", p3.sheet_width},
                 {"sheet_weight", p3.sheet_weight},          {"demand", to_json(p3.demand)},
                 {"cutting_time", to_json(p3.cutting_time)}, {"capacity", p3.capacity},
                 {"grammage", p3.grammage},                  {"trimming_allowed", p3.trimming_allowed}};
  return j;
}

inline Instance instance_from_json(const nlohmann::json& j) {
  using namespace detail;
  if (!j.is_object()) throw FormatError("instance document must be an object");
  const auto& format = field(j, "format");
  if (!format.is_string() || format.get<std::string>() != kInstanceFormat)
    throw FormatError("not a paperplan instance document");
  const auto& version = field(j, "version");
  if (!version.is_number_integer()) throw FormatError("version must be an integer");
  if (version.get<int>() != kInstanceVersion)
    throw VersionError("unsupported instance version " + std::to_string(version.get<int>()) + " (expected " +
                       std::to_string(kInstanceVersion) + ")");

  Instance inst;
  const auto& cid = field(j, "class_id");
  if (!cid.is_null()) inst.class_id = cid.get<int>();
  inst.seed = field(j, "seed").get<std::uint64_t>();

  const auto& dj = field(j, "dimensions");
  auto dim = [&](const char* key) {
    const auto& v = field(dj, key);
    if (!v.is_number_integer()) throw FormatError(std::string("dimensions.") + key + ": expected an integer");
    const int n = v.get<int>();
    if (n < 1) throw FormatError(std::string("dimensions.") + key + ": must be >= 1");
    return n;
  };
  Dimensions& d = inst.dims;
  d.grammages = dim("grammages");
  d.periods = dim("periods");
  d.subperiods = dim("subperiods");
  d.paper_machines = dim("paper_machines");
  d.rewinders = dim("rewinders");
  d.cutters = dim("cutters");
  d.reel_types = dim("reel_types");
  d.sheet_types = dim("sheet_types");
  const int K = d.grammages, T = d.periods, Th = d.subperiods;
  const int M1 = d.paper_machines, M2 = d.rewinders, M3 = d.cutters;
  const int N2 = d.reel_types, N3 = d.sheet_types;

  const auto& pj = field(j, "paper");
  inst.paper.grammage_gsm = number(field(pj, "grammage_gsm"), "paper.grammage_gsm");
  inst.paper.diameter_cm = number(field(pj, "diameter_cm"), "paper.diameter_cm");
  inst.paper.thickness_um = number(field(pj, "thickness_um"), "paper.thickness_um");

  const auto& j1 = field(j, "phase1");
  Phase1Params& p1 = inst.phase1;
  p1.production_cost = read_array3(field(j1, "production_cost"), K, M1, T, "phase1.production_cost");
  p1.stock_cost = read_array2(field(j1, "stock_cost"), K, T, "phase1.stock_cost");
  p1.jumbo_length = read_vector(field(j1, "jumbo_length"), M1, "phase1.jumbo_length");
  p1.jumbo_weight = read_array2(field(j1, "jumbo_weight"), K, M1, "phase1.jumbo_weight");
  p1.demand = read_array3(field(j1, "demand"), K, M1, T, "phase1.demand");
  p1.production_time = read_array2(field(j1, "production_time"), K, M1, "phase1.production_time");
  p1.capacity = read_vector(field(j1, "capacity"), T, "phase1.capacity");

  const auto& j2 = field(j, "phase2");
  Phase2Params& p2 = inst.phase2;
  p2.waste_cost = read_array2(field(j2, "waste_cost"), K, T, "phase2.waste_cost");
  p2.stock_cost = read_array2(field(j2, "stock_cost"), N2, T, "phase2.stock_cost");
  p2.reel_length = read_vector(field(j2, "reel_length"), N2, "phase2.reel_length");
  p2.reel_width = read_vector(field(j2, "reel_width"), N2, "phase2.reel_width");
  p2.reel_weight = read_vector(field(j2, "reel_weight"), N2, "phase2.reel_weight");
  p2.demand = read_array2(field(j2, "demand"), N2, T, "phase2.demand");
  p2.cutting_time = read_array3(field(j2, "cutting_time"), K, M1, M2, "phase2.cutting_time");
  p2.capacity = read_vector(field(j2, "capacity"), T, "phase2.capacity");
  p2.grammage = read_indices(field(j2, "grammage"), N2, "phase2.grammage");

  const auto& j3 = field(j, "phase3");
  Phase3Params& p3 = inst.phase3;
  p3.waste_cost = read_array2(field(j3, "waste_cost"), K, Th, "phase3.waste_cost");
  p3.stock_cost = read_array2(field(j3, "stock_cost"), N3, Th, "phase3.stock_cost");
  p3.sheet_length = read_vector(field(j3, "sheet_length"), N3, "phase3.sheet_length");
  p3.sheet_width = read_vector(field(j3, "sheet_width"), N3, "phase3.sheet_width");
  p3.sheet_weight = read_vector(field(j3, "sheet_weight"), N3, "phase3.sheet_weight");
  p3.demand = read_array2(field(j3, "demand"), N3, Th, "phase3.demand");
  p3.cutting_time = read_array2(field(j3, "cutting_time"), N2, M3, "phase3.cutting_time");
  p3.capacity = read_vector(field(j3, "capacity"), Th, "phase3.capacity");
  p3.grammage = read_indices(field(j3, "grammage"), N3, "phase3.grammage");
  const auto& trim = field(j3, "trimming_allowed");
  if (!trim.is_boolean()) throw FormatError("phase3.trimming_allowed: expected a boolean");
  p3.trimming_allowed = trim.get<bool>();
  return inst;
}

inline std::string instance_to_string(const Instance& inst) { return instance_to_json(inst).dump(1) + "\n"; }

inline Instance instance_from_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("malformed instance file: ") + e.what());
  }
  try {
    return instance_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed instance file: ") + e.what());
  }
}

inline void save(const Instance& inst, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << instance_to_string(inst);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

inline Instance load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return instance_from_string(buf.str());
}

}  // namespace paperplan
