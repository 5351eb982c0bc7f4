#pragma once

// Small hand-scaled instances whose pattern families can be enumerated.

#include <random>

#include "paperplan/instances.hpp"

namespace tiny {

struct Shape {
  int periods = 2;
  int subperiods = 2;
  int machines = 2;  // per phase
  int reel_types = 3;
  int sheet_types = 3;
  bool trimming = true;
  double capacity_scale = 1.0;
};

// Dimensions are kept tiny (jumbo length <= 20, reels at most 10 x 12) so the
// full pattern families stay enumerable. Every sheet fits at least one reel.
inline paperplan::Instance make(std::uint64_t seed, const Shape& s = {}) {
  using namespace paperplan;
  std::mt19937_64 rng(seed);
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  Instance inst;
  inst.seed = seed;
  Dimensions& d = inst.dims;
  d.grammages = 1;
  d.periods = s.periods;
  d.subperiods = s.subperiods;
  d.paper_machines = d.rewinders = d.cutters = s.machines;
  d.reel_types = s.reel_types;
  d.sheet_types = s.sheet_types;
  const int T = d.periods, Th = d.subperiods, M = s.machines, N2 = d.reel_types, N3 = d.sheet_types;

  auto& p1 = inst.phase1;
  p1.production_cost = Array3(1, M, T);
  for (double& c : p1.production_cost.data()) c = uni(0.8, 1.2);
  p1.stock_cost = Array2(1, T);
  for (double& h : p1.stock_cost.data()) h = uni(0.05, 0.15);
  p1.jumbo_length.resize(M);
  for (double& L : p1.jumbo_length) L = pick(12, 20);
  p1.jumbo_weight = Array2(1, M);
  for (int m = 0; m < M; ++m) p1.jumbo_weight(0, m) = p1.jumbo_length[m];
  p1.demand = Array3(1, M, T, 0.0);
  p1.production_time = Array2(1, M);
  for (double& f : p1.production_time.data()) f = uni(1.0, 2.0);

  auto& p2 = inst.phase2;
  p2.grammage.assign(N2, 0);
  p2.reel_length.resize(N2);
  p2.reel_width.resize(N2);
  p2.reel_weight.resize(N2);
  for (int i = 0; i < N2; ++i) {
    p2.reel_length[i] = pick(4, 10);
    p2.reel_width[i] = pick(6, 12);
    p2.reel_weight[i] = p2.reel_length[i];
  }
  p2.waste_cost = Array2(1, T);
  for (double& c : p2.waste_cost.data()) c = uni(0.02, 0.08);
  p2.stock_cost = Array2(N2, T);
  for (double& h : p2.stock_cost.data()) h = uni(0.02, 0.08);
  p2.demand = Array2(N2, T);
  for (double& v : p2.demand.data()) v = pick(0, 6);
  p2.cutting_time = Array3(1, M, M);
  for (double& f : p2.cutting_time.data()) f = uni(0.5, 1.5);

  auto& p3 = inst.phase3;
  p3.grammage.assign(N3, 0);
  p3.trimming_allowed = s.trimming;
  p3.sheet_length.resize(N3);
  p3.sheet_width.resize(N3);
  p3.sheet_weight.resize(N3);
  double max_l2 = 0, max_w2 = 0;
  for (int i = 0; i < N2; ++i) {
    max_l2 = std::max(max_l2, p2.reel_length[i]);
    max_w2 = std::max(max_w2, p2.reel_width[i]);
  }
  // Put the longest reel first in width too so every sheet has a home.
  for (int i = 0; i < N2; ++i)
    if (p2.reel_length[i] == max_l2) p2.reel_width[i] = max_w2;
  for (int i = 0; i < N3; ++i) {
    p3.sheet_length[i] = pick(2, std::min(5, static_cast<int>(max_l2)));
    p3.sheet_width[i] = pick(2, 5);
    p3.sheet_weight[i] = 0.01 * p3.sheet_length[i] * p3.sheet_width[i];
  }
  p3.waste_cost = Array2(1, Th);
  for (double& c : p3.waste_cost.data()) c = uni(0.002, 0.006);
  p3.stock_cost = Array2(N3, Th);
  for (double& h : p3.stock_cost.data()) h = uni(0.01, 0.05);
  p3.demand = Array2(N3, Th);
  for (double& v : p3.demand.data()) v = pick(0, 30);
  p3.cutting_time = Array2(N2, M);
  for (double& f : p3.cutting_time.data()) f = uni(0.5, 1.5);

  // Generous capacities unless scaled down.
  p1.capacity.assign(T, 200.0 * s.capacity_scale);
  p2.capacity.assign(T, 200.0 * s.capacity_scale);
  p3.capacity.assign(Th, 200.0 * s.capacity_scale);
  return inst;
}

}  // namespace tiny
