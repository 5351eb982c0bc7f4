// Solves one generated instance with every strategy and prints a cost table.
//
//   compare_strategies [class] [seed]

#include <cstdio>
#include <cstdlib>

#include "paperplan.hpp"

using namespace paperplan;

int main(int argc, char** argv) {
  const int class_id = argc > 1 ? std::atoi(argv[1]) : 1;
  const int seed = argc > 2 ? std::atoi(argv[2]) : 1;
  const Instance inst = generate_instance(class_id, seed, 4, 5);
  std::printf("class %d, seed %d: %d reel types, %d sheet types, trimming %s\n", class_id, seed,
              inst.dims.reel_types, inst.dims.sheet_types, inst.phase3.trimming_allowed ? "on" : "off");
  std::printf("%-6s %-10s %14s %14s %7s %12s\n", "plan", "status", "relaxed", "rounded", "gap %", "P3 waste");
  for (const auto s : planner::kAllStrategies) {
    const auto r = planner::solve_strategy(inst, s);
    if (r.status != planner::RunStatus::kOk) {
      std::printf("%-6s %-10s %s\n", planner::to_string(s), planner::to_string(r.status), r.message.c_str());
      continue;
    }
    std::printf("%-6s %-10s %14.2f %14.2f %7.3f %12.0f\n", planner::to_string(s), "ok", r.relaxed_cost, r.rounded_cost,
                100 * r.gap(), r.phase[2].waste);
  }
}
