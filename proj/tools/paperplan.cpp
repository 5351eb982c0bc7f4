// Command-line front end: gen, solve, bench and report.

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "paperplan.hpp"

using namespace paperplan;
namespace fs = std::filesystem;

namespace {

// "1-24", "1,3,5", "1-3,7".
std::vector<int> parse_ranges(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto dash = part.find('-');
    try {
      if (dash == std::string::npos) {
        out.push_back(std::stoi(part));
      } else {
        const int lo = std::stoi(part.substr(0, dash)), hi = std::stoi(part.substr(dash + 1));
        if (hi < lo) throw std::invalid_argument("empty range");
        for (int v = lo; v <= hi; ++v) out.push_back(v);
      }
    } catch (const std::logic_error&) {
      throw CLI::ValidationError("bad range '" + part + "'");
    }
  }
  return out;
}

// A bare count N means seeds 1..N; ranges and lists name seeds directly.
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  if (text.find_first_of(",-") == std::string::npos) {
    const int n = parse_ranges(text).front();
    if (n < 1) throw CLI::ValidationError("--seeds needs at least one seed");
    for (int s = 1; s <= n; ++s) out.push_back(s);
    return out;
  }
  for (int s : parse_ranges(text)) out.push_back(static_cast<std::uint64_t>(s));
  return out;
}

std::vector<planner::Strategy> parse_strategies(const std::string& text) {
  std::vector<planner::Strategy> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      out.push_back(planner::parse_strategy(part));
    } catch (const std::invalid_argument& e) {
      throw CLI::ValidationError(e.what());
    }
  }
  return out;
}

void print_deltas(const nlohmann::json& summary) {
  if (!summary.contains("delta_percent")) return;
  auto fmt = [](const nlohmann::json& s) {
    char buf[64];
    if (s["mean"].is_null()) return std::string("n/a");
    if (s["sd"].is_null())
      std::snprintf(buf, sizeof buf, "%.2f (n=%d)", s["mean"].get<double>(), s["n"].get<int>());
    else
      std::snprintf(buf, sizeof buf, "%.2f +- %.2f (n=%d)", s["mean"].get<double>(), s["sd"].get<double>(),
                    s["n"].get<int>());
    return std::string(buf);
  };
  std::cout << "cost difference of S123I against each strategy, %:\n";
  for (const auto& d : summary["delta_percent"])
    std::cout << "  vs " << d["other"].get<std::string>() << ": relaxed " << fmt(d["all"]["relaxed"]) << ", rounded "
              << fmt(d["all"]["rounded"]) << "\n";
}

void print_status(const nlohmann::json& summary) {
  std::cout << summary["rows"].get<int>() << " runs:";
  for (const auto& [k, v] : summary["status_counts"].items()) std::cout << " " << k << "=" << v.get<int>();
  std::cout << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Integrated paper production planning: instance generation, solving and benchmarks"};
  app.require_subcommand(1);

  std::string classes = "1", seeds = "1", strategies = "S123,S1_23,S12_3,S123I";
  int periods = 4, subperiods = 5, jobs = 1;
  double time_limit = 60.0;
  std::string out = "out";

  auto add_grid = [&](CLI::App* cmd) {
    cmd->add_option("--classes", classes, "Class ids: 1-24, 1,3,5 or 1-3,7")->capture_default_str();
    cmd->add_option("--seeds", seeds, "Seed count N (seeds 1..N), or a list/range such as 5-9")->capture_default_str();
    cmd->add_option("--periods", periods, "Planning periods T")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--subperiods", subperiods, "Sub-periods of the first period")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
  };
  auto add_run = [&](CLI::App* cmd) {
    cmd->add_option("--strategies", strategies, "Comma-separated subset of S123,S1_23,S12_3,S123I")
        ->capture_default_str();
    cmd->add_option("--time-limit", time_limit, "Seconds per rounding block")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
  };

  auto* gen_cmd = app.add_subcommand("gen", "Write one instance file per (class, seed) to OUT/instances");
  add_grid(gen_cmd);
  gen_cmd->add_option("--out", out, "Output directory")->capture_default_str();

  std::string instance_file;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one instance file; writes OUT/report.csv");
  solve_cmd->add_option("instance", instance_file, "Instance file")->required()->check(CLI::ExistingFile);
  add_run(solve_cmd);
  solve_cmd->add_option("--out", out, "Output directory")->capture_default_str();

  auto* bench_cmd = app.add_subcommand("bench", "Generate and solve a grid of instances; writes report and summary");
  add_grid(bench_cmd);
  add_run(bench_cmd);
  bench_cmd->add_option("--jobs", jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  bench_cmd->add_option("--out", out, "Output directory")->capture_default_str();

  std::vector<std::string> inputs;
  auto* report_cmd =
      app.add_subcommand("report", "Re-aggregate report rows; merges the given reports or reads OUT/report.csv");
  report_cmd->add_option("reports", inputs, "Report files to merge")->check(CLI::ExistingFile);
  report_cmd->add_option("--out", out, "Output directory")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_cmd) {
      bench::RunSpec spec;
      spec.classes = parse_ranges(classes);
      spec.seeds = parse_seeds(seeds);
      spec.periods = periods;
      spec.subperiods = subperiods;
      spec.out = out;
      const auto paths = bench::gen(spec);
      std::cout << "wrote " << paths.size() << " instances to " << (fs::path(out) / "instances").string() << "\n";
      return 0;
    }
    if (*solve_cmd) {
      const Instance inst = load(instance_file);
      planner::PlannerOptions opts;
      opts.rounding.time_limit_per_block = time_limit;
      const auto res = bench::solve_instance(inst, parse_strategies(strategies), opts);
      fs::create_directories(out);
      bench::write_file(fs::path(out) / "report.csv", bench::report_text(res.rows));
      bench::write_file(fs::path(out) / "timings.csv", bench::timings_text(res.timings));
      for (const auto& r : res.rows) {
        std::cout << planner::to_string(r.strategy) << ": " << planner::to_string(r.status);
        if (r.ok()) {
          char buf[96];
          std::snprintf(buf, sizeof buf, " relaxed %.2f rounded %.2f", *r.relaxed_cost, *r.rounded_cost);
          std::cout << buf;
        } else
          std::cout << " (" << r.message << ")";
        std::cout << "\n";
      }
      return bench::exit_code(res.rows);
    }
    if (*bench_cmd) {
      bench::RunSpec spec;
      spec.classes = parse_ranges(classes);
      spec.seeds = parse_seeds(seeds);
      spec.periods = periods;
      spec.subperiods = subperiods;
      spec.strategies = parse_strategies(strategies);
      spec.time_limit = time_limit;
      spec.jobs = jobs;
      spec.out = out;
      const auto res = bench::run_bench(spec);
      const auto summary = bench::summarize(res.rows);
      print_status(summary);
      print_deltas(summary);
      std::cout << "report: " << (fs::path(out) / "report.csv").string() << "\n";
      return 0;
    }
    if (*report_cmd) {
      std::vector<bench::ReportRow> rows;
      std::vector<bench::TimingRow> timings;
      bool have_timings = false;
      auto read_rows = [&](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open " + p.string());
        const auto r = bench::read_report(in, p.string());
        rows.insert(rows.end(), r.begin(), r.end());
        const auto tp = p.parent_path() / "timings.csv";
        if (std::ifstream tin{tp, std::ios::binary}) {
          const auto t = bench::read_timings(tin, tp.string());
          timings.insert(timings.end(), t.begin(), t.end());
          have_timings = true;
        }
      };
      fs::create_directories(out);
      if (inputs.empty()) {
        read_rows(fs::path(out) / "report.csv");
      } else {
        for (const auto& p : inputs) read_rows(p);
        auto key = [](const auto& r) { return std::tuple{r.class_id, r.seed, r.strategy}; };
        std::stable_sort(rows.begin(), rows.end(), [&](auto& a, auto& b) { return key(a) < key(b); });
        std::stable_sort(timings.begin(), timings.end(), [&](auto& a, auto& b) { return key(a) < key(b); });
        bench::write_file(fs::path(out) / "report.csv", bench::report_text(rows));
        if (have_timings) bench::write_file(fs::path(out) / "timings.csv", bench::timings_text(timings));
      }
      bench::write_summaries(out, rows, have_timings ? &timings : nullptr);
      const auto summary = bench::summarize(rows);
      print_status(summary);
      print_deltas(summary);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
