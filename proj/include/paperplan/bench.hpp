#pragma once

// Experiment harness: instance generation per class, strategy sweeps with a
// worker pool, the row-per-run report and its summary.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <boost/tokenizer.hpp>

#include "json.hpp"
#include "paperplan/planner.hpp"

namespace paperplan::bench {

using planner::Strategy;

inline constexpr const char* kReportFormat = "paperplan-report";
inline constexpr int kReportVersion = 1;
inline constexpr const char* kTimingsFormat = "paperplan-timings";
inline constexpr const char* kSummaryFormat = "paperplan-summary";
inline constexpr int kSummaryVersion = 1;

struct RunSpec {
  std::vector<int> classes{1};
  std::vector<std::uint64_t> seeds{1};
  int periods = 4;
  int subperiods = 5;
  std::vector<Strategy> strategies{std::begin(planner::kAllStrategies), std::end(planner::kAllStrategies)};
  double time_limit = 60.0;  // seconds per rounding block
  std::filesystem::path out = "out";
  int jobs = 1;
};

inline void check(const RunSpec& spec) {
  if (spec.classes.empty()) throw std::invalid_argument("no classes selected");
  if (spec.seeds.empty()) throw std::invalid_argument("at least one seed is required");
  if (spec.strategies.empty()) throw std::invalid_argument("no strategies selected");
  if (spec.periods < 1 || spec.subperiods < 1) throw std::invalid_argument("periods and sub-periods must be >= 1");
  if (spec.jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  if (!(spec.time_limit > 0)) throw std::invalid_argument("time limit must be positive");
  for (int c : spec.classes) class_config(c);
}

inline planner::PlannerOptions planner_options(const RunSpec& spec) {
  planner::PlannerOptions o;
  o.rounding.time_limit_per_block = spec.time_limit;
  return o;
}

// ---------------------------------------------------------------------------
// Report rows.

struct PhaseColumns {
  double cost = 0, stock_cost = 0, capacity = 0;
  std::vector<double> stock_units;
  bool operator==(const PhaseColumns&) const = default;
};

struct ReportRow {
  int class_id = 0;  // 0 when the instance carries no class
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::kS123;
  planner::RunStatus status = planner::RunStatus::kOk;
  // Empty unless status is ok.
  std::optional<double> relaxed_cost, rounded_cost;
  PhaseColumns phase[3];
  double waste2 = 0, waste3 = 0;
  int cols_initial = 0, cols_generated = 0, cols_inserted = 0, used_initial = 0, used_generated = 0;
  int iterations = 0;
  long nodes = 0;
  int backtracks = 0, truncated_blocks = 0;
  std::string message;

  bool ok() const { return status == planner::RunStatus::kOk; }
  bool operator==(const ReportRow&) const = default;
};

// Wall-clock times live apart from the report so the report stays
// reproducible.
struct TimingRow {
  int class_id = 0;
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::kS123;
  double relaxation_seconds = 0, rounding_seconds = 0;
};

inline ReportRow make_row(int class_id, std::uint64_t seed, const planner::StrategyReport& r) {
  ReportRow row;
  row.class_id = class_id;
  row.seed = seed;
  row.strategy = r.strategy;
  row.status = r.status;
  row.message = r.message;
  if (!row.ok()) return row;
  row.relaxed_cost = r.relaxed_cost;
  row.rounded_cost = r.rounded_cost;
  for (int p = 0; p < 3; ++p) {
    row.phase[p].cost = r.phase[p].cut_or_production_cost;
    row.phase[p].stock_cost = r.phase[p].stock_cost;
    row.phase[p].capacity = r.phase[p].max_capacity_fraction;
    row.phase[p].stock_units = r.phase[p].stock_units;
  }
  row.waste2 = r.phase[1].waste;
  row.waste3 = r.phase[2].waste;
  row.cols_initial = r.columns.initial;
  row.cols_generated = r.columns.generated;
  row.cols_inserted = r.columns.inserted;
  row.used_initial = r.used_initial;
  row.used_generated = r.used_generated;
  row.iterations = r.iterations;
  row.nodes = r.nodes;
  row.backtracks = r.backtracks;
  row.truncated_blocks = r.truncated_blocks;
  return row;
}

inline const std::vector<std::string>& report_columns() {
  static const std::vector<std::string> cols = {
      "class",          "seed",           "strategy",       "status",         "relaxed_cost",
      "rounded_cost",   "p1_cost",        "p1_stock_cost",  "p2_cost",        "p2_stock_cost",
      "p3_cost",        "p3_stock_cost",  "waste_p2_cm",    "waste_p3_cm2",   "stock_units_p1",
      "stock_units_p2", "stock_units_p3", "capacity_p1",    "capacity_p2",    "capacity_p3",
      "cols_initial",   "cols_generated", "cols_inserted",  "cols_used_initial", "cols_used_generated",
      "iterations",     "nodes",          "backtracks",     "truncated_blocks", "message"};
  return cols;
}

namespace detail {

// Shortest text that reads back to the same double.
inline std::string num(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_num(const std::string& s, const std::string& what) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw FormatError("bad number in " + what + ": '" + s + "'");
  return v;
}

template <class Int>
Int parse_int(const std::string& s, const std::string& what) {
  Int v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw FormatError("bad integer in " + what + ": '" + s + "'");
  return v;
}

inline std::string list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ";" : "") + num(v[i]);
  return out;
}

inline std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto semi = s.find(';', start);
    out.push_back(parse_num(s.substr(start, semi - start), what));
    if (semi == std::string::npos) break;
    start = semi + 1;
  }
  return out;
}

inline std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += (c == '\n' || c == '\r') ? ' ' : c;
  }
  return out + "\"";
}

inline std::vector<std::string> split(const std::string& line) {
  boost::escaped_list_separator<char> sep('\\', ',', '"');
  boost::tokenizer<boost::escaped_list_separator<char>> tok(line, sep);
  return {tok.begin(), tok.end()};
}

inline planner::RunStatus parse_status(const std::string& s) {
  using planner::RunStatus;
  for (RunStatus st : {RunStatus::kOk, RunStatus::kInfeasible, RunStatus::kRoundingFailed, RunStatus::kTimeout,
                       RunStatus::kError})
    if (s == planner::to_string(st)) return st;
  throw FormatError("unknown status '" + s + "'");
}

inline std::string header_line(const char* format, int version) {
  return std::string("# ") + format + " " + std::to_string(version);
}

inline void expect_header(std::istream& in, const char* format, int version, const std::string& what) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError(what + ": empty file");
  std::istringstream hs(line);
  std::string hash, fmt;
  int v = 0;
  if (!(hs >> hash >> fmt >> v) || hash != "#" || fmt != format) throw FormatError(what + ": not a " + format + " file");
  if (v != version)
    throw VersionError(what + ": unsupported version " + std::to_string(v) + " (expected " + std::to_string(version) + ")");
}

}  // namespace detail

inline std::string row_to_csv(const ReportRow& r) {
  using detail::num;
  std::vector<std::string> f;
  f.push_back(std::to_string(r.class_id));
  f.push_back(std::to_string(r.seed));
  f.push_back(planner::to_string(r.strategy));
  f.push_back(planner::to_string(r.status));
  if (r.ok()) {
    f.push_back(num(*r.relaxed_cost));
    f.push_back(num(*r.rounded_cost));
    for (const auto& p : r.phase) {
      f.push_back(num(p.cost));
      f.push_back(num(p.stock_cost));
    }
    f.push_back(num(r.waste2));
    f.push_back(num(r.waste3));
    for (const auto& p : r.phase) f.push_back(detail::list(p.stock_units));
    for (const auto& p : r.phase) f.push_back(num(p.capacity));
    for (long v : {long(r.cols_initial), long(r.cols_generated), long(r.cols_inserted), long(r.used_initial),
                   long(r.used_generated), long(r.iterations), r.nodes, long(r.backtracks), long(r.truncated_blocks)})
      f.push_back(std::to_string(v));
  } else {
    f.resize(report_columns().size() - 1);
  }
  f.push_back(detail::quote(r.message));
  std::string line;
  for (std::size_t i = 0; i < f.size(); ++i) line += (i ? "," : "") + f[i];
  return line;
}

inline ReportRow row_from_csv(const std::string& line) {
  const auto f = detail::split(line);
  const auto& cols = report_columns();
  if (f.size() != cols.size())
    throw FormatError("report row has " + std::to_string(f.size()) + " fields, expected " + std::to_string(cols.size()));
  ReportRow r;
  std::size_t i = 0;
  auto next = [&] { return f[i++]; };
  r.class_id = detail::parse_int<int>(next(), "class");
  r.seed = detail::parse_int<std::uint64_t>(next(), "seed");
  r.strategy = planner::parse_strategy(next());
  r.status = detail::parse_status(next());
  if (!r.ok()) {
    for (std::size_t j = i; j + 1 < f.size(); ++j)
      if (!f[j].empty()) throw FormatError("failed run carries a value in column " + cols[j]);
    r.message = f.back();
    return r;
  }
  auto d = [&] {
    const std::string what = cols[i];
    return detail::parse_num(next(), what);
  };
  auto n = [&] {
    const std::string what = cols[i];
    return detail::parse_int<long>(next(), what);
  };
  r.relaxed_cost = d();
  r.rounded_cost = d();
  for (auto& p : r.phase) {
    p.cost = d();
    p.stock_cost = d();
  }
  r.waste2 = d();
  r.waste3 = d();
  for (auto& p : r.phase) {
    const std::string what = cols[i];
    p.stock_units = detail::parse_list(next(), what);
  }
  for (auto& p : r.phase) p.capacity = d();
  r.cols_initial = n();
  r.cols_generated = n();
  r.cols_inserted = n();
  r.used_initial = n();
  r.used_generated = n();
  r.iterations = n();
  r.nodes = n();
  r.backtracks = n();
  r.truncated_blocks = n();
  r.message = next();
  return r;
}

inline void write_report(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << detail::header_line(kReportFormat, kReportVersion) << "\n";
  const auto& cols = report_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (const auto& r : rows) out << row_to_csv(r) << "\n";
}

inline std::vector<ReportRow> read_report(std::istream& in, const std::string& what = "report") {
  detail::expect_header(in, kReportFormat, kReportVersion, what);
  std::string line;
  if (!std::getline(in, line) || detail::split(line) != report_columns())
    throw FormatError(what + ": column header does not match the declared schema");
  std::vector<ReportRow> rows;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(row_from_csv(line));
  return rows;
}

inline void write_timings(std::ostream& out, const std::vector<TimingRow>& rows) {
  out << detail::header_line(kTimingsFormat, kReportVersion) << "\n";
  out << "class,seed,strategy,relaxation_seconds,rounding_seconds\n";
  for (const auto& t : rows)
    out << t.class_id << "," << t.seed << "," << planner::to_string(t.strategy) << "," << detail::num(t.relaxation_seconds)
        << "," << detail::num(t.rounding_seconds) << "\n";
}

inline std::vector<TimingRow> read_timings(std::istream& in, const std::string& what = "timings") {
  detail::expect_header(in, kTimingsFormat, kReportVersion, what);
  std::string line;
  std::getline(in, line);
  std::vector<TimingRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = detail::split(line);
    if (f.size() != 5) throw FormatError(what + ": expected 5 fields");
    rows.push_back({detail::parse_int<int>(f[0], "class"), detail::parse_int<std::uint64_t>(f[1], "seed"),
                    planner::parse_strategy(f[2]), detail::parse_num(f[3], "relaxation_seconds"),
                    detail::parse_num(f[4], "rounding_seconds")});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Statistics.

struct MeanSd {
  double mean = 0;
  std::optional<double> sd;  // sample standard deviation, needs n >= 2
  int n = 0;
};

inline MeanSd mean_sd(const std::vector<double>& v) {
  MeanSd out;
  out.n = static_cast<int>(v.size());
  if (v.empty()) return out;
  double s = 0;
  for (double x : v) s += x;
  out.mean = s / v.size();
  if (v.size() >= 2) {
    double ss = 0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(ss / (v.size() - 1));
  }
  return out;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

// Percentage difference of the integrated cost against another strategy.
inline double delta_percent(double integrated, double other) { return 100.0 * (integrated - other) / other; }

namespace detail {

inline nlohmann::json stat_json(const MeanSd& s) {
  nlohmann::json j;
  j["n"] = s.n;
  j["mean"] = s.n ? nlohmann::json(s.mean) : nlohmann::json();
  j["sd"] = s.sd ? nlohmann::json(*s.sd) : nlohmann::json();
  return j;
}

inline double total(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s;
}

}  // namespace detail

// Series whose per-(class, strategy) medians feed the plots.
inline const std::vector<std::pair<std::string, double (*)(const ReportRow&)>>& median_series() {
  using R = const ReportRow&;
  static const std::vector<std::pair<std::string, double (*)(const ReportRow&)>> s = {
      {"relaxed_cost", [](R r) { return *r.relaxed_cost; }},
      {"rounded_cost", [](R r) { return *r.rounded_cost; }},
      {"rounding_gap", [](R r) { return (*r.rounded_cost - *r.relaxed_cost) / std::abs(*r.relaxed_cost); }},
      {"p1_cost", [](R r) { return r.phase[0].cost; }},
      {"p1_stock_cost", [](R r) { return r.phase[0].stock_cost; }},
      {"p2_cost", [](R r) { return r.phase[1].cost; }},
      {"p2_stock_cost", [](R r) { return r.phase[1].stock_cost; }},
      {"p3_cost", [](R r) { return r.phase[2].cost; }},
      {"p3_stock_cost", [](R r) { return r.phase[2].stock_cost; }},
      {"waste_p2_cm", [](R r) { return r.waste2; }},
      {"waste_p3_cm2", [](R r) { return r.waste3; }},
      {"stock_units_p1", [](R r) { return detail::total(r.phase[0].stock_units); }},
      {"stock_units_p2", [](R r) { return detail::total(r.phase[1].stock_units); }},
      {"stock_units_p3", [](R r) { return detail::total(r.phase[2].stock_units); }},
      {"capacity_p1", [](R r) { return r.phase[0].capacity; }},
      {"capacity_p2", [](R r) { return r.phase[1].capacity; }},
      {"capacity_p3", [](R r) { return r.phase[2].capacity; }},
      {"cols_initial", [](R r) { return double(r.cols_initial); }},
      {"cols_generated", [](R r) { return double(r.cols_generated); }},
      {"cols_inserted", [](R r) { return double(r.cols_inserted); }},
      {"cols_used_initial", [](R r) { return double(r.used_initial); }},
      {"cols_used_generated", [](R r) { return double(r.used_generated); }},
      {"iterations", [](R r) { return double(r.iterations); }},
  };
  return s;
}

// Summary over the ok rows. Deltas compare S123I with every other strategy
// on the seeds where both succeeded; they are omitted when S123I or every
// other strategy is absent.
inline nlohmann::json summarize(const std::vector<ReportRow>& rows) {
  using nlohmann::json;
  json out;
  out["format"] = kSummaryFormat;
  out["version"] = kSummaryVersion;
  std::map<std::string, int> status_counts;
  for (const auto& r : rows) ++status_counts[planner::to_string(r.status)];
  out["rows"] = rows.size();
  out["status_counts"] = status_counts;

  std::vector<int> classes;
  std::vector<Strategy> strategies;
  for (const auto& r : rows) {
    if (std::find(classes.begin(), classes.end(), r.class_id) == classes.end()) classes.push_back(r.class_id);
    if (std::find(strategies.begin(), strategies.end(), r.strategy) == strategies.end()) strategies.push_back(r.strategy);
  }
  std::sort(classes.begin(), classes.end());
  std::sort(strategies.begin(), strategies.end());

  std::map<std::tuple<int, std::uint64_t, Strategy>, const ReportRow*> ok;
  for (const auto& r : rows)
    if (r.ok()) ok[{r.class_id, r.seed, r.strategy}] = &r;

  const bool has_integrated = std::find(strategies.begin(), strategies.end(), Strategy::kS123I) != strategies.end();
  json deltas = json::array();
  if (has_integrated) {
    for (Strategy other : strategies) {
      if (other == Strategy::kS123I) continue;
      std::vector<double> all_relaxed, all_rounded;
      json per_class = json::array();
      for (int c : classes) {
        std::vector<double> relaxed, rounded;
        for (const auto& [key, integ] : ok) {
          if (std::get<0>(key) != c || std::get<2>(key) != Strategy::kS123I) continue;
          auto it = ok.find({c, std::get<1>(key), other});
          if (it == ok.end()) continue;
          relaxed.push_back(delta_percent(*integ->relaxed_cost, *it->second->relaxed_cost));
          rounded.push_back(delta_percent(*integ->rounded_cost, *it->second->rounded_cost));
        }
        all_relaxed.insert(all_relaxed.end(), relaxed.begin(), relaxed.end());
        all_rounded.insert(all_rounded.end(), rounded.begin(), rounded.end());
        per_class.push_back({{"class", c},
                             {"relaxed", detail::stat_json(mean_sd(relaxed))},
                             {"rounded", detail::stat_json(mean_sd(rounded))}});
      }
      deltas.push_back({{"other", planner::to_string(other)},
                        {"classes", per_class},
                        {"all", {{"relaxed", detail::stat_json(mean_sd(all_relaxed))},
                                 {"rounded", detail::stat_json(mean_sd(all_rounded))}}}});
    }
  }
  if (has_integrated && strategies.size() > 1) out["delta_percent"] = deltas;

  json per = json::array();
  for (int c : classes)
    for (Strategy s : strategies) {
      json entry;
      entry["class"] = c;
      entry["strategy"] = planner::to_string(s);
      int attempted = 0;
      std::vector<const ReportRow*> sel;
      for (const auto& r : rows)
        if (r.class_id == c && r.strategy == s) {
          ++attempted;
          if (r.ok()) sel.push_back(&r);
        }
      entry["attempted"] = attempted;
      entry["ok"] = sel.size();
      json med;
      for (const auto& [name, f] : median_series()) {
        std::vector<double> v;
        for (const auto* r : sel) v.push_back(f(*r));
        med[name] = v.empty() ? json() : json(median(v));
      }
      entry["median"] = med;
      per.push_back(entry);
    }
  out["strategies"] = per;
  return out;
}

// Median wall-clock times per (class, strategy).
inline nlohmann::json summarize_timings(const std::vector<TimingRow>& rows) {
  std::map<std::pair<int, Strategy>, std::pair<std::vector<double>, std::vector<double>>> by;
  for (const auto& t : rows) {
    auto& [relax, round] = by[{t.class_id, t.strategy}];
    relax.push_back(t.relaxation_seconds);
    round.push_back(t.rounding_seconds);
  }
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [key, v] : by)
    out.push_back({{"class", key.first},
                   {"strategy", planner::to_string(key.second)},
                   {"n", v.first.size()},
                   {"median_relaxation_seconds", median(v.first)},
                   {"median_rounding_seconds", median(v.second)}});
  return out;
}

// ---------------------------------------------------------------------------
// Commands.

inline std::filesystem::path instance_path(const std::filesystem::path& dir, int class_id, std::uint64_t seed) {
  char name[48];
  std::snprintf(name, sizeof name, "class%02d_seed%03llu.json", class_id, static_cast<unsigned long long>(seed));
  return dir / name;
}

// Writes one instance file per (class, seed) under out/instances.
inline std::vector<std::filesystem::path> gen(const RunSpec& spec) {
  check(spec);
  const auto dir = spec.out / "instances";
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> paths;
  for (int c : spec.classes)
    for (std::uint64_t s : spec.seeds) {
      paths.push_back(instance_path(dir, c, s));
      save(generate_instance(c, s, spec.periods, spec.subperiods), paths.back());
    }
  return paths;
}

struct SolveResult {
  std::vector<ReportRow> rows;
  std::vector<TimingRow> timings;
};

inline SolveResult solve_instance(const Instance& inst, const std::vector<Strategy>& strategies,
                                  const planner::PlannerOptions& opts) {
  SolveResult out;
  const int cls = inst.class_id.value_or(0);
  for (Strategy s : strategies) {
    const auto r = planner::solve_strategy(inst, s, opts);
    out.rows.push_back(make_row(cls, inst.seed, r));
    out.timings.push_back({cls, inst.seed, s, r.relaxation_seconds, r.rounding_seconds});
  }
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

inline std::string report_text(const std::vector<ReportRow>& rows) {
  std::ostringstream s;
  write_report(s, rows);
  return s.str();
}

inline std::string timings_text(const std::vector<TimingRow>& rows) {
  std::ostringstream s;
  write_timings(s, rows);
  return s.str();
}

// Writes summary.json (and timings_summary.json when timings exist) next to
// the report.
inline void write_summaries(const std::filesystem::path& dir, const std::vector<ReportRow>& rows,
                            const std::vector<TimingRow>* timings) {
  write_file(dir / "summary.json", summarize(rows).dump(2) + "\n");
  if (timings) write_file(dir / "timings_summary.json", summarize_timings(*timings).dump(2) + "\n");
}

// Generates every (class, seed) instance and runs the strategies on it.
// Instances are spread over `jobs` workers; rows are merged in (class, seed,
// strategy) order, so the report does not depend on the worker count.
inline SolveResult run_bench(const RunSpec& spec, bool write = true) {
  check(spec);
  std::vector<std::pair<int, std::uint64_t>> tasks;
  for (int c : spec.classes)
    for (std::uint64_t s : spec.seeds) tasks.push_back({c, s});
  std::vector<SolveResult> results(tasks.size());
  const auto opts = planner_options(spec);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::string error;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < tasks.size();) {
      try {
        const Instance inst = generate_instance(tasks[i].first, tasks[i].second, spec.periods, spec.subperiods);
        results[i] = solve_instance(inst, spec.strategies, opts);
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (error.empty()) error = e.what();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const int n = std::min<int>(spec.jobs, static_cast<int>(tasks.size()));
    for (int w = 1; w < n; ++w) pool.emplace_back(worker);
    worker();
  }
  if (!error.empty()) throw std::runtime_error(error);
  SolveResult merged;
  for (auto& r : results) {
    merged.rows.insert(merged.rows.end(), r.rows.begin(), r.rows.end());
    merged.timings.insert(merged.timings.end(), r.timings.begin(), r.timings.end());
  }
  auto key = [](const auto& r) { return std::tuple{r.class_id, r.seed, r.strategy}; };
  std::stable_sort(merged.rows.begin(), merged.rows.end(), [&](auto& a, auto& b) { return key(a) < key(b); });
  std::stable_sort(merged.timings.begin(), merged.timings.end(), [&](auto& a, auto& b) { return key(a) < key(b); });
  if (write) {
    std::error_code ec;
    std::filesystem::create_directories(spec.out, ec);
    if (ec) throw std::runtime_error("cannot create " + spec.out.string() + ": " + ec.message());
    write_file(spec.out / "report.csv", report_text(merged.rows));
    write_file(spec.out / "timings.csv", timings_text(merged.timings));
    write_summaries(spec.out, merged.rows, &merged.timings);
  }
  return merged;
}

// Exit status for a set of rows: the first failure decides.
inline int exit_code(const std::vector<ReportRow>& rows) {
  for (const auto& r : rows) switch (r.status) {
      case planner::RunStatus::kOk: break;
      case planner::RunStatus::kInfeasible: return 2;
      case planner::RunStatus::kTimeout: return 3;
      case planner::RunStatus::kRoundingFailed: return 4;
      case planner::RunStatus::kError: return 1;
    }
  return 0;
}

}  // namespace paperplan::bench
