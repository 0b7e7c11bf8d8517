#include "cpnray/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace cpnray::experiment {

using raytrace::Scenario;
using raytrace::SceneConfig;

ExperimentPlan ExperimentPlan::standard_sweep() {
  ExperimentPlan plan;
  SceneConfig small;
  small.width = 10000;
  small.height = 7500;
  SceneConfig big;
  big.width = 30000;
  big.height = 22500;
  for (SceneConfig* s : {&small, &big}) {
    s->tile_width = 1000;
    s->tile_height = 750;
    s->complexity = 36500;
  }
  plan.scenes = {small, big};
  for (int n = 1; n <= 25; ++n) plan.node_counts.push_back(n);
  plan.scenarios = {Scenario::Ideal, Scenario::Real};
  return plan;
}

void ExperimentPlan::validate() const {
  if (scenes.empty()) throw std::invalid_argument("plan has no scenes");
  if (scenarios.empty()) throw std::invalid_argument("plan has no scenarios");
  if (node_counts.empty()) throw std::invalid_argument("plan has no node counts");
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  for (int n : node_counts)
    if (n < 1) throw std::invalid_argument("node counts must be >= 1");
  for (const auto& s : scenes) s.validate();
  params.validate();
}

std::vector<PointKey> enumerate_points(const ExperimentPlan& plan) {
  std::vector<PointKey> out;
  for (std::size_t s = 0; s < plan.scenes.size(); ++s)
    for (Scenario sc : plan.scenarios)
      for (int n : plan.node_counts) out.push_back(PointKey{out.size(), s, sc, n});
  return out;
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t point, int replication) {
  return stochastic::derive_seed(stochastic::derive_seed(base_seed, point),
                                 static_cast<std::uint64_t>(replication));
}

ReplicationResult run_replication(const SceneConfig& scene, const raytrace::ScenarioParams& params,
                                  std::uint64_t seed, std::int64_t max_steps) {
  stochastic::RngStream rng(seed);
  raytrace::ClusterNet cluster = raytrace::build_net(scene, params, rng);
  std::vector<cpn::MonitorHook> hooks;
  auto monitor = monitor::attach_scene_monitor(hooks, params.node_count, seed);
  const std::int64_t target = params.scenes_per_run;
  auto stop = [&](const cpn::SimState&, const cpn::StepEvent&) {
    return monitor->completed() >= target;
  };
  cpn::SimState final_state =
      cpn::run(cluster.net, cpn::SimState(std::move(cluster.initial), rng), stop, hooks,
               cpn::RunOptions{max_steps});
  if (monitor->completed() < target)
    throw std::runtime_error("marking went dead after " + std::to_string(monitor->completed()) +
                             " of " + std::to_string(target) + " scenes");
  return ReplicationResult{monitor->records(), final_state.steps};
}

Aggregate aggregate(const std::vector<monitor::SceneRecord>& records) {
  Aggregate a;
  if (records.empty()) return a;
  const double n = static_cast<double>(records.size());
  double sum = 0.0;
  double failures = 0.0;
  for (const auto& r : records) {
    sum += static_cast<double>(r.duration_ms);
    failures += static_cast<double>(r.failures);
  }
  a.mean_ms = sum / n;
  a.mean_failures = failures / n;
  if (records.size() > 1) {
    double ss = 0.0;
    for (const auto& r : records) {
      const double d = static_cast<double>(r.duration_ms) - a.mean_ms;
      ss += d * d;
    }
    a.std_ms = std::sqrt(ss / (n - 1.0));
  }
  return a;
}

ExperimentResult run_experiment(const ExperimentPlan& plan) {
  plan.validate();
  const std::vector<PointKey> points = enumerate_points(plan);
  const std::size_t reps = static_cast<std::size_t>(plan.replications);
  const std::size_t jobs = points.size() * reps;

  struct Slot {
    ReplicationResult result;
    std::string abort_reason;
    bool aborted = false;
    std::exception_ptr error;
  };
  std::vector<Slot> slots(jobs);

  auto work = [&](std::size_t job) {
    const PointKey& key = points[job / reps];
    const int r = static_cast<int>(job % reps);
    raytrace::ScenarioParams params = plan.params;
    params.node_count = key.node_count;
    params.scenario = key.scenario;
    Slot& slot = slots[job];
    try {
      slot.result = run_replication(plan.scenes[key.scene], params,
                                    replication_seed(plan.base_seed, key.index, r), plan.max_steps);
    } catch (const cpn::RunawayModel& e) {
      slot.aborted = true;
      slot.abort_reason = e.what();
    } catch (const std::runtime_error& e) {
      slot.aborted = true;
      slot.abort_reason = e.what();
    } catch (...) {
      slot.error = std::current_exception();
    }
  };

  unsigned threads = plan.threads ? plan.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(jobs, 1)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job; (job = next.fetch_add(1)) < jobs;) work(job);
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  for (const Slot& slot : slots)
    if (slot.error) std::rethrow_exception(slot.error);

  ExperimentResult result;
  std::map<std::pair<std::size_t, Scenario>, std::size_t> series_of;
  for (const PointKey& key : points) {
    const std::string scene = plan.scenes[key.scene].label();
    const std::string scenario = raytrace::to_string(key.scenario);
    auto [it, inserted] = series_of.try_emplace({key.scene, key.scenario}, result.series.size());
    if (inserted) result.series.push_back(SeriesRecords{scene, scenario, {}});
    SeriesRecords& series = result.series[it->second];

    std::vector<monitor::SceneRecord> records;
    int completed = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      const Slot& slot = slots[key.index * reps + r];
      if (slot.aborted) {
        result.aborted.push_back(AbortedRun{scene, scenario, key.node_count, static_cast<int>(r),
                                            replication_seed(plan.base_seed, key.index,
                                                             static_cast<int>(r)),
                                            slot.abort_reason});
        continue;
      }
      ++completed;
      records.insert(records.end(), slot.result.records.begin(), slot.result.records.end());
    }
    series.records.insert(series.records.end(), records.begin(), records.end());
    const Aggregate agg = aggregate(records);
    result.points.push_back(SweepPoint{scene, scenario, key.node_count, agg.mean_ms, agg.std_ms,
                                       completed, agg.mean_failures});
  }
  return result;
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

std::vector<SweepPoint> sorted_points(std::vector<SweepPoint> points) {
  std::stable_sort(points.begin(), points.end(), [](const SweepPoint& a, const SweepPoint& b) {
    return std::tie(a.scene, a.scenario, a.nodes) < std::tie(b.scene, b.scenario, b.nodes);
  });
  return points;
}

void emit_csv(std::ostream& os, const std::vector<SweepPoint>& points) {
  os << kCsvHeader << '\n';
  for (const auto& p : sorted_points(points)) {
    os << p.scene << ',' << p.scenario << ',' << p.nodes << ',' << format_double(p.mean_ms) << ','
       << format_double(p.std_ms) << ',' << p.replications << ',' << format_double(p.mean_failures)
       << '\n';
  }
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

template <typename T>
T parse_number(std::string_view text, std::size_t line) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw std::runtime_error("csv line " + std::to_string(line) + ": bad number '" +
                             std::string(text) + "'");
  return value;
}

}  // namespace

void emit_csv(const std::vector<SweepPoint>& points, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  emit_csv(out, points);
  finish(out, path);
}

std::vector<SweepPoint> parse_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader)
    throw std::runtime_error("csv: missing or unexpected header");
  std::vector<SweepPoint> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    std::vector<std::string_view> f;
    std::string_view rest = line;
    for (std::size_t comma; (comma = rest.find(',')) != std::string_view::npos;) {
      f.push_back(rest.substr(0, comma));
      rest.remove_prefix(comma + 1);
    }
    f.push_back(rest);
    if (f.size() != 7)
      throw std::runtime_error("csv line " + std::to_string(lineno) + ": expected 7 fields");
    out.push_back(SweepPoint{std::string(f[0]), std::string(f[1]), parse_number<int>(f[2], lineno),
                             parse_number<double>(f[3], lineno), parse_number<double>(f[4], lineno),
                             parse_number<int>(f[5], lineno), parse_number<double>(f[6], lineno)});
  }
  return out;
}

std::vector<std::filesystem::path> emit_plotdata(const std::vector<SweepPoint>& points,
                                                 const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::map<std::pair<std::string, std::string>, std::vector<const SweepPoint*>> series;
  const std::vector<SweepPoint> sorted = sorted_points(points);
  for (const auto& p : sorted) series[{p.scene, p.scenario}].push_back(&p);

  std::vector<std::filesystem::path> written;
  for (const auto& [key, pts] : series) {
    const auto path = dir / (key.first + "_" + key.second + ".dat");
    auto out = open_for_write(path);
    out << "# nodes mean_seconds (" << key.first << ", " << key.second << ")\n";
    for (const SweepPoint* p : pts) out << p->nodes << ' ' << format_double(p->mean_ms / 1000.0) << '\n';
    finish(out, path);
    written.push_back(path);
  }
  return written;
}

void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "records");
  emit_csv(result.points, dir / "summary.csv");
  emit_plotdata(result.points, dir / "plot");
  for (const auto& s : result.series)
    monitor::write_records(s.records, dir / "records" / (s.scene + "_" + s.scenario + ".tsv"));

  const auto aborted_path = dir / "aborted.tsv";
  auto out = open_for_write(aborted_path);
  out << "scene\tscenario\tnodes\treplication\tseed\treason\n";
  for (const auto& a : result.aborted) {
    out << a.scene << '\t' << a.scenario << '\t' << a.nodes << '\t' << a.replication << '\t'
        << a.seed << '\t' << a.reason << '\n';
  }
  finish(out, aborted_path);
}

}  // namespace cpnray::experiment
