#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cpnray/monitor.hpp"
#include "cpnray/raytrace_net.hpp"

namespace cpnray::experiment {

struct ExperimentPlan {
  std::vector<raytrace::SceneConfig> scenes;
  std::vector<int> node_counts;
  std::vector<raytrace::Scenario> scenarios;
  int replications = 30;
  std::uint64_t base_seed = 1;
  /// Template for every run; node_count and scenario are set per sweep point.
  raytrace::ScenarioParams params;
  /// Step ceiling per replication; 0 disables it.
  std::int64_t max_steps = 5'000'000;
  /// Worker threads; 0 uses the hardware concurrency.
  unsigned threads = 0;

  /// The node-count sweep over the small and big scenes, both scenarios,
  /// fixed complexity 36500, 1000x750 tiles.
  static ExperimentPlan standard_sweep();
  void validate() const;
};

/// Sweep points are enumerated scene-major, then scenario, then node count,
/// in plan order; `index` is the position in that enumeration.
struct PointKey {
  std::size_t index = 0;
  std::size_t scene = 0;
  raytrace::Scenario scenario = raytrace::Scenario::Ideal;
  int node_count = 1;
};

std::vector<PointKey> enumerate_points(const ExperimentPlan& plan);

/// Seed of replication `replication` at sweep point `point`.
std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t point, int replication);

struct SweepPoint {
  std::string scene;
  std::string scenario;
  int nodes = 0;
  double mean_ms = 0.0;
  double std_ms = 0.0;
  int replications = 0;
  double mean_failures = 0.0;

  friend bool operator==(const SweepPoint&, const SweepPoint&) = default;
};

struct AbortedRun {
  std::string scene;
  std::string scenario;
  int nodes = 0;
  int replication = 0;
  std::uint64_t seed = 0;
  std::string reason;
};

struct SeriesRecords {
  std::string scene;
  std::string scenario;
  std::vector<monitor::SceneRecord> records;
};

struct ExperimentResult {
  std::vector<SweepPoint> points;
  std::vector<SeriesRecords> series;
  std::vector<AbortedRun> aborted;
};

/// Outcome of one replication.
struct ReplicationResult {
  std::vector<monitor::SceneRecord> records;
  std::int64_t steps = 0;
};

/// Builds the net with `seed` and runs it until `params.scenes_per_run`
/// scenes complete. Throws cpn::RunawayModel past `max_steps`.
ReplicationResult run_replication(const raytrace::SceneConfig& scene,
                                  const raytrace::ScenarioParams& params, std::uint64_t seed,
                                  std::int64_t max_steps);

/// Mean, sample standard deviation (n - 1 denominator; 0 for n < 2) and
/// mean failures over the records.
struct Aggregate {
  double mean_ms = 0.0;
  double std_ms = 0.0;
  double mean_failures = 0.0;
};
Aggregate aggregate(const std::vector<monitor::SceneRecord>& records);

/// Runs every replication of every sweep point. Replications may run
/// concurrently; results are merged in index order.
ExperimentResult run_experiment(const ExperimentPlan& plan);

inline constexpr const char* kCsvHeader =
    "scene,scenario,nodes,mean_ms,std_ms,replications,mean_failures";

/// Points sorted by (scene, scenario, nodes).
std::vector<SweepPoint> sorted_points(std::vector<SweepPoint> points);

void emit_csv(std::ostream& os, const std::vector<SweepPoint>& points);
void emit_csv(const std::vector<SweepPoint>& points, const std::filesystem::path& path);
std::vector<SweepPoint> parse_csv(std::istream& is);

/// Writes <scene>_<scenario>.dat under `dir`: a comment line, then one
/// "nodes mean_seconds" line per point. Returns the files written.
std::vector<std::filesystem::path> emit_plotdata(const std::vector<SweepPoint>& points,
                                                 const std::filesystem::path& dir);

/// Writes summary.csv, plot/*.dat, records/*.tsv and aborted.tsv under `dir`.
void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir);

/// Shortest round-trip decimal form of `x`.
std::string format_double(double x);

}  // namespace cpnray::experiment
