// Command-line harness: runs replicated node-count sweeps of the raytracing
// cluster net and writes summary CSV, plot data and per-scene records.

#include <charconv>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cpnray/experiment.hpp"

namespace {

using cpnray::experiment::ExperimentPlan;
using cpnray::raytrace::Scenario;
using cpnray::raytrace::SceneConfig;

std::int64_t to_int(std::string_view text, const std::string& what) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw std::invalid_argument("bad " + what + " '" + std::string(text) + "'");
  return v;
}

std::pair<std::int64_t, std::int64_t> parse_pair(const std::string& text, char sep,
                                                 const std::string& what) {
  const auto pos = text.find(sep);
  if (pos == std::string::npos)
    throw std::invalid_argument(what + " must look like A" + sep + "B, got '" + text + "'");
  return {to_int(std::string_view(text).substr(0, pos), what),
          to_int(std::string_view(text).substr(pos + 1), what)};
}

/// "1,2-25" -> 1, 2, 3, ..., 25.
std::vector<int> parse_nodes(const std::string& text) {
  std::vector<int> out;
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string item(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    if (item.find('-') != std::string::npos) {
      auto [lo, hi] = parse_pair(item, '-', "node range");
      if (lo > hi) throw std::invalid_argument("empty node range '" + item + "'");
      for (auto n = lo; n <= hi; ++n) out.push_back(static_cast<int>(n));
    } else {
      out.push_back(static_cast<int>(to_int(item, "node count")));
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Timed coloured Petri net simulation of a demand-driven raytracing cluster"};

  std::vector<std::string> scenes;
  std::string tile = "1000x750";
  std::int64_t complexity = 36500;
  std::string complexity_range;
  std::string nodes = "1-25";
  std::string scenario = "both";
  ExperimentPlan plan;
  auto& p = plan.params;
  std::string out_dir = "results";
  bool quiet = false;

  app.add_option("--scene", scenes, "Scene size WxH (repeatable; default 10000x7500 and 30000x22500)");
  app.add_option("--tile", tile, "Tile size WxH")->capture_default_str();
  auto* fixed = app.add_option("--complexity", complexity, "Fixed scene complexity")
                    ->capture_default_str();
  app.add_option("--complexity-range", complexity_range,
                 "Draw each scene's complexity uniformly from LO:HI")
      ->excludes(fixed);
  app.add_option("--nodes", nodes, "Node counts, e.g. 1,2-25")->capture_default_str();
  app.add_option("--scenario", scenario, "ideal, real or both")
      ->check(CLI::IsMember({"ideal", "real", "both"}))
      ->capture_default_str();
  app.add_option("--replications", plan.replications, "Replications per sweep point")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--seed", plan.base_seed, "Base seed")->capture_default_str();
  app.add_option("--scenes-per-run", p.scenes_per_run, "Scenes rendered per replication")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--threads", plan.threads, "Worker threads (0 = hardware concurrency)")
      ->capture_default_str();
  app.add_option("--max-steps", plan.max_steps, "Step ceiling per replication (0 = none)")
      ->capture_default_str();
  app.add_flag("--quiet", quiet, "Do not print the summary table");

  app.add_option("--param-master_perf", p.master_perf)->capture_default_str();
  app.add_option("--param-client_success_p", p.client_success_p)->capture_default_str();
  app.add_option("--param-send_mean_ms", p.send_mean_ms)->capture_default_str();
  app.add_option("--param-send_var", p.send_var)->capture_default_str();
  app.add_option("--param-comm_mean_ms", p.comm_mean_ms)->capture_default_str();
  app.add_option("--param-chck_per_ms", p.chck_per_ms)->capture_default_str();
  app.add_option("--param-chck_max_mult", p.chck_max_mult)->capture_default_str();
  app.add_option("--param-recovery_max_ms", p.recovery_max_ms)->capture_default_str();
  app.add_option("--param-work_ms_per_complexity", p.work_ms_per_complexity)->capture_default_str();
  app.add_option("--param-work_ms_per_kilopixel", p.work_ms_per_kilopixel)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (scenes.empty()) scenes = {"10000x7500", "30000x22500"};
    const auto [tw, th] = parse_pair(tile, 'x', "tile size");
    for (const auto& s : scenes) {
      const auto [w, h] = parse_pair(s, 'x', "scene size");
      SceneConfig cfg;
      cfg.width = w;
      cfg.height = h;
      cfg.tile_width = tw;
      cfg.tile_height = th;
      if (complexity_range.empty()) {
        cfg.complexity = complexity;
      } else {
        const auto [lo, hi] = parse_pair(complexity_range, ':', "complexity range");
        cfg.complexity.reset();
        cfg.complexity_range = {lo, hi};
      }
      plan.scenes.push_back(cfg);
    }
    plan.node_counts = parse_nodes(nodes);
    if (scenario == "both") {
      plan.scenarios = {Scenario::Ideal, Scenario::Real};
    } else {
      plan.scenarios = {cpnray::raytrace::parse_scenario(scenario)};
    }
    plan.validate();

    const auto start = std::chrono::steady_clock::now();
    const auto result = cpnray::experiment::run_experiment(plan);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    cpnray::experiment::write_outputs(result, out_dir);

    if (!quiet) {
      std::printf("%-12s %-6s %5s %14s %12s %5s %9s\n", "scene", "scen.", "nodes", "mean_s",
                  "std_s", "reps", "failures");
      for (const auto& pt : cpnray::experiment::sorted_points(result.points)) {
        std::printf("%-12s %-6s %5d %14.3f %12.3f %5d %9.3f\n", pt.scene.c_str(),
                    pt.scenario.c_str(), pt.nodes, pt.mean_ms / 1000.0, pt.std_ms / 1000.0,
                    pt.replications, pt.mean_failures);
      }
    }
    for (const auto& a : result.aborted) {
      std::fprintf(stderr, "aborted: %s %s nodes=%d rep=%d seed=%llu: %s\n", a.scene.c_str(),
                   a.scenario.c_str(), a.nodes, a.replication,
                   static_cast<unsigned long long>(a.seed), a.reason.c_str());
    }
    std::fprintf(stderr, "%zu points, %zu aborted replications, %.1f s; outputs in %s\n",
                 result.points.size(), result.aborted.size(), secs, out_dir.c_str());
    return result.aborted.empty() ? 0 : 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
