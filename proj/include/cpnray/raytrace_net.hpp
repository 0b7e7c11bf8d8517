#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpnray/engine.hpp"
#include "cpnray/net.hpp"
#include "cpnray/stochastic.hpp"
#include "cpnray/token.hpp"

namespace cpnray::raytrace {

/// Place and transition ids of the raytracing cluster net.
namespace ids {
inline constexpr const char* kNewScene = "newScene";
inline constexpr const char* kNodesNo = "nodesNo";
inline constexpr const char* kFreeNodes = "freeNodes";
inline constexpr const char* kScStartTime = "scStartTime";
inline constexpr const char* kPreparedTiles = "preparedTiles";
inline constexpr const char* kPrepTile = "prepTile";
inline constexpr const char* kRaytrTiles = "raytrTiles";
inline constexpr const char* kUnsrRaytrTiles = "unsrRaytrTiles";
inline constexpr const char* kComputedTiles = "computedTiles";
inline constexpr const char* kInvalidNodes = "invalidNodes";

inline constexpr const char* kSendScene = "sendScene";
inline constexpr const char* kSelectTile = "selectTile";
inline constexpr const char* kSucRtrStart = "sucRtrStart";
inline constexpr const char* kUnsucRtrStart = "unsucRtrStart";
inline constexpr const char* kSendRtrTile = "sendRtrTile";
inline constexpr const char* kReturnTile = "returnTile";
inline constexpr const char* kRecoverNode = "recoverNode";
inline constexpr const char* kCompleteScene = "completeScene";
}  // namespace ids

enum class Scenario { Ideal, Real };

std::string to_string(Scenario s);
/// Parses "ideal" or "real"; throws std::invalid_argument otherwise.
Scenario parse_scenario(const std::string& text);

struct ComplexityRange {
  std::int64_t lo = 10000;
  std::int64_t hi = 70000;
};

struct SceneConfig {
  std::int64_t width = 10000;
  std::int64_t height = 7500;
  std::int64_t tile_width = 1000;
  std::int64_t tile_height = 750;
  /// Fixed complexity, or a uniform draw from `complexity_range` per scene.
  std::optional<std::int64_t> complexity = 36500;
  ComplexityRange complexity_range;

  /// "<width>x<height>", used to label outputs.
  std::string label() const;
  std::int64_t columns() const;
  std::int64_t rows() const;
  std::int64_t tile_count() const { return columns() * rows(); }
  /// Throws std::invalid_argument on invalid dimensions or complexity.
  void validate() const;
};

struct ScenarioParams {
  int node_count = 8;
  Scenario scenario = Scenario::Real;
  double master_perf = 0.7;
  double client_success_p = 0.9;
  double send_mean_ms = 20000.0;
  double send_var = 10000.0;
  double comm_mean_ms = 500.0;
  std::int64_t chck_per_ms = 5000;
  std::int64_t chck_max_mult = 6;
  std::int64_t recovery_max_ms = 86'400'000;
  double work_ms_per_complexity = 50.0;
  double work_ms_per_kilopixel = 1.0;
  int scenes_per_run = 1;

  void validate() const;
};

// Model functions invoked from the net's arc expressions.

/// Share of `rem_cmpl` given to the next tile when `rem_tiles` tiles remain.
std::int64_t tile_compl(std::int64_t rem_tiles, std::int64_t rem_cmpl,
                        stochastic::RngStream& rng);

/// Splits the scene into a row-major tile grid and distributes `complexity`
/// over it; the complexities sum to `complexity` exactly.
std::vector<Tile> get_tile_list(const SceneConfig& scene, std::int64_t complexity,
                                stochastic::RngStream& rng);

/// Assigns the tile to `node` and decides whether the job will succeed.
Tile set_suc_ntp(Tile tile, const NodeDesc& node, const ScenarioParams& params,
                 stochastic::RngStream& rng);

/// Raytracing time of an assigned tile.
ModelTime raytr_tm(const Tile& tile, const ScenarioParams& params);
ModelTime comm_time(const ScenarioParams& params, stochastic::RngStream& rng);
ModelTime failcheck_tm(const ScenarioParams& params, stochastic::RngStream& rng);
ModelTime recovery_tm(const ScenarioParams& params, stochastic::RngStream& rng);
/// Time to distribute the scene to every client.
ModelTime send_scene_tm(const ScenarioParams& params, stochastic::RngStream& rng);

/// Draws a scene complexity per the scene's configuration.
std::int64_t scene_complexity(const SceneConfig& scene, stochastic::RngStream& rng);

struct ClusterNet {
  cpn::Net net;
  cpn::Marking initial;
  std::int64_t tile_count = 0;
};

/// Builds the net and its initial marking. `rng` supplies the initial
/// scene complexity when the scene uses a complexity range.
ClusterNet build_net(const SceneConfig& scene, const ScenarioParams& params,
                     stochastic::RngStream& rng);

/// Token counts per role, used by conservation checks.
struct ClusterCensus {
  std::int64_t free_nodes = 0;
  std::int64_t busy_nodes = 0;  // nodes carried by tiles in prepTile/raytrTiles/unsrRaytrTiles
  std::int64_t invalid_nodes = 0;
  std::int64_t listed_tiles = 0;
  std::int64_t in_flight_tiles = 0;
  std::int64_t computed_tiles = 0;
  std::int64_t tile_complexity = 0;  // over every tile currently in the net
  std::int64_t master_failed_tiles = 0;
  bool scene_active = false;  // scStartTime holds a token
};

ClusterCensus census(const cpn::Net& net, const cpn::Marking& marking);

}  // namespace cpnray::raytrace
