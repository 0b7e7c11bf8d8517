#include "cpnray/raytrace_net.hpp"

#include <cmath>
#include <stdexcept>

namespace cpnray::raytrace {

using cpn::Emission;
using cpn::FiringContext;
using cpn::InputArc;
using stochastic::RngStream;

std::string to_string(Scenario s) { return s == Scenario::Ideal ? "ideal" : "real"; }

Scenario parse_scenario(const std::string& text) {
  if (text == "ideal") return Scenario::Ideal;
  if (text == "real") return Scenario::Real;
  throw std::invalid_argument("unknown scenario '" + text + "' (expected ideal or real)");
}

std::string SceneConfig::label() const {
  return std::to_string(width) + "x" + std::to_string(height);
}

std::int64_t SceneConfig::columns() const { return (width + tile_width - 1) / tile_width; }
std::int64_t SceneConfig::rows() const { return (height + tile_height - 1) / tile_height; }

void SceneConfig::validate() const {
  if (width < 1 || height < 1 || tile_width < 1 || tile_height < 1)
    throw std::invalid_argument("scene and tile dimensions must be >= 1");
  if (tile_width > width || tile_height > height)
    throw std::invalid_argument("tile dimensions exceed scene dimensions");
  if (complexity && *complexity < 0) throw std::invalid_argument("scene complexity must be >= 0");
  if (!complexity && (complexity_range.lo < 0 || complexity_range.lo > complexity_range.hi))
    throw std::invalid_argument("complexity range must satisfy 0 <= lo <= hi");
}

void ScenarioParams::validate() const {
  if (node_count < 1) throw std::invalid_argument("node_count must be >= 1");
  if (!(master_perf > 0.0 && master_perf <= 1.0))
    throw std::invalid_argument("master_perf must be in (0, 1]");
  if (!(client_success_p >= 0.0 && client_success_p <= 1.0))
    throw std::invalid_argument("client_success_p must be in [0, 1]");
  if (send_mean_ms < 0 || send_var < 0 || comm_mean_ms < 0 || recovery_max_ms < 1 ||
      work_ms_per_complexity < 0 || work_ms_per_kilopixel < 0)
    throw std::invalid_argument("time parameters must be non-negative");
  if (chck_per_ms < 1 || chck_max_mult < 1)
    throw std::invalid_argument("chck_per_ms and chck_max_mult must be >= 1");
  if (scenes_per_run < 1) throw std::invalid_argument("scenes_per_run must be >= 1");
}

std::int64_t tile_compl(std::int64_t rem_tiles, std::int64_t rem_cmpl, RngStream& rng) {
  if (rem_tiles < 0 || rem_cmpl < 0)
    throw std::invalid_argument("tile_compl: negative argument");
  if (rem_tiles == 0) return 0;
  if (rem_tiles == 1) return rem_cmpl;
  if (rem_cmpl == 0) return 0;
  const double t_cmp = static_cast<double>(rem_cmpl) / static_cast<double>(rem_tiles);
  const std::int64_t cmpl = stochastic::rn_normal_int_real(rng, t_cmp * 0.8, t_cmp * 0.7);
  return rem_cmpl > cmpl ? cmpl : rem_cmpl;
}

std::vector<Tile> get_tile_list(const SceneConfig& scene, std::int64_t complexity,
                                RngStream& rng) {
  scene.validate();
  if (complexity < 0) throw std::invalid_argument("get_tile_list: negative complexity");
  const std::int64_t cols = scene.columns();
  const std::int64_t rows = scene.rows();
  std::vector<Tile> tiles;
  tiles.reserve(static_cast<std::size_t>(cols * rows));
  std::int64_t rem_tiles = cols * rows;
  std::int64_t rem_cmpl = complexity;
  for (std::int64_t r = 0; r < rows; ++r) {
    const std::int64_t hgt = std::min(scene.tile_height, scene.height - r * scene.tile_height);
    for (std::int64_t c = 0; c < cols; ++c) {
      const std::int64_t wdt = std::min(scene.tile_width, scene.width - c * scene.tile_width);
      const std::int64_t share = tile_compl(rem_tiles, rem_cmpl, rng);
      tiles.push_back(Tile{wdt, hgt, share, true, 0, -1});
      --rem_tiles;
      rem_cmpl -= share;
    }
  }
  return tiles;
}

Tile set_suc_ntp(Tile tile, const NodeDesc& node, const ScenarioParams& params, RngStream& rng) {
  tile.nd_type = node.type;
  tile.node_id = node.id;
  tile.c_suc = node.type == 1 || params.scenario == Scenario::Ideal ||
               stochastic::bernoulli(rng, params.client_success_p);
  return tile;
}

ModelTime raytr_tm(const Tile& tile, const ScenarioParams& params) {
  if (tile.nd_type != 1 && tile.nd_type != 2)
    throw std::logic_error("raytr_tm: tile has no node assigned");
  const double perf =
      tile.nd_type == 1 && params.scenario == Scenario::Real ? params.master_perf : 1.0;
  const double work = params.work_ms_per_kilopixel * static_cast<double>(tile.wdt * tile.hgt) /
                          1000.0 +
                      params.work_ms_per_complexity * static_cast<double>(tile.complxt);
  return std::llround(work / perf);
}

ModelTime comm_time(const ScenarioParams& params, RngStream& rng) {
  if (params.comm_mean_ms == 0.0) return 0;
  return stochastic::rn_exponential_int(rng, params.comm_mean_ms);
}

ModelTime failcheck_tm(const ScenarioParams& params, RngStream& rng) {
  return stochastic::discrete(rng, 1, params.chck_max_mult) * params.chck_per_ms;
}

ModelTime recovery_tm(const ScenarioParams& params, RngStream& rng) {
  return stochastic::discrete(rng, 1, params.recovery_max_ms);
}

namespace {
ModelTime send_scene_tm(std::int64_t nodes, const ScenarioParams& params, RngStream& rng) {
  return (nodes - 1) * stochastic::rn_normal_int(rng, params.send_mean_ms, params.send_var);
}
}  // namespace

ModelTime send_scene_tm(const ScenarioParams& params, RngStream& rng) {
  return send_scene_tm(params.node_count, params, rng);
}

std::int64_t scene_complexity(const SceneConfig& scene, RngStream& rng) {
  if (scene.complexity) return *scene.complexity;
  return stochastic::discrete(rng, scene.complexity_range.lo, scene.complexity_range.hi);
}

ClusterNet build_net(const SceneConfig& scene, const ScenarioParams& params, RngStream& rng) {
  scene.validate();
  params.validate();
  using namespace ids;

  cpn::NetBuilder b;
  b.place(kNewScene, Colour::Int)
      .place(kNodesNo, Colour::Int)
      .place(kFreeNodes, Colour::Node)
      .place(kScStartTime, Colour::Int)
      .place(kPreparedTiles, Colour::TileList, true)
      .place(kPrepTile, Colour::Tile)
      .place(kRaytrTiles, Colour::Tile, true)
      .place(kUnsrRaytrTiles, Colour::Tile, true)
      .place(kComputedTiles, Colour::Tile)
      .place(kInvalidNodes, Colour::Node, true);

  auto same = [](const char* var) {
    return [var](const FiringContext& ctx) -> std::optional<Emission> {
      return Emission{ctx.binding.at(var), 0};
    };
  };
  auto list_empty = [](const cpn::Binding& bd) { return as_tile_list(bd.at("l")).empty(); };

  b.transition({
      .id = kSendScene,
      .inputs = {{kNewScene, "c"}, {kNodesNo, "n"}, {kPreparedTiles, "l"}},
      .guard = list_empty,
      .outputs = {
          {kNodesNo, same("n")},
          {kPreparedTiles,
           [scene, params](const FiringContext& ctx) -> std::optional<Emission> {
             const ModelTime delay = send_scene_tm(as_int(ctx.binding.at("n")), params, ctx.rng);
             TileList tiles(get_tile_list(scene, as_int(ctx.binding.at("c")), ctx.rng));
             return Emission{std::move(tiles), delay};
           }},
          {kScStartTime,
           [](const FiringContext& ctx) -> std::optional<Emission> {
             return Emission{ctx.now, 0};
           }},
      },
  });

  b.transition({
      .id = kSelectTile,
      .inputs = {{kFreeNodes, "nt"}, {kPreparedTiles, "l"}},
      .guard = [](const cpn::Binding& bd) { return !as_tile_list(bd.at("l")).empty(); },
      .outputs = {
          {kPrepTile,
           [params](const FiringContext& ctx) -> std::optional<Emission> {
             const TileList& l = as_tile_list(ctx.binding.at("l"));
             return Emission{set_suc_ntp(l.front(), as_node(ctx.binding.at("nt")), params, ctx.rng),
                             0};
           }},
          {kPreparedTiles,
           [](const FiringContext& ctx) -> std::optional<Emission> {
             return Emission{as_tile_list(ctx.binding.at("l")).without_front(), 0};
           }},
      },
  });

  b.transition({
      .id = kSucRtrStart,
      .inputs = {{kPrepTile, "t"}},
      .guard = [](const cpn::Binding& bd) { return as_tile(bd.at("t")).c_suc; },
      .outputs = {{kRaytrTiles,
                   [params](const FiringContext& ctx) -> std::optional<Emission> {
                     const Tile& t = as_tile(ctx.binding.at("t"));
                     return Emission{t, raytr_tm(t, params) + comm_time(params, ctx.rng)};
                   }}},
  });

  b.transition({
      .id = kUnsucRtrStart,
      .inputs = {{kPrepTile, "t"}},
      .guard = [](const cpn::Binding& bd) { return !as_tile(bd.at("t")).c_suc; },
      .outputs = {{kUnsrRaytrTiles,
                   [params](const FiringContext& ctx) -> std::optional<Emission> {
                     return Emission{ctx.binding.at("t"), failcheck_tm(params, ctx.rng)};
                   }}},
  });

  b.transition({
      .id = kSendRtrTile,
      .inputs = {{kRaytrTiles, "t"}},
      .outputs = {
          {kComputedTiles, same("t")},
          {kFreeNodes,
           [](const FiringContext& ctx) -> std::optional<Emission> {
             const Tile& t = as_tile(ctx.binding.at("t"));
             return Emission{NodeDesc{t.nd_type, t.node_id}, 0};
           }},
      },
  });

  b.transition({
      .id = kReturnTile,
      .inputs = {{kUnsrRaytrTiles, "t"}, {kPreparedTiles, "l"}},
      .outputs = {
          {kPreparedTiles,
           [](const FiringContext& ctx) -> std::optional<Emission> {
             Tile t = as_tile(ctx.binding.at("t"));
             t.nd_type = 0;
             t.node_id = -1;
             t.c_suc = true;
             return Emission{as_tile_list(ctx.binding.at("l")).appended(t), 0};
           }},
          {kInvalidNodes,
           [params](const FiringContext& ctx) -> std::optional<Emission> {
             const Tile& t = as_tile(ctx.binding.at("t"));
             return Emission{NodeDesc{t.nd_type, t.node_id}, recovery_tm(params, ctx.rng)};
           }},
      },
  });

  b.transition({
      .id = kRecoverNode,
      .inputs = {{kInvalidNodes, "nd"}},
      .outputs = {{kFreeNodes, same("nd")}},
  });

  b.transition({
      .id = kCompleteScene,
      .inputs = {InputArc::take_all(kComputedTiles, "done", scene.tile_count()),
                 {kScStartTime, "s"},
                 {kPreparedTiles, "l"}},
      .guard = list_empty,
      .outputs = {
          {kNewScene,
           [scene](const FiringContext& ctx) -> std::optional<Emission> {
             return Emission{scene_complexity(scene, ctx.rng), 0};
           }},
          {kPreparedTiles, same("l")},
      },
  });

  ClusterNet out{std::move(b).build(), cpn::Marking(cpn::Net{}), scene.tile_count()};
  out.initial = cpn::Marking(out.net);
  cpn::add_tokens(out.net, out.initial, kNewScene, {{1, untimed(scene_complexity(scene, rng))}});
  cpn::add_tokens(out.net, out.initial, kNodesNo,
                  {{1, untimed(static_cast<std::int64_t>(params.node_count))}});
  Multiset nodes;
  nodes.add(untimed(NodeDesc{1, 0}));
  for (int id = 1; id < params.node_count; ++id) nodes.add(untimed(NodeDesc{2, id}));
  cpn::add_tokens(out.net, out.initial, kFreeNodes, nodes);
  cpn::add_tokens(out.net, out.initial, kPreparedTiles, {{1, at_time(TileList{}, 0)}});
  return out;
}

ClusterCensus census(const cpn::Net& net, const cpn::Marking& m) {
  using namespace ids;
  ClusterCensus c;
  c.free_nodes = m.at(net, kFreeNodes).size();
  c.invalid_nodes = m.at(net, kInvalidNodes).size();
  c.scene_active = !m.at(net, kScStartTime).empty();
  for (const auto& [token, count] : m.at(net, kPreparedTiles)) {
    for (const Tile& t : as_tile_list(token.value).tiles()) c.tile_complexity += count * t.complxt;
    c.listed_tiles += count * static_cast<std::int64_t>(as_tile_list(token.value).size());
  }
  auto tally = [&](const char* place, std::int64_t& bucket) {
    for (const auto& [token, count] : m.at(net, place)) {
      c.tile_complexity += count * as_tile(token.value).complxt;
      bucket += count;
    }
  };
  tally(kPrepTile, c.in_flight_tiles);
  tally(kRaytrTiles, c.in_flight_tiles);
  tally(kUnsrRaytrTiles, c.in_flight_tiles);
  tally(kComputedTiles, c.computed_tiles);
  // Every in-flight tile carries the node it was assigned to.
  c.busy_nodes = c.in_flight_tiles;
  for (const auto& [token, count] : m.at(net, kUnsrRaytrTiles))
    if (as_tile(token.value).nd_type == 1) c.master_failed_tiles += count;
  return c;
}

}  // namespace cpnray::raytrace
