#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "cpnray/engine.hpp"

namespace cpnray::monitor {

/// One observation per completed scene.
struct SceneRecord {
  std::int64_t scene_index = 0;
  ModelTime duration_ms = 0;
  int node_count = 0;
  int nodes_used = 0;
  std::int64_t failures = 0;
  std::int64_t complexity = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const SceneRecord&, const SceneRecord&) = default;
};

/// Observes Fired events of the raytracing net: a scene opens on sendScene
/// and closes with a SceneRecord on completeScene. Between the two it counts
/// unsucRtrStart firings and the distinct nodes that started a job.
class SceneMonitor {
 public:
  SceneMonitor(int node_count, std::uint64_t seed) : node_count_(node_count), seed_(seed) {}

  void observe(const cpn::SimState& state, const cpn::StepEvent& event);

  const std::vector<SceneRecord>& records() const { return records_; }
  std::int64_t completed() const { return static_cast<std::int64_t>(records_.size()); }

 private:
  int node_count_;
  std::uint64_t seed_;
  bool open_ = false;
  ModelTime start_ = 0;
  std::int64_t complexity_ = 0;
  std::int64_t failures_ = 0;
  std::set<int> nodes_;
  std::vector<SceneRecord> records_;
};

/// Registers a SceneMonitor hook; the returned handle outlives the hook.
std::shared_ptr<SceneMonitor> attach_scene_monitor(std::vector<cpn::MonitorHook>& hooks,
                                                   int node_count, std::uint64_t seed);

inline constexpr const char* kRecordHeader =
    "scene_index\tduration_ms\tnode_count\tnodes_used\tfailures\tcomplexity\tseed";

void write_records(std::ostream& os, const std::vector<SceneRecord>& records);
/// Throws std::runtime_error naming `path` on I/O failure.
void write_records(const std::vector<SceneRecord>& records, const std::filesystem::path& path);

/// Parses the format produced by write_records; throws std::runtime_error on malformed input.
std::vector<SceneRecord> read_records(std::istream& is);
std::vector<SceneRecord> read_records(const std::filesystem::path& path);

}  // namespace cpnray::monitor
