#include "cpnray/monitor.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cpnray/raytrace_net.hpp"

namespace cpnray::monitor {

namespace ids = raytrace::ids;

void SceneMonitor::observe(const cpn::SimState& state, const cpn::StepEvent& event) {
  if (event.kind != cpn::StepKind::Fired) return;
  const std::string& t = event.transition->id;
  if (t == ids::kSendScene) {
    open_ = true;
    start_ = event.time;
    complexity_ = as_int(event.binding.at("c"));
    failures_ = 0;
    nodes_.clear();
  } else if (!open_) {
    return;
  } else if (t == ids::kSucRtrStart || t == ids::kUnsucRtrStart) {
    nodes_.insert(as_tile(event.binding.at("t")).node_id);
    if (t == ids::kUnsucRtrStart) ++failures_;
  } else if (t == ids::kCompleteScene) {
    records_.push_back(SceneRecord{completed(), event.time - start_, node_count_,
                                   static_cast<int>(nodes_.size()), failures_, complexity_,
                                   seed_});
    open_ = false;
  }
  (void)state;
}

std::shared_ptr<SceneMonitor> attach_scene_monitor(std::vector<cpn::MonitorHook>& hooks,
                                                   int node_count, std::uint64_t seed) {
  auto monitor = std::make_shared<SceneMonitor>(node_count, seed);
  hooks.emplace_back([monitor](const cpn::SimState& state, const cpn::StepEvent& event) {
    monitor->observe(state, event);
  });
  return monitor;
}

void write_records(std::ostream& os, const std::vector<SceneRecord>& records) {
  os << kRecordHeader << '\n';
  for (const auto& r : records) {
    os << r.scene_index << '\t' << r.duration_ms << '\t' << r.node_count << '\t' << r.nodes_used
       << '\t' << r.failures << '\t' << r.complexity << '\t' << r.seed << '\n';
  }
}

void write_records(const std::vector<SceneRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_records(out, records);
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

namespace {

template <typename T>
T parse_field(std::string_view text, std::size_t line) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw std::runtime_error("records line " + std::to_string(line) + ": bad field '" +
                             std::string(text) + "'");
  return value;
}

}  // namespace

std::vector<SceneRecord> read_records(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kRecordHeader)
    throw std::runtime_error("records: missing or unexpected header");
  std::vector<SceneRecord> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    std::vector<std::string_view> f;
    std::string_view rest = line;
    for (std::size_t tab; (tab = rest.find('\t')) != std::string_view::npos;) {
      f.push_back(rest.substr(0, tab));
      rest.remove_prefix(tab + 1);
    }
    f.push_back(rest);
    if (f.size() != 7)
      throw std::runtime_error("records line " + std::to_string(lineno) + ": expected 7 fields");
    out.push_back(SceneRecord{parse_field<std::int64_t>(f[0], lineno),
                              parse_field<ModelTime>(f[1], lineno),
                              parse_field<int>(f[2], lineno), parse_field<int>(f[3], lineno),
                              parse_field<std::int64_t>(f[4], lineno),
                              parse_field<std::int64_t>(f[5], lineno),
                              parse_field<std::uint64_t>(f[6], lineno)});
  }
  return out;
}

std::vector<SceneRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return read_records(in);
}

}  // namespace cpnray::monitor
