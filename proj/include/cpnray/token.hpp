#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace cpnray {

/// Model time in milliseconds.
using ModelTime = std::int64_t;

struct Unit {
  auto operator<=>(const Unit&) const = default;
};

/// One rectangular image section rendered as a single job.
///
/// `nd_type` is 0 until the tile is assigned (1 = master, 2 = client).
/// `node_id` identifies the node the tile was assigned to; -1 when unassigned.
struct Tile {
  std::int64_t wdt = 1;
  std::int64_t hgt = 1;
  std::int64_t complxt = 0;
  bool c_suc = true;
  int nd_type = 0;
  int node_id = -1;

  auto operator<=>(const Tile&) const = default;
};

/// Cluster node. `type` is 1 for the master, 2 for clients.
struct NodeDesc {
  int type = 2;
  int id = 0;

  auto operator<=>(const NodeDesc&) const = default;
};

/// Immutable list of tiles with value semantics. Copies share storage.
class TileList {
 public:
  TileList();
  explicit TileList(std::vector<Tile> tiles);

  const std::vector<Tile>& tiles() const { return *tiles_; }
  std::size_t size() const { return tiles_->size(); }
  bool empty() const { return tiles_->empty(); }
  const Tile& front() const { return tiles_->front(); }

  TileList without_front() const;
  TileList appended(const Tile& tile) const;

  friend bool operator==(const TileList& a, const TileList& b);
  friend std::strong_ordering operator<=>(const TileList& a, const TileList& b);

 private:
  std::shared_ptr<const std::vector<Tile>> tiles_;
};

/// Every value a token may carry. The alternative index doubles as the colour.
using TokenValue = std::variant<Unit, std::int64_t, bool, Tile, TileList, NodeDesc>;

enum class Colour : std::uint8_t { Unit = 0, Int, Bool, Tile, TileList, Node };

Colour colour_of(const TokenValue& value);
std::string_view colour_name(Colour colour);

struct TimedToken {
  TokenValue value;
  std::optional<ModelTime> timestamp;

  bool ready_at(ModelTime now) const { return !timestamp || *timestamp <= now; }

  auto operator<=>(const TimedToken&) const = default;
};

std::ostream& operator<<(std::ostream& os, const Tile& tile);
std::ostream& operator<<(std::ostream& os, const NodeDesc& node);
std::ostream& operator<<(std::ostream& os, const TokenValue& value);
std::ostream& operator<<(std::ostream& os, const TimedToken& token);
std::string to_string(const TokenValue& value);

// Typed accessors; throw std::bad_variant_access on colour mismatch.
inline std::int64_t as_int(const TokenValue& v) { return std::get<std::int64_t>(v); }
inline bool as_bool(const TokenValue& v) { return std::get<bool>(v); }
inline const Tile& as_tile(const TokenValue& v) { return std::get<Tile>(v); }
inline const TileList& as_tile_list(const TokenValue& v) { return std::get<TileList>(v); }
inline const NodeDesc& as_node(const TokenValue& v) { return std::get<NodeDesc>(v); }

}  // namespace cpnray
