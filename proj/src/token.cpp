#include "cpnray/token.hpp"

#include <algorithm>
#include <sstream>

namespace cpnray {

namespace {
const std::shared_ptr<const std::vector<Tile>>& empty_tiles() {
  static const auto empty = std::make_shared<const std::vector<Tile>>();
  return empty;
}
}  // namespace

TileList::TileList() : tiles_(empty_tiles()) {}

TileList::TileList(std::vector<Tile> tiles)
    : tiles_(std::make_shared<const std::vector<Tile>>(std::move(tiles))) {}

TileList TileList::without_front() const {
  if (tiles_->empty()) return *this;
  return TileList(std::vector<Tile>(tiles_->begin() + 1, tiles_->end()));
}

TileList TileList::appended(const Tile& tile) const {
  std::vector<Tile> out;
  out.reserve(tiles_->size() + 1);
  out.assign(tiles_->begin(), tiles_->end());
  out.push_back(tile);
  return TileList(std::move(out));
}

bool operator==(const TileList& a, const TileList& b) {
  return a.tiles_ == b.tiles_ || *a.tiles_ == *b.tiles_;
}

std::strong_ordering operator<=>(const TileList& a, const TileList& b) {
  if (a.tiles_ == b.tiles_) return std::strong_ordering::equal;
  return std::lexicographical_compare_three_way(a.tiles_->begin(), a.tiles_->end(),
                                                b.tiles_->begin(), b.tiles_->end());
}

Colour colour_of(const TokenValue& value) { return static_cast<Colour>(value.index()); }

std::string_view colour_name(Colour colour) {
  switch (colour) {
    case Colour::Unit: return "UNIT";
    case Colour::Int: return "INT";
    case Colour::Bool: return "BOOL";
    case Colour::Tile: return "TILE";
    case Colour::TileList: return "TILElist";
    case Colour::Node: return "NODE";
  }
  return "?";
}

std::ostream& operator<<(std::ostream& os, const Tile& t) {
  return os << "{wdt=" << t.wdt << ",hgt=" << t.hgt << ",complxt=" << t.complxt
            << ",cSuc=" << (t.c_suc ? "true" : "false") << ",ndType=" << t.nd_type
            << ",node=" << t.node_id << "}";
}

std::ostream& operator<<(std::ostream& os, const NodeDesc& n) {
  return os << "node(" << n.id << ",type=" << n.type << ")";
}

std::ostream& operator<<(std::ostream& os, const TokenValue& value) {
  std::visit(
      [&os](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Unit>) {
          os << "()";
        } else if constexpr (std::is_same_v<T, bool>) {
          os << (v ? "true" : "false");
        } else if constexpr (std::is_same_v<T, TileList>) {
          os << "[";
          for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v.tiles()[i];
          os << "]";
        } else {
          os << v;
        }
      },
      value);
  return os;
}

std::ostream& operator<<(std::ostream& os, const TimedToken& token) {
  os << token.value;
  if (token.timestamp) os << "@" << *token.timestamp;
  return os;
}

std::string to_string(const TokenValue& value) {
  std::ostringstream os;
  os << value;
  return os.str();
}

}  // namespace cpnray
