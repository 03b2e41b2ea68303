#pragma once

#include <array>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uavcov {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Vec2&) const = default;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  bool operator==(const Vec3&) const = default;
};

struct CellIndex {
  int ix = 0;
  int iy = 0;
  int iz = 0;
  auto operator<=>(const CellIndex&) const = default;
};

std::string to_string(CellIndex cell);

// The six unit moves. Enumerator order is the tie-break order used by every
// greedy choice in the library.
enum class Action : std::uint8_t { Forward, Backward, Right, Left, Up, Down };

inline constexpr int kActionCount = 6;
inline constexpr std::array<Action, kActionCount> kAllActions{
    Action::Forward, Action::Backward, Action::Right,
    Action::Left,    Action::Up,       Action::Down};

constexpr int action_index(Action a) { return static_cast<int>(a); }
std::string_view to_string(Action a);

// Unchecked: may leave the grid.
constexpr CellIndex apply(CellIndex c, Action a) {
  switch (a) {
    case Action::Forward: ++c.ix; break;
    case Action::Backward: --c.ix; break;
    case Action::Right: ++c.iy; break;
    case Action::Left: --c.iy; break;
    case Action::Up: ++c.iz; break;
    case Action::Down: --c.iz; break;
  }
  return c;
}

// Set of actions packed into six bits.
class ActionMask {
 public:
  constexpr ActionMask() = default;
  constexpr explicit ActionMask(std::uint8_t bits) : bits_(bits & 0x3F) {}

  constexpr bool contains(Action a) const { return (bits_ >> action_index(a)) & 1U; }
  constexpr void insert(Action a) { bits_ |= static_cast<std::uint8_t>(1U << action_index(a)); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(static_cast<unsigned>(bits_)); }
  constexpr std::uint8_t bits() const { return bits_; }

  // k-th member in action order; k < size().
  Action nth(int k) const;
  std::vector<Action> to_vector() const;

  bool operator==(const ActionMask&) const = default;

 private:
  std::uint8_t bits_ = 0;
};

struct AltitudeBand {
  double min_m = 0.0;
  double max_m = 0.0;
};

// Discretized cuboid mission space. Counts per axis are ceil(L / cell size).
class GridSpace {
 public:
  GridSpace(Vec3 extent_m, double cell_size_m, AltitudeBand band);

  Vec3 extent() const { return extent_; }
  double cell_size() const { return cell_size_; }
  AltitudeBand band() const { return band_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  std::size_t cell_count() const {
    return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_) *
           static_cast<std::size_t>(nz_);
  }

  bool contains(CellIndex c) const {
    return c.ix >= 0 && c.iy >= 0 && c.iz >= 0 && c.ix < nx_ && c.iy < ny_ && c.iz < nz_;
  }
  // Cell-center altitude within [h_min, h_max]. Out-of-range iz yields false.
  bool in_band(CellIndex c) const { return c.iz >= band_lo_ && c.iz <= band_hi_; }
  // Lowest / highest layer whose center lies in the band; lo > hi when the
  // band contains no cell center.
  int band_lo() const { return band_lo_; }
  int band_hi() const { return band_hi_; }

  std::size_t flat(CellIndex c) const {
    return (static_cast<std::size_t>(c.iz) * static_cast<std::size_t>(ny_) +
            static_cast<std::size_t>(c.iy)) *
               static_cast<std::size_t>(nx_) +
           static_cast<std::size_t>(c.ix);
  }
  CellIndex unflat(std::size_t i) const;

  // Throws BoundsError.
  void require_contains(CellIndex c) const;
  Vec3 center(CellIndex c) const;
  double center_altitude(int iz) const { return (iz + 0.5) * cell_size_; }
  // Layer whose center is nearest to altitude_m (clamped to the grid).
  int layer_for_altitude(double altitude_m) const;

 private:
  Vec3 extent_;
  double cell_size_;
  AltitudeBand band_;
  int nx_, ny_, nz_;
  int band_lo_, band_hi_;
};

GridSpace build_grid(Vec3 extent_m, double cell_size_m, AltitudeBand band);
Vec3 cell_center(const GridSpace& grid, CellIndex cell);

// 2.5D height field: one obstacle height per horizontal column, 0 = free.
class ObstacleMap {
 public:
  // All-free map sized to the grid.
  explicit ObstacleMap(const GridSpace& grid);
  // heights is row-major with ix fastest: heights[iy * nx + ix].
  ObstacleMap(const GridSpace& grid, std::vector<double> heights);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double height(int ix, int iy) const { return heights_[static_cast<std::size_t>(iy) * nx_ + ix]; }
  std::span<const double> heights() const { return heights_; }
  // Fraction of columns carrying a non-zero height.
  double column_density() const;

 private:
  int nx_, ny_;
  std::vector<double> heights_;
};

bool is_collision(const GridSpace& grid, const ObstacleMap& obstacles, CellIndex cell);

struct Move {
  Action action;
  CellIndex cell;
  bool operator==(const Move&) const = default;
};

// In-bounds and in-band neighbours, ignoring obstacles.
ActionMask movable_actions(const GridSpace& grid, CellIndex cell);
// movable_actions minus neighbours that collide.
ActionMask legal_actions(const GridSpace& grid, const ObstacleMap& obstacles, CellIndex cell);
std::vector<Move> legal_neighbors(const GridSpace& grid, const ObstacleMap& obstacles,
                                  CellIndex cell);

struct PillarParams {
  int count = 0;
  double min_height_m = 0.0;
  double max_height_m = 0.0;
  int footprint_cells = 1;  // side of the square footprint
};

// Square pillars at uniformly random columns with uniform heights.
ObstacleMap random_pillars(const GridSpace& grid, const PillarParams& params, std::uint64_t seed);
// Every column independently blocked with probability `density`.
ObstacleMap random_columns(const GridSpace& grid, double density, double height_m,
                           std::uint64_t seed);

// JSON form: {"cell_size_m": .., "nx": .., "ny": .., "heights": [row-major]}.
std::string obstacle_map_to_json(const GridSpace& grid, const ObstacleMap& obstacles);
ObstacleMap obstacle_map_from_json(const GridSpace& grid, std::string_view text);
ObstacleMap load_obstacle_map(const std::filesystem::path& path, const GridSpace& grid);
void save_obstacle_map(const std::filesystem::path& path, const GridSpace& grid,
                       const ObstacleMap& obstacles);

}  // namespace uavcov
