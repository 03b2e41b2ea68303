#include "uavcov/gridworld.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "uavcov/errors.hpp"
#include "uavcov/seeding.hpp"

namespace uavcov {

namespace {

// Smallest n with n * cell >= length, evaluated in the same floating
// arithmetic callers use to check it.
int ceil_count(double length, double cell) {
  auto n = static_cast<long long>(std::ceil(length / cell));
  while (n > 1 && static_cast<double>(n - 1) * cell >= length) --n;
  while (static_cast<double>(n) * cell < length) ++n;
  return static_cast<int>(std::max(1LL, n));
}

}  // namespace

std::string to_string(CellIndex cell) {
  std::ostringstream os;
  os << '(' << cell.ix << ',' << cell.iy << ',' << cell.iz << ')';
  return os.str();
}

std::string_view to_string(Action a) {
  switch (a) {
    case Action::Forward: return "forward";
    case Action::Backward: return "backward";
    case Action::Right: return "right";
    case Action::Left: return "left";
    case Action::Up: return "up";
    case Action::Down: return "down";
  }
  return "?";
}

Action ActionMask::nth(int k) const {
  for (Action a : kAllActions) {
    if (contains(a) && k-- == 0) return a;
  }
  throw BoundsError("ActionMask::nth: index exceeds mask size");
}

std::vector<Action> ActionMask::to_vector() const {
  std::vector<Action> out;
  for (Action a : kAllActions)
    if (contains(a)) out.push_back(a);
  return out;
}

GridSpace::GridSpace(Vec3 extent_m, double cell_size_m, AltitudeBand band)
    : extent_(extent_m), cell_size_(cell_size_m), band_(band) {
  if (!(cell_size_m > 0.0) || !std::isfinite(cell_size_m))
    throw InvalidConfiguration("cell size must be positive");
  if (!(extent_m.x > 0.0) || !(extent_m.y > 0.0) || !(extent_m.z > 0.0) ||
      !std::isfinite(extent_m.x) || !std::isfinite(extent_m.y) || !std::isfinite(extent_m.z))
    throw InvalidConfiguration("grid extents must be positive");
  if (!(band.min_m <= band.max_m))
    throw InvalidConfiguration("altitude band requires h_min <= h_max");
  if (band.min_m < 0.0 || band.max_m > extent_m.z)
    throw InvalidConfiguration("altitude band must lie within [0, L_z]");

  nx_ = ceil_count(extent_m.x, cell_size_m);
  ny_ = ceil_count(extent_m.y, cell_size_m);
  nz_ = ceil_count(extent_m.z, cell_size_m);

  band_lo_ = nz_;
  band_hi_ = -1;
  for (int iz = 0; iz < nz_; ++iz) {
    const double z = center_altitude(iz);
    if (z >= band.min_m && z <= band.max_m) {
      band_lo_ = std::min(band_lo_, iz);
      band_hi_ = std::max(band_hi_, iz);
    }
  }
  if (band_lo_ > band_hi_)
    throw InvalidConfiguration("altitude band contains no cell center");
}

CellIndex GridSpace::unflat(std::size_t i) const {
  const auto nx = static_cast<std::size_t>(nx_);
  const auto ny = static_cast<std::size_t>(ny_);
  return {static_cast<int>(i % nx), static_cast<int>((i / nx) % ny),
          static_cast<int>(i / (nx * ny))};
}

void GridSpace::require_contains(CellIndex c) const {
  if (!contains(c)) throw BoundsError("cell " + to_string(c) + " is outside the grid");
}

Vec3 GridSpace::center(CellIndex c) const {
  require_contains(c);
  return {(c.ix + 0.5) * cell_size_, (c.iy + 0.5) * cell_size_, (c.iz + 0.5) * cell_size_};
}

int GridSpace::layer_for_altitude(double altitude_m) const {
  const auto iz = static_cast<int>(std::floor(altitude_m / cell_size_));
  return std::clamp(iz, 0, nz_ - 1);
}

GridSpace build_grid(Vec3 extent_m, double cell_size_m, AltitudeBand band) {
  return GridSpace(extent_m, cell_size_m, band);
}

Vec3 cell_center(const GridSpace& grid, CellIndex cell) { return grid.center(cell); }

ObstacleMap::ObstacleMap(const GridSpace& grid)
    : nx_(grid.nx()),
      ny_(grid.ny()),
      heights_(static_cast<std::size_t>(grid.nx()) * static_cast<std::size_t>(grid.ny()), 0.0) {}

ObstacleMap::ObstacleMap(const GridSpace& grid, std::vector<double> heights)
    : nx_(grid.nx()), ny_(grid.ny()), heights_(std::move(heights)) {
  if (heights_.size() != static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_))
    throw InvalidConfiguration("obstacle height field has " + std::to_string(heights_.size()) +
                               " entries, grid needs " + std::to_string(nx_ * ny_));
  for (double h : heights_) {
    if (!(h >= 0.0) || h > grid.extent().z)
      throw InvalidConfiguration("obstacle heights must lie within [0, L_z]");
  }
}

double ObstacleMap::column_density() const {
  const auto blocked = std::count_if(heights_.begin(), heights_.end(), [](double h) { return h > 0.0; });
  return static_cast<double>(blocked) / static_cast<double>(heights_.size());
}

bool is_collision(const GridSpace& grid, const ObstacleMap& obstacles, CellIndex cell) {
  grid.require_contains(cell);
  return grid.center_altitude(cell.iz) <= obstacles.height(cell.ix, cell.iy);
}

ActionMask movable_actions(const GridSpace& grid, CellIndex cell) {
  ActionMask mask;
  for (Action a : kAllActions) {
    const CellIndex next = apply(cell, a);
    if (grid.contains(next) && grid.in_band(next)) mask.insert(a);
  }
  return mask;
}

ActionMask legal_actions(const GridSpace& grid, const ObstacleMap& obstacles, CellIndex cell) {
  ActionMask mask;
  for (Action a : kAllActions) {
    const CellIndex next = apply(cell, a);
    if (grid.contains(next) && grid.in_band(next) && !is_collision(grid, obstacles, next))
      mask.insert(a);
  }
  return mask;
}

std::vector<Move> legal_neighbors(const GridSpace& grid, const ObstacleMap& obstacles,
                                  CellIndex cell) {
  grid.require_contains(cell);
  std::vector<Move> out;
  const ActionMask mask = legal_actions(grid, obstacles, cell);
  for (Action a : kAllActions)
    if (mask.contains(a)) out.push_back({a, apply(cell, a)});
  return out;
}

ObstacleMap random_pillars(const GridSpace& grid, const PillarParams& params, std::uint64_t seed) {
  if (params.count < 0 || params.footprint_cells < 1)
    throw InvalidConfiguration("pillar count must be >= 0 and footprint >= 1");
  if (!(params.min_height_m >= 0.0) || params.min_height_m > params.max_height_m)
    throw InvalidConfiguration("pillar heights require 0 <= min <= max");

  Rng rng(seed);
  std::uniform_int_distribution<int> col_x(0, grid.nx() - 1);
  std::uniform_int_distribution<int> col_y(0, grid.ny() - 1);
  std::uniform_real_distribution<double> height(params.min_height_m, params.max_height_m);

  std::vector<double> heights(static_cast<std::size_t>(grid.nx()) * grid.ny(), 0.0);
  for (int p = 0; p < params.count; ++p) {
    const int x0 = col_x(rng);
    const int y0 = col_y(rng);
    const double h = std::min(height(rng), grid.extent().z);
    for (int dy = 0; dy < params.footprint_cells && y0 + dy < grid.ny(); ++dy)
      for (int dx = 0; dx < params.footprint_cells && x0 + dx < grid.nx(); ++dx) {
        double& cell = heights[static_cast<std::size_t>(y0 + dy) * grid.nx() + (x0 + dx)];
        cell = std::max(cell, h);
      }
  }
  return ObstacleMap(grid, std::move(heights));
}

ObstacleMap random_columns(const GridSpace& grid, double density, double height_m,
                           std::uint64_t seed) {
  if (!(density >= 0.0 && density <= 1.0))
    throw InvalidConfiguration("obstacle density must lie in [0, 1]");
  Rng rng(seed);
  std::bernoulli_distribution blocked(density);
  std::vector<double> heights(static_cast<std::size_t>(grid.nx()) * grid.ny(), 0.0);
  for (double& h : heights)
    if (blocked(rng)) h = std::min(height_m, grid.extent().z);
  return ObstacleMap(grid, std::move(heights));
}

std::string obstacle_map_to_json(const GridSpace& grid, const ObstacleMap& obstacles) {
  nlohmann::json j;
  j["cell_size_m"] = grid.cell_size();
  j["nx"] = obstacles.nx();
  j["ny"] = obstacles.ny();
  j["heights"] = std::vector<double>(obstacles.heights().begin(), obstacles.heights().end());
  return j.dump();
}

ObstacleMap obstacle_map_from_json(const GridSpace& grid, std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfiguration(std::string("obstacle map is not valid JSON: ") + e.what());
  }
  try {
    const double cell = j.at("cell_size_m").get<double>();
    const int nx = j.at("nx").get<int>();
    const int ny = j.at("ny").get<int>();
    if (std::abs(cell - grid.cell_size()) > 1e-9 * grid.cell_size())
      throw InvalidConfiguration("obstacle map cell_size_m does not match the grid");
    if (nx != grid.nx() || ny != grid.ny())
      throw InvalidConfiguration("obstacle map is " + std::to_string(nx) + "x" +
                                 std::to_string(ny) + ", grid is " + std::to_string(grid.nx()) +
                                 "x" + std::to_string(grid.ny()));
    return ObstacleMap(grid, j.at("heights").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfiguration(std::string("malformed obstacle map: ") + e.what());
  }
}

ObstacleMap load_obstacle_map(const std::filesystem::path& path, const GridSpace& grid) {
  std::ifstream in(path);
  if (!in) throw InvalidConfiguration("cannot read obstacle map " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return obstacle_map_from_json(grid, buf.str());
}

void save_obstacle_map(const std::filesystem::path& path, const GridSpace& grid,
                       const ObstacleMap& obstacles) {
  std::ofstream out(path);
  if (!out) throw InvalidConfiguration("cannot write obstacle map " + path.string());
  out << obstacle_map_to_json(grid, obstacles) << '\n';
}

}  // namespace uavcov
