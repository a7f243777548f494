#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "swim/geometry.hpp"
#include "swim/random.hpp"

namespace swim {

/// Every tuning knob of the mobility model. Defaults reproduce the
/// Infocom 05 scenario (41 nodes, three days, alpha 0.75).
struct ModelParams {
  std::size_t node_count = 41;
  /// Transmission radius as a fraction of the square's side.
  double radius = 0.1;
  /// Balance between home attraction (1) and cell popularity (0).
  double alpha = 0.75;
  double distance_scale_k = 0.05;
  /// Exponent a of the waiting-time density t^-a.
  double waiting_slope = 1.45;
  double waiting_min = 60.0;
  double waiting_max = 4.0 * 3600.0;
  /// Every leg takes this long, whatever its length.
  double leg_duration = 120.0;
  double sim_duration = 3.0 * 86400.0;
  std::uint64_t rng_seed = 1;

  /// Throws ParameterError on the first violated invariant.
  void validate() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct CellIndex {
  int row = 0;
  int col = 0;

  friend bool operator==(const CellIndex&, const CellIndex&) = default;
  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

/// Uniform square grid over the unit square. Cells are sized so that their
/// diagonal never exceeds the radius: two nodes in one cell always see each
/// other.
class CellGrid {
 public:
  explicit CellGrid(int cells_per_side);

  int cells_per_side() const { return cells_per_side_; }
  double cell_side() const { return cell_side_; }
  std::size_t cell_count() const {
    return static_cast<std::size_t>(cells_per_side_) * static_cast<std::size_t>(cells_per_side_);
  }

  bool contains(CellIndex cell) const;
  /// Cell holding p; points on the far edges belong to the last row/column.
  CellIndex cell_of(Point p) const;
  Point center(CellIndex cell) const;

  std::size_t flat(CellIndex cell) const;
  CellIndex unflat(std::size_t index) const;

 private:
  int cells_per_side_;
  double cell_side_;
};

/// Smallest grid whose cell diagonal is at most `radius`. Accepts (0, 1].
CellGrid build_grid(double radius);

/// Geometric center of `cell`; throws ParameterError when out of bounds.
Point cell_center(const CellGrid& grid, CellIndex cell);

/// Per-node popularity memory: fraction of the other nodes met at each cell
/// the last time the node was there.
class SeenMap {
 public:
  SeenMap() = default;
  explicit SeenMap(std::size_t cell_count) : values_(cell_count, 0.0) {}

  double operator[](std::size_t flat_index) const { return values_[flat_index]; }
  void set(std::size_t flat_index, double fraction);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  friend bool operator==(const SeenMap&, const SeenMap&) = default;

 private:
  std::vector<double> values_;
};

struct NodeModelState {
  Point home;
  SeenMap seen;
  Point current_position;
};

/// 1 / (1 + k d)^2 with d the distance from `home` to the center of `cell`.
double distance_decay(Point home, CellIndex cell, const CellGrid& grid, double k);

/// alpha * distance_decay + (1 - alpha) * seen(cell).
double cell_weight(const NodeModelState& node, CellIndex cell, const CellGrid& grid,
                   const ModelParams& params);

/// Weights of every cell in flat order.
std::vector<double> destination_weights(const NodeModelState& node, const CellGrid& grid,
                                        const ModelParams& params);

/// Draws a flat cell index with probability proportional to `weights`.
/// An all-zero vector degrades to a uniform draw.
std::size_t sample_weighted(std::span<const double> weights, Rng& rng);

/// Picks the next waypoint: a cell by weight, then a point uniform in it.
std::pair<CellIndex, Point> choose_destination(const NodeModelState& node, const CellGrid& grid,
                                               const ModelParams& params, Rng& rng);

/// Bounded Pareto draw on [waiting_min, waiting_max] by inverse transform.
double sample_waiting_time(const ModelParams& params, Rng& rng);

/// Inverse CDF of the bounded Pareto, exposed for tests.
double bounded_pareto_quantile(double u, double slope, double lo, double hi);

struct LegKinematics {
  /// Unit lengths per second.
  double speed = 0.0;
  /// Seconds; zero only for a degenerate leg.
  double duration = 0.0;
};

LegKinematics leg_kinematics(Point from, Point to, const ModelParams& params);

}  // namespace swim
