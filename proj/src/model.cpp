#include "swim/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "swim/errors.hpp"

namespace swim {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ParameterError(what);
}

}  // namespace

void ModelParams::validate() const {
  require(std::isfinite(radius) && radius > 0.0 && radius < 1.0, "radius must lie in (0, 1)");
  require(alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0, 1]");
  require(std::isfinite(distance_scale_k) && distance_scale_k >= 0.0,
          "distance_scale_k must be nonnegative");
  require(std::isfinite(waiting_slope) && waiting_slope > 1.0, "waiting_slope must exceed 1");
  require(std::isfinite(waiting_min) && waiting_min > 0.0, "waiting_min must be positive");
  require(std::isfinite(waiting_max) && waiting_max > waiting_min,
          "waiting_max must exceed waiting_min");
  require(std::isfinite(leg_duration) && leg_duration > 0.0, "leg_duration must be positive");
  require(std::isfinite(sim_duration) && sim_duration >= 0.0, "sim_duration must be nonnegative");
}

CellGrid::CellGrid(int cells_per_side) : cells_per_side_(cells_per_side) {
  require(cells_per_side > 0, "cells_per_side must be positive");
  cell_side_ = 1.0 / cells_per_side;
}

bool CellGrid::contains(CellIndex cell) const {
  return cell.row >= 0 && cell.col >= 0 && cell.row < cells_per_side_ &&
         cell.col < cells_per_side_;
}

CellIndex CellGrid::cell_of(Point p) const {
  auto clamp_index = [this](double v) {
    const int i = static_cast<int>(std::floor(v * cells_per_side_));
    return std::clamp(i, 0, cells_per_side_ - 1);
  };
  return {clamp_index(p.y), clamp_index(p.x)};
}

Point CellGrid::center(CellIndex cell) const {
  return {(cell.col + 0.5) * cell_side_, (cell.row + 0.5) * cell_side_};
}

std::size_t CellGrid::flat(CellIndex cell) const {
  return static_cast<std::size_t>(cell.row) * static_cast<std::size_t>(cells_per_side_) +
         static_cast<std::size_t>(cell.col);
}

CellIndex CellGrid::unflat(std::size_t index) const {
  const auto side = static_cast<std::size_t>(cells_per_side_);
  return {static_cast<int>(index / side), static_cast<int>(index % side)};
}

CellGrid build_grid(double radius) {
  require(std::isfinite(radius) && radius > 0.0 && radius <= 1.0, "radius must lie in (0, 1]");
  int side = static_cast<int>(std::ceil(std::sqrt(2.0) / radius));
  // ceil can land one short when sqrt(2)/radius is within rounding of an integer.
  while (std::sqrt(2.0) / side > radius) ++side;
  return CellGrid(side);
}

Point cell_center(const CellGrid& grid, CellIndex cell) {
  require(grid.contains(cell), "cell outside grid");
  return grid.center(cell);
}

void SeenMap::set(std::size_t flat_index, double fraction) {
  require(fraction >= 0.0 && fraction <= 1.0, "seen fraction must lie in [0, 1]");
  values_.at(flat_index) = fraction;
}

double distance_decay(Point home, CellIndex cell, const CellGrid& grid, double k) {
  require(k >= 0.0, "distance scale must be nonnegative");
  const double d = distance(home, cell_center(grid, cell));
  const double base = 1.0 + k * d;
  return 1.0 / (base * base);
}

double cell_weight(const NodeModelState& node, CellIndex cell, const CellGrid& grid,
                   const ModelParams& params) {
  const double seen = node.seen.size() == 0 ? 0.0 : node.seen[grid.flat(cell)];
  return params.alpha * distance_decay(node.home, cell, grid, params.distance_scale_k) +
         (1.0 - params.alpha) * seen;
}

std::vector<double> destination_weights(const NodeModelState& node, const CellGrid& grid,
                                        const ModelParams& params) {
  std::vector<double> weights(grid.cell_count());
  for (std::size_t i = 0; i < weights.size(); ++i)
    weights[i] = cell_weight(node, grid.unflat(i), grid, params);
  return weights;
}

std::size_t sample_weighted(std::span<const double> weights, Rng& rng) {
  require(!weights.empty(), "no cells to sample");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) return rng.index(weights.size());

  const double target = rng.uniform() * total;
  double running = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    running += weights[i];
    if (target < running) return i;
  }
  // Rounding left target at or past the final partial sum: take the last
  // cell that carries weight.
  for (std::size_t i = weights.size(); i-- > 0;)
    if (weights[i] > 0.0) return i;
  return weights.size() - 1;
}

std::pair<CellIndex, Point> choose_destination(const NodeModelState& node, const CellGrid& grid,
                                               const ModelParams& params, Rng& rng) {
  const auto weights = destination_weights(node, grid, params);
  const CellIndex cell = grid.unflat(sample_weighted(weights, rng));
  const double side = grid.cell_side();
  Point p{(cell.col + rng.uniform()) * side, (cell.row + rng.uniform()) * side};
  p.x = std::clamp(p.x, 0.0, 1.0);
  p.y = std::clamp(p.y, 0.0, 1.0);
  return {cell, p};
}

double bounded_pareto_quantile(double u, double slope, double lo, double hi) {
  require(lo > 0.0 && hi > lo, "bounded Pareto needs 0 < lo < hi");
  require(u >= 0.0 && u <= 1.0, "quantile level must lie in [0, 1]");
  if (slope == 1.0) return lo * std::pow(hi / lo, u);
  const double e = 1.0 - slope;
  const double lo_e = std::pow(lo, e);
  const double hi_e = std::pow(hi, e);
  const double t = std::pow(lo_e + u * (hi_e - lo_e), 1.0 / e);
  return std::clamp(t, lo, hi);
}

double sample_waiting_time(const ModelParams& params, Rng& rng) {
  require(params.waiting_min > 0.0 && params.waiting_max > params.waiting_min,
          "waiting-time bounds must satisfy 0 < min < max");
  return bounded_pareto_quantile(rng.uniform(), params.waiting_slope, params.waiting_min,
                                 params.waiting_max);
}

LegKinematics leg_kinematics(Point from, Point to, const ModelParams& params) {
  const double length = distance(from, to);
  if (length == 0.0) return {0.0, 0.0};
  return {length / params.leg_duration, params.leg_duration};
}

}  // namespace swim
