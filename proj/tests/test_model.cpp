#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "support/oracles.hpp"
#include "swim/errors.hpp"
#include "swim/metrics.hpp"
#include "swim/model.hpp"

using namespace swim;

TEST_CASE("build_grid picks the smallest grid whose cell diagonal fits the radius") {
  CHECK(build_grid(0.1).cells_per_side() == 15);
  CHECK(build_grid(0.1).cell_side() == doctest::Approx(1.0 / 15.0));
  CHECK(build_grid(1.0).cells_per_side() == 2);
  CHECK(build_grid(1.0).cell_side() == 0.5);
  CHECK(build_grid(0.05).cells_per_side() == 29);

  CHECK_THROWS_AS(build_grid(0.0), ParameterError);
  CHECK_THROWS_AS(build_grid(-0.1), ParameterError);
  CHECK_THROWS_AS(build_grid(1.5), ParameterError);
  CHECK_THROWS_AS(build_grid(std::nan("")), ParameterError);
}

TEST_CASE("grid invariants hold across radii") {
  Rng rng(3);
  for (int k = 0; k < 2000; ++k) {
    const double r = 0.005 + 0.995 * rng.uniform();
    const auto g = build_grid(r);
    CHECK(g.cell_side() * std::sqrt(2.0) <= r);
    // One fewer cell per side would break the diagonal bound.
    if (g.cells_per_side() > 1) CHECK(std::sqrt(2.0) / (g.cells_per_side() - 1) > r);
    const Point p{rng.uniform(), rng.uniform()};
    const auto c = g.cell_of(p);
    REQUIRE(g.contains(c));
    const Point center = g.center(c);
    CHECK(std::abs(p.x - center.x) <= g.cell_side() / 2 + 1e-12);
    CHECK(std::abs(p.y - center.y) <= g.cell_side() / 2 + 1e-12);
    CHECK(g.unflat(g.flat(c)) == c);
  }
  const auto g = build_grid(0.1);
  CHECK(g.cell_of({1.0, 1.0}) == CellIndex{14, 14});
  CHECK(g.cell_of({0.0, 0.0}) == CellIndex{0, 0});
}

TEST_CASE("cell_center") {
  CHECK(cell_center(CellGrid(2), {0, 0}) == Point{0.25, 0.25});
  CHECK(cell_center(CellGrid(2), {1, 1}) == Point{0.75, 0.75});
  const Point c = cell_center(CellGrid(15), {0, 0});
  CHECK(c.x == doctest::Approx(1.0 / 30.0));
  CHECK(c.y == doctest::Approx(1.0 / 30.0));
  // row indexes y, col indexes x
  CHECK(cell_center(CellGrid(2), {0, 1}) == Point{0.75, 0.25});
  CHECK_THROWS_AS(cell_center(CellGrid(2), {2, 0}), ParameterError);
  CHECK_THROWS_AS(cell_center(CellGrid(2), {0, -1}), ParameterError);
}

TEST_CASE("distance_decay") {
  const CellGrid g(2);
  CHECK(distance_decay({0.25, 0.25}, {0, 0}, g, 0.05) == 1.0);
  // Home placed so that the (0.75, 0.75) center is sqrt(2) away.
  CHECK(distance_decay({0.75 - 1.0, 0.75 - 1.0}, {1, 1}, g, 0.05) ==
        doctest::Approx(0.8723).epsilon(1e-4));
  CHECK(distance_decay({0.0, 1.0}, {1, 0}, g, 0.0) == 1.0);
  CHECK_THROWS_AS(distance_decay({0.0, 0.0}, {0, 0}, g, -1.0), ParameterError);
}

TEST_CASE("distance decay is bounded away from zero on the unit square") {
  const auto g = build_grid(0.1);
  double lowest = 1.0;
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 20; ++j) {
      const Point home{i / 20.0, j / 20.0};
      for (std::size_t c = 0; c < g.cell_count(); ++c)
        lowest = std::min(lowest, distance_decay(home, g.unflat(c), g, 0.05));
    }
  CHECK(lowest >= 0.872);
  CHECK(lowest > 0.0);
}

TEST_CASE("cell_weight mixes home attraction and popularity") {
  const CellGrid g(2);
  ModelParams p;
  NodeModelState node{{0.25, 0.25}, SeenMap(g.cell_count()), {0.25, 0.25}};

  p.alpha = 1.0;
  node.seen.set(g.flat({0, 1}), 0.6);
  CHECK(cell_weight(node, {0, 1}, g, p) == distance_decay(node.home, {0, 1}, g, p.distance_scale_k));

  p.alpha = 0.0;
  CHECK(cell_weight(node, {1, 1}, g, p) == 0.0);

  // k chosen so that the neighbouring cell (0.5 away) decays to exactly 0.9.
  p.alpha = 0.75;
  p.distance_scale_k = (1.0 / std::sqrt(0.9) - 1.0) / 0.5;
  node.seen.set(g.flat({0, 1}), 0.2);
  CHECK(distance_decay(node.home, {0, 1}, g, p.distance_scale_k) == doctest::Approx(0.9));
  CHECK(cell_weight(node, {0, 1}, g, p) == doctest::Approx(0.725).epsilon(1e-12));
}

TEST_CASE("weights fall with distance when popularity is flat") {
  Rng rng(11);
  const auto g = build_grid(0.1);
  ModelParams p;
  for (int trial = 0; trial < 50; ++trial) {
    NodeModelState node{{rng.uniform(), rng.uniform()}, SeenMap(g.cell_count()), {}};
    const double flat_seen = rng.uniform();
    for (std::size_t c = 0; c < g.cell_count(); ++c) node.seen.set(c, flat_seen);
    p.alpha = 0.05 + 0.95 * rng.uniform();
    std::vector<std::pair<double, double>> by_distance;
    for (std::size_t c = 0; c < g.cell_count(); ++c) {
      const auto cell = g.unflat(c);
      by_distance.push_back({distance(node.home, g.center(cell)), cell_weight(node, cell, g, p)});
    }
    std::sort(by_distance.begin(), by_distance.end());
    for (std::size_t k = 1; k < by_distance.size(); ++k)
      CHECK(by_distance[k].second <= by_distance[k - 1].second + 1e-15);
  }
}

TEST_CASE("destination probabilities are normalized") {
  const auto g = build_grid(0.1);
  ModelParams p;
  Rng rng(5);
  NodeModelState node{{0.3, 0.8}, SeenMap(g.cell_count()), {}};
  for (std::size_t c = 0; c < g.cell_count(); ++c) node.seen.set(c, rng.uniform());
  const auto w = destination_weights(node, g, p);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  double sum = 0.0;
  for (const double x : w) sum += x / total;
  CHECK(std::abs(sum - 1.0) < 1e-12);
}

TEST_CASE("choose_destination favours the home cell when alpha is 1") {
  const CellGrid g(2);
  ModelParams p;
  p.alpha = 1.0;
  const NodeModelState node{g.center({1, 0}), SeenMap(g.cell_count()), {}};
  const auto w = destination_weights(node, g, p);
  CHECK(std::max_element(w.begin(), w.end()) - w.begin() == static_cast<long>(g.flat({1, 0})));

  Rng rng(1);
  std::vector<int> hits(g.cell_count(), 0);
  for (int k = 0; k < 20000; ++k) {
    const auto [cell, point] = choose_destination(node, g, p, rng);
    ++hits[g.flat(cell)];
    CHECK(g.cell_of(point) == cell);
    CHECK(in_unit_square(point));
  }
  CHECK(std::max_element(hits.begin(), hits.end()) - hits.begin() == static_cast<long>(g.flat({1, 0})));
}

TEST_CASE("a single-cell grid always yields that cell") {
  const CellGrid g(1);
  ModelParams p;
  Rng rng(2);
  const NodeModelState node{{0.1, 0.9}, SeenMap(1), {}};
  for (int k = 0; k < 1000; ++k) CHECK(choose_destination(node, g, p, rng).first == CellIndex{0, 0});
}

TEST_CASE("destination frequencies match the weights (chi-square)") {
  const auto g = build_grid(0.1);
  ModelParams p;
  p.alpha = 0.75;
  const NodeModelState node{{0.42, 0.17}, SeenMap(g.cell_count()), {}};
  const auto w = destination_weights(node, g, p);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  std::vector<double> probs;
  for (const double x : w) probs.push_back(x / total);

  Rng rng(77);
  const int draws = 1000000;
  std::vector<double> observed(g.cell_count(), 0.0);
  for (int k = 0; k < draws; ++k) ++observed[g.flat(choose_destination(node, g, p, rng).first)];
  CHECK(oracle::chi_square_p_value(observed, probs, draws) > 0.001);
}

TEST_CASE("scaling every weight leaves the draws unchanged") {
  Rng weights_rng(9);
  std::vector<double> w(225), scaled(225);
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = weights_rng.uniform();
    scaled[i] = w[i] * 4.0;
  }
  Rng a(123), b(123);
  for (int k = 0; k < 10000; ++k) CHECK(sample_weighted(w, a) == sample_weighted(scaled, b));
}

TEST_CASE("all-zero weights fall back to a uniform cell") {
  const auto g = build_grid(0.1);
  ModelParams p;
  p.alpha = 0.0;
  const NodeModelState node{{0.5, 0.5}, SeenMap(g.cell_count()), {}};
  Rng rng(4);
  const int draws = 225 * 400;
  std::vector<double> observed(g.cell_count(), 0.0);
  for (int k = 0; k < draws; ++k) ++observed[g.flat(choose_destination(node, g, p, rng).first)];
  const std::vector<double> uniform(g.cell_count(), 1.0 / 225.0);
  CHECK(oracle::chi_square_p_value(observed, uniform, draws) > 0.001);
}

TEST_CASE("waiting times follow the truncated power law") {
  ModelParams p;
  p.waiting_slope = 1.45;
  p.waiting_min = 60.0;
  p.waiting_max = 14400.0;
  Rng rng(2024);
  std::vector<double> samples(100000);
  for (auto& s : samples) s = sample_waiting_time(p, rng);

  CHECK(std::all_of(samples.begin(), samples.end(), [&](double s) { return s >= 60.0 && s <= 14400.0; }));
  const double slope = oracle::truncated_power_law_mle(samples, 60.0, 14400.0);
  CHECK(slope >= 1.40);
  CHECK(slope <= 1.50);

  // Log-log CCDF is straight in the interior with slope near -(a - 1).
  const auto summary = ccdf(samples);
  const auto fit = fit_power_law_head(summary.ccdf, {60.0, 600.0});
  CHECK(fit.slope < -0.45);
  CHECK(fit.slope > -0.60);
  CHECK(fit.r2 > 0.99);
}

TEST_CASE("waiting-time edge cases") {
  ModelParams p;
  p.waiting_min = 100.0;
  p.waiting_max = 100.0 + 1e-6;
  Rng rng(1);
  for (int k = 0; k < 1000; ++k) {
    const double t = sample_waiting_time(p, rng);
    CHECK(t >= 100.0);
    CHECK(t - 100.0 <= 1e-6);
  }
  CHECK(bounded_pareto_quantile(0.0, 1.45, 60.0, 14400.0) == doctest::Approx(60.0));
  CHECK(bounded_pareto_quantile(1.0, 1.45, 60.0, 14400.0) == doctest::Approx(14400.0));

  p.waiting_max = p.waiting_min;
  CHECK_THROWS_AS(sample_waiting_time(p, rng), ParameterError);
}

TEST_CASE("identical seeds give identical sample sequences") {
  ModelParams p;
  const auto g = build_grid(p.radius);
  const NodeModelState node{{0.2, 0.2}, SeenMap(g.cell_count()), {}};
  Rng a(42), b(42);
  for (int k = 0; k < 1000; ++k) {
    CHECK(sample_waiting_time(p, a) == sample_waiting_time(p, b));
    const auto da = choose_destination(node, g, p, a);
    const auto db = choose_destination(node, g, p, b);
    CHECK(da.first == db.first);
    CHECK(da.second == db.second);
  }
}

TEST_CASE("leg_kinematics uses constant-time legs") {
  ModelParams p;
  p.leg_duration = 120.0;
  const auto still = leg_kinematics({0, 0}, {0, 0}, p);
  CHECK(still.duration == 0.0);
  CHECK(still.speed == 0.0);

  const auto half = leg_kinematics({0.1, 0.2}, {0.4, 0.6}, p);
  CHECK(half.duration == 120.0);
  CHECK(half.speed == doctest::Approx(0.5 / 120.0));

  const auto long_leg = leg_kinematics({0, 0}, {1, 1}, p);
  const auto short_leg = leg_kinematics({0.5, 0.5}, {0.51, 0.5}, p);
  CHECK(long_leg.duration == short_leg.duration);
}

TEST_CASE("ModelParams validation") {
  ModelParams p;
  CHECK_NOTHROW(p.validate());
  auto bad = [&](auto mutate) {
    ModelParams q;
    mutate(q);
    CHECK_THROWS_AS(q.validate(), ParameterError);
  };
  bad([](ModelParams& q) { q.alpha = 1.1; });
  bad([](ModelParams& q) { q.alpha = -0.1; });
  bad([](ModelParams& q) { q.radius = 1.0; });
  bad([](ModelParams& q) { q.radius = 0.0; });
  bad([](ModelParams& q) { q.waiting_min = 500.0; q.waiting_max = 400.0; });
  bad([](ModelParams& q) { q.waiting_slope = 1.0; });
  bad([](ModelParams& q) { q.leg_duration = 0.0; });
  bad([](ModelParams& q) { q.distance_scale_k = -1.0; });
}

TEST_CASE("seen maps start empty and reject out-of-range fractions") {
  SeenMap seen(225);
  for (const double v : seen.values()) CHECK(v == 0.0);
  CHECK_THROWS_AS(seen.set(3, 1.5), ParameterError);
  CHECK_THROWS_AS(seen.set(3, -0.1), ParameterError);
}
