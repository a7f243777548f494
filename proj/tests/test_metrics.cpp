#include <cmath>
#include <sstream>

#include "doctest.h"
#include "support/oracles.hpp"
#include "swim/errors.hpp"
#include "swim/metrics.hpp"
#include "swim/random.hpp"
#include "swim/simulator.hpp"
#include "swim/trace_io.hpp"

using namespace swim;

namespace {

std::vector<CcdfPoint> grid_ccdf(double lo, double hi, int count, auto survival) {
  std::vector<CcdfPoint> out;
  for (int i = 0; i < count; ++i) {
    const double x = lo + (hi - lo) * i / (count - 1);
    out.push_back({x, survival(x)});
  }
  return out;
}

std::vector<CcdfPoint> log_grid_ccdf(double lo, double hi, int count, auto survival) {
  std::vector<CcdfPoint> out;
  for (int i = 0; i < count; ++i) {
    const double x = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
    out.push_back({x, survival(x)});
  }
  return out;
}

}  // namespace

TEST_CASE("ccdf of repeated values is a single step") {
  const auto s = ccdf({1, 1, 1});
  REQUIRE(s.ccdf.size() == 1);
  CHECK(s.ccdf[0] == CcdfPoint{1.0, 0.0});
  CHECK(s.survival(0.5) == 1.0);
  CHECK(s.survival(1.0) == 0.0);
  CHECK(s.survival(7.0) == 0.0);
  CHECK_FALSE(s.head_fit.has_value());
}

TEST_CASE("ccdf of distinct values") {
  const auto s = ccdf({4, 2, 3, 1});
  CHECK(s.samples == std::vector<double>{1, 2, 3, 4});
  REQUIRE(s.ccdf.size() == 4);
  CHECK(s.ccdf[0].survival == 0.75);
  CHECK(s.ccdf[1].survival == 0.5);
  CHECK(s.ccdf[2].survival == 0.25);
  CHECK(s.ccdf[3].survival == 0.0);
  CHECK(s.survival(2.5) == 0.5);
}

TEST_CASE("ccdf rejects empty and negative input") {
  CHECK_THROWS_AS(ccdf({}), ParameterError);
  CHECK_THROWS_AS(ccdf({1.0, -2.0}), ParameterError);
}

TEST_CASE("ccdf is monotone, bounded and conserves mass") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> xs;
    const std::size_t n = 1 + rng.index(500);
    for (std::size_t i = 0; i < n; ++i) xs.push_back(static_cast<double>(rng.index(40)));
    const auto s = ccdf(xs);
    double prev = 1.0;
    double mass = 0.0;
    for (const auto& p : s.ccdf) {
      CHECK(p.survival <= prev);
      CHECK(p.survival >= 0.0);
      mass += prev - p.survival;
      prev = p.survival;
    }
    CHECK(s.ccdf.back().survival == 0.0);
    CHECK(mass == doctest::Approx(1.0));
  }
}

TEST_CASE("exponential samples match the analytic CDF") {
  Rng rng(11);
  const double lambda = 0.3;
  std::vector<double> xs(100000);
  for (auto& x : xs) x = rng.exponential(lambda);
  const auto s = ccdf(xs);
  const double n = static_cast<double>(s.samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    const double F = 1.0 - std::exp(-lambda * s.samples[i]);
    d = std::max({d, std::abs(F - i / n), std::abs(F - (i + 1) / n)});
  }
  CHECK(d < 0.01);
}

TEST_CASE("power-law fit recovers an exact slope") {
  const auto pts = log_grid_ccdf(1.0, 1000.0, 50, [](double x) { return std::pow(x, -0.5); });
  const auto fit = fit_power_law_head(pts, {1.0, 1000.0});
  CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.points == 50);
}

TEST_CASE("exponential fit recovers an exact rate") {
  const auto pts = grid_ccdf(0.0, 5.0, 40, [](double x) { return std::exp(-2.0 * x); });
  const auto fit = fit_exponential_tail(pts, {0.0, 5.0});
  CHECK(fit.rate == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.points == 40);
}

TEST_CASE("flat segments give zero slope and zero rate") {
  const auto pts = grid_ccdf(1.0, 20.0, 20, [](double) { return 0.3; });
  CHECK(fit_power_law_head(pts, {1.0, 20.0}).slope == doctest::Approx(0.0));
  CHECK(fit_exponential_tail(pts, {1.0, 20.0}).rate == doctest::Approx(0.0));
}

TEST_CASE("fits need enough points in the window") {
  const auto pts = grid_ccdf(1.0, 20.0, 20, [](double x) { return 1.0 / x; });
  CHECK_THROWS_AS(fit_power_law_head(pts, {1.0, 5.0}), InsufficientData);
  CHECK_THROWS_AS(fit_exponential_tail(pts, {100.0, 200.0}), InsufficientData);
  CHECK_NOTHROW(fit_power_law_head(pts, {1.0, 10.0}));
}

TEST_CASE("each fit prefers its own shape on paired synthetic data") {
  const FitWindow w{1.0, 1000.0};
  const auto power = log_grid_ccdf(1.0, 1000.0, 60, [](double x) { return std::pow(x, -0.8); });
  const auto expo = log_grid_ccdf(1.0, 1000.0, 60, [](double x) { return std::exp(-x / 150.0); });
  CHECK(fit_power_law_head(expo, w).r2 < fit_power_law_head(power, w).r2 - 0.05);
  CHECK(fit_exponential_tail(power, w).r2 < fit_exponential_tail(expo, w).r2 - 0.05);

  auto report_of = [&](const std::vector<CcdfPoint>& head, const std::vector<CcdfPoint>& tail) {
    DistributionSummary s;
    s.ccdf = head;
    s.ccdf.insert(s.ccdf.end(), tail.begin(), tail.end());
    return analyze_dichotomy(s, {1.0, 1000.0}, {2000.0, 1e9});
  };
  const auto tail = grid_ccdf(2000.0, 50000.0, 40, [](double x) { return 0.004 * std::exp(-x / 8000.0); });
  CHECK(report_of(power, tail).dichotomy());
  CHECK_FALSE(report_of(expo, tail).head_is_power_law());
}

TEST_CASE("fit report lists both shapes and the verdict") {
  DistributionSummary s = ccdf({1, 2, 3});
  const auto report = analyze_dichotomy(s);
  std::ostringstream out;
  write_fit_report(report, out, "ict.");
  const auto text = out.str();
  CHECK(text.find("ict.head.power_law=insufficient_points") != std::string::npos);
  CHECK(text.find("ict.dichotomy=no") != std::string::npos);
}

TEST_CASE("contact durations") {
  CHECK(contact_duration_distribution({{0, 1, 0, 10}}).samples == std::vector<double>{10.0});
  CHECK_THROWS(contact_duration_distribution({}));

  // A contact cut off by the end of the log keeps its truncated length.
  std::istringstream in("Meet 90 0 1\n");
  const auto contacts = contacts_from_events(read_event_log(in), 100.0);
  CHECK(contact_duration_distribution(contacts).samples == std::vector<double>{10.0});
}

TEST_CASE("contacts per pair include silent pairs") {
  const std::vector<NodeId> nodes{1, 2, 3};
  const std::vector<ContactRecord> contacts{{1, 2, 0, 1}, {1, 2, 5, 6}, {1, 2, 9, 10}};
  const auto summary = contacts_per_pair(contacts, nodes, 86400.0);
  CHECK(summary.distribution.samples == std::vector<double>{0.0, 0.0, 3.0});
  CHECK(summary.pairs == 3);
  CHECK(summary.total_contacts == 3);
  CHECK(summary.mean_per_pair_day == doctest::Approx(3.0 / 6.0));
  CHECK_THROWS_AS(contacts_per_pair(contacts, std::vector<NodeId>{1}, 10.0), ParameterError);
  CHECK_THROWS_AS(contacts_per_pair(contacts, nodes, 0.0), ParameterError);
}

TEST_CASE("published conference aggregates give 4.6 contacts per pair per day") {
  std::vector<NodeId> nodes;
  for (NodeId i = 1; i <= 41; ++i) nodes.push_back(i);
  std::vector<ContactRecord> contacts;
  for (std::size_t k = 0; k < 22459; ++k) {
    const NodeId a = 1 + static_cast<NodeId>(k % 40);
    contacts.push_back({a, a + 1, static_cast<double>(k) * 10.0, static_cast<double>(k) * 10.0 + 5.0});
  }
  const auto summary = contacts_per_pair(contacts, nodes, 3 * 86400.0);
  CHECK(summary.mean_per_pair_day == doctest::Approx(4.6).epsilon(0.02));
}

TEST_CASE("simulated fixtures agree with brute-force recomputation") {
  ModelParams p;
  p.node_count = 10;
  p.sim_duration = 6 * 3600.0;
  p.rng_seed = 8;
  const auto trace = trace_from_event_log(run_simulation(p));
  REQUIRE_FALSE(trace.contacts.empty());

  std::vector<double> durations;
  for (const auto& c : trace.contacts) durations.push_back(c.end - c.start);
  std::sort(durations.begin(), durations.end());
  CHECK(contact_duration_distribution(trace.contacts).samples == durations);

  auto gaps = oracle::scan_gaps(trace.contacts);
  std::sort(gaps.begin(), gaps.end());
  if (!gaps.empty()) CHECK(inter_contact_distribution(trace.contacts).samples == gaps);

  auto counts = oracle::scan_pair_counts(trace.contacts, 10);
  std::sort(counts.begin(), counts.end());
  CHECK(contacts_per_pair(trace.contacts, trace.nodes, p.sim_duration).distribution.samples == counts);
}

TEST_CASE("kolmogorov distance between summaries") {
  const auto a = ccdf({1, 2, 3, 4});
  CHECK(kolmogorov_distance(a, a) == 0.0);
  CHECK(kolmogorov_distance(a, ccdf({10, 20})) == doctest::Approx(1.0));
  CHECK(kolmogorov_distance(a, ccdf({1, 2})) == doctest::Approx(0.5));
}

TEST_CASE("log binning keeps the shape with fewer points") {
  std::vector<double> xs;
  for (int i = 1; i <= 10000; ++i) xs.push_back(i);
  const auto s = ccdf(xs);
  const auto binned = log_binned(s.ccdf, 10);
  CHECK(binned.size() < 60);
  CHECK(binned.back() == s.ccdf.back());
  for (std::size_t i = 1; i < binned.size(); ++i) CHECK(binned[i].value > binned[i - 1].value);

  std::ostringstream out;
  write_ccdf_csv(binned, out);
  CHECK(out.str().rfind("value,ccdf\n", 0) == 0);
}
