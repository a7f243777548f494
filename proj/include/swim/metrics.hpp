#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "swim/trace_io.hpp"

namespace swim {

/// One step of an empirical CCDF: P(X > value) = survival.
struct CcdfPoint {
  double value = 0.0;
  double survival = 0.0;

  friend bool operator==(const CcdfPoint&, const CcdfPoint&) = default;
};

/// Closed window [lo, hi] on the value axis.
struct FitWindow {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
};

/// log P = slope * log x + intercept.
struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
  FitWindow window;
};

/// log P = -rate * x + intercept.
struct ExponentialFit {
  double rate = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
  FitWindow window;
};

struct DistributionSummary {
  std::vector<double> samples;  // sorted
  std::vector<CcdfPoint> ccdf;  // one point per distinct sample
  std::optional<PowerLawFit> head_fit;
  std::optional<ExponentialFit> tail_fit;

  /// Step-function value P(X > x); 1 left of the smallest sample.
  double survival(double x) const;
};

/// Raised when a fit window holds too few CCDF points.
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kMinFitPoints = 10;

/// Empirical CCDF at each distinct value. Throws ParameterError on empty or
/// negative input.
DistributionSummary ccdf(std::vector<double> samples);

/// Least squares of log(survival) on log(value) over points in `window`
/// with positive value and survival.
PowerLawFit fit_power_law_head(std::span<const CcdfPoint> ccdf, FitWindow window);

/// Least squares of log(survival) on value over points in `window` with
/// positive survival.
ExponentialFit fit_exponential_tail(std::span<const CcdfPoint> ccdf, FitWindow window);

/// Head window [10 min, 12 h] and tail window [12 h, max].
inline constexpr FitWindow kDefaultHeadWindow{600.0, 43200.0};
inline constexpr FitWindow kDefaultTailWindow{43200.0, std::numeric_limits<double>::infinity()};

/// Both model shapes fitted on both windows.
struct DichotomyReport {
  std::size_t samples = 0;
  FitWindow head_window;
  FitWindow tail_window;
  std::optional<PowerLawFit> head_power;
  std::optional<ExponentialFit> head_exponential;
  std::optional<PowerLawFit> tail_power;
  std::optional<ExponentialFit> tail_exponential;

  /// Power law wins the head and the exponential wins the tail (by r^2).
  bool head_is_power_law() const;
  bool tail_is_exponential() const;
  bool dichotomy() const { return head_is_power_law() && tail_is_exponential(); }
};

DichotomyReport analyze_dichotomy(const DistributionSummary& summary,
                                  FitWindow head = kDefaultHeadWindow,
                                  FitWindow tail = kDefaultTailWindow);

/// Aggregated inter-contact times of all pairs.
DistributionSummary inter_contact_distribution(const std::vector<ContactRecord>& contacts);

/// end - start of every contact.
DistributionSummary contact_duration_distribution(const std::vector<ContactRecord>& contacts);

struct PairCountSummary {
  DistributionSummary distribution;
  std::size_t total_contacts = 0;
  std::size_t pairs = 0;
  /// total / (n (n - 1) days): every device logs its own sightings, so each
  /// node pair is counted from both ends.
  double mean_per_pair_day = 0.0;
};

/// One sample per unordered pair of `nodes`, zero-contact pairs included.
/// Throws ParameterError with fewer than two nodes or a nonpositive duration.
PairCountSummary contacts_per_pair(const std::vector<ContactRecord>& contacts,
                                   std::span<const NodeId> nodes, double duration_s);

/// sup |F1 - F2| between two empirical distributions.
double kolmogorov_distance(const DistributionSummary& a, const DistributionSummary& b);

/// Keeps the last CCDF point of each logarithmic bin; non-positive values
/// are always kept.
std::vector<CcdfPoint> log_binned(std::span<const CcdfPoint> ccdf, int bins_per_decade = 20);

/// "value,ccdf" header plus one row per point.
void write_ccdf_csv(std::span<const CcdfPoint> points, std::ostream& out);

/// key=value block describing a dichotomy report.
void write_fit_report(const DichotomyReport& report, std::ostream& out,
                      const std::string& prefix = "");

}  // namespace swim
