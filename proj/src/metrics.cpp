#include "swim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "swim/errors.hpp"

namespace swim {

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  LineFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += e * e;
  }
  // A flat response is fitted exactly by a flat line.
  f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

bool in_window(double v, FitWindow w) { return v >= w.lo && v <= w.hi; }

void collect(std::span<const CcdfPoint> ccdf, FitWindow window, bool log_x,
             std::vector<double>& xs, std::vector<double>& ys) {
  for (const auto& p : ccdf) {
    if (!in_window(p.value, window) || p.survival <= 0.0) continue;
    if (log_x && p.value <= 0.0) continue;
    xs.push_back(log_x ? std::log(p.value) : p.value);
    ys.push_back(std::log(p.survival));
  }
  if (xs.size() < kMinFitPoints)
    throw InsufficientData("fit window [" + std::to_string(window.lo) + ", " +
                           std::to_string(window.hi) + "] holds " + std::to_string(xs.size()) +
                           " usable points; need " + std::to_string(kMinFitPoints));
}

template <typename F>
auto try_fit(F&& f) -> std::optional<decltype(f())> {
  try {
    return f();
  } catch (const InsufficientData&) {
    return std::nullopt;
  }
}

void put(std::ostream& out, const std::string& key, double v) {
  out << key << '=' << v << '\n';
}

}  // namespace

double DistributionSummary::survival(double x) const {
  if (samples.empty()) return 0.0;
  const auto above = samples.end() - std::upper_bound(samples.begin(), samples.end(), x);
  return static_cast<double>(above) / static_cast<double>(samples.size());
}

DistributionSummary ccdf(std::vector<double> samples) {
  if (samples.empty()) throw ParameterError("cannot summarize an empty sample");
  for (const double s : samples)
    if (!(s >= 0.0) || !std::isfinite(s)) throw ParameterError("samples must be finite and nonnegative");
  std::sort(samples.begin(), samples.end());

  DistributionSummary out;
  const double n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < samples.size();) {
    std::size_t j = i;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    out.ccdf.push_back({samples[i], static_cast<double>(samples.size() - j) / n});
    i = j;
  }
  out.samples = std::move(samples);
  return out;
}

PowerLawFit fit_power_law_head(std::span<const CcdfPoint> ccdf, FitWindow window) {
  std::vector<double> xs, ys;
  collect(ccdf, window, true, xs, ys);
  const auto f = least_squares(xs, ys);
  return {f.slope, f.intercept, f.r2, xs.size(), window};
}

ExponentialFit fit_exponential_tail(std::span<const CcdfPoint> ccdf, FitWindow window) {
  std::vector<double> xs, ys;
  collect(ccdf, window, false, xs, ys);
  const auto f = least_squares(xs, ys);
  const double rate = f.slope == 0.0 ? 0.0 : -f.slope;
  return {rate, f.intercept, f.r2, xs.size(), window};
}

bool DichotomyReport::head_is_power_law() const {
  return head_power && head_exponential && head_power->r2 > head_exponential->r2;
}

bool DichotomyReport::tail_is_exponential() const {
  return tail_power && tail_exponential && tail_exponential->r2 > tail_power->r2;
}

DichotomyReport analyze_dichotomy(const DistributionSummary& summary, FitWindow head,
                                  FitWindow tail) {
  DichotomyReport r;
  r.samples = summary.samples.size();
  r.head_window = head;
  r.tail_window = tail;
  r.head_power = try_fit([&] { return fit_power_law_head(summary.ccdf, head); });
  r.head_exponential = try_fit([&] { return fit_exponential_tail(summary.ccdf, head); });
  r.tail_power = try_fit([&] { return fit_power_law_head(summary.ccdf, tail); });
  r.tail_exponential = try_fit([&] { return fit_exponential_tail(summary.ccdf, tail); });
  return r;
}

DistributionSummary inter_contact_distribution(const std::vector<ContactRecord>& contacts) {
  return ccdf(all_gaps(inter_contact_from_contacts(contacts)));
}

DistributionSummary contact_duration_distribution(const std::vector<ContactRecord>& contacts) {
  std::vector<double> durations;
  durations.reserve(contacts.size());
  for (const auto& c : contacts) durations.push_back(c.duration());
  return ccdf(std::move(durations));
}

PairCountSummary contacts_per_pair(const std::vector<ContactRecord>& contacts,
                                   std::span<const NodeId> nodes, double duration_s) {
  if (nodes.size() < 2) throw ParameterError("contacts per pair needs at least two nodes");
  if (!(duration_s > 0.0)) throw ParameterError("trace duration must be positive");

  std::map<std::pair<NodeId, NodeId>, std::size_t> counts;
  for (const auto& c : contacts) ++counts[{std::min(c.a, c.b), std::max(c.a, c.b)}];

  std::vector<double> samples;
  const std::size_t n = nodes.size();
  samples.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto key = std::make_pair(std::min(nodes[i], nodes[j]), std::max(nodes[i], nodes[j]));
      const auto it = counts.find(key);
      samples.push_back(it == counts.end() ? 0.0 : static_cast<double>(it->second));
    }

  PairCountSummary out;
  out.total_contacts = contacts.size();
  out.pairs = samples.size();
  const double days = duration_s / 86400.0;
  out.mean_per_pair_day =
      static_cast<double>(contacts.size()) / (static_cast<double>(n * (n - 1)) * days);
  out.distribution = ccdf(std::move(samples));
  return out;
}

double kolmogorov_distance(const DistributionSummary& a, const DistributionSummary& b) {
  std::vector<double> grid = a.samples;
  grid.insert(grid.end(), b.samples.begin(), b.samples.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  double worst = 0.0;
  for (const double x : grid) worst = std::max(worst, std::abs(a.survival(x) - b.survival(x)));
  return worst;
}

std::vector<CcdfPoint> log_binned(std::span<const CcdfPoint> ccdf, int bins_per_decade) {
  if (bins_per_decade <= 0) throw ParameterError("bins_per_decade must be positive");
  std::vector<CcdfPoint> out;
  std::optional<long long> current_bin;
  for (const auto& p : ccdf) {
    if (p.value <= 0.0) {
      out.push_back(p);
      continue;
    }
    const auto bin = static_cast<long long>(std::floor(std::log10(p.value) * bins_per_decade));
    if (current_bin && *current_bin == bin)
      out.back() = p;
    else
      out.push_back(p);
    current_bin = bin;
  }
  return out;
}

void write_ccdf_csv(std::span<const CcdfPoint> points, std::ostream& out) {
  out << "value,ccdf\n";
  for (const auto& p : points) out << p.value << ',' << p.survival << '\n';
}

void write_fit_report(const DichotomyReport& r, std::ostream& out, const std::string& prefix) {
  const auto old_precision = out.precision(10);
  out << prefix << "samples=" << r.samples << '\n';
  put(out, prefix + "head.window.lo", r.head_window.lo);
  put(out, prefix + "head.window.hi", r.head_window.hi);
  put(out, prefix + "tail.window.lo", r.tail_window.lo);
  put(out, prefix + "tail.window.hi", r.tail_window.hi);

  auto power = [&](const std::string& key, const std::optional<PowerLawFit>& f) {
    if (!f) {
      out << prefix << key << "=insufficient_points\n";
      return;
    }
    put(out, prefix + key + ".slope", f->slope);
    put(out, prefix + key + ".intercept", f->intercept);
    put(out, prefix + key + ".r2", f->r2);
    out << prefix << key << ".points=" << f->points << '\n';
  };
  auto expo = [&](const std::string& key, const std::optional<ExponentialFit>& f) {
    if (!f) {
      out << prefix << key << "=insufficient_points\n";
      return;
    }
    put(out, prefix + key + ".rate", f->rate);
    put(out, prefix + key + ".intercept", f->intercept);
    put(out, prefix + key + ".r2", f->r2);
    out << prefix << key << ".points=" << f->points << '\n';
  };
  power("head.power_law", r.head_power);
  expo("head.exponential", r.head_exponential);
  power("tail.power_law", r.tail_power);
  expo("tail.exponential", r.tail_exponential);
  out << prefix << "head.power_law_wins=" << (r.head_is_power_law() ? "yes" : "no") << '\n';
  out << prefix << "tail.exponential_wins=" << (r.tail_is_exponential() ? "yes" : "no") << '\n';
  out << prefix << "dichotomy=" << (r.dichotomy() ? "yes" : "no") << '\n';
  out.precision(old_precision);
}

}  // namespace swim
