#include "swim/forwarding.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>
#include <tuple>

#include "swim/errors.hpp"

namespace swim {

std::string_view protocol_name(Protocol p) {
  return p == Protocol::Epidemic ? "epidemic" : "delegation";
}

Protocol parse_protocol(std::string_view name) {
  if (name == "epidemic") return Protocol::Epidemic;
  if (name == "delegation") return Protocol::Delegation;
  throw ParameterError("unknown protocol '" + std::string(name) + "'");
}

std::vector<Message> generate_traffic(TimeWindow window, std::span<const NodeId> nodes, Rng& rng,
                                      const TrafficSpec& spec) {
  if (nodes.size() < 2) throw ParameterError("traffic needs at least two nodes");
  if (!(spec.mean_interval > 0.0)) throw ParameterError("mean message interval must be positive");
  std::vector<Message> out;
  const double stop = window.end - spec.quiet_tail;
  double t = window.start;
  while (true) {
    t += rng.exponential(1.0 / spec.mean_interval);
    if (t >= stop) break;
    Message m;
    m.id = static_cast<std::uint32_t>(out.size());
    m.gen_time = t;
    const std::size_t s = rng.index(nodes.size());
    std::size_t d = rng.index(nodes.size() - 1);
    if (d >= s) ++d;
    m.source = nodes[s];
    m.destination = nodes[d];
    out.push_back(m);
  }
  return out;
}

QualityMap draw_qualities(std::span<const NodeId> nodes, Rng& rng) {
  QualityMap q;
  for (const auto id : nodes) q[id] = rng.uniform_open_closed();
  return q;
}

namespace {

// Replays contacts and message generations in time order. At equal times
// contact starts come first, then generations, then contact ends.
class Replay {
 public:
  Replay(std::span<const NodeId> nodes, std::span<const Message> traffic, Protocol protocol,
         const QualityMap* qualities)
      : traffic_(traffic), protocol_(protocol), n_(nodes.size()) {
    for (std::size_t i = 0; i < n_; ++i) dense_[nodes[i]] = i;
    active_.assign(n_ * n_, 0);
    held_.resize(n_);
    rate_.assign(n_, std::vector<double>(traffic.size(), kAbsent));
    quality_.assign(n_, 0.0);
    if (qualities)
      for (std::size_t i = 0; i < n_; ++i) quality_[i] = qualities->at(nodes[i]);
    delivery_.assign(traffic.size(), std::nullopt);
  }

  ForwardingMetrics run(const std::vector<ContactRecord>& contacts, TimeWindow window) {
    enum Kind { kUp = 0, kGenerate = 1, kDown = 2 };
    struct Step {
      double time;
      int kind;
      std::size_t a;
      std::size_t b;
    };
    std::vector<Step> steps;
    for (const auto& c : contacts) {
      if (!(c.start < window.end && c.end > window.start)) continue;
      const auto ia = dense_.find(c.a);
      const auto ib = dense_.find(c.b);
      if (ia == dense_.end() || ib == dense_.end()) continue;
      steps.push_back({std::max(c.start, window.start), kUp, ia->second, ib->second});
      steps.push_back({std::min(c.end, window.end), kDown, ia->second, ib->second});
    }
    for (std::size_t k = 0; k < traffic_.size(); ++k) steps.push_back({traffic_[k].gen_time, kGenerate, k, 0});
    std::sort(steps.begin(), steps.end(), [](const Step& x, const Step& y) {
      return std::tie(x.time, x.kind, x.a, x.b) < std::tie(y.time, y.kind, y.a, y.b);
    });

    for (const auto& s : steps) {
      switch (s.kind) {
        case kUp: contact_up(s.a, s.b, s.time); break;
        case kGenerate: generate(s.a, s.time); break;
        case kDown: --active_[slot(s.a, s.b)]; break;
      }
    }
    return metrics();
  }

 private:
  static constexpr double kAbsent = -1.0;

  std::size_t slot(std::size_t a, std::size_t b) const { return std::min(a, b) * n_ + std::max(a, b); }
  bool has(std::size_t node, std::size_t msg) const { return rate_[node][msg] != kAbsent; }

  void store(std::size_t node, std::size_t msg, double rate, double now) {
    rate_[node][msg] = rate;
    held_[node].push_back(msg);
    ++replicas_;
    if (dense_.at(traffic_[msg].destination) == node && !delivery_[msg]) delivery_[msg] = now;
    pending_.push_back({node, msg});
  }

  void offer(std::size_t from, std::size_t to, std::size_t msg, double now) {
    if (has(to, msg)) return;
    if (protocol_ == Protocol::Epidemic) {
      store(to, msg, 0.0, now);
      return;
    }
    if (quality_[to] > rate_[from][msg]) {
      rate_[from][msg] = quality_[to];
      store(to, msg, quality_[to], now);
    } else if (dense_.at(traffic_[msg].destination) == to) {
      store(to, msg, rate_[from][msg], now);
    }
  }

  void propagate(double now) {
    while (!pending_.empty()) {
      const auto [node, msg] = pending_.front();
      pending_.pop_front();
      for (std::size_t peer = 0; peer < n_; ++peer)
        if (peer != node && active_[slot(node, peer)] > 0) offer(node, peer, msg, now);
    }
  }

  void contact_up(std::size_t a, std::size_t b, double now) {
    if (active_[slot(a, b)]++ > 0) return;
    for (std::size_t k = 0, size = held_[a].size(); k < size; ++k) offer(a, b, held_[a][k], now);
    for (std::size_t k = 0, size = held_[b].size(); k < size; ++k) offer(b, a, held_[b][k], now);
    propagate(now);
  }

  void generate(std::size_t msg, double now) {
    const std::size_t src = dense_.at(traffic_[msg].source);
    store(src, msg, quality_[src], now);
    propagate(now);
  }

  ForwardingMetrics metrics() const {
    ForwardingMetrics m;
    m.generated = traffic_.size();
    m.replicas = replicas_;
    m.delivery_time = delivery_;
    double delay_sum = 0.0;
    for (std::size_t k = 0; k < traffic_.size(); ++k) {
      if (!delivery_[k]) continue;
      ++m.delivered;
      delay_sum += *delivery_[k] - traffic_[k].gen_time;
    }
    if (m.generated > 0) {
      m.cost = static_cast<double>(m.replicas) / static_cast<double>(m.generated);
      m.success_rate = static_cast<double>(m.delivered) / static_cast<double>(m.generated);
    }
    if (m.delivered > 0) m.avg_delay = delay_sum / static_cast<double>(m.delivered);
    return m;
  }

  std::span<const Message> traffic_;
  Protocol protocol_;
  std::size_t n_;
  std::unordered_map<NodeId, std::size_t> dense_;
  std::vector<int> active_;
  std::vector<std::vector<std::size_t>> held_;
  std::vector<std::vector<double>> rate_;
  std::vector<double> quality_;
  std::vector<std::optional<double>> delivery_;
  std::deque<std::pair<std::size_t, std::size_t>> pending_;
  std::size_t replicas_ = 0;
};

}  // namespace

ForwardingMetrics run_epidemic(const std::vector<ContactRecord>& contacts,
                               std::span<const Message> traffic, std::span<const NodeId> nodes,
                               TimeWindow window) {
  Replay replay(nodes, traffic, Protocol::Epidemic, nullptr);
  return replay.run(contacts, window);
}

ForwardingMetrics run_delegation(const std::vector<ContactRecord>& contacts,
                                 std::span<const Message> traffic, std::span<const NodeId> nodes,
                                 const QualityMap& qualities, TimeWindow window) {
  for (const auto id : nodes) {
    const auto it = qualities.find(id);
    if (it == qualities.end() || !(it->second > 0.0 && it->second <= 1.0))
      throw ParameterError("every node needs a quality in (0, 1]");
  }
  Replay replay(nodes, traffic, Protocol::Delegation, &qualities);
  return replay.run(contacts, window);
}

TimeWindow select_window(const ContactTrace& trace, double length, std::optional<double> start) {
  if (!(length > 0.0)) throw ParameterError("window length must be positive");
  if (trace.span() < length)
    throw ValidationError("trace spans " + std::to_string(trace.span()) +
                          " s, shorter than the " + std::to_string(length) + " s window");
  if (start) {
    if (*start < trace.start_time || *start + length > trace.end_time)
      throw ValidationError("requested window [" + std::to_string(*start) + ", " +
                            std::to_string(*start + length) + "] lies outside the trace");
    return {*start, *start + length};
  }

  std::vector<double> starts;
  starts.reserve(trace.contacts.size());
  for (const auto& c : trace.contacts) starts.push_back(c.start);
  std::sort(starts.begin(), starts.end());

  const double latest = trace.end_time - length;
  double best_start = trace.start_time;
  std::size_t best_count = 0;
  std::size_t hi = 0;
  std::size_t lo = 0;
  auto consider = [&](double candidate) {
    while (lo < starts.size() && starts[lo] < candidate) ++lo;
    hi = std::max(hi, lo);
    while (hi < starts.size() && starts[hi] < candidate + length) ++hi;
    const std::size_t count = hi - lo;
    if (count > best_count) {
      best_count = count;
      best_start = candidate;
    }
  };
  consider(trace.start_time);
  for (const double s : starts) consider(std::clamp(s, trace.start_time, latest));
  return {best_start, best_start + length};
}

Evaluation evaluate(const ContactTrace& trace, Protocol protocol, std::uint64_t seed,
                    const ForwardingOptions& options) {
  Evaluation out;
  out.window = select_window(trace, options.window_length, options.window_start);
  Rng traffic_rng(derive_seed(seed, 0));
  out.traffic = generate_traffic(out.window, trace.nodes, traffic_rng, options.traffic);
  if (protocol == Protocol::Epidemic) {
    out.metrics = run_epidemic(trace.contacts, out.traffic, trace.nodes, out.window);
  } else {
    Rng quality_rng(derive_seed(seed, 1));
    const auto qualities = draw_qualities(trace.nodes, quality_rng);
    out.metrics = run_delegation(trace.contacts, out.traffic, trace.nodes, qualities, out.window);
  }
  return out;
}

void write_metrics_header(std::ostream& out) {
  out << "trace,protocol,seed,cost,success_rate,avg_delay_s\n";
}

void write_metrics_row(std::ostream& out, std::string_view trace, std::string_view protocol,
                       std::string_view seed, const ForwardingMetrics& m) {
  const auto old_precision = out.precision(10);
  out << trace << ',' << protocol << ',' << seed << ',' << m.cost << ',';
  if (m.success_rate)
    out << *m.success_rate;
  else
    out << "NA";
  out << ',';
  if (m.avg_delay)
    out << *m.avg_delay;
  else
    out << "NA";
  out << '\n';
  out.precision(old_precision);
}

}  // namespace swim
