#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "swim/random.hpp"
#include "swim/trace_io.hpp"

namespace swim {

enum class Protocol { Epidemic, Delegation };

std::string_view protocol_name(Protocol p);
/// Accepts "epidemic" and "delegation"; throws ParameterError otherwise.
Protocol parse_protocol(std::string_view name);

struct TimeWindow {
  double start = 0.0;
  double end = 0.0;

  double length() const { return end - start; }
};

/// Poisson workload: one message every `mean_interval` seconds on average,
/// none during the final `quiet_tail` seconds of the window.
struct TrafficSpec {
  double mean_interval = 4.0;
  double quiet_tail = 3600.0;
};

struct Message {
  std::uint32_t id = 0;
  NodeId source = 0;
  NodeId destination = 0;
  double gen_time = 0.0;
};

/// Messages in generation order over [window.start, window.end - quiet_tail).
/// Throws ParameterError with fewer than two nodes.
std::vector<Message> generate_traffic(TimeWindow window, std::span<const NodeId> nodes, Rng& rng,
                                      const TrafficSpec& spec = {});

struct ForwardingMetrics {
  std::size_t generated = 0;
  std::size_t delivered = 0;
  /// Every copy held by any node at the end, originals included.
  std::size_t replicas = 0;
  /// replicas / generated; 0 without traffic.
  double cost = 0.0;
  /// Absent without traffic.
  std::optional<double> success_rate;
  /// Mean generation-to-first-delivery time; absent when nothing arrived.
  std::optional<double> avg_delay;
  /// First arrival at the destination, indexed like the traffic.
  std::vector<std::optional<double>> delivery_time;
};

using QualityMap = std::unordered_map<NodeId, double>;

/// Flooding: every replica is copied to every peer that lacks it. Copies
/// are instantaneous, so a new replica sweeps through all active contacts.
ForwardingMetrics run_epidemic(const std::vector<ContactRecord>& contacts,
                               std::span<const Message> traffic, std::span<const NodeId> nodes,
                               TimeWindow window);

/// Simplified delegation: a holder copies m to a peer whose quality exceeds
/// the rate of its own copy, after which both copies take the peer's
/// quality. The destination accepts m from any holder.
ForwardingMetrics run_delegation(const std::vector<ContactRecord>& contacts,
                                 std::span<const Message> traffic, std::span<const NodeId> nodes,
                                 const QualityMap& qualities, TimeWindow window);

/// Uniform (0, 1] quality per node.
QualityMap draw_qualities(std::span<const NodeId> nodes, Rng& rng);

struct ForwardingOptions {
  double window_length = 3.0 * 3600.0;
  /// Absolute start time; the busiest window is used when absent.
  std::optional<double> window_start;
  TrafficSpec traffic;
};

/// The window of `length` seconds holding the most contact starts
/// (earliest on ties), or the one at `start` when given. Throws
/// ValidationError when the trace is shorter than `length` or the requested
/// window falls outside it.
TimeWindow select_window(const ContactTrace& trace, double length,
                         std::optional<double> start = std::nullopt);

struct Evaluation {
  TimeWindow window;
  std::vector<Message> traffic;
  ForwardingMetrics metrics;
};

/// Window, traffic, qualities, replay. Traffic and qualities depend only on
/// `seed`, so both protocols see the same workload for the same seed.
Evaluation evaluate(const ContactTrace& trace, Protocol protocol, std::uint64_t seed,
                    const ForwardingOptions& options = {});

/// "trace,protocol,seed,cost,success_rate,avg_delay_s"; absent values as NA.
void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, std::string_view trace, std::string_view protocol,
                       std::string_view seed, const ForwardingMetrics& m);

}  // namespace swim
