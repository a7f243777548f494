#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "swim/geometry.hpp"
#include "swim/model.hpp"

namespace swim {

using NodeId = std::uint32_t;

/// Declaration order is the tie-break priority for events sharing a
/// timestamp.
enum class EventKind : std::uint8_t { Finish, Start, Meet, Depart };

/// One line of the simulator output. Meet/Depart use `node` < `peer` and
/// ignore `cell`; Start/Finish use `node` and `cell` and ignore `peer`.
struct EventRecord {
  EventKind kind = EventKind::Meet;
  double time = 0.0;
  NodeId node = 0;
  NodeId peer = 0;
  CellIndex cell;

  static EventRecord meet(double t, NodeId a, NodeId b);
  static EventRecord depart(double t, NodeId a, NodeId b);
  static EventRecord start(double t, NodeId n, CellIndex c) { return {EventKind::Start, t, n, 0, c}; }
  static EventRecord finish(double t, NodeId n, CellIndex c) { return {EventKind::Finish, t, n, 0, c}; }

  bool is_pair_event() const { return kind == EventKind::Meet || kind == EventKind::Depart; }

  friend bool operator==(const EventRecord& a, const EventRecord& b);
};

/// Run provenance written as the log's comment header.
struct LogHeader {
  std::size_t node_count = 0;
  double duration = 0.0;
  std::uint64_t seed = 0;

  friend bool operator==(const LogHeader&, const LogHeader&) = default;
};

struct EventLog {
  std::optional<LogHeader> header;
  std::vector<EventRecord> events;

  friend bool operator==(const EventLog&, const EventLog&) = default;
};

/// Piecewise-constant-velocity state of one node. A waiting node is a
/// moving node with from == to.
struct NodeKineticState {
  Point from;
  Point to;
  double depart = 0.0;
  double arrive = 0.0;
  bool moving = false;

  static NodeKineticState waiting(Point at, double since, double until) {
    return {at, at, since, until, false};
  }
  static NodeKineticState travelling(Point from, Point to, double depart, double arrive) {
    return {from, to, depart, arrive, true};
  }

  /// End of the current mode (waiting deadline or arrival time).
  double ends_at() const { return arrive; }
  Point position(double t) const;
  Point velocity() const;
};

struct PairTransition {
  double time = 0.0;
  EventKind kind = EventKind::Meet;

  friend bool operator==(const PairTransition&, const PairTransition&) = default;
};

/// Every in-range transition of the pair over [window_start, window_end],
/// from the roots of |dp + dv s|^2 = r^2. Both states must be linear over the
/// window. `in_range_before` is the pair's state just before window_start; a
/// disagreement with the geometry at window_start yields a transition there.
/// Grazing contacts (double root, or an in-range span of at most 1 ns) yield
/// nothing.
std::vector<PairTransition> pair_transition_times(const NodeKineticState& a,
                                                  const NodeKineticState& b,
                                                  double window_start, double window_end,
                                                  double radius, bool in_range_before = false);

/// Distinct nodes a waiting node has had in range during its current stay.
class StayRecord {
 public:
  explicit StayRecord(std::size_t node_count = 0) : met_(node_count, 0) {}

  void clear();
  void add(NodeId other);
  bool contains(NodeId other) const { return met_.at(other) != 0; }
  std::size_t count() const { return count_; }

 private:
  std::vector<char> met_;
  std::size_t count_ = 0;
};

/// seen(cell) := (other nodes whose position lies in `cell`) / (n - 1).
void update_seen_at_finish(SeenMap& seen, const CellGrid& grid, NodeId node, CellIndex cell,
                           std::span<const Point> positions);

/// seen(cell) := (distinct nodes met during the stay) / (n - 1).
void update_seen_at_start(SeenMap& seen, const CellGrid& grid, CellIndex cell,
                          const StayRecord& stay, std::size_t node_count);

/// Supplies where nodes start and where they go next. The engine owns the
/// clock, contact detection and seen maps; planners own the decisions.
class MobilityPlanner {
 public:
  virtual ~MobilityPlanner() = default;

  virtual Point initial_position(NodeId node) = 0;
  /// Length of the first wait; may be +inf.
  virtual double initial_wait(NodeId node) = 0;
  /// Called at each Start, after the seen map has been updated.
  virtual Point next_destination(NodeId node, Point current, const SeenMap& seen, double now) = 0;
  /// Called at each Finish; may be +inf.
  virtual double next_wait(NodeId node, double now) = 0;
};

/// Called after each emitted event with every node's seen map.
using SimulationObserver = std::function<void(const EventRecord&, std::span<const SeenMap>)>;

struct SimulationOptions {
  /// Keep every kinetic segment of every node in the result.
  bool record_trajectories = false;
  SimulationObserver observer;
};

struct SimulationResult {
  EventLog log;
  std::vector<SeenMap> seen;
  /// Per node, its kinetic segments in time order (only when recorded).
  std::vector<std::vector<NodeKineticState>> trajectories;
};

struct EngineConfig {
  std::size_t node_count = 0;
  double radius = 0.1;
  double leg_duration = 120.0;
  double duration = 0.0;
  std::uint64_t seed = 0;
};

/// Core discrete-event loop shared by the mobility model and scripted runs.
SimulationResult run_engine(const EngineConfig& config, MobilityPlanner& planner,
                            const SimulationOptions& options = {});

/// The mobility model: uniform homes, nodes start waiting at home, then
/// alternate weighted destination choice and bounded Pareto waits.
SimulationResult run_simulation_detailed(const ModelParams& params,
                                         const SimulationOptions& options = {});

EventLog run_simulation(const ModelParams& params);

/// Independent runs of `base` with each seed, in parallel, returned in
/// seed order.
std::vector<EventLog> run_seed_sweep(const ModelParams& base, std::span<const std::uint64_t> seeds);

/// Test hook: fixed itineraries instead of model decisions.
struct ScriptedLeg {
  Point destination;
  /// Wait after arriving; +inf parks the node.
  double wait = 0.0;
};

struct NodeScript {
  Point start;
  double initial_wait = 0.0;
  /// After the last leg the node stays put.
  std::vector<ScriptedLeg> legs;
};

SimulationResult run_scripted(std::span<const NodeScript> scripts, double radius,
                              double leg_duration, double duration,
                              const SimulationOptions& options = {});

}  // namespace swim
