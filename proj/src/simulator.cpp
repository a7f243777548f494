#include "swim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <queue>
#include <tuple>

#include "swim/errors.hpp"

namespace swim {

EventRecord EventRecord::meet(double t, NodeId a, NodeId b) {
  return {EventKind::Meet, t, std::min(a, b), std::max(a, b), {}};
}

EventRecord EventRecord::depart(double t, NodeId a, NodeId b) {
  return {EventKind::Depart, t, std::min(a, b), std::max(a, b), {}};
}

bool operator==(const EventRecord& a, const EventRecord& b) {
  if (a.kind != b.kind || a.time != b.time || a.node != b.node) return false;
  return a.is_pair_event() ? a.peer == b.peer : a.cell == b.cell;
}

Point NodeKineticState::position(double t) const {
  if (!moving || arrive <= depart) return moving ? to : from;
  if (t <= depart) return from;
  if (t >= arrive) return to;
  const double f = (t - depart) / (arrive - depart);
  return from + f * (to - from);
}

Point NodeKineticState::velocity() const {
  if (!moving || arrive <= depart) return {};
  return (1.0 / (arrive - depart)) * (to - from);
}

std::vector<PairTransition> pair_transition_times(const NodeKineticState& a,
                                                  const NodeKineticState& b,
                                                  double window_start, double window_end,
                                                  double radius, bool in_range_before) {
  std::vector<PairTransition> out;
  const Point dp = a.position(window_start) - b.position(window_start);
  const Point dv = a.velocity() - b.velocity();
  const double r2 = radius * radius;
  const double qa = dot(dv, dv);
  const double qb = 2.0 * dot(dp, dv);
  const double qc = dot(dp, dp) - r2;
  // Squared-distance slack below which the pair is treated as exactly on the
  // threshold (a penetration of roughly 1e-12 radii).
  const double slack = 1e-12 * r2;

  auto emit = [&](double t, bool now_in) {
    out.push_back({t, now_in ? EventKind::Meet : EventKind::Depart});
  };

  if (qa == 0.0) {
    bool state = in_range_before;
    if (qc < -slack) state = true;
    else if (qc > slack) state = false;
    if (state != in_range_before) emit(window_start, state);
    return out;
  }

  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc <= 4.0 * qa * slack) {
    // Never in range, or only grazing.
    if (in_range_before) emit(window_start, false);
    return out;
  }

  const double root = std::sqrt(disc);
  const double q = -0.5 * (qb + std::copysign(root, qb));
  double s1 = q / qa;
  double s2 = qc / q;
  if (s1 > s2) std::swap(s1, s2);

  bool state = s1 <= 0.0 && s2 > 0.0;
  if (state != in_range_before) emit(window_start, state);

  const double span = window_end - window_start;
  if (s1 > 0.0 && s1 <= span && !state) {
    emit(window_start + s1, true);
    state = true;
  }
  if (s2 > 0.0 && s2 <= span && state) emit(window_start + s2, false);
  return out;
}

void StayRecord::clear() {
  std::fill(met_.begin(), met_.end(), 0);
  count_ = 0;
}

void StayRecord::add(NodeId other) {
  if (met_.at(other) == 0) {
    met_[other] = 1;
    ++count_;
  }
}

void update_seen_at_finish(SeenMap& seen, const CellGrid& grid, NodeId node, CellIndex cell,
                           std::span<const Point> positions) {
  const std::size_t n = positions.size();
  std::size_t present = 0;
  for (std::size_t j = 0; j < n; ++j)
    if (j != node && grid.cell_of(positions[j]) == cell) ++present;
  seen.set(grid.flat(cell), n > 1 ? static_cast<double>(present) / static_cast<double>(n - 1) : 0.0);
}

void update_seen_at_start(SeenMap& seen, const CellGrid& grid, CellIndex cell,
                          const StayRecord& stay, std::size_t node_count) {
  const double fraction = node_count > 1 ? static_cast<double>(stay.count()) /
                                               static_cast<double>(node_count - 1)
                                         : 0.0;
  seen.set(grid.flat(cell), fraction);
}

namespace {

constexpr double kNever = std::numeric_limits<double>::infinity();

struct Pending {
  double time;
  EventKind kind;
  NodeId a;
  NodeId b;
  std::uint64_t version;
};

struct Later {
  bool operator()(const Pending& x, const Pending& y) const {
    return std::tie(x.time, x.kind, x.a, x.b) > std::tie(y.time, y.kind, y.a, y.b);
  }
};

class Engine {
 public:
  Engine(const EngineConfig& config, MobilityPlanner& planner, const SimulationOptions& options)
      : config_(config),
        grid_(build_grid(config.radius)),
        planner_(planner),
        options_(options),
        n_(config.node_count),
        in_range_(n_ * n_, 0),
        pair_version_(n_ * n_, 0),
        seen_(n_, SeenMap(grid_.cell_count())),
        stays_(n_, StayRecord(n_)) {
    if (options_.record_trajectories) trajectories_.resize(n_);
  }

  SimulationResult run() {
    SimulationResult result;
    result.log.header = LogHeader{n_, config_.duration, config_.seed};
    if (n_ == 0) return result;

    states_.reserve(n_);
    for (NodeId i = 0; i < n_; ++i) {
      const Point p = planner_.initial_position(i);
      const double wait = planner_.initial_wait(i);
      states_.push_back(NodeKineticState::waiting(p, 0.0, wait));
      record(i);
      schedule_node(i);
    }
    for (NodeId i = 0; i < n_; ++i)
      for (NodeId j = i + 1; j < n_; ++j) recompute_pair(i, j, 0.0);

    while (!queue_.empty() && queue_.top().time < config_.duration) {
      const Pending ev = queue_.top();
      queue_.pop();
      switch (ev.kind) {
        case EventKind::Finish: on_finish(ev.a, ev.time); break;
        case EventKind::Start: on_start(ev.a, ev.time); break;
        case EventKind::Meet:
        case EventKind::Depart: on_pair(ev); break;
      }
    }

    result.log.events = std::move(events_);
    result.seen = std::move(seen_);
    result.trajectories = std::move(trajectories_);
    return result;
  }

 private:
  std::size_t pair_slot(NodeId i, NodeId j) const {
    return static_cast<std::size_t>(std::min(i, j)) * n_ + std::max(i, j);
  }

  void record(NodeId i) {
    if (options_.record_trajectories) trajectories_[i].push_back(states_[i]);
  }

  void schedule_node(NodeId i) {
    const auto& s = states_[i];
    if (!std::isfinite(s.ends_at())) return;
    queue_.push({s.ends_at(), s.moving ? EventKind::Finish : EventKind::Start, i, 0, 0});
  }

  void emit(const EventRecord& e) {
    events_.push_back(e);
    if (options_.observer) options_.observer(e, seen_);
  }

  void recompute_pair(NodeId i, NodeId j, double now) {
    const std::size_t slot = pair_slot(i, j);
    const std::uint64_t version = ++pair_version_[slot];
    const double horizon =
        std::min({states_[i].ends_at(), states_[j].ends_at(), config_.duration});
    if (horizon < now) return;
    const auto transitions = pair_transition_times(states_[i], states_[j], now, horizon,
                                                   config_.radius, in_range_[slot] != 0);
    for (const auto& t : transitions)
      queue_.push({t.time, t.kind, std::min(i, j), std::max(i, j), version});
  }

  void recompute_node(NodeId i, double now) {
    for (NodeId j = 0; j < n_; ++j)
      if (j != i) recompute_pair(i, j, now);
  }

  void on_pair(const Pending& ev) {
    const std::size_t slot = pair_slot(ev.a, ev.b);
    if (ev.version != pair_version_[slot]) return;
    const bool meet = ev.kind == EventKind::Meet;
    if ((in_range_[slot] != 0) == meet) return;
    in_range_[slot] = meet ? 1 : 0;
    if (meet) {
      if (!states_[ev.a].moving) stays_[ev.a].add(ev.b);
      if (!states_[ev.b].moving) stays_[ev.b].add(ev.a);
      emit(EventRecord::meet(ev.time, ev.a, ev.b));
    } else {
      emit(EventRecord::depart(ev.time, ev.a, ev.b));
    }
  }

  void on_finish(NodeId i, double now) {
    const Point at = states_[i].to;
    const CellIndex cell = grid_.cell_of(at);

    std::vector<Point> positions(n_);
    for (NodeId j = 0; j < n_; ++j) positions[j] = j == i ? at : states_[j].position(now);
    update_seen_at_finish(seen_[i], grid_, i, cell, positions);

    stays_[i].clear();
    for (NodeId j = 0; j < n_; ++j)
      if (j != i && in_range_[pair_slot(i, j)] != 0) stays_[i].add(j);

    const double wait = planner_.next_wait(i, now);
    states_[i] = NodeKineticState::waiting(at, now, now + wait);
    record(i);
    emit(EventRecord::finish(now, i, cell));
    schedule_node(i);
    recompute_node(i, now);
  }

  void on_start(NodeId i, double now) {
    const Point at = states_[i].from;
    const CellIndex cell = grid_.cell_of(at);
    update_seen_at_start(seen_[i], grid_, cell, stays_[i], n_);

    emit(EventRecord::start(now, i, cell));
    const Point dest = planner_.next_destination(i, at, seen_[i], now);
    const double travel = distance(at, dest) == 0.0 ? 0.0 : config_.leg_duration;
    states_[i] = NodeKineticState::travelling(at, dest, now, now + travel);
    record(i);
    schedule_node(i);
    recompute_node(i, now);
  }

  EngineConfig config_;
  CellGrid grid_;
  MobilityPlanner& planner_;
  const SimulationOptions& options_;
  std::size_t n_;

  std::priority_queue<Pending, std::vector<Pending>, Later> queue_;
  std::vector<NodeKineticState> states_;
  std::vector<char> in_range_;
  std::vector<std::uint64_t> pair_version_;
  std::vector<SeenMap> seen_;
  std::vector<StayRecord> stays_;
  std::vector<EventRecord> events_;
  std::vector<std::vector<NodeKineticState>> trajectories_;
};

class ModelPlanner final : public MobilityPlanner {
 public:
  explicit ModelPlanner(const ModelParams& params)
      : params_(params), grid_(build_grid(params.radius)), rng_(params.rng_seed) {
    homes_.reserve(params.node_count);
    for (std::size_t i = 0; i < params.node_count; ++i) homes_.push_back({rng_.uniform(), rng_.uniform()});
  }

  Point initial_position(NodeId node) override { return homes_[node]; }
  double initial_wait(NodeId) override { return sample_waiting_time(params_, rng_); }

  Point next_destination(NodeId node, Point current, const SeenMap& seen, double) override {
    NodeModelState state{homes_[node], seen, current};
    return choose_destination(state, grid_, params_, rng_).second;
  }

  double next_wait(NodeId, double) override { return sample_waiting_time(params_, rng_); }

 private:
  ModelParams params_;
  CellGrid grid_;
  Rng rng_;
  std::vector<Point> homes_;
};

class ScriptPlanner final : public MobilityPlanner {
 public:
  explicit ScriptPlanner(std::span<const NodeScript> scripts)
      : scripts_(scripts), next_leg_(scripts.size(), 0) {}

  Point initial_position(NodeId node) override { return scripts_[node].start; }
  double initial_wait(NodeId node) override { return scripts_[node].initial_wait; }

  Point next_destination(NodeId node, Point current, const SeenMap&, double) override {
    const auto& legs = scripts_[node].legs;
    std::size_t& k = next_leg_[node];
    if (k >= legs.size()) return current;
    return legs[k].destination;
  }

  double next_wait(NodeId node, double) override {
    const auto& legs = scripts_[node].legs;
    std::size_t& k = next_leg_[node];
    if (k >= legs.size()) return kNever;
    return legs[k++].wait;
  }

 private:
  std::span<const NodeScript> scripts_;
  std::vector<std::size_t> next_leg_;
};

}  // namespace

SimulationResult run_engine(const EngineConfig& config, MobilityPlanner& planner,
                            const SimulationOptions& options) {
  if (!(config.duration >= 0.0)) throw ParameterError("duration must be nonnegative");
  if (!(config.leg_duration > 0.0)) throw ParameterError("leg_duration must be positive");
  Engine engine(config, planner, options);
  return engine.run();
}

SimulationResult run_simulation_detailed(const ModelParams& params,
                                         const SimulationOptions& options) {
  params.validate();
  ModelPlanner planner(params);
  EngineConfig config{params.node_count, params.radius, params.leg_duration, params.sim_duration,
                      params.rng_seed};
  return run_engine(config, planner, options);
}

EventLog run_simulation(const ModelParams& params) { return run_simulation_detailed(params).log; }

std::vector<EventLog> run_seed_sweep(const ModelParams& base, std::span<const std::uint64_t> seeds) {
  base.validate();
  std::vector<std::future<EventLog>> runs;
  runs.reserve(seeds.size());
  for (const auto seed : seeds) {
    ModelParams p = base;
    p.rng_seed = seed;
    runs.push_back(std::async(std::launch::async, [p] { return run_simulation(p); }));
  }
  std::vector<EventLog> logs;
  logs.reserve(runs.size());
  for (auto& r : runs) logs.push_back(r.get());
  return logs;
}

SimulationResult run_scripted(std::span<const NodeScript> scripts, double radius,
                              double leg_duration, double duration,
                              const SimulationOptions& options) {
  ScriptPlanner planner(scripts);
  EngineConfig config{scripts.size(), radius, leg_duration, duration, 0};
  return run_engine(config, planner, options);
}

}  // namespace swim
