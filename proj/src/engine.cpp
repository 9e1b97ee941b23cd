#include "portsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <string>
#include <vector>

#include "portsim/routing.hpp"
#include "portsim/stochastic.hpp"

namespace portsim {

namespace {

constexpr std::int32_t kSource = -1;
constexpr std::size_t kNoSeries = static_cast<std::size_t>(-1);

struct LinkNode {
  const Link* def = nullptr;
  Occupancy storage;
  std::deque<std::uint32_t> fifo;
  std::vector<std::uint32_t> waiters;
  std::size_t series = kNoSeries;
};

struct Lane {
  Occupancy storage;
  bool open = true;
  int servers = 1;
  int busy = 0;
  std::deque<std::uint32_t> queue;  // admitted, waiting for a server
  std::size_t series = kNoSeries;
};

struct StationNode {
  const ServiceStation* def = nullptr;
  std::vector<Lane> lanes;
  std::vector<std::uint32_t> waiters;
  std::size_t series = kNoSeries;

  double occupancy() const {
    double total = 0.0;
    for (const Lane& l : lanes) total += l.storage.occupancy();
    return total;
  }
};

struct VehicleState {
  VehicleClass cls;
  const std::vector<std::int32_t>* path = nullptr;  // [entry, route elements...]
  int pos = -1;                                     // -1: source queue, else index into *path
  bool decided = false;
  RouteKind chosen = RouteKind::Manual;
  bool head_ready = false;
  bool done = false;
  TripRecord rec;
};

class Simulator {
 public:
  Simulator(const ScenarioSpec& spec, std::uint64_t seed, const RunOptions& options)
      : spec_(spec), seed_(seed), options_(options) {
    for (const Link& l : spec.network.links) {
      LinkNode node;
      node.def = &l;
      node.storage = Occupancy(l.capacity_pce);
      links_.push_back(std::move(node));
    }
    for (const ServiceStation& st : spec.network.stations) {
      StationNode node;
      node.def = &st;
      if (st.discipline == Discipline::SharedFifo) {
        Lane lane;
        lane.storage = Occupancy(st.capacity_pce);
        lane.servers = st.servers_open;
        node.lanes.push_back(std::move(lane));
      } else {
        for (int i = 0; i < st.lane_count; ++i) {
          Lane lane;
          lane.storage = Occupancy(st.capacity_pce);
          lane.open = i < st.servers_open;
          lane.servers = lane.open ? 1 : 0;
          node.lanes.push_back(std::move(lane));
        }
      }
      stations_.push_back(std::move(node));
    }

    manual_path_ = build_path(spec.network.manual);
    if (spec.network.automated) auto_path_ = build_path(*spec.network.automated);

    if (options_.record_queues) {
      for (LinkNode& l : links_) l.series = add_series(l.def->id, l.def->capacity_pce);
      for (StationNode& s : stations_) {
        s.series = add_series(s.def->id, s.def->total_capacity_pce());
        if (s.lanes.size() > 1)
          for (std::size_t i = 0; i < s.lanes.size(); ++i)
            s.lanes[i].series = add_series(s.def->id + "/" + std::to_string(i), s.def->capacity_pce);
      }
    }
  }

  RunResult run(std::vector<double> arrivals) {
    result_.scenario = spec_.label;
    result_.seed = seed_;
    result_.flow_fingerprint = fingerprint(spec_.flow);
    result_.arrivals = arrivals.size();

    vehicles_.resize(arrivals.size());
    for (std::uint32_t i = 0; i < arrivals.size(); ++i) {
      VehicleState& v = vehicles_[i];
      RngStream class_stream(seed_, i, Purpose::Class);
      v.cls = assign_class(class_stream, spec_.hgv_share, spec_.car, spec_.hgv);
      v.path = &manual_path_;
      v.rec.vehicle_id = i;
      v.rec.kind = v.cls.kind;
      v.rec.scheduled_arrival_s = arrivals[i];
      schedule(arrivals[i], EventKind::Arrival, i, kSource);
    }

    double last = 0.0;
    while (!events_.empty()) {
      const Event ev = events_.top();
      events_.pop();
      emit_ticks_before(ev.time_s);
      now_ = ev.time_s;
      last = now_;
      ++result_.event_count;
      if (options_.record_trace) result_.trace.push_back({ev, location_name(ev.location)});
      dispatch(ev);
      flush_dirty();
    }
    emit_ticks_through(std::max(last, spec_.flow.horizon_s()));

    if (exited_ != vehicles_.size())
      throw SimulationError("simulation stalled with " + std::to_string(vehicles_.size() - exited_) +
                            " vehicles still in the network");

    result_.trips.reserve(vehicles_.size());
    for (VehicleState& v : vehicles_) result_.trips.push_back(v.rec);
    return std::move(result_);
  }

 private:
  std::int32_t element_index(const std::string& id) const {
    for (std::size_t i = 0; i < links_.size(); ++i)
      if (links_[i].def->id == id) return static_cast<std::int32_t>(i);
    for (std::size_t i = 0; i < stations_.size(); ++i)
      if (stations_[i].def->id == id) return static_cast<std::int32_t>(links_.size() + i);
    throw SimulationError("unknown element '" + id + "'");
  }

  std::vector<std::int32_t> build_path(const RouteSpec& route) const {
    std::vector<std::int32_t> path{element_index(spec_.network.entry)};
    for (const auto& id : route.elements) path.push_back(element_index(id));
    return path;
  }

  bool is_link(std::int32_t e) const { return e >= 0 && static_cast<std::size_t>(e) < links_.size(); }
  LinkNode& link(std::int32_t e) { return links_[static_cast<std::size_t>(e)]; }
  StationNode& station(std::int32_t e) { return stations_[static_cast<std::size_t>(e) - links_.size()]; }

  std::string location_name(std::int32_t e) {
    if (e == kSource) return "source";
    if (is_link(e)) return link(e).def->id;
    return station(e).def->id;
  }

  std::int32_t current_element(const VehicleState& v) const { return v.pos < 0 ? kSource : (*v.path)[v.pos]; }

  void schedule(double t, EventKind kind, std::uint32_t vehicle, std::int32_t location) {
    events_.push(Event{t, next_seq_++, kind, vehicle, location});
  }

  void dispatch(const Event& ev) {
    VehicleState& v = vehicles_[ev.subject];
    switch (ev.kind) {
      case EventKind::Arrival:
        source_.push_back(ev.subject);
        v.head_ready = true;
        if (source_.front() == ev.subject) advance(ev.subject);
        break;
      case EventKind::ReachHead:
        v.head_ready = true;
        if (v.pos == 0) v.rec.reached_decision_s = now_;
        if (link(ev.location).fifo.front() == ev.subject) advance(ev.subject);
        break;
      case EventKind::AdmissionRetry:
        if (can_move(ev.subject)) advance(ev.subject);
        break;
      case EventKind::ServiceStart: {
        const ServiceStation& st = *station(ev.location).def;
        v.rec.service_start_s = now_;
        v.rec.service_order = ++service_counter_;
        RngStream service_stream(seed_, ev.subject, Purpose::Service);
        schedule(now_ + sample_truncated_normal(service_stream, st.service), EventKind::ServiceEnd, ev.subject,
                 ev.location);
        break;
      }
      case EventKind::ServiceEnd:
        v.rec.service_end_s = now_;
        v.head_ready = true;
        advance(ev.subject);
        break;
    }
  }

  // Only the head of a FIFO element, or a vehicle done with service, may move.
  bool can_move(std::uint32_t id) {
    const VehicleState& v = vehicles_[id];
    if (v.done || !v.head_ready) return false;
    const std::int32_t cur = current_element(v);
    if (cur == kSource) return source_.front() == id;
    if (is_link(cur)) return link(cur).fifo.front() == id;
    return true;
  }

  void advance(std::uint32_t id) {
    VehicleState& v = vehicles_[id];
    std::int32_t targets[2];
    int n_targets = 0;
    const std::vector<std::int32_t>* paths[2] = {v.path, v.path};

    if (v.pos < 0) {
      targets[n_targets++] = manual_path_.front();
    } else if (v.pos == 0) {
      if (!v.decided) {
        RngStream route_stream(seed_, id, Purpose::Route);
        const RouteDecision d =
            decide_route(route_stream, id, v.cls.kind, spec_.policy, !auto_path_.empty(), now_);
        v.chosen = d.chosen;
        v.decided = true;
      }
      if (v.chosen == RouteKind::Automated) {
        paths[n_targets] = &auto_path_;
        targets[n_targets++] = auto_path_[1];
        if (spec_.policy.on_full == OnFull::Divert) {
          paths[n_targets] = &manual_path_;
          targets[n_targets++] = manual_path_[1];
        }
      } else {
        paths[n_targets] = &manual_path_;
        targets[n_targets++] = manual_path_[1];
      }
    } else if (static_cast<std::size_t>(v.pos) + 1 < v.path->size()) {
      targets[n_targets++] = (*v.path)[v.pos + 1];
    } else {
      leave_current(id);
      v.rec.exit_s = now_;
      v.done = true;
      ++exited_;
      return;
    }

    for (int i = 0; i < n_targets; ++i) {
      const int lane = admit(targets[i], v.cls.pce);
      if (lane < 0) continue;
      leave_current(id);
      if (v.pos == 0) {
        v.path = paths[i];
        v.rec.route = paths[i] == &auto_path_ ? RouteKind::Automated : RouteKind::Manual;
        v.rec.diverted = v.chosen != v.rec.route;
      }
      ++v.pos;
      enter(id, targets[i], lane);
      return;
    }
    for (int i = 0; i < n_targets; ++i) add_waiter(targets[i], id);
  }

  // Reserves storage in the element; returns the lane used (0 for links) or -1.
  int admit(std::int32_t e, double pce) {
    if (is_link(e)) {
      LinkNode& l = link(e);
      if (l.storage.try_admit(pce) == Admission::Blocked) return -1;
      mark(l.series);
      return 0;
    }
    StationNode& s = station(e);
    std::size_t lane = 0;
    if (s.def->discipline == Discipline::PerLaneShortestQueue) {
      lane_scratch_.clear();
      for (const Lane& l : s.lanes) lane_scratch_.push_back({l.storage.occupancy(), l.open});
      const auto chosen = select_lane(lane_scratch_, s.def->capacity_pce, pce);
      if (!chosen) return -1;
      lane = *chosen;
    }
    if (s.lanes[lane].storage.try_admit(pce) == Admission::Blocked) return -1;
    mark(s.series);
    mark(s.lanes[lane].series);
    return static_cast<int>(lane);
  }

  void enter(std::uint32_t id, std::int32_t e, int lane) {
    VehicleState& v = vehicles_[id];
    v.head_ready = false;
    if (is_link(e)) {
      LinkNode& l = link(e);
      l.fifo.push_back(id);
      if (v.pos == 0) v.rec.entered_network_s = now_;
      schedule(now_ + l.def->free_flow_s, EventKind::ReachHead, id, e);
      return;
    }
    StationNode& s = station(e);
    Lane& ln = s.lanes[static_cast<std::size_t>(lane)];
    ln.queue.push_back(id);
    v.rec.station = e;
    v.rec.lane = lane;
    v.rec.admitted_station_s = now_;
    v.rec.admit_order = ++admit_counter_;
    service_cycle(e, ln);
  }

  void leave_current(std::uint32_t id) {
    VehicleState& v = vehicles_[id];
    const std::int32_t cur = current_element(v);
    if (cur == kSource) {
      source_.pop_front();
      after_pop(source_);
      return;
    }
    if (is_link(cur)) {
      LinkNode& l = link(cur);
      l.fifo.pop_front();
      l.storage.release(v.cls.pce);
      mark(l.series);
      if (v.pos == 0) v.rec.decision_exit_order = ++decision_counter_;
      wake(l.waiters, cur);
      after_pop(l.fifo);
      return;
    }
    StationNode& s = station(cur);
    Lane& ln = s.lanes[static_cast<std::size_t>(v.rec.lane)];
    ln.storage.release(v.cls.pce);
    --ln.busy;
    mark(s.series);
    mark(ln.series);
    wake(s.waiters, cur);
    service_cycle(cur, ln);
  }

  void service_cycle(std::int32_t e, Lane& lane) {
    while (lane.busy < lane.servers && !lane.queue.empty()) {
      const std::uint32_t next = lane.queue.front();
      lane.queue.pop_front();
      ++lane.busy;
      schedule(now_, EventKind::ServiceStart, next, e);
    }
  }

  void after_pop(const std::deque<std::uint32_t>& fifo) {
    if (fifo.empty()) return;
    const std::uint32_t front = fifo.front();
    if (vehicles_[front].head_ready) schedule(now_, EventKind::AdmissionRetry, front, current_element(vehicles_[front]));
  }

  void add_waiter(std::int32_t e, std::uint32_t id) {
    auto& w = is_link(e) ? link(e).waiters : station(e).waiters;
    if (std::find(w.begin(), w.end(), id) == w.end()) w.push_back(id);
  }

  void wake(std::vector<std::uint32_t>& waiters, std::int32_t e) {
    for (std::uint32_t id : waiters) schedule(now_, EventKind::AdmissionRetry, id, e);
    waiters.clear();
  }

  // Queue sampling.
  std::size_t add_series(std::string name, double capacity) {
    result_.queues.push_back(QueueSeries{std::move(name), capacity, {}});
    dirty_.push_back(false);
    return result_.queues.size() - 1;
  }

  void mark(std::size_t series) {
    if (series != kNoSeries) dirty_[series] = true;
  }

  double series_value(std::size_t series) const {
    for (const LinkNode& l : links_)
      if (l.series == series) return l.storage.occupancy();
    for (const StationNode& s : stations_) {
      if (s.series == series) return s.occupancy();
      for (const Lane& ln : s.lanes)
        if (ln.series == series) return ln.storage.occupancy();
    }
    return 0.0;
  }

  void flush_dirty() {
    for (std::size_t i = 0; i < dirty_.size(); ++i) {
      if (!dirty_[i]) continue;
      result_.queues[i].samples.push_back({now_, series_value(i)});
      dirty_[i] = false;
    }
  }

  void sample_all(double t) {
    for (std::size_t i = 0; i < result_.queues.size(); ++i) result_.queues[i].samples.push_back({t, series_value(i)});
  }

  void emit_ticks_before(double t) {
    if (!options_.record_queues) return;
    while (static_cast<double>(next_tick_) * options_.tick_s < t) sample_all(static_cast<double>(next_tick_++) * options_.tick_s);
  }

  void emit_ticks_through(double t) {
    if (!options_.record_queues) return;
    while (static_cast<double>(next_tick_) * options_.tick_s <= t) sample_all(static_cast<double>(next_tick_++) * options_.tick_s);
  }

  const ScenarioSpec& spec_;
  std::uint64_t seed_;
  RunOptions options_;

  std::vector<LinkNode> links_;
  std::vector<StationNode> stations_;
  std::vector<std::int32_t> manual_path_;
  std::vector<std::int32_t> auto_path_;
  std::deque<std::uint32_t> source_;
  std::vector<VehicleState> vehicles_;
  std::vector<LaneOccupancy> lane_scratch_;

  std::priority_queue<Event, std::vector<Event>, EventLater> events_;
  std::uint64_t next_seq_ = 0;
  double now_ = 0.0;
  std::size_t exited_ = 0;
  std::uint64_t admit_counter_ = 0;
  std::uint64_t service_counter_ = 0;
  std::uint64_t decision_counter_ = 0;

  std::vector<bool> dirty_;
  std::uint64_t next_tick_ = 0;
  RunResult result_;
};

void require_valid(const ScenarioSpec& spec) {
  const auto violations = validate(spec);
  if (violations.empty()) return;
  std::string msg = "invalid scenario '" + spec.label + "':";
  for (const auto& v : violations) msg += "\n  " + v;
  throw SimulationError(msg);
}

}  // namespace

RunResult run_with_arrivals(const ScenarioSpec& spec, std::uint64_t seed, std::vector<double> arrivals,
                            const RunOptions& options) {
  require_valid(spec);
  if (!std::is_sorted(arrivals.begin(), arrivals.end())) throw SimulationError("arrival times must be sorted");
  return Simulator(spec, seed, options).run(std::move(arrivals));
}

RunResult run(const ScenarioSpec& spec, std::uint64_t seed, const RunOptions& options) {
  require_valid(spec);
  return Simulator(spec, seed, options).run(generate_arrivals(spec.flow, seed));
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Arrival: return "Arrival";
    case EventKind::ReachHead: return "ReachHead";
    case EventKind::AdmissionRetry: return "AdmissionRetry";
    case EventKind::ServiceStart: return "ServiceStart";
    case EventKind::ServiceEnd: return "ServiceEnd";
  }
  return "?";
}

}  // namespace portsim
