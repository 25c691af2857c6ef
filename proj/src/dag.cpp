#include "fieldcalc/dag.hpp"

#include <algorithm>
#include <map>

#include "fieldcalc/errors.hpp"

namespace fieldcalc {

using nlohmann::json;

EventSet EventDAG::all() const {
  EventSet s(events.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = static_cast<EventId>(i);
  return s;
}

void EventDAG::link(EventId from, EventId to) {
  if (neighbours.size() < events.size()) neighbours.resize(events.size());
  auto& out = neighbours.at(from);
  auto it = std::lower_bound(out.begin(), out.end(), to);
  if (it == out.end() || *it != to) out.insert(it, to);
}

bool EventDAG::neigh(EventId from, EventId to) const {
  if (from >= neighbours.size()) return false;
  return std::binary_search(neighbours[from].begin(), neighbours[from].end(), to);
}

std::vector<DagViolation> dag_violations(const EventDAG& dag) {
  std::vector<DagViolation> out;
  const std::size_t n = dag.size();
  auto nbrs = [&](std::size_t e) -> const std::vector<EventId>& {
    static const std::vector<EventId> none;
    return e < dag.neighbours.size() ? dag.neighbours[e] : none;
  };
  auto name = [&](std::size_t e) { return "event " + std::to_string(e); };

  for (std::size_t e = 0; e < n; ++e)
    for (EventId x : nbrs(e))
      if (x >= n) out.push_back({1, name(e) + " links to missing event " + std::to_string(x)});
  if (!out.empty()) return out;

  // Property 1: iterative DFS with colours.
  std::vector<int> colour(n, 0);
  for (std::size_t root = 0; root < n; ++root) {
    if (colour[root]) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    colour[root] = 1;
    bool found = false;
    while (!stack.empty() && !found) {
      auto& [v, i] = stack.back();
      const auto& vs = nbrs(v);
      if (i == vs.size()) {
        colour[v] = 2;
        stack.pop_back();
        continue;
      }
      EventId w = vs[i++];
      if (colour[w] == 1) {
        out.push_back({1, "cycle through " + name(w)});
        found = true;
      } else if (colour[w] == 0) {
        colour[w] = 1;
        stack.emplace_back(w, 0);
      }
    }
    if (found) break;
  }

  // Property 2: neighbours of one event carry distinct devices.
  for (std::size_t e = 0; e < n; ++e) {
    std::map<DeviceId, EventId> seen;
    for (EventId x : nbrs(e)) {
      auto [it, fresh] = seen.emplace(dag.events[x].device, x);
      if (!fresh)
        out.push_back({2, name(e) + " has two neighbours on device " +
                              std::to_string(dag.events[x].device) + ": events " +
                              std::to_string(it->second) + " and " + std::to_string(x)});
    }
  }

  // Property 3: each event is linked from at most one event of its device.
  std::vector<std::vector<EventId>> same(n);
  for (std::size_t e = 0; e < n; ++e)
    for (EventId x : nbrs(e))
      if (dag.events[x].device == dag.events[e].device) same[x].push_back(static_cast<EventId>(e));
  for (std::size_t x = 0; x < n; ++x)
    if (same[x].size() > 1)
      out.push_back({3, name(x) + " is linked from events " + std::to_string(same[x][0]) +
                            " and " + std::to_string(same[x][1]) + " of its own device"});
  return out;
}

void validate_dag(const EventDAG& dag) {
  auto v = dag_violations(dag);
  if (!v.empty())
    throw WellFormednessError("event structure violates property " +
                              std::to_string(v.front().property) + ": " + v.front().message);
}

std::optional<EventId> latest_event(const EventDAG& dag, EventId e, DeviceId d) {
  if (dag.events.at(e).device == d) return e;
  if (e >= dag.neighbours.size()) return std::nullopt;
  for (EventId x : dag.neighbours[e])
    if (dag.events[x].device == d) return x;
  return std::nullopt;
}

std::optional<EventId> prev_event(const EventDAG& dag, EventId e) {
  if (e >= dag.neighbours.size()) return std::nullopt;
  for (EventId x : dag.neighbours[e])
    if (dag.events[x].device == dag.events[e].device) return x;
  return std::nullopt;
}

std::vector<DeviceId> devices_in(const EventDAG& dag, const EventSet& domain, EventId e) {
  std::vector<DeviceId> out{dag.events.at(e).device};
  if (e < dag.neighbours.size())
    for (EventId x : dag.neighbours[e])
      if (dag.events[x].device != dag.events[e].device && contains(domain, x))
        out.push_back(dag.events[x].device);
  std::sort(out.begin(), out.end());
  return out;
}

EventDAG dag_from_scenario(const Scenario& s) {
  EventDAG dag;
  for (const auto& f : s.fires) dag.events.push_back({f.device, f.t, s.position(f.device, f.t)});
  dag.neighbours.resize(dag.events.size());
  for (std::size_t i = 0; i < s.fires.size(); ++i) {
    const Fire& now = s.fires[i];
    std::map<DeviceId, EventId> last;
    for (std::size_t j = 0; j < i; ++j) {
      const Fire& then = s.fires[j];
      if (then.t < now.t - s.decay) continue;
      if (!s.active_throughout(now.device, then.t, now.t)) continue;
      if (then.device != now.device) {
        auto a = s.position(now.device, then.t);
        auto b = s.position(then.device, then.t);
        if (!a || !b || distance(*a, *b) > s.radius) continue;
      }
      last[then.device] = static_cast<EventId>(j);
    }
    for (const auto& [d, j] : last) dag.link(static_cast<EventId>(i), j);
  }
  return dag;
}

json dag_to_json(const EventDAG& dag) {
  json events = json::array();
  for (std::size_t i = 0; i < dag.size(); ++i) {
    const Event& e = dag.events[i];
    json ev{{"id", i}, {"device", e.device}, {"time", e.time.seconds()}};
    if (e.position) ev["position"] = {e.position->x, e.position->y};
    events.push_back(ev);
  }
  json links = json::array();
  for (std::size_t i = 0; i < dag.neighbours.size(); ++i)
    for (EventId x : dag.neighbours[i]) links.push_back({i, x});
  return json{{"events", events}, {"neigh", links}};
}

EventDAG dag_from_json(const json& j) {
  EventDAG dag;
  const json& events = j.at("events");
  dag.events.resize(events.size());
  for (const auto& ev : events) {
    std::size_t id = ev.at("id").get<std::size_t>();
    if (id >= events.size()) throw std::invalid_argument("event ids must be 0..n-1");
    Event e;
    e.device = ev.at("device").get<DeviceId>();
    if (ev.contains("time")) e.time = Timestamp::from_seconds(ev.at("time").get<double>());
    if (ev.contains("position"))
      e.position = Point{ev.at("position").at(0).get<double>(), ev.at("position").at(1).get<double>()};
    dag.events[id] = e;
  }
  dag.neighbours.resize(dag.events.size());
  for (const auto& l : j.at("neigh")) {
    auto from = l.at(0).get<std::size_t>(), to = l.at(1).get<std::size_t>();
    if (from >= dag.size() || to >= dag.size())
      throw std::invalid_argument("link mentions a missing event");
    dag.link(static_cast<EventId>(from), static_cast<EventId>(to));
  }
  return dag;
}

}  // namespace fieldcalc
