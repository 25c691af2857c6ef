#ifndef FIELDCALC_DAG_HPP
#define FIELDCALC_DAG_HPP

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fieldcalc/evolution.hpp"
#include "fieldcalc/scenario.hpp"

namespace fieldcalc {

struct Event {
  DeviceId device = 0;
  Timestamp time;
  std::optional<Point> position;
};

// Event structure: neigh(e, e') means e' is a neighbour of e, i.e. e is
// aware of e'. Events are indexed 0..n-1.
struct EventDAG {
  std::vector<Event> events;
  std::vector<std::vector<EventId>> neighbours;  // outgoing, sorted

  std::size_t size() const { return events.size(); }
  EventSet all() const;
  void link(EventId from, EventId to);
  bool neigh(EventId from, EventId to) const;
};

struct DagViolation {
  int property;  // 1 acyclic, 2 distinct devices, 3 one same-device successor
  std::string message;
};

std::vector<DagViolation> dag_violations(const EventDAG& dag);
// Throws WellFormednessError naming the violated property.
void validate_dag(const EventDAG& dag);

// Neighbour of e on device d; e itself when d is e's device.
std::optional<EventId> latest_event(const EventDAG& dag, EventId e, DeviceId d);
// Same-device predecessor of e, if e is linked to one.
std::optional<EventId> prev_event(const EventDAG& dag, EventId e);
// Devices d whose latest_event(e, d) lies in `domain`. Always includes e's
// own device.
std::vector<DeviceId> devices_in(const EventDAG& dag, const EventSet& domain, EventId e);

// Event structure induced by a scenario: one event per fire, linked to the
// last fire of each device that reached it within the decay window while
// the receiver stayed on.
EventDAG dag_from_scenario(const Scenario& s);

nlohmann::json dag_to_json(const EventDAG& dag);
EventDAG dag_from_json(const nlohmann::json& j);

}  // namespace fieldcalc

#endif
