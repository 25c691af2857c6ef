#ifndef FIELDCALC_DENOT_HPP
#define FIELDCALC_DENOT_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fieldcalc/builtins.hpp"
#include "fieldcalc/dag.hpp"
#include "fieldcalc/evolution.hpp"

namespace fieldcalc {

// Sensor readings at each event. The "nbr-range" neighbour reading must
// cover every neighbour of the event plus its own device.
class EventSensors {
 public:
  virtual ~EventSensors() = default;
  virtual SensorState at(const EventDAG& dag, EventId e) const = 0;
};

// Readings sampled from a scenario's scripts; nbr-range is the distance from
// the event's position to each neighbour event's position.
std::unique_ptr<EventSensors> scenario_sensors(const Scenario& s);

// Fixed readings per event (missing events read nothing); nbr-range from the
// events' recorded positions when present.
std::unique_ptr<EventSensors> table_sensors(std::map<EventId, SensorState> table);

// Variable assumptions: name -> evolution over (a superset of) the domain.
using Assumptions = std::map<Name, FieldEvolution>;

struct DenotOptions {
  std::int64_t fuel = 50'000'000;
  // Check that every field produced at event e has domain devices_in(D, e).
  bool check_alignment = false;
};

struct DenotStats {
  std::int64_t fields_checked = 0;
  std::int64_t alignment_violations = 0;
  std::string first_violation;
};

class Denotation {
 public:
  Denotation(const EventDAG& dag, const Program& program, const EventSensors& sensors,
             DenotOptions opts = {});
  ~Denotation();

  // Evolution of `e` over `domain` under `env`.
  FieldEvolution eval(const EventSet& domain, const Assumptions& env, const ExprPtr& e);

  // Applies a function value (its tag) to argument evolutions over `domain`.
  FieldEvolution apply(const ExprPtr& fn, const std::vector<FieldEvolution>& args,
                       const EventSet& domain);

  // Restriction of an evolution to `domain`; field values are cut down to
  // the devices whose neighbour events lie in `domain`.
  FieldEvolution restrict(const FieldEvolution& f, const EventSet& domain) const;

  const DenotStats& stats() const;

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
};

FieldEvolution denot_eval(const EventDAG& dag, const EventSet& domain, const Assumptions& env,
                          const ExprPtr& e, const Program& program, const EventSensors& sensors,
                          DenotOptions opts = {});

// Events of `domain` where the function-valued `fn` denotes the same tag as
// at `at` (the whole domain when that tag is a builtin).
EventSet cluster_of(const FieldEvolution& fn, const EventSet& domain, EventId at);

struct RestrictionReport {
  EventSet cluster;
  bool premise_holds = false;   // arguments agree on the cluster
  bool property_holds = false;  // results agree on the cluster
  std::string detail;
};

// Restriction property: perturbing arguments outside the cluster of `fn_expr`
// at `at` does not change the application's value inside it.
RestrictionReport check_restriction(const EventDAG& dag, const Program& program,
                                    const EventSensors& sensors, const EventSet& domain,
                                    const Assumptions& env, const ExprPtr& fn_expr,
                                    const std::vector<ExprPtr>& args,
                                    const std::vector<ExprPtr>& args_perturbed, EventId at);

// Events of `domain` with no neighbour inside `domain`.
EventSet source_events(const EventDAG& dag, const EventSet& domain);

// rep(e1){(x) => e2} agrees with ((x) => e2)(e1) on every source event.
// Returns the events where it does not.
std::vector<EventId> check_rep_on_source(const EventDAG& dag, const Program& program,
                                         const EventSensors& sensors, const EventSet& domain,
                                         const Assumptions& env, const ExprPtr& rep_expr);

}  // namespace fieldcalc

#endif
