#include "fieldcalc/adequacy.hpp"

#include "fieldcalc/errors.hpp"
#include "fieldcalc/json_io.hpp"

namespace fieldcalc {

AdequacyReport check_adequacy(const Scenario& s, const Program& program,
                              const AdequacyOptions& opts) {
  AdequacyReport r;
  r.dag = dag_from_scenario(s);
  auto bad = dag_violations(r.dag);
  if (!bad.empty())
    throw CoherenceError("induced event structure violates property " +
                         std::to_string(bad.front().property) + ": " + bad.front().message);

  RunOptions ro;
  ro.fuel = opts.fuel;
  FireTrace trace = run_scenario(s, program, ro);

  auto sensors = scenario_sensors(s);
  DenotOptions dopts;
  dopts.check_alignment = opts.check_alignment;
  Denotation d(r.dag, program, *sensors, dopts);
  FieldEvolution phi = d.eval(r.dag.all(), {}, program.main);
  r.stats = d.stats();

  // Fires and events share one order: the scenario's fire list sorted by time.
  for (std::size_t i = 0; i < trace.fires.size(); ++i) {
    const FireRecord& f = trace.fires[i];
    EventVerdict v;
    v.event = static_cast<EventId>(i);
    v.device = f.device;
    v.time = f.t;
    v.operational = f.tree->root;
    v.denotational = phi.at(v.event);
    v.equal = v.operational == v.denotational;
    if (v.equal)
      ++r.equal_count;
    else if (!r.first_mismatch)
      r.first_mismatch = r.verdicts.size();
    r.verdicts.push_back(std::move(v));
  }
  return r;
}

nlohmann::json to_json(const AdequacyReport& r) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& v : r.verdicts)
    events.push_back({{"event", v.event},
                      {"device", v.device},
                      {"time", v.time.seconds()},
                      {"operational", to_json(v.operational)},
                      {"denotational", to_json(v.denotational)},
                      {"equal", v.equal}});
  nlohmann::json j{{"events", events},
                   {"equal", r.equal_count},
                   {"total", r.verdicts.size()},
                   {"fields_checked", r.stats.fields_checked},
                   {"alignment_violations", r.stats.alignment_violations}};
  if (r.first_mismatch) j["first_mismatch"] = events[*r.first_mismatch];
  else j["first_mismatch"] = nullptr;
  return j;
}

}  // namespace fieldcalc
