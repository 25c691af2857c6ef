#ifndef FIELDCALC_ADEQUACY_HPP
#define FIELDCALC_ADEQUACY_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "fieldcalc/dag.hpp"
#include "fieldcalc/denot.hpp"
#include "fieldcalc/network.hpp"

namespace fieldcalc {

struct EventVerdict {
  EventId event = 0;
  DeviceId device = 0;
  Timestamp time;
  Value operational;
  Value denotational;
  bool equal = false;
};

struct AdequacyReport {
  EventDAG dag;
  std::vector<EventVerdict> verdicts;
  std::size_t equal_count = 0;
  std::optional<std::size_t> first_mismatch;  // index into verdicts
  DenotStats stats;

  bool ok() const { return equal_count == verdicts.size(); }
};

struct AdequacyOptions {
  std::int64_t fuel = kDefaultFuel;
  bool check_alignment = true;
};

// Runs the scenario operationally and evaluates main over the induced event
// structure, comparing each fire's root with the denotation at its event.
// Throws CoherenceError when the induced structure is not well formed.
AdequacyReport check_adequacy(const Scenario& s, const Program& program,
                              const AdequacyOptions& opts = {});

nlohmann::json to_json(const AdequacyReport& r);

}  // namespace fieldcalc

#endif
