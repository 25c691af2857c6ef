#ifndef FIELDCALC_EVOLUTION_HPP
#define FIELDCALC_EVOLUTION_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "fieldcalc/ast.hpp"

namespace fieldcalc {

using EventId = std::uint32_t;
// Sorted, duplicate-free.
using EventSet = std::vector<EventId>;

bool contains(const EventSet& set, EventId e);

// Partial map from events to values.
struct FieldEvolution {
  std::map<EventId, Value> values;

  const Value& at(EventId e) const;
  bool defined(EventId e) const { return values.count(e) > 0; }
  EventSet domain() const;
  friend bool operator==(const FieldEvolution&, const FieldEvolution&) = default;
};

FieldEvolution constant(const EventSet& domain, const Value& v);

}  // namespace fieldcalc

#endif
