#ifndef FIELDCALC_TESTS_FIXTURES_HPP
#define FIELDCALC_TESTS_FIXTURES_HPP

#include <string>
#include <vector>

#include "fieldcalc/ast.hpp"
#include "fieldcalc/dag.hpp"
#include "fieldcalc/scenario.hpp"

namespace fieldcalc::testing {

std::string data_path(const std::string& name);

// Parses and type checks a program, optionally on top of the corpus.
Program load(const std::string& text, bool with_corpus = false);

// Four devices firing in four rounds. Device 2 reboots after its second
// fire; device 4 stops hearing device 2 from its fourth fire on.
// Event id = 4 * (round - 1) + (device - 1).
EventDAG four_round_dag();
constexpr EventId kGreen = 10;  // third fire of device 3

// Static devices at the given positions firing round-robin, `rounds`
// times each, with neighbours' messages kept for two rounds.
Scenario static_scenario(const std::vector<std::pair<DeviceId, Point>>& devices, double radius,
                         int rounds);

// Shortest-path distances over the unit-disc graph at time 0, weighted by
// Euclidean distance (Dijkstra).
std::map<DeviceId, double> shortest_paths(const Scenario& s, DeviceId source);

}  // namespace fieldcalc::testing

#endif
