#ifndef FIELDCALC_SCENARIO_HPP
#define FIELDCALC_SCENARIO_HPP

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fieldcalc/ast.hpp"
#include "fieldcalc/builtins.hpp"

namespace fieldcalc {

// Fixed-point time in microseconds, so decimal times compare exactly.
struct Timestamp {
  std::int64_t micros = 0;

  static Timestamp from_seconds(double s);
  double seconds() const { return static_cast<double>(micros) / 1e6; }
  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
  friend Timestamp operator-(Timestamp a, Timestamp b) { return {a.micros - b.micros}; }
  friend Timestamp operator+(Timestamp a, Timestamp b) { return {a.micros + b.micros}; }
};

std::string to_string(Timestamp t);

struct Point {
  double x = 0;
  double y = 0;
};

double distance(Point a, Point b);

struct Waypoint {
  Timestamp t;
  Point p;
};

// One on-interval [from, to] of a device; position interpolates linearly
// between waypoints and is clamped outside them.
struct PathSegment {
  Timestamp from;
  Timestamp to;
  std::vector<Waypoint> waypoints;
};

// Piecewise-constant sensor reading: the last entry at or before t, or the
// first entry when t precedes all of them.
struct SensorScript {
  std::vector<std::pair<Timestamp, Value>> steps;
  Value at(Timestamp t) const;
};

struct Fire {
  Timestamp t;
  DeviceId device;
};

struct Scenario {
  std::vector<DeviceId> devices;
  double radius = 1.0;
  Timestamp decay{1'000'000};
  std::map<DeviceId, std::vector<PathSegment>> paths;
  std::vector<Fire> fires;  // sorted by time, times distinct
  std::map<DeviceId, std::map<Name, SensorScript>> sensors;

  // Segment containing t; devices without a path are always on at the origin.
  const PathSegment* segment_at(DeviceId d, Timestamp t) const;
  bool active(DeviceId d, Timestamp t) const { return segment_at(d, t) != nullptr; }
  std::optional<Point> position(DeviceId d, Timestamp t) const;
  // True when d is on throughout [a, b] (one segment covers both ends).
  bool active_throughout(DeviceId d, Timestamp a, Timestamp b) const;
  SensorState local_sensors(DeviceId d, Timestamp t) const;
};

// Parses and validates the scenario JSON format. Throws std::invalid_argument.
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::string& path);

using Topology = std::map<DeviceId, std::set<DeviceId>>;

// Unit-disc neighbourhoods among the devices active at t (self included).
// With `closing`, devices whose on-interval ends exactly at t count as off.
Topology topology_at(const Scenario& s, Timestamp t, bool closing = false);

}  // namespace fieldcalc

#endif
