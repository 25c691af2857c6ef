#include "fieldcalc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "fieldcalc/json_io.hpp"

namespace fieldcalc {

using nlohmann::json;

Timestamp Timestamp::from_seconds(double s) {
  return Timestamp{static_cast<std::int64_t>(std::llround(s * 1e6))};
}

std::string to_string(Timestamp t) { return numeral_text(t.seconds()); }

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

Value SensorScript::at(Timestamp t) const {
  const Value* v = &steps.front().second;
  for (const auto& [when, val] : steps) {
    if (when > t) break;
    v = &val;
  }
  return *v;
}

const PathSegment* Scenario::segment_at(DeviceId d, Timestamp t) const {
  auto it = paths.find(d);
  if (it == paths.end()) {
    static const PathSegment always{Timestamp{INT64_MIN}, Timestamp{INT64_MAX}, {}};
    return std::find(devices.begin(), devices.end(), d) != devices.end() ? &always : nullptr;
  }
  for (const auto& seg : it->second)
    if (seg.from <= t && t <= seg.to) return &seg;
  return nullptr;
}

std::optional<Point> Scenario::position(DeviceId d, Timestamp t) const {
  const PathSegment* seg = segment_at(d, t);
  if (!seg) return std::nullopt;
  const auto& w = seg->waypoints;
  if (w.empty()) return Point{};
  if (t <= w.front().t) return w.front().p;
  if (t >= w.back().t) return w.back().p;
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (t <= w[i].t) {
      double span = static_cast<double>((w[i].t - w[i - 1].t).micros);
      double f = span > 0 ? static_cast<double>((t - w[i - 1].t).micros) / span : 1.0;
      return Point{w[i - 1].p.x + f * (w[i].p.x - w[i - 1].p.x),
                   w[i - 1].p.y + f * (w[i].p.y - w[i - 1].p.y)};
    }
  }
  return w.back().p;
}

bool Scenario::active_throughout(DeviceId d, Timestamp a, Timestamp b) const {
  const PathSegment* seg = segment_at(d, a);
  return seg && seg->from <= b && b <= seg->to;
}

SensorState Scenario::local_sensors(DeviceId d, Timestamp t) const {
  SensorState s;
  auto it = sensors.find(d);
  if (it != sensors.end())
    for (const auto& [name, script] : it->second) s.local.emplace(name, script.at(t));
  return s;
}

namespace {

[[noreturn]] void bad(const std::string& msg) { throw std::invalid_argument("scenario: " + msg); }

DeviceId device_key(const std::string& key) {
  try {
    std::size_t used = 0;
    unsigned long long v = std::stoull(key, &used);
    if (used != key.size()) bad("device key '" + key + "' is not a natural number");
    return v;
  } catch (const std::logic_error&) {
    bad("device key '" + key + "' is not a natural number");
  }
}

Timestamp time_of(const json& j, const char* what) {
  if (!j.is_number()) bad(std::string(what) + " must be a number");
  return Timestamp::from_seconds(j.get<double>());
}

SensorScript script_of(const json& j) {
  SensorScript s;
  if (j.is_array()) {
    for (const auto& step : j) {
      if (!step.is_array() || step.size() != 2) bad("sensor script steps are [time, value] pairs");
      s.steps.emplace_back(time_of(step[0], "sensor step time"), sensor_value_from_json(step[1]));
    }
    std::stable_sort(s.steps.begin(), s.steps.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    if (s.steps.empty()) bad("empty sensor script");
  } else {
    s.steps.emplace_back(Timestamp{0}, sensor_value_from_json(j));
  }
  return s;
}

json value_out(const Value& v) {
  if (!v.is_field()) {
    if (auto n = as_number(v.local()); n && std::isfinite(*n)) return *n;
    if (auto b = as_bool(v.local())) return *b;
    if (!as_number(v.local())) return pretty_print(v.local());
  }
  return to_json(v);
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) bad("top level must be an object");
  Scenario s;
  for (const auto& d : j.at("devices")) s.devices.push_back(d.get<DeviceId>());
  std::sort(s.devices.begin(), s.devices.end());
  if (std::adjacent_find(s.devices.begin(), s.devices.end()) != s.devices.end())
    bad("duplicate device id");
  auto known = [&](DeviceId d) {
    return std::binary_search(s.devices.begin(), s.devices.end(), d);
  };
  if (j.contains("radius")) s.radius = j.at("radius").get<double>();
  if (s.radius < 0) bad("radius must be non-negative");
  if (j.contains("decay")) s.decay = time_of(j.at("decay"), "decay");
  if (s.decay.micros <= 0) bad("decay must be positive");

  if (j.contains("paths")) {
    for (const auto& [key, segs] : j.at("paths").items()) {
      DeviceId d = device_key(key);
      if (!known(d)) bad("path for unknown device " + key);
      auto& out = s.paths[d];
      for (const auto& seg : segs) {
        PathSegment p;
        p.from = time_of(seg.at("from"), "path start");
        p.to = time_of(seg.at("to"), "path end");
        if (p.to < p.from) bad("path segment ends before it starts for device " + key);
        if (seg.contains("waypoints")) {
          for (const auto& w : seg.at("waypoints")) {
            if (!w.is_array() || w.size() != 3) bad("waypoints are [time, x, y]");
            p.waypoints.push_back({time_of(w[0], "waypoint time"),
                                   Point{w[1].get<double>(), w[2].get<double>()}});
          }
        }
        std::stable_sort(p.waypoints.begin(), p.waypoints.end(),
                         [](const Waypoint& a, const Waypoint& b) { return a.t < b.t; });
        out.push_back(std::move(p));
      }
      std::sort(out.begin(), out.end(),
                [](const PathSegment& a, const PathSegment& b) { return a.from < b.from; });
      for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i].from <= out[i - 1].to) bad("overlapping path segments for device " + key);
    }
  }

  for (const auto& f : j.at("fires")) {
    Fire fire{time_of(f.at("t"), "fire time"), f.at("device").get<DeviceId>()};
    if (!known(fire.device)) bad("fire of unknown device " + std::to_string(fire.device));
    s.fires.push_back(fire);
  }
  std::stable_sort(s.fires.begin(), s.fires.end(),
                   [](const Fire& a, const Fire& b) { return a.t < b.t; });
  for (std::size_t i = 0; i < s.fires.size(); ++i) {
    if (i && s.fires[i].t == s.fires[i - 1].t)
      bad("two fires at time " + to_string(s.fires[i].t));
    if (!s.active(s.fires[i].device, s.fires[i].t))
      bad("device " + std::to_string(s.fires[i].device) + " fires at " +
          to_string(s.fires[i].t) + " while switched off");
  }

  if (j.contains("sensors")) {
    for (const auto& [key, table] : j.at("sensors").items()) {
      DeviceId d = device_key(key);
      if (!known(d)) bad("sensors for unknown device " + key);
      for (const auto& [name, script] : table.items()) s.sensors[d][name] = script_of(script);
    }
  }
  return s;
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["devices"] = s.devices;
  j["radius"] = s.radius;
  j["decay"] = s.decay.seconds();
  json paths = json::object();
  for (const auto& [d, segs] : s.paths) {
    json list = json::array();
    for (const auto& seg : segs) {
      json w = json::array();
      for (const auto& wp : seg.waypoints) w.push_back({wp.t.seconds(), wp.p.x, wp.p.y});
      list.push_back({{"from", seg.from.seconds()}, {"to", seg.to.seconds()}, {"waypoints", w}});
    }
    paths[std::to_string(d)] = list;
  }
  j["paths"] = paths;
  json fires = json::array();
  for (const auto& f : s.fires) fires.push_back({{"t", f.t.seconds()}, {"device", f.device}});
  j["fires"] = fires;
  json sensors = json::object();
  for (const auto& [d, table] : s.sensors) {
    json t = json::object();
    for (const auto& [name, script] : table) {
      json steps = json::array();
      for (const auto& [when, v] : script.steps) steps.push_back({when.seconds(), value_out(v)});
      t[name] = steps;
    }
    sensors[std::to_string(d)] = t;
  }
  j["sensors"] = sensors;
  return j;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("scenario: " + path + ": " + e.what());
  }
  return scenario_from_json(j);
}

Topology topology_at(const Scenario& s, Timestamp t, bool closing) {
  std::vector<std::pair<DeviceId, Point>> on;
  for (DeviceId d : s.devices) {
    const PathSegment* seg = s.segment_at(d, t);
    if (!seg || (closing && seg->to == t)) continue;
    on.emplace_back(d, *s.position(d, t));
  }
  Topology topo;
  for (const auto& [d, p] : on) {
    auto& nbrs = topo[d];
    for (const auto& [e, q] : on)
      if (d == e || distance(p, q) <= s.radius) nbrs.insert(e);
  }
  return topo;
}

}  // namespace fieldcalc
