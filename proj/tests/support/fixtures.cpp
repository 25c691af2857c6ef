#include "fixtures.hpp"

#include <limits>
#include <queue>

#include "fieldcalc/parser.hpp"
#include "fieldcalc/stdlib.hpp"
#include "fieldcalc/typer.hpp"

namespace fieldcalc::testing {

std::string data_path(const std::string& name) { return std::string(FIELDCALC_TEST_DATA) + "/" + name; }

Program load(const std::string& text, bool with_corpus) {
  std::vector<SourceFile> files;
  if (with_corpus) files = corpus_library(load_corpus());
  files.push_back({"<test>", text});
  SourceUnit u = parse_units(files);
  Program p{std::move(u.decls), u.main};
  if (p.main) typecheck_program(p);
  else typecheck_decls(p.decls);
  return p;
}

EventDAG four_round_dag() {
  EventDAG dag;
  auto id = [](int round, DeviceId d) { return static_cast<EventId>(4 * (round - 1) + (d - 1)); };
  const std::map<DeviceId, std::vector<DeviceId>> near = {
      {1, {2}}, {2, {1, 3, 4}}, {3, {2, 4}}, {4, {2, 3}}};
  for (int r = 1; r <= 4; ++r)
    for (DeviceId d = 1; d <= 4; ++d)
      dag.events.push_back({d, Timestamp::from_seconds(r + 0.1 * static_cast<double>(d)),
                            Point{static_cast<double>(d), 0}});
  dag.neighbours.resize(dag.events.size());
  for (int r = 2; r <= 4; ++r) {
    for (DeviceId d = 1; d <= 4; ++d) {
      if (!(d == 2 && r == 3)) dag.link(id(r, d), id(r - 1, d));
      for (DeviceId n : near.at(d)) {
        if (d == 4 && n == 2 && r == 4) continue;
        dag.link(id(r, d), id(r - 1, n));
      }
    }
  }
  return dag;
}

Scenario static_scenario(const std::vector<std::pair<DeviceId, Point>>& devices, double radius,
                         int rounds) {
  Scenario s;
  s.radius = radius;
  const auto n = static_cast<std::int64_t>(devices.size());
  s.decay = Timestamp{2'000'000};
  for (const auto& [d, p] : devices) {
    s.devices.push_back(d);
    s.paths[d] = {PathSegment{Timestamp{0}, Timestamp::from_seconds(rounds + 1.0), {{Timestamp{0}, p}}}};
  }
  for (int r = 0; r < rounds; ++r)
    for (std::int64_t i = 0; i < n; ++i)
      s.fires.push_back({Timestamp{(r + 1) * 1'000'000 + i * 1'000'000 / (n + 1)},
                         devices[static_cast<std::size_t>(i)].first});
  std::sort(s.devices.begin(), s.devices.end());
  return s;
}

std::map<DeviceId, double> shortest_paths(const Scenario& s, DeviceId source) {
  std::map<DeviceId, double> dist;
  for (DeviceId d : s.devices) dist[d] = std::numeric_limits<double>::infinity();
  using Item = std::pair<double, DeviceId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
  dist[source] = 0;
  q.push({0, source});
  while (!q.empty()) {
    auto [du, u] = q.top();
    q.pop();
    if (du > dist[u]) continue;
    Point pu = *s.position(u, Timestamp{0});
    for (DeviceId v : s.devices) {
      double w = distance(pu, *s.position(v, Timestamp{0}));
      if (v == u || w > s.radius) continue;
      if (du + w < dist[v]) {
        dist[v] = du + w;
        q.push({dist[v], v});
      }
    }
  }
  return dist;
}

}  // namespace fieldcalc::testing
