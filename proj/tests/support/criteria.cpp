#include "criteria.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <set>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "fieldcalc/device.hpp"
#include "fieldcalc/json_io.hpp"
#include "fieldcalc/network.hpp"
#include "fieldcalc/parser.hpp"
#include "fieldcalc/stdlib.hpp"
#include "fieldcalc/typer.hpp"
#include "fixtures.hpp"
#include "gen.hpp"

namespace fieldcalc::testing {

namespace {

using Clock = std::chrono::steady_clock;

// Runs `body`, which fills in pass and detail, and records the elapsed time.
template <class F>
Outcome timed(F body) {
  Outcome o;
  auto start = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  o.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return o;
}

Value num(double x) { return Value::local(make_num(x)); }

std::string join(const std::vector<double>& xs) {
  std::ostringstream s;
  for (std::size_t i = 0; i < xs.size(); ++i) s << (i ? "," : "") << xs[i];
  return s.str();
}

std::string rule_of(const std::string& src) {
  try {
    infer({}, parse_expr(src));
  } catch (const TypeError& e) {
    return e.rule();
  }
  return "accepted";
}

FieldEvolution by_device(const EventDAG& dag, const std::function<Value(DeviceId)>& f) {
  FieldEvolution out;
  for (EventId e = 0; e < dag.size(); ++e) out.values[e] = f(dag.events[e].device);
  return out;
}

Value boolean(bool b) { return Value::local(make_bool(b)); }

// Runs the obstacle program's restriction check at one event of each
// cluster. Returns an empty string when every check holds.
std::string obstacle_restriction(const EventDAG& dag, const EventSensors& sensors,
                                 const Program& p) {
  if (dag.size() == 0) return "";
  DeviceId first = dag.events[0].device;
  auto avoid = by_device(dag, [](DeviceId d) { return boolean(d % 2 == 1); });
  auto source = by_device(dag, [&](DeviceId d) { return boolean(d == first); });
  static const ExprPtr fn = parse_expr("mux(avoid, f, g)", true, {"f", "g"});
  for (bool side : {false, true}) {
    std::optional<EventId> at;
    for (EventId e = 0; e < dag.size() && !at; ++e)
      if ((dag.events[e].device % 2 == 1) == side) at = e;
    if (!at) continue;
    // Flip the source outside the cluster holding `at`.
    auto moved = by_device(dag, [&](DeviceId d) {
      bool in = (d % 2 == 1) == side;
      return boolean(in ? d == first : d != first);
    });
    Assumptions env{{"avoid", avoid}, {"source", source}, {"moved", moved}};
    auto r = check_restriction(dag, p, sensors, dag.all(), env, fn, {make_var("source")},
                               {make_var("moved")}, *at);
    if (!r.premise_holds) return "premise failed at event " + std::to_string(*at);
    if (!r.property_holds) return "restriction failed: " + r.detail;
  }
  return "";
}

const std::vector<std::string> kRepBodies = {
    "rep(sns-num()) { (x) => min-hood(nbr{x}) + 1 }",
    "rep(infinity) { (d) => mux(sns-num() < 2, 0, min-hood+(+[f,f](nbr{d}, nbr-range()))) }",
    "rep(uid()) { (x) => x + sum-hood(nbr{1}) }",
    "rep(() => 0) { (f) => mux(sns-num() < 3, () => uid(), f) }()",
};

// rep-on-source over the whole structure and over its later half.
std::string rep_on_source(const EventDAG& dag, const EventSensors& sensors) {
  static const Program empty;
  EventSet late;
  for (EventId e = static_cast<EventId>(dag.size() / 2); e < dag.size(); ++e) late.push_back(e);
  for (const auto& src : kRepBodies) {
    ExprPtr e = parse_expr(src);
    ExprPtr rep = e;
    if (const auto* a = e->as<expr::Apply>()) rep = a->fn;
    for (const EventSet& dom : {dag.all(), late}) {
      auto bad = check_rep_on_source(dag, empty, sensors, dom, {}, rep);
      if (!bad.empty()) return src + " differs at event " + std::to_string(bad[0]);
    }
  }
  return "";
}

void add_virtual_machine_sensors(Scenario& s) {
  if (s.devices.empty()) return;
  DeviceId injector = s.devices.front();
  for (DeviceId d : s.devices) {
    auto& m = s.sensors[d];
    m["sns-range"].steps = {{Timestamp{0}, num(1.5)}};
    m["sns-injection-point"].steps = {{Timestamp{0}, boolean(d == injector)}};
    m["sns-injected-fun"].steps = {
        {Timestamp{0}, Value::local(parse_expr("() => min-hood(nbr{sns-num()})"))}};
    m["sns-patron"].steps = {{Timestamp{0}, boolean(d % 2 == 0)}};
  }
}

}  // namespace

Outcome check_counter() {
  return timed([](Outcome& o) {
    Scenario s = load_scenario(std::string(FIELDCALC_SOURCE_DIR) + "/scenarios/one-device-5-fires.json");
    Program p = load("rep(0) { (x) => x + 1 }");
    std::vector<double> roots;
    for (const auto& f : run_scenario(s, p).fires) roots.push_back(*as_number(f.tree->root.local()));
    o.pass = roots == std::vector<double>{1, 2, 3, 4, 5};
    o.detail = "roots " + join(roots);
  });
}

Outcome check_minhood_golden() {
  return timed([](Outcome& o) {
    Scenario s = load_scenario(data_path("minhood.json"));
    Program p = load("min-hood(nbr{sns-num()})");
    auto trace = run_scenario(s, p);
    const auto& b2 = trace.fires.at(3);
    nlohmann::json golden = nlohmann::json::parse(std::ifstream(data_path("minhood-golden.json")));
    o.pass = b2.device == 2 && b2.tree->root == num(1) && to_json(b2.tree) == golden;
    o.detail = "B's second tree " + to_json(b2.tree).dump();
  });
}

Outcome check_pick_fun() {
  return timed([](Outcome& o) {
    // C = 1, A = 2, B = 3.
    Scenario s = load_scenario(data_path("pick-fun.json"));
    Program p = load("pick-hood(nbr{sns-fun()})()");
    auto trace = run_scenario(s, p);
    const auto& a2 = trace.fires.at(3);
    NbrField want;
    want.entries[1] = make_num(3);
    want.entries[2] = make_num(1);
    const auto& t = a2.tree;
    // Function tree, then body tree; the body's first child is the nbr.
    bool shape = t->children.size() == 2 && !t->children[1]->children.empty();
    Value inner = shape ? t->children[1]->children[0]->root : Value{};
    o.pass = a2.device == 2 && t->root == num(1) && shape && inner == Value::field(want);
    o.detail = "A's second root " + to_string(t->root) + ", inner " +
               (shape ? to_string(inner) : std::string("missing"));
  });
}

Outcome check_type_fixtures() {
  return timed([](Outcome& o) {
    std::vector<std::string> bad;
    std::string safe = to_string(infer({}, parse_expr("((x) => x)(nbr{0}) +[f,f] nbr{uid()}")));
    if (safe != "field(num)") bad.push_back("safe field function: " + safe);
    std::string wrong = rule_of(
        "(if (uid() = 1) {(x) => x} else {(x) => x +[f,f] nbr{uid()}})(nbr{0}) +[f,f] nbr{uid()}");
    if (wrong == "accepted") bad.push_back("branching field function accepted");
    std::string wrong1 =
        rule_of("((x) => pick-hood(nbr{() => min-hood(x +[f,f] nbr{0})}))(nbr{0})()");
    if (wrong1 != "T-A-FUN") bad.push_back("closure over a field: " + wrong1);
    std::string wrong2 = rule_of("min-hood(rep(nbr{0}) {(x) => x +[f,f] nbr{uid()}})");
    if (wrong2 != "T-REP") bad.push_back("field in rep: " + wrong2);
    auto corpus = load_corpus();
    for (const auto& e : corpus) {
      auto t = infer_entry(corpus, e.name);
      if (!alpha_equivalent(t, e.declared_type) || !annotation_consistent(t, e.annotated_type))
        bad.push_back(e.name + ": " + to_string(t));
    }
    o.pass = bad.empty();
    o.detail = bad.empty() ? "4 fixtures and " + std::to_string(corpus.size()) + " corpus types"
                           : bad.front();
  });
}

Outcome check_type_preservation(int samples, std::uint64_t seed) {
  return timed([&](Outcome& o) {
    std::mt19937_64 rng(seed);
    const GenType targets[] = {GenType::Num, GenType::Bool, GenType::FieldNum, GenType::FieldBool,
                               GenType::Thunk};
    std::vector<DeviceId> all{1, 2, 3, 4, 5, 6};
    int fields = 0;
    for (int i = 0; i < samples; ++i) {
      GenType target = targets[i % 5];
      Generated g = gen_typed(rng, target);
      Program p{{}, g.expr};
      DeviceId self = static_cast<DeviceId>(std::uniform_int_distribution<int>(1, 6)(rng));
      VTEnv env = gen_env(rng, p, g.expr, self);
      TreePtr t = eval(p, self, gen_sensors(rng, self, all), env, g.expr);
      std::string why;
      auto fail = [&](const std::string& msg) {
        o.pass = false;
        o.detail = "sample " + std::to_string(i) + " " + g.source + ": " + msg;
      };
      if (!well_formed_tree(p, g.expr, t, &why)) return fail("tree not well formed: " + why);
      if (!value_has_type(t->root, g.type))
        return fail(to_string(t->root) + " is not of type " + to_string(g.type));
      if (t->root.is_field()) {
        ++fields;
        std::vector<DeviceId> want{self};
        for (const auto& [d, _] : env) want.push_back(d);
        std::sort(want.begin(), want.end());
        want.erase(std::unique(want.begin(), want.end()), want.end());
        std::vector<DeviceId> got;
        for (const auto& [d, _] : t->root.field().entries) got.push_back(d);
        if (got != want) return fail("field domain differs from the environment");
      }
    }
    o.pass = true;
    o.detail = std::to_string(samples) + " samples, " + std::to_string(fields) + " field roots";
  });
}

std::vector<Program> adequacy_programs(std::mt19937_64& rng, int generated) {
  static const std::vector<std::string> mains = {
      "distance-to(sns-num() < 2)",
      "gradcast(sns-num() < 1, uid())",
      "deploy(2, sns-num() < 1, () => uid(), () => 0)",
      "parent(sns-num())",
      "converge-sum(distance-to(sns-num() < 2), 1)",
      "low-pass(0.5, sns-num())",
      "virtual-machine()",
      "if (uid() < 5) { min-hood(nbr{sns-num()}) } else { sum-hood(nbr{uid()}) }",
  };
  static const std::vector<Program> corpus_programs = [] {
    std::vector<Program> out;
    auto lib = corpus_library(load_corpus());
    for (const auto& m : mains) {
      auto files = lib;
      files.push_back({"<main>", m});
      SourceUnit u = parse_units(files);
      Program p{u.decls, u.main};
      typecheck_program(p);
      out.push_back(std::move(p));
    }
    // The injection entry's main is a thunk; run its body.
    SourceUnit u = parse_units(corpus_sources(load_corpus(), "injection"));
    Program inj{u.decls, make_apply(u.main, {})};
    typecheck_program(inj);
    out.push_back(std::move(inj));
    return out;
  }();
  std::vector<Program> out = corpus_programs;
  const GenType targets[] = {GenType::Num, GenType::Bool, GenType::Thunk};
  for (int i = 0; i < generated; ++i) {
    Generated g = gen_typed(rng, targets[i % 3]);
    out.push_back(Program{{}, g.expr});
  }
  return out;
}

AdequacySuite check_adequacy_suite(int scenarios, std::uint64_t seed) {
  AdequacySuite suite;
  std::int64_t fields_checked = 0;
  std::vector<std::pair<EventDAG, Scenario>> dags;
  suite.adequacy = timed([&](Outcome& o) {
    std::mt19937_64 rng(seed);
    std::size_t events = 0, runs = 0;
    for (int i = 0; i < scenarios; ++i) {
      Scenario s = gen_scenario(rng, 5, 8);
      add_virtual_machine_sensors(s);
      for (const Program& p : adequacy_programs(rng, 4)) {
        AdequacyReport r = check_adequacy(s, p);
        ++runs;
        events += r.verdicts.size();
        fields_checked += r.stats.fields_checked;
        if (r.stats.alignment_violations > 0) {
          suite.properties.detail = "alignment: scenario " + std::to_string(i) + ", " +
                                    r.stats.first_violation;
        }
        if (!r.ok()) {
          const auto& v = r.verdicts[*r.first_mismatch];
          o.pass = false;
          o.detail = "scenario " + std::to_string(i) + ", main " + to_string(p.main) +
                     ", event " + std::to_string(v.event) + ": " + to_string(v.operational) +
                     " vs " + to_string(v.denotational);
          return;
        }
      }
      dags.emplace_back(dag_from_scenario(s), s);
    }
    o.pass = true;
    o.detail = std::to_string(runs) + " runs, " + std::to_string(events) + " events equal";
  });
  std::string alignment = suite.properties.detail;
  suite.properties = timed([&](Outcome& o) {
    if (!alignment.empty()) {
      o.detail = alignment;
      return;
    }
    Program obstacle = load("def f(s) { infinity } def g(s) { distance-to(s) }", true);
    EventDAG rounds = four_round_dag();
    std::map<EventId, SensorState> readings;
    for (EventId e = 0; e < rounds.size(); ++e)
      readings[e].local["sns-num"] = num(rounds.events[e].device);
    auto rounds_sensors = table_sensors(readings);
    std::string err = obstacle_restriction(rounds, *rounds_sensors, obstacle);
    if (err.empty()) err = rep_on_source(rounds, *rounds_sensors);
    for (std::size_t i = 0; err.empty() && i < dags.size(); ++i) {
      auto sensors = scenario_sensors(dags[i].second);
      err = obstacle_restriction(dags[i].first, *sensors, obstacle);
      if (err.empty()) err = rep_on_source(dags[i].first, *sensors);
      if (!err.empty()) err = "scenario " + std::to_string(i) + ": " + err;
    }
    o.pass = err.empty() && (dags.empty() || fields_checked > 0);
    o.detail = err.empty() ? std::to_string(fields_checked) +
                                 " field denotations aligned; restriction and rep-on-source hold on " +
                                 std::to_string(dags.size() + 1) + " structures"
                           : err;
  });
  return suite;
}

Outcome check_self_stabilisation() {
  return timed([](Outcome& o) {
    std::vector<std::pair<DeviceId, Point>> line;
    for (DeviceId d = 0; d < 5; ++d) line.push_back({d, {static_cast<double>(d), 0}});
    Scenario s = static_scenario(line, 1.5, 20);
    auto oracle = shortest_paths(s, 0);
    std::map<DeviceId, double> got;
    for (const auto& f : run_scenario(s, load("distance-to(uid() = 0)", true)).fires)
      got[f.device] = *as_number(f.tree->root.local());
    bool line_ok = true;
    std::vector<double> values;
    for (DeviceId d = 0; d < 5; ++d) {
      values.push_back(got[d]);
      line_ok = line_ok && std::abs(got[d] - oracle[d]) <= 1e-9;
    }

    std::vector<std::pair<DeviceId, Point>> tree = {
        {0, {0, 0}}, {1, {-1, -1}}, {2, {1, -1}}, {3, {-2, -2}},
        {4, {-1, -2}}, {5, {1, -2}}, {6, {2, -2}}};
    Scenario t = static_scenario(tree, 1.5, 20);
    const double hops[] = {0, 1, 1, 2, 2, 2, 2};
    double total = 0;
    for (DeviceId d = 0; d < 7; ++d) {
      t.sensors[d]["sns-num"].steps = {{Timestamp{0}, num(hops[d])}};
      total += d;
    }
    double root = 0;
    for (const auto& f : run_scenario(t, load("converge-sum(sns-num(), uid())", true)).fires)
      if (f.device == 0) root = *as_number(f.tree->root.local());
    o.pass = line_ok && root == total;
    o.detail = "line " + join(values) + "; tree root " + join({root}) + " of " + join({total});
  });
}

Outcome check_dag_validation() {
  return timed([](Outcome& o) {
    auto props = [](const EventDAG& d) {
      std::set<int> out;
      for (const auto& v : dag_violations(d)) out.insert(v.property);
      return out;
    };
    EventDAG base = four_round_dag();
    std::vector<std::string> bad;
    if (!props(base).empty()) bad.push_back("base structure rejected");
    EventDAG cyc = base;
    cyc.link(3, 9);
    if (props(cyc) != std::set<int>{1}) bad.push_back("cycle not caught as property 1");
    EventDAG two = base;
    two.link(kGreen, 1);
    if (props(two) != std::set<int>{2}) bad.push_back("duplicate device not caught as property 2");
    EventDAG succ = base;
    auto& n = succ.neighbours[12];
    n.erase(std::remove(n.begin(), n.end(), EventId{8}), n.end());
    succ.link(12, 0);
    if (props(succ) != std::set<int>{3}) bad.push_back("double successor not caught as property 3");
    o.pass = bad.empty();
    o.detail = bad.empty() ? "base passes; 3 mutations caught" : bad.front();
  });
}

}  // namespace fieldcalc::testing
