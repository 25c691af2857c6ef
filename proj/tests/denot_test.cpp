#include <gtest/gtest.h>

#include <limits>

#include "fieldcalc/denot.hpp"
#include "fieldcalc/parser.hpp"
#include "fixtures.hpp"

namespace fc = fieldcalc;
using fc::testing::four_round_dag;
using fc::testing::kGreen;

namespace {

fc::Value num(double x) { return fc::Value::local(fc::make_num(x)); }
fc::Value boolean(bool b) { return fc::Value::local(fc::make_bool(b)); }

fc::FieldEvolution by_device(const fc::EventDAG& dag, auto f) {
  fc::FieldEvolution out;
  for (fc::EventId e = 0; e < dag.size(); ++e) out.values[e] = f(dag.events[e].device);
  return out;
}

struct FourRounds {
  fc::EventDAG dag = four_round_dag();
  std::unique_ptr<fc::EventSensors> sensors = fc::table_sensors({});

  fc::FieldEvolution eval(const fc::Program& p, const std::string& src,
                          const fc::Assumptions& env = {}, fc::DenotOptions o = {}) {
    std::vector<fc::Name> defs;
    for (const auto& d : p.decls) defs.push_back(d.name);
    return fc::denot_eval(dag, dag.all(), env, fc::parse_expr(src, true, defs), p, *sensors, o);
  }
};

}  // namespace

TEST(Denot, LocalValueIsConstant) {
  FourRounds f;
  auto r = f.eval({}, "42");
  EXPECT_EQ(r, fc::constant(f.dag.all(), num(42)));
}

TEST(Denot, UidIsTheEventDevice) {
  FourRounds f;
  auto r = f.eval({}, "uid()");
  EXPECT_EQ(r, by_device(f.dag, [](fc::DeviceId d) { return num(d); }));
}

TEST(Denot, NbrAtGreenEventCollectsNeighbours) {
  FourRounds f;
  auto r = f.eval({}, "nbr{uid()}");
  fc::NbrField want;
  for (fc::DeviceId d : {2, 3, 4}) want.entries[d] = fc::make_num(d);
  EXPECT_EQ(r.at(kGreen), fc::Value::field(want));
}

TEST(Denot, CounterCountsSameDeviceHistory) {
  FourRounds f;
  auto r = f.eval({}, "rep(0) { (x) => +(x, 1) }");
  for (fc::EventId e = 0; e < f.dag.size(); ++e) {
    int depth = 1;
    for (auto p = fc::prev_event(f.dag, e); p; p = fc::prev_event(f.dag, *p)) ++depth;
    EXPECT_EQ(r.at(e), num(depth)) << "event " << e;
  }
  // Device 2 reboots at its third fire.
  EXPECT_EQ(r.at(9), num(1));
  EXPECT_EQ(r.at(13), num(2));
}

TEST(Denot, VariablesFollowAssumptions) {
  FourRounds f;
  fc::Assumptions env{{"x", by_device(f.dag, [](fc::DeviceId d) { return num(10 * d); })}};
  auto r = f.eval({}, "x + 1", env);
  EXPECT_EQ(r.at(kGreen), num(31));
}

TEST(Denot, BranchesSplitTheDomain) {
  FourRounds f;
  auto r = f.eval({}, "if (uid() < 3) { sum-hood(nbr{1}) } else { sum-hood(nbr{1}) }");
  // At the green event only device 4 shares the else branch.
  EXPECT_EQ(r.at(kGreen), num(2));
  EXPECT_EQ(r.at(13), num(2));
}

TEST(Denot, AlignmentHoldsOnFourRounds) {
  FourRounds f;
  auto p = fc::testing::load("", true);
  fc::DenotOptions o;
  o.check_alignment = true;
  fc::Denotation d(f.dag, p, *f.sensors, o);
  d.eval(f.dag.all(), {}, fc::parse_expr("distance-to(uid() = 4)", false, {"distance-to"}));
  EXPECT_GT(d.stats().fields_checked, 0);
  EXPECT_EQ(d.stats().alignment_violations, 0) << d.stats().first_violation;
}

TEST(Denot, ClusterOfLambdaTag) {
  FourRounds f;
  auto fns = f.eval({}, "mux(uid() < 3, (x) => x, (x) => +(x, 1))");
  EXPECT_EQ(fc::cluster_of(fns, f.dag.all(), kGreen),
            (fc::EventSet{2, 3, 6, 7, 10, 11, 14, 15}));
  auto builtin = f.eval({}, "mux(uid() < 3, +, -)");
  EXPECT_EQ(fc::cluster_of(builtin, f.dag.all(), kGreen), f.dag.all());
}

TEST(Denot, RestrictionOnObstacleProgram) {
  FourRounds f;
  auto p = fc::testing::load("def f(s) { infinity } def g(s) { distance-to(s) }", true);
  auto avoid = by_device(f.dag, [](fc::DeviceId d) { return boolean(d == 1); });
  auto source = by_device(f.dag, [](fc::DeviceId d) { return boolean(d == 4); });
  auto moved = by_device(f.dag, [](fc::DeviceId d) { return boolean(d == 4 || d == 1); });
  fc::Assumptions env{{"avoid", avoid}, {"source", source}, {"moved", moved}};
  std::vector<fc::Name> defs{"f", "g", "distance-to"};
  auto fn = fc::parse_expr("mux(avoid, f, g)", true, defs);
  auto rep = fc::check_restriction(f.dag, p, *f.sensors, f.dag.all(), env, fn,
                                   {fc::make_var("source")}, {fc::make_var("moved")}, kGreen);
  EXPECT_EQ(rep.cluster.size(), 12u);
  EXPECT_TRUE(rep.premise_holds);
  EXPECT_TRUE(rep.property_holds) << rep.detail;

  auto inside = by_device(f.dag, [](fc::DeviceId d) { return boolean(d == 3); });
  env["inside"] = inside;
  auto changed = fc::check_restriction(f.dag, p, *f.sensors, f.dag.all(), env, fn,
                                       {fc::make_var("source")}, {fc::make_var("inside")}, kGreen);
  EXPECT_FALSE(changed.premise_holds);
}

TEST(Denot, ObstacleDistancesInsideCluster) {
  FourRounds f;
  auto p = fc::testing::load("def f(s) { infinity } def g(s) { distance-to(s) }", true);
  fc::Assumptions env{{"avoid", by_device(f.dag, [](fc::DeviceId d) { return boolean(d == 1); })},
                      {"source", by_device(f.dag, [](fc::DeviceId d) { return boolean(d == 4); })}};
  auto r = f.eval(p, "mux(avoid, f, g)(source)", env);
  EXPECT_EQ(r.at(12), num(std::numeric_limits<double>::infinity()));
  EXPECT_EQ(r.at(15), num(0));
  EXPECT_EQ(r.at(kGreen), num(1));
}

TEST(Denot, RepMatchesItsBodyOnSources) {
  FourRounds f;
  auto p = fc::testing::load("", true);
  auto sources = fc::source_events(f.dag, f.dag.all());
  EXPECT_EQ(sources, (fc::EventSet{0, 1, 2, 3}));
  for (const char* src : {"rep(0) { (x) => +(x, 1) }", "rep(uid()) { (x) => min-hood(nbr{x}) }"}) {
    auto e = fc::parse_expr(src);
    EXPECT_TRUE(fc::check_rep_on_source(f.dag, p, *f.sensors, f.dag.all(), {}, e).empty()) << src;
  }
}

TEST(Denot, RestrictDropsDevicesOutsideDomain) {
  FourRounds f;
  fc::Program p;
  fc::Denotation d(f.dag, p, *f.sensors);
  auto nb = d.eval(f.dag.all(), {}, fc::parse_expr("nbr{uid()}"));
  auto cut = d.restrict(nb, {6, 7, kGreen});
  ASSERT_EQ(cut.domain(), (fc::EventSet{6, 7, kGreen}));
  EXPECT_EQ(cut.at(kGreen).field().entries.size(), 2u);
  EXPECT_FALSE(cut.at(kGreen).field().entries.count(2));
}
