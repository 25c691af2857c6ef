#include "fieldcalc/denot.hpp"

#include <algorithm>
#include <unordered_map>

#include "fieldcalc/errors.hpp"

namespace fieldcalc {

namespace {

class ScenarioSensors : public EventSensors {
 public:
  explicit ScenarioSensors(const Scenario& s) : s_(s) {}

  SensorState at(const EventDAG& dag, EventId e) const override {
    const Event& ev = dag.events.at(e);
    SensorState st = s_.local_sensors(ev.device, ev.time);
    NbrField range;
    auto here = s_.position(ev.device, ev.time);
    if (here) {
      for (EventId x : dag.neighbours.at(e)) {
        const Event& n = dag.events[x];
        if (n.device == ev.device) continue;
        auto there = s_.position(n.device, n.time);
        if (there) range.entries.emplace(n.device, make_num(distance(*here, *there)));
      }
    }
    range.entries[ev.device] = make_num(0);
    st.neighbour["nbr-range"] = std::move(range);
    return st;
  }

 private:
  Scenario s_;
};

class TableSensors : public EventSensors {
 public:
  explicit TableSensors(std::map<EventId, SensorState> t) : t_(std::move(t)) {}

  SensorState at(const EventDAG& dag, EventId e) const override {
    auto it = t_.find(e);
    SensorState st = it == t_.end() ? SensorState{} : it->second;
    const Event& ev = dag.events.at(e);
    if (!st.neighbour.count("nbr-range") && ev.position) {
      NbrField range;
      for (EventId x : dag.neighbours.at(e)) {
        const Event& n = dag.events[x];
        if (n.device != ev.device && n.position)
          range.entries.emplace(n.device, make_num(distance(*ev.position, *n.position)));
      }
      range.entries[ev.device] = make_num(0);
      st.neighbour["nbr-range"] = std::move(range);
    }
    return st;
  }

 private:
  std::map<EventId, SensorState> t_;
};

NbrField restrict_field(const NbrField& f, const std::vector<DeviceId>& devs) {
  NbrField out;
  for (DeviceId d : devs) {
    auto it = f.entries.find(d);
    if (it != f.entries.end()) out.entries.emplace_hint(out.entries.end(), d, it->second);
  }
  return out;
}

}  // namespace

std::unique_ptr<EventSensors> scenario_sensors(const Scenario& s) {
  return std::make_unique<ScenarioSensors>(s);
}

std::unique_ptr<EventSensors> table_sensors(std::map<EventId, SensorState> table) {
  return std::make_unique<TableSensors>(std::move(table));
}

class Denotation::Impl {
 public:
  Impl(const EventDAG& dag, const Program& program, const EventSensors& sensors, DenotOptions o)
      : dag_(dag), program_(program), sensors_(sensors), opts_(o), fuel_(o.fuel) {}

  FieldEvolution eval(const EventSet& D, const Assumptions& X, const ExprPtr& e) {
    if (--fuel_ < 0) throw FuelExhausted("denotational evaluation ran out of fuel");
    FieldEvolution r;
    if (e->is_local_value()) {
      r = constant(D, Value::local(e));
    } else {
      r = std::visit([&](const auto& n) { return rule(D, X, e, n); }, e->variant());
    }
    if (opts_.check_alignment) check(D, e, r);
    return r;
  }

  FieldEvolution apply(const ExprPtr& fn, const std::vector<FieldEvolution>& args,
                       const EventSet& D) {
    if (D.empty()) return {};
    if (const auto* b = fn->as<expr::Builtin>()) {
      return builtin_denot(b->name, D, [&](EventId e) { return context(D, e); }, args);
    }
    const std::vector<Name>* params = nullptr;
    ExprPtr body;
    if (const auto* d = fn->as<expr::DefName>()) {
      const Declaration* decl = program_.find(d->name);
      if (!decl) throw EvalError("unknown function '" + d->name + "'");
      params = &decl->params;
      body = decl->body;
    } else if (const auto* l = fn->as<expr::Lambda>()) {
      params = &l->params;
      body = l->body;
    } else {
      throw EvalError("applying a non-function value " + to_string(fn));
    }
    if (params->size() != args.size())
      throw ArityError("function " + to_string(fn) + " expects " +
                       std::to_string(params->size()) + " arguments, got " +
                       std::to_string(args.size()));
    Assumptions inner;
    for (std::size_t i = 0; i < args.size(); ++i) inner[(*params)[i]] = args[i];
    return eval(D, inner, body);
  }

  FieldEvolution restrict(const FieldEvolution& f, const EventSet& D) const {
    FieldEvolution out;
    for (EventId e : D) {
      const Value& v = f.at(e);
      if (v.is_field()) {
        out.values.emplace_hint(out.values.end(), e,
                                Value::field(restrict_field(v.field(), dag_devices(D, e))));
      } else {
        out.values.emplace_hint(out.values.end(), e, v);
      }
    }
    return out;
  }

  DenotStats stats;

 private:
  std::vector<DeviceId> dag_devices(const EventSet& D, EventId e) const {
    return devices_in(dag_, D, e);
  }

  const SensorState& sensors_at(EventId e) {
    auto it = sensor_cache_.find(e);
    if (it == sensor_cache_.end()) it = sensor_cache_.emplace(e, sensors_.at(dag_, e)).first;
    return it->second;
  }

  class Isolated : public FunctionApplier {
   public:
    Isolated(Impl& impl, EventId e) : impl_(impl), e_(e) {}
    Value apply(const ExprPtr& fn, const std::vector<Value>& args) override {
      EventSet one{e_};
      std::vector<FieldEvolution> evs;
      for (const auto& a : args) evs.push_back(constant(one, a));
      return impl_.apply(fn, evs, one).at(e_);
    }

   private:
    Impl& impl_;
    EventId e_;
  };

  BuiltinContext context(const EventSet& D, EventId e) {
    BuiltinContext ctx;
    ctx.self = dag_.events.at(e).device;
    ctx.neighbours = dag_devices(D, e);
    ctx.sensors = &sensors_at(e);
    auto& iso = isolated_[e];
    if (!iso) iso = std::make_unique<Isolated>(*this, e);
    ctx.applier = iso.get();
    return ctx;
  }

  void check(const EventSet& D, const ExprPtr& e, const FieldEvolution& r) {
    for (const auto& [ev, v] : r.values) {
      if (!v.is_field()) continue;
      ++stats.fields_checked;
      auto devs = dag_devices(D, ev);
      bool ok = v.field().entries.size() == devs.size();
      if (ok) {
        auto it = v.field().entries.begin();
        for (DeviceId d : devs) ok = ok && (it++)->first == d;
      }
      if (!ok && stats.alignment_violations++ == 0)
        stats.first_violation = "field of " + to_string(e) + " at event " + std::to_string(ev) +
                                " has domain " + to_string(v);
    }
  }

  const Value& lookup(const Assumptions& X, const Name& x, EventId e) {
    auto it = X.find(x);
    if (it == X.end()) throw EvalError("unbound variable '" + x + "'");
    return it->second.at(e);
  }

  template <class T>
  FieldEvolution rule(const EventSet&, const Assumptions&, const ExprPtr& e, const T&) {
    throw EvalError("no denotation for " + to_string(e));
  }

  FieldEvolution rule(const EventSet& D, const Assumptions& X, const ExprPtr&,
                      const expr::Var& n) {
    auto it = X.find(n.name);
    if (it == X.end()) throw EvalError("unbound variable '" + n.name + "'");
    return restrict(it->second, D);
  }

  FieldEvolution rule(const EventSet& D, const Assumptions&, const ExprPtr&,
                      const expr::FieldLit& n) {
    FieldEvolution out;
    for (EventId e : D)
      out.values.emplace_hint(out.values.end(), e,
                              Value::field(restrict_field(*n.field, dag_devices(D, e))));
    return out;
  }

  FieldEvolution rule(const EventSet& D, const Assumptions& X, const ExprPtr& e,
                      const expr::Lambda&) {
    // An open lambda denotes, at each event, the closure obtained by
    // substituting the free variables' local values there.
    FieldEvolution out;
    for (EventId ev : D) {
      std::map<Name, Value> sub;
      for (const auto& y : e->free_vars()) {
        const Value& v = lookup(X, y, ev);
        if (v.is_field())
          throw EvalError("free variable '" + y + "' of a function holds a field");
        sub[y] = v;
      }
      out.values.emplace_hint(out.values.end(), ev, Value::local(substitute(e, sub)));
    }
    return out;
  }

  FieldEvolution rule(const EventSet& D, const Assumptions& X, const ExprPtr&,
                      const expr::Data& n) {
    std::vector<FieldEvolution> args;
    for (const auto& a : n.args) args.push_back(eval(D, X, a));
    FieldEvolution out;
    for (EventId e : D) {
      std::vector<ExprPtr> xs;
      for (const auto& a : args) {
        const Value& v = a.at(e);
        if (v.is_field()) throw EvalError("constructor argument evaluated to a field");
        xs.push_back(v.local());
      }
      out.values.emplace_hint(out.values.end(), e, Value::local(make_data(n.ctor, std::move(xs))));
    }
    return out;
  }

  FieldEvolution rule(const EventSet& D, const Assumptions& X, const ExprPtr&,
                      const expr::Nbr& n) {
    FieldEvolution body = eval(D, X, n.body);
    FieldEvolution out;
    for (EventId e : D) {
      NbrField f;
      for (DeviceId d : dag_devices(D, e)) {
        EventId at = *latest_event(dag_, e, d);
        const Value& v = body.at(at);
        if (v.is_field()) throw EvalError("nbr body evaluated to a field");
        f.entries.emplace_hint(f.entries.end(), d, v.local());
      }
      out.values.emplace_hint(out.values.end(), e, Value::field(std::move(f)));
    }
    return out;
  }

  FieldEvolution rule(const EventSet& D, const Assumptions& X, const ExprPtr&,
                      const expr::Rep& n) {
    FieldEvolution init = eval(D, X, n.init);
    FieldEvolution cur = init;
    Assumptions inner = X;
    for (std::size_t round = 0; round <= D.size() + 1; ++round) {
      FieldEvolution shifted;
      for (EventId e : D) {
        auto p = prev_event(dag_, e);
        const Value& v = p && contains(D, *p) ? cur.at(*p) : init.at(e);
        shifted.values.emplace_hint(shifted.values.end(), e, v);
      }
      inner[n.var] = std::move(shifted);
      FieldEvolution next = eval(D, inner, n.body);
      if (next == cur) return next;
      cur = std::move(next);
    }
    throw EvalError("rep denotation did not stabilise");
  }

  FieldEvolution rule(const EventSet& D, const Assumptions& X, const ExprPtr&,
                      const expr::Apply& n) {
    std::vector<FieldEvolution> args;
    for (const auto& a : n.args) args.push_back(eval(D, X, a));
    FieldEvolution fn = eval(D, X, n.fn);

    // Group events by function tag; builtins keep the whole domain.
    std::unordered_map<ExprPtr, EventSet, ExprHash, ExprEq> clusters;
    std::vector<ExprPtr> order;
    for (EventId e : D) {
      const Value& f = fn.at(e);
      if (f.is_field()) throw EvalError("function position evaluated to a field");
      auto [it, fresh] = clusters.try_emplace(f.local());
      if (fresh) order.push_back(f.local());
      it->second.push_back(e);
    }
    FieldEvolution out;
    for (const auto& tag : order) {
      const EventSet& C = clusters.at(tag);
      FieldEvolution part;
      if (tag->is<expr::Builtin>()) {
        std::vector<FieldEvolution> sub;
        for (const auto& a : args) {
          FieldEvolution s;
          for (EventId e : C) s.values.emplace_hint(s.values.end(), e, a.at(e));
          sub.push_back(std::move(s));
        }
        const Name& name = tag->as<expr::Builtin>()->name;
        part = builtin_denot(name, C, [&](EventId e) { return context(D, e); }, sub);
      } else {
        std::vector<FieldEvolution> sub;
        for (const auto& a : args) sub.push_back(restrict(a, C));
        part = apply(tag, sub, C);
      }
      out.values.merge(part.values);
    }
    return out;
  }

  const EventDAG& dag_;
  const Program& program_;
  const EventSensors& sensors_;
  DenotOptions opts_;
  std::int64_t fuel_;
  std::unordered_map<EventId, SensorState> sensor_cache_;
  std::unordered_map<EventId, std::unique_ptr<Isolated>> isolated_;
};

Denotation::Denotation(const EventDAG& dag, const Program& program, const EventSensors& sensors,
                       DenotOptions opts)
    : impl_(std::make_unique<Impl>(dag, program, sensors, opts)) {}

Denotation::~Denotation() = default;

FieldEvolution Denotation::eval(const EventSet& domain, const Assumptions& env, const ExprPtr& e) {
  return impl_->eval(domain, env, e);
}

FieldEvolution Denotation::apply(const ExprPtr& fn, const std::vector<FieldEvolution>& args,
                                 const EventSet& domain) {
  return impl_->apply(fn, args, domain);
}

FieldEvolution Denotation::restrict(const FieldEvolution& f, const EventSet& domain) const {
  return impl_->restrict(f, domain);
}

const DenotStats& Denotation::stats() const { return impl_->stats; }

FieldEvolution denot_eval(const EventDAG& dag, const EventSet& domain, const Assumptions& env,
                          const ExprPtr& e, const Program& program, const EventSensors& sensors,
                          DenotOptions opts) {
  Denotation d(dag, program, sensors, opts);
  return d.eval(domain, env, e);
}

EventSet cluster_of(const FieldEvolution& fn, const EventSet& domain, EventId at) {
  const Value& tag = fn.at(at);
  if (!tag.is_field() && tag.local()->is<expr::Builtin>()) return domain;
  EventSet out;
  for (EventId e : domain)
    if (fn.at(e) == tag) out.push_back(e);
  return out;
}

RestrictionReport check_restriction(const EventDAG& dag, const Program& program,
                                    const EventSensors& sensors, const EventSet& domain,
                                    const Assumptions& env, const ExprPtr& fn_expr,
                                    const std::vector<ExprPtr>& args,
                                    const std::vector<ExprPtr>& args_perturbed, EventId at) {
  Denotation d(dag, program, sensors);
  RestrictionReport rep;
  rep.cluster = cluster_of(d.eval(domain, env, fn_expr), domain, at);
  rep.premise_holds = args.size() == args_perturbed.size();
  for (std::size_t i = 0; rep.premise_holds && i < args.size(); ++i) {
    auto a = d.restrict(d.eval(domain, env, args[i]), rep.cluster);
    auto b = d.restrict(d.eval(domain, env, args_perturbed[i]), rep.cluster);
    rep.premise_holds = a == b;
  }
  auto r1 = d.restrict(d.eval(domain, env, make_apply(fn_expr, args)), rep.cluster);
  auto r2 = d.restrict(d.eval(domain, env, make_apply(fn_expr, args_perturbed)), rep.cluster);
  rep.property_holds = r1 == r2;
  if (!rep.property_holds) {
    for (const auto& [e, v] : r1.values) {
      if (!(r2.at(e) == v)) {
        rep.detail = "event " + std::to_string(e) + ": " + to_string(v) + " vs " +
                     to_string(r2.at(e));
        break;
      }
    }
  }
  return rep;
}

EventSet source_events(const EventDAG& dag, const EventSet& domain) {
  EventSet out;
  for (EventId e : domain) {
    bool any = false;
    for (EventId x : dag.neighbours.at(e)) any = any || contains(domain, x);
    if (!any) out.push_back(e);
  }
  return out;
}

std::vector<EventId> check_rep_on_source(const EventDAG& dag, const Program& program,
                                         const EventSensors& sensors, const EventSet& domain,
                                         const Assumptions& env, const ExprPtr& rep_expr) {
  const auto* r = rep_expr->as<expr::Rep>();
  if (!r) throw std::invalid_argument("check_rep_on_source needs a rep expression");
  Denotation d(dag, program, sensors);
  auto lhs = d.eval(domain, env, rep_expr);
  auto rhs = d.eval(domain, env, make_apply(make_lambda({r->var}, r->body), {r->init}));
  std::vector<EventId> bad;
  for (EventId e : source_events(dag, domain))
    if (!(lhs.at(e) == rhs.at(e))) bad.push_back(e);
  return bad;
}

}  // namespace fieldcalc
