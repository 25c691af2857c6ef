#include "fieldcalc/builtins.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <mutex>

namespace fieldcalc {

bool contains(const EventSet& set, EventId e) {
  return std::binary_search(set.begin(), set.end(), e);
}

const Value& FieldEvolution::at(EventId e) const {
  auto it = values.find(e);
  if (it == values.end())
    throw EvalError("evolution undefined at event " + std::to_string(e));
  return it->second;
}

EventSet FieldEvolution::domain() const {
  EventSet out;
  out.reserve(values.size());
  for (const auto& [e, v] : values) out.push_back(e);
  return out;
}

FieldEvolution constant(const EventSet& domain, const Value& v) {
  FieldEvolution f;
  for (EventId e : domain) f.values.emplace_hint(f.values.end(), e, v);
  return f;
}

std::vector<DeviceId> BuiltinContext::field_domain() const {
  std::vector<DeviceId> dom = neighbours;
  if (std::find(dom.begin(), dom.end(), self) == dom.end()) dom.push_back(self);
  std::sort(dom.begin(), dom.end());
  return dom;
}

namespace {

using Impl = Value (*)(const BuiltinContext&, const std::vector<Value>&);

struct Entry {
  const char* name;
  const char* scheme;
  bool pure;
  Impl impl;
};

[[noreturn]] void mismatch(const char* op, const std::string& what) {
  throw EvalError(std::string(op) + ": expected " + what);
}

double num(const char* op, const Value& v) {
  if (!v.is_field())
    if (auto n = as_number(v.local())) return *n;
  mismatch(op, "a number, got " + to_string(v));
}

bool boolean(const char* op, const Value& v) {
  if (!v.is_field())
    if (auto b = as_bool(v.local())) return *b;
  mismatch(op, "a boolean, got " + to_string(v));
}

const expr::Data& data(const char* op, const Value& v, const char* ctor) {
  if (!v.is_field())
    if (const auto* d = v.local()->as<expr::Data>(); d && d->ctor == ctor) return *d;
  mismatch(op, std::string(ctor) + " value, got " + to_string(v));
}

const NbrField& field_arg(const char* op, const BuiltinContext& ctx, const Value& v) {
  if (!v.is_field()) mismatch(op, "a field, got " + to_string(v));
  const NbrField& f = v.field();
  auto dom = ctx.field_domain();
  bool ok = f.entries.size() == dom.size();
  if (ok) {
    auto it = f.entries.begin();
    for (DeviceId d : dom) ok = ok && (it++)->first == d;
  }
  if (!ok) {
    std::string msg = std::string(op) + ": field domain {";
    for (const auto& [d, x] : f.entries) msg += " " + std::to_string(d);
    msg += " } differs from environment domain {";
    for (DeviceId d : dom) msg += " " + std::to_string(d);
    throw DomainError(msg + " }");
  }
  return f;
}

void arity(const char* op, const std::vector<Value>& args, std::size_t n) {
  if (args.size() != n)
    throw ArityError(std::string(op) + ": expected " + std::to_string(n) + " arguments, got " +
                     std::to_string(args.size()));
}

Value numv(double d) { return Value::local(make_num(d)); }
Value boolv(bool b) { return Value::local(make_bool(b)); }

Value min_of(const char* op, const NbrField& f, std::optional<DeviceId> exclude) {
  const ExprPtr* best = nullptr;
  for (const auto& [d, v] : f.entries) {
    if (exclude && d == *exclude) continue;
    if (!best || value_compare(v, *best) < 0) best = &v;
  }
  if (!best) mismatch(op, "a non-empty neighbourhood");
  return Value::local(*best);
}

Value b_plus(const BuiltinContext&, const std::vector<Value>& a) {
  arity("+", a, 2);
  return numv(num("+", a[0]) + num("+", a[1]));
}
Value b_minus(const BuiltinContext&, const std::vector<Value>& a) {
  arity("-", a, 2);
  return numv(num("-", a[0]) - num("-", a[1]));
}
Value b_times(const BuiltinContext&, const std::vector<Value>& a) {
  arity("*", a, 2);
  return numv(num("*", a[0]) * num("*", a[1]));
}
Value b_less(const BuiltinContext&, const std::vector<Value>& a) {
  arity("<", a, 2);
  if (a[0].is_field() || a[1].is_field()) mismatch("<", "local values");
  return boolv(value_compare(a[0].local(), a[1].local()) < 0);
}
Value b_equal(const BuiltinContext&, const std::vector<Value>& a) {
  arity("=", a, 2);
  return boolv(values_equal(a[0], a[1]));
}
Value b_and(const BuiltinContext&, const std::vector<Value>& a) {
  arity("and", a, 2);
  return boolv(boolean("and", a[0]) && boolean("and", a[1]));
}
Value b_mux(const BuiltinContext&, const std::vector<Value>& a) {
  arity("mux", a, 3);
  return boolean("mux", a[0]) ? a[1] : a[2];
}
Value b_fst(const BuiltinContext&, const std::vector<Value>& a) {
  arity("fst", a, 1);
  return Value::local(data("fst", a[0], "Pair").args[0]);
}
Value b_snd(const BuiltinContext&, const std::vector<Value>& a) {
  arity("snd", a, 1);
  return Value::local(data("snd", a[0], "Pair").args[1]);
}
Value b_head(const BuiltinContext&, const std::vector<Value>& a) {
  arity("head", a, 1);
  return Value::local(data("head", a[0], "Cons").args[0]);
}
Value b_tail(const BuiltinContext&, const std::vector<Value>& a) {
  arity("tail", a, 1);
  return Value::local(data("tail", a[0], "Cons").args[1]);
}
Value b_min_hood(const BuiltinContext& ctx, const std::vector<Value>& a) {
  arity("min-hood", a, 1);
  return min_of("min-hood", field_arg("min-hood", ctx, a[0]), std::nullopt);
}
Value b_min_hood_plus(const BuiltinContext& ctx, const std::vector<Value>& a) {
  arity("min-hood+", a, 1);
  const NbrField& f = field_arg("min-hood+", ctx, a[0]);
  if (f.entries.size() > 1) return min_of("min-hood+", f, ctx.self);
  // Only self: numbers yield +infinity, other values fall back to self.
  const ExprPtr& own = f.entries.at(ctx.self);
  if (as_number(own)) return numv(std::numeric_limits<double>::infinity());
  return Value::local(own);
}
Value b_pick_hood(const BuiltinContext& ctx, const std::vector<Value>& a) {
  arity("pick-hood", a, 1);
  const NbrField& f = field_arg("pick-hood", ctx, a[0]);
  auto it = f.entries.begin();
  if (ctx.rng) {
    std::uniform_int_distribution<std::size_t> pick(0, f.entries.size() - 1);
    std::advance(it, pick(*ctx.rng));
  }
  return Value::local(it->second);
}
Value b_sum_hood(const BuiltinContext& ctx, const std::vector<Value>& a) {
  arity("sum-hood", a, 1);
  double s = 0;
  for (const auto& [d, v] : field_arg("sum-hood", ctx, a[0]).entries)
    s += num("sum-hood", Value::local(v));
  return numv(s);
}
Value b_sum_hood_plus(const BuiltinContext& ctx, const std::vector<Value>& a) {
  arity("sum-hood+", a, 1);
  double s = 0;
  for (const auto& [d, v] : field_arg("sum-hood+", ctx, a[0]).entries)
    if (d != ctx.self) s += num("sum-hood+", Value::local(v));
  return numv(s);
}
Value b_map_hood(const BuiltinContext& ctx, const std::vector<Value>& a) {
  if (a.size() < 2 || a.size() > 5) throw ArityError("map-hood: expected 2 to 5 arguments");
  if (a[0].is_field()) mismatch("map-hood", "a function");
  if (!ctx.applier) throw EvalError("map-hood: no function applier available");
  std::vector<const NbrField*> fields;
  for (std::size_t i = 1; i < a.size(); ++i) fields.push_back(&field_arg("map-hood", ctx, a[i]));
  NbrField out;
  for (const auto& [d, v] : fields[0]->entries) {
    std::vector<Value> xs;
    for (const auto* f : fields) xs.push_back(Value::local(f->entries.at(d)));
    Value r = ctx.applier->apply(a[0].local(), xs);
    if (r.is_field()) mismatch("map-hood", "a function returning local values");
    out.entries.emplace(d, r.local());
  }
  return Value::field(std::move(out));
}
Value b_fold_hood(const BuiltinContext& ctx, const std::vector<Value>& a) {
  arity("fold-hood", a, 2);
  if (a[0].is_field()) mismatch("fold-hood", "a function");
  if (!ctx.applier) throw EvalError("fold-hood: no function applier available");
  const NbrField& f = field_arg("fold-hood", ctx, a[1]);
  std::optional<Value> acc;
  for (const auto& [d, v] : f.entries) {
    Value x = Value::local(v);
    acc = acc ? ctx.applier->apply(a[0].local(), {*acc, x}) : x;
  }
  return *acc;
}

const Value& sensor(const char* op, const BuiltinContext& ctx) {
  if (ctx.sensors) {
    auto it = ctx.sensors->local.find(op);
    if (it != ctx.sensors->local.end()) return it->second;
  }
  throw SensorMissing(std::string("sensor '") + op + "' has no reading on device " +
                      std::to_string(ctx.self));
}

Value b_uid(const BuiltinContext& ctx, const std::vector<Value>& a) {
  arity("uid", a, 0);
  return numv(static_cast<double>(ctx.self));
}

template <const char* Op>
Value b_sensor(const BuiltinContext& ctx, const std::vector<Value>& a) {
  arity(Op, a, 0);
  return sensor(Op, ctx);
}

Value b_nbr_range(const BuiltinContext& ctx, const std::vector<Value>& a) {
  arity("nbr-range", a, 0);
  const NbrField* src = nullptr;
  if (ctx.sensors) {
    auto it = ctx.sensors->neighbour.find("nbr-range");
    if (it != ctx.sensors->neighbour.end()) src = &it->second;
  }
  if (!src)
    throw SensorMissing("sensor 'nbr-range' has no reading on device " +
                        std::to_string(ctx.self));
  NbrField out;
  for (DeviceId d : ctx.field_domain()) {
    auto it = src->entries.find(d);
    if (it == src->entries.end())
      throw SensorMissing("nbr-range has no reading for neighbour " + std::to_string(d));
    out.entries.emplace(d, it->second);
  }
  return Value::field(std::move(out));
}

constexpr char kSnsNum[] = "sns-num";
constexpr char kSnsFun[] = "sns-fun";
constexpr char kSnsRange[] = "sns-range";
constexpr char kSnsInjPoint[] = "sns-injection-point";
constexpr char kSnsInjFunction[] = "sns-injected-function";
constexpr char kSnsInjFun[] = "sns-injected-fun";
constexpr char kSnsPatron[] = "sns-patron";

const Entry kEntries[] = {
    {"fst", "forall s1 s2. (pair(s1, s2)) -> s1", true, b_fst},
    {"snd", "forall s1 s2. (pair(s1, s2)) -> s2", true, b_snd},
    {"head", "forall s. (list(s)) -> s", true, b_head},
    {"tail", "forall s. (list(s)) -> list(s)", true, b_tail},
    {"min-hood", "forall s. (field(s)) -> s", true, b_min_hood},
    {"min-hood+", "forall s. (field(s)) -> s", true, b_min_hood_plus},
    {"pick-hood", "forall s. (field(s)) -> s", true, b_pick_hood},
    {"sum-hood", "(field(num)) -> num", true, b_sum_hood},
    {"sum-hood+", "(field(num)) -> num", true, b_sum_hood_plus},
    {"map-hood", nullptr, true, b_map_hood},
    {"fold-hood", "forall s. ((s, s) -> s, field(s)) -> s", true, b_fold_hood},
    {"mux", "forall s. (bool, s, s) -> s", true, b_mux},
    {"and", "(bool, bool) -> bool", true, b_and},
    {"+", "(num, num) -> num", true, b_plus},
    {"-", "(num, num) -> num", true, b_minus},
    {"*", "(num, num) -> num", true, b_times},
    {"<", "forall s. (s, s) -> bool", true, b_less},
    {"=", "forall t. (t, t) -> bool", true, b_equal},
    {"uid", "() -> num", false, b_uid},
    {"nbr-range", "() -> field(num)", false, b_nbr_range},
    {kSnsNum, "() -> num", false, b_sensor<kSnsNum>},
    {kSnsRange, "() -> num", false, b_sensor<kSnsRange>},
    {kSnsFun, "() -> () -> num", false, b_sensor<kSnsFun>},
    {kSnsInjPoint, "() -> bool", false, b_sensor<kSnsInjPoint>},
    {kSnsInjFunction, "() -> () -> num", false, b_sensor<kSnsInjFunction>},
    {kSnsInjFun, "() -> () -> num", false, b_sensor<kSnsInjFun>},
    {kSnsPatron, "() -> bool", false, b_sensor<kSnsPatron>},
};

struct Registry {
  std::map<Name, BuiltinInfo> infos;
  std::map<Name, Impl> impls;
  std::map<Name, TypeScheme> ctors;
  std::mutex mu;

  Registry() {
    for (const auto& e : kEntries) {
      BuiltinInfo info{e.name, e.pure, std::nullopt};
      if (e.scheme) info.scheme = parse_type(e.scheme);
      infos.emplace(e.name, std::move(info));
      impls.emplace(e.name, e.impl);
    }
    ctors.emplace("True", parse_type("() -> bool"));
    ctors.emplace("False", parse_type("() -> bool"));
    ctors.emplace("Pair", parse_type("forall s1 s2. (s1, s2) -> pair(s1, s2)"));
    ctors.emplace("Null", parse_type("forall s. () -> list(s)"));
    ctors.emplace("Cons", parse_type("forall s. (s, list(s)) -> list(s)"));
  }
};

Registry& registry() {
  static Registry r;
  return r;
}

struct Decoration {
  Name base;
  std::vector<bool> promoted;
};

std::optional<Decoration> split_decoration(const Name& name) {
  auto open = name.find('[');
  if (open == std::string::npos || open == 0 || name.back() != ']') return std::nullopt;
  Decoration d{name.substr(0, open), {}};
  std::string body = name.substr(open + 1, name.size() - open - 2);
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (i % 2 == 1) {
      if (body[i] != ',') return std::nullopt;
      continue;
    }
    if (body[i] != 'f' && body[i] != 'l') return std::nullopt;
    d.promoted.push_back(body[i] == 'f');
  }
  if (body.empty() || body.size() % 2 == 0) return std::nullopt;
  if (std::find(d.promoted.begin(), d.promoted.end(), true) == d.promoted.end())
    return std::nullopt;
  return d;
}

TypePtr narrow_all(const TypePtr& t) {
  return std::visit(
      [](const auto& n) -> TypePtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ty::Var>) {
          return t_var(n.id, sort_meet(n.sort, Sort::LocalReturn));
        } else if constexpr (std::is_same_v<T, ty::Con>) {
          std::vector<TypePtr> args;
          for (const auto& a : n.args) args.push_back(narrow_all(a));
          return t_con(n.name, std::move(args));
        } else if constexpr (std::is_same_v<T, ty::Arrow>) {
          std::vector<TypePtr> ps;
          for (const auto& p : n.params) ps.push_back(narrow_all(p));
          return t_arrow(std::move(ps), narrow_all(n.ret));
        } else {
          return t_field(narrow_all(n.inner));
        }
      },
      t->variant());
}

std::optional<TypeScheme> base_scheme(const Name& base) {
  auto& r = registry();
  if (auto it = r.ctors.find(base); it != r.ctors.end()) return it->second;
  if (auto it = r.infos.find(base); it != r.infos.end() && it->second.pure)
    return it->second.scheme;
  return std::nullopt;
}

std::optional<TypeScheme> decorated_scheme(const Decoration& d) {
  auto base = base_scheme(d.base);
  if (!base) return std::nullopt;
  const auto* arrow = base->body->as<ty::Arrow>();
  if (!arrow || arrow->params.size() != d.promoted.size()) return std::nullopt;
  if (arrow->ret->as<ty::Arrow>() || arrow->ret->as<ty::Field>()) return std::nullopt;
  std::vector<TypePtr> params;
  for (std::size_t i = 0; i < d.promoted.size(); ++i) {
    TypePtr p = narrow_all(arrow->params[i]);
    if (p->as<ty::Arrow>() || p->as<ty::Field>()) return std::nullopt;
    params.push_back(d.promoted[i] ? t_field(p) : p);
  }
  return TypeScheme{base->quantified, t_arrow(std::move(params), t_field(narrow_all(arrow->ret)))};
}

TypeScheme map_hood_scheme(std::size_t n) {
  std::string params, fields;
  std::string vars;
  for (std::size_t i = 1; i <= n; ++i) {
    std::string v = "s" + std::to_string(i);
    vars += " " + v;
    params += (i > 1 ? ", " : "") + v;
    fields += ", field(" + v + ")";
  }
  return parse_type("forall" + vars + " s. ((" + params + ") -> s" + fields + ") -> field(s)");
}

}  // namespace

const BuiltinInfo* find_builtin(const Name& name) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  if (auto it = r.infos.find(name); it != r.infos.end()) return &it->second;
  auto dec = split_decoration(name);
  if (!dec) return nullptr;
  auto scheme = decorated_scheme(*dec);
  if (!scheme) return nullptr;
  return &r.infos.emplace(name, BuiltinInfo{name, true, std::move(scheme)}).first->second;
}

bool is_builtin(const Name& name) { return find_builtin(name) != nullptr; }

std::vector<Name> builtin_names() {
  std::vector<Name> out;
  for (const auto& e : kEntries) out.push_back(e.name);
  return out;
}

std::optional<TypeScheme> builtin_scheme(const Name& name, std::optional<std::size_t> call_arity) {
  const BuiltinInfo* info = find_builtin(name);
  if (!info) return std::nullopt;
  if (name == "map-hood") {
    std::size_t n = call_arity && *call_arity >= 2 ? *call_arity - 1 : 1;
    if (n > 4) return std::nullopt;
    return map_hood_scheme(n);
  }
  return info->scheme;
}

bool is_constructor(const Name& name) { return constructor_scheme(name).has_value(); }

std::optional<TypeScheme> constructor_scheme(const Name& name) {
  if (parse_numeral(name)) return parse_type("() -> num");
  auto& r = registry();
  if (auto it = r.ctors.find(name); it != r.ctors.end()) return it->second;
  return std::nullopt;
}

bool is_pure(const Name& builtin) {
  const BuiltinInfo* info = find_builtin(builtin);
  return info && info->pure;
}

Value field_promote_eval(const Name& name, const BuiltinContext& ctx,
                         const std::vector<Value>& args) {
  auto dec = split_decoration(name);
  if (!dec) throw EvalError("not a decorated builtin: " + name);
  if (args.size() != dec->promoted.size())
    throw ArityError(name + ": expected " + std::to_string(dec->promoted.size()) +
                     " arguments, got " + std::to_string(args.size()));
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (dec->promoted[i]) {
      field_arg(name.c_str(), ctx, args[i]);
    } else if (args[i].is_field()) {
      mismatch(name.c_str(), "a local value at position " + std::to_string(i + 1));
    }
  }
  auto& r = registry();
  bool ctor = r.ctors.count(dec->base) > 0;
  Impl impl = ctor ? nullptr : r.impls.at(dec->base);
  NbrField out;
  for (DeviceId d : ctx.field_domain()) {
    std::vector<Value> point;
    for (std::size_t i = 0; i < args.size(); ++i)
      point.push_back(dec->promoted[i] ? Value::local(args[i].field().entries.at(d)) : args[i]);
    if (ctor) {
      std::vector<ExprPtr> xs;
      for (const auto& p : point) xs.push_back(p.local());
      out.entries.emplace(d, make_data(dec->base, std::move(xs)));
    } else {
      BuiltinContext pc = ctx;
      pc.self = d;
      Value v = impl(pc, point);
      out.entries.emplace(d, v.local());
    }
  }
  return Value::field(std::move(out));
}

Value builtin_eval(const Name& name, const BuiltinContext& ctx, const std::vector<Value>& args) {
  auto& r = registry();
  if (auto it = r.impls.find(name); it != r.impls.end()) return it->second(ctx, args);
  if (find_builtin(name)) return field_promote_eval(name, ctx, args);
  throw EvalError("unknown builtin: " + name);
}

FieldEvolution builtin_denot(const Name& name, const EventSet& domain,
                             const std::function<BuiltinContext(EventId)>& context_at,
                             const std::vector<FieldEvolution>& args) {
  FieldEvolution out;
  for (EventId e : domain) {
    std::vector<Value> point;
    point.reserve(args.size());
    for (const auto& a : args) point.push_back(a.at(e));
    out.values.emplace_hint(out.values.end(), e, builtin_eval(name, context_at(e), point));
  }
  return out;
}

namespace {

bool locals_equal(const ExprPtr& a, const ExprPtr& b) {
  const auto* da = a->as<expr::Data>();
  const auto* db = b->as<expr::Data>();
  if (da && db) {
    if (da->number && db->number) {
      if (std::isnan(*da->number) || std::isnan(*db->number)) return false;
      return std::bit_cast<std::uint64_t>(*da->number) == std::bit_cast<std::uint64_t>(*db->number);
    }
    if (da->ctor != db->ctor || da->args.size() != db->args.size()) return false;
    for (std::size_t i = 0; i < da->args.size(); ++i)
      if (!locals_equal(da->args[i], db->args[i])) return false;
    return true;
  }
  if (da || db) return false;
  return syntactic_equal(a, b);
}

}  // namespace

bool values_equal(const Value& a, const Value& b) {
  if (a.is_field() != b.is_field()) return false;
  if (!a.is_field()) return locals_equal(a.local(), b.local());
  const auto& fa = a.field().entries;
  const auto& fb = b.field().entries;
  if (fa.size() != fb.size()) return false;
  for (auto i = fa.begin(), j = fb.begin(); i != fa.end(); ++i, ++j)
    if (i->first != j->first || !locals_equal(i->second, j->second)) return false;
  return true;
}

namespace {

// IEEE totalOrder on the bit patterns.
std::strong_ordering total_order(double a, double b) {
  auto key = [](double d) {
    auto k = std::bit_cast<std::int64_t>(d);
    return k < 0 ? k ^ std::numeric_limits<std::int64_t>::max() : k;
  };
  return key(a) <=> key(b);
}

}  // namespace

std::strong_ordering value_compare(const ExprPtr& a, const ExprPtr& b) {
  const auto* da = a->as<expr::Data>();
  const auto* db = b->as<expr::Data>();
  if (!da || !db) {
    // Identical functions tie; distinct ones have no order.
    if (syntactic_equal(a, b)) return std::strong_ordering::equal;
    throw EvalError("cannot order function values: " + to_string(!da ? a : b));
  }
  if (da->number && db->number) return total_order(*da->number, *db->number);
  if (da->number || db->number) throw EvalError("cannot order a number against a non-number");
  if (auto c = da->ctor <=> db->ctor; c != 0) {
    // False < True and Null < Cons follow from the names.
    return c;
  }
  for (std::size_t i = 0; i < std::min(da->args.size(), db->args.size()); ++i)
    if (auto c = value_compare(da->args[i], db->args[i]); c != 0) return c;
  return da->args.size() <=> db->args.size();
}

}  // namespace fieldcalc
