#include "fieldcalc/typer.hpp"

#include <algorithm>
#include <atomic>
#include <unordered_map>

#include "fieldcalc/builtins.hpp"

namespace fieldcalc {

TypeError::TypeError(std::string rule, std::string message, Span span)
    : std::runtime_error("[" + rule + "] " + message),
      rule_(std::move(rule)),
      detail_(std::move(message)),
      span_(span) {}

Diagnostic TypeError::diagnostic(const std::string& path) const {
  return Diagnostic{path, span_, "error", detail_, rule_};
}

namespace {

std::atomic<int> g_next_var{1 << 20};

struct UnifyFail {
  std::string message;
};

class Inferencer {
 public:
  TypePtr fresh(Sort s) { return t_var(g_next_var++, s); }

  TypePtr resolve(TypePtr t) const {
    while (const auto* v = t->as<ty::Var>()) {
      auto it = sub_.find(v->id);
      if (it == sub_.end()) break;
      t = it->second;
    }
    return t;
  }

  TypePtr zonk(const TypePtr& t) const {
    TypePtr r = resolve(t);
    return std::visit(
        [&](const auto& n) -> TypePtr {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, ty::Var>) {
            return r;
          } else if constexpr (std::is_same_v<T, ty::Con>) {
            if (n.args.empty()) return r;
            std::vector<TypePtr> args;
            for (const auto& a : n.args) args.push_back(zonk(a));
            return t_con(n.name, std::move(args));
          } else if constexpr (std::is_same_v<T, ty::Arrow>) {
            std::vector<TypePtr> ps;
            for (const auto& p : n.params) ps.push_back(zonk(p));
            return t_arrow(std::move(ps), zonk(n.ret));
          } else {
            return t_field(zonk(n.inner));
          }
        },
        r->variant());
  }

  void unify(const TypePtr& x, const TypePtr& y) {
    TypePtr a = resolve(x), b = resolve(y);
    const auto* va = a->as<ty::Var>();
    const auto* vb = b->as<ty::Var>();
    if (va && vb) {
      if (va->id == vb->id) return;
      Sort m = sort_meet(va->sort, vb->sort);
      if (m == va->sort) {
        sub_[vb->id] = a;
      } else if (m == vb->sort) {
        sub_[va->id] = b;
      } else {
        TypePtr c = fresh(m);
        sub_[va->id] = c;
        sub_[vb->id] = c;
      }
      return;
    }
    if (va) return bind(*va, b);
    if (vb) return bind(*vb, a);
    if (const auto* ca = a->as<ty::Con>()) {
      const auto* cb = b->as<ty::Con>();
      if (!cb || ca->name != cb->name || ca->args.size() != cb->args.size()) mismatch(a, b);
      for (std::size_t i = 0; i < ca->args.size(); ++i) unify(ca->args[i], cb->args[i]);
      return;
    }
    if (const auto* aa = a->as<ty::Arrow>()) {
      const auto* ab = b->as<ty::Arrow>();
      if (!ab || aa->params.size() != ab->params.size()) mismatch(a, b);
      for (std::size_t i = 0; i < aa->params.size(); ++i) unify(aa->params[i], ab->params[i]);
      unify(aa->ret, ab->ret);
      return;
    }
    const auto* fa = a->as<ty::Field>();
    const auto* fb = b->as<ty::Field>();
    if (!fb) mismatch(a, b);
    unify(fa->inner, fb->inner);
  }

  // Restricts `t` to types admissible in sort `k`.
  void narrow(const TypePtr& t, Sort k) {
    TypePtr r = resolve(t);
    if (const auto* v = r->as<ty::Var>()) {
      Sort m = sort_meet(v->sort, k);
      if (m != v->sort) sub_[v->id] = fresh(m);
      return;
    }
    if (r->as<ty::Field>()) {
      if (k == Sort::Local || k == Sort::LocalReturn)
        throw UnifyFail{"field type " + to_string(zonk(r)) + " where a local type is required"};
      return;
    }
    if (const auto* a = r->as<ty::Arrow>()) {
      if (k == Sort::Return || k == Sort::LocalReturn) {
        try {
          narrow(a->ret, Sort::LocalReturn);
        } catch (const UnifyFail&) {
          throw UnifyFail{"function type " + to_string(zonk(r)) +
                          " returns a field where a local return type is required"};
        }
      }
    }
  }

  TypePtr instantiate(const TypeScheme& s) {
    std::unordered_map<int, TypePtr> ren;
    for (int q : s.quantified) ren[q] = nullptr;
    return rename(s.body, ren);
  }

  TypeScheme generalize(const TypePtr& t) const {
    TypePtr z = zonk(t);
    TypeScheme s{{}, z};
    collect(z, s.quantified);
    return s;
  }

 private:
  TypePtr rename(const TypePtr& t, std::unordered_map<int, TypePtr>& ren) {
    return std::visit(
        [&](const auto& n) -> TypePtr {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, ty::Var>) {
            auto it = ren.find(n.id);
            if (it == ren.end()) return t;
            if (!it->second) it->second = fresh(n.sort);
            return it->second;
          } else if constexpr (std::is_same_v<T, ty::Con>) {
            if (n.args.empty()) return t;
            std::vector<TypePtr> args;
            for (const auto& a : n.args) args.push_back(rename(a, ren));
            return t_con(n.name, std::move(args));
          } else if constexpr (std::is_same_v<T, ty::Arrow>) {
            std::vector<TypePtr> ps;
            for (const auto& p : n.params) ps.push_back(rename(p, ren));
            return t_arrow(std::move(ps), rename(n.ret, ren));
          } else {
            return t_field(rename(n.inner, ren));
          }
        },
        t->variant());
  }

  static void collect(const TypePtr& t, std::vector<int>& out) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, ty::Var>) {
            if (std::find(out.begin(), out.end(), n.id) == out.end()) out.push_back(n.id);
          } else if constexpr (std::is_same_v<T, ty::Con>) {
            for (const auto& a : n.args) collect(a, out);
          } else if constexpr (std::is_same_v<T, ty::Arrow>) {
            for (const auto& p : n.params) collect(p, out);
            collect(n.ret, out);
          } else {
            collect(n.inner, out);
          }
        },
        t->variant());
  }

  bool occurs(int id, const TypePtr& t) const {
    TypePtr r = resolve(t);
    return std::visit(
        [&](const auto& n) -> bool {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, ty::Var>) {
            return n.id == id;
          } else if constexpr (std::is_same_v<T, ty::Con>) {
            return std::any_of(n.args.begin(), n.args.end(),
                               [&](const TypePtr& a) { return occurs(id, a); });
          } else if constexpr (std::is_same_v<T, ty::Arrow>) {
            return occurs(id, n.ret) ||
                   std::any_of(n.params.begin(), n.params.end(),
                               [&](const TypePtr& p) { return occurs(id, p); });
          } else {
            return occurs(id, n.inner);
          }
        },
        r->variant());
  }

  void bind(const ty::Var& v, const TypePtr& t) {
    if (occurs(v.id, t))
      throw UnifyFail{"infinite type: " + to_string(t_var(v.id, v.sort)) + " occurs in " +
                      to_string(zonk(t))};
    narrow(t, v.sort);
    sub_[v.id] = t;
  }

  [[noreturn]] void mismatch(const TypePtr& a, const TypePtr& b) const {
    throw UnifyFail{"cannot match " + to_string(zonk(a)) + " with " + to_string(zonk(b))};
  }

  std::unordered_map<int, TypePtr> sub_;
};

class Checker {
 public:
  explicit Checker(Inferencer& inf) : inf_(inf) {}

  TypePtr infer(const TypeEnv& env, const ExprPtr& e) {
    return std::visit([&](const auto& n) { return rule(env, e, n); }, e->variant());
  }

  void unify_at(const char* rule, const Span& span, const TypePtr& a, const TypePtr& b) {
    try {
      inf_.unify(a, b);
    } catch (const UnifyFail& f) {
      throw TypeError(rule, f.message, span);
    }
  }

 private:
  TypePtr rule(const TypeEnv& env, const ExprPtr& e, const expr::Var& n) {
    auto it = env.vars.find(n.name);
    if (it == env.vars.end()) throw TypeError("T-VAR", "unbound variable '" + n.name + "'", e->span());
    return it->second;
  }

  TypePtr rule(const TypeEnv& env, const ExprPtr& e, const expr::FieldLit& n) {
    TypePtr s = inf_.fresh(Sort::LocalReturn);
    for (const auto& [d, v] : n.field->entries) unify_at("T-VAL", e->span(), infer(env, v), s);
    return t_field(s);
  }

  TypePtr rule(const TypeEnv& env, const ExprPtr& e, const expr::Data& n) {
    auto scheme = constructor_scheme(n.ctor);
    if (!scheme) throw TypeError("T-VAL", "unknown constructor '" + n.ctor + "'", e->span());
    TypePtr t = inf_.instantiate(*scheme);
    const auto* arrow = t->as<ty::Arrow>();
    if (arrow->params.size() != n.args.size())
      throw TypeError("T-VAL",
                      "constructor '" + n.ctor + "' expects " +
                          std::to_string(arrow->params.size()) + " arguments, got " +
                          std::to_string(n.args.size()),
                      e->span());
    for (std::size_t i = 0; i < n.args.size(); ++i)
      unify_at("T-VAL", n.args[i]->span(), infer(env, n.args[i]), arrow->params[i]);
    return arrow->ret;
  }

  TypePtr rule(const TypeEnv&, const ExprPtr& e, const expr::Builtin& n) {
    auto scheme = builtin_scheme(n.name);
    if (!scheme) throw TypeError("T-N-FUN", "unknown builtin '" + n.name + "'", e->span());
    return inf_.instantiate(*scheme);
  }

  TypePtr rule(const TypeEnv& env, const ExprPtr& e, const expr::DefName& n) {
    auto it = env.functions.find(n.name);
    if (it == env.functions.end())
      throw TypeError("T-N-FUN", "function '" + n.name + "' is not declared before this use",
                      e->span());
    return inf_.instantiate(it->second);
  }

  TypePtr rule(const TypeEnv& env, const ExprPtr& e, const expr::Lambda& n) {
    TypeEnv inner = env;
    std::vector<TypePtr> params;
    for (const auto& p : n.params) {
      params.push_back(inf_.fresh(Sort::Any));
      inner.vars[p] = params.back();
    }
    TypePtr body = infer(inner, n.body);
    TypePtr ret = inf_.fresh(Sort::Return);
    unify_at("T-A-FUN", n.body->span(), body, ret);
    for (const auto& y : e->free_vars()) {
      auto it = env.vars.find(y);
      if (it == env.vars.end()) continue;
      try {
        inf_.narrow(it->second, Sort::Local);
      } catch (const UnifyFail&) {
        throw TypeError("T-A-FUN",
                        "free variable '" + y + "' of a function has non-local type " +
                            to_string(inf_.zonk(it->second)),
                        e->span());
      }
    }
    return t_arrow(std::move(params), ret);
  }

  TypePtr rule(const TypeEnv& env, const ExprPtr& e, const expr::Apply& n) {
    TypePtr fn;
    if (const auto* b = n.fn->as<expr::Builtin>(); b && b->name == "map-hood") {
      auto scheme = builtin_scheme(b->name, n.args.size());
      if (!scheme)
        throw TypeError("T-N-FUN", "map-hood takes a function and one to four fields",
                        e->span());
      fn = inf_.instantiate(*scheme);
    } else {
      fn = infer(env, n.fn);
    }
    std::vector<TypePtr> args;
    for (const auto& a : n.args) args.push_back(infer(env, a));
    TypePtr ret = inf_.fresh(Sort::Return);
    TypePtr f = inf_.resolve(fn);
    if (const auto* arrow = f->as<ty::Arrow>(); arrow && arrow->params.size() != args.size())
      throw TypeError("T-APP",
                      "function expects " + std::to_string(arrow->params.size()) +
                          " arguments, got " + std::to_string(args.size()),
                      e->span());
    unify_at("T-APP", e->span(), fn, t_arrow(std::move(args), ret));
    return ret;
  }

  TypePtr rule(const TypeEnv& env, const ExprPtr& e, const expr::Rep& n) {
    TypePtr s = inf_.fresh(Sort::LocalReturn);
    unify_at("T-REP", n.init->span().line ? n.init->span() : e->span(), infer(env, n.init), s);
    TypeEnv inner = env;
    inner.vars[n.var] = s;
    unify_at("T-REP", e->span(), infer(inner, n.body), s);
    return s;
  }

  TypePtr rule(const TypeEnv& env, const ExprPtr& e, const expr::Nbr& n) {
    TypePtr body = infer(env, n.body);
    unify_at("T-NBR", e->span(), body, inf_.fresh(Sort::LocalReturn));
    return t_field(body);
  }

  Inferencer& inf_;
};

TypeScheme check_decl(Inferencer& inf, const std::map<Name, TypeScheme>& known,
                      const Declaration& d) {
  Checker c(inf);
  TypeEnv env;
  env.functions = known;
  std::vector<TypePtr> params;
  for (const auto& p : d.params) {
    params.push_back(inf.fresh(Sort::Any));
    env.vars[p] = params.back();
  }
  TypePtr ret = inf.fresh(Sort::Return);
  TypePtr self = t_arrow(params, ret);
  env.functions[d.name] = TypeScheme{{}, self};
  c.unify_at("T-FUNCTION", d.span, c.infer(env, d.body), ret);
  return inf.generalize(self);
}

}  // namespace

TypePtr infer(const TypeEnv& env, const ExprPtr& e) {
  Inferencer inf;
  Checker c(inf);
  return inf.zonk(c.infer(env, e));
}

std::map<Name, TypeScheme> typecheck_decls(const std::vector<Declaration>& decls) {
  Inferencer inf;
  std::map<Name, TypeScheme> known;
  for (const auto& d : decls) known[d.name] = check_decl(inf, known, d);
  return known;
}

TypeScheme typecheck_program(const Program& p) {
  Inferencer inf;
  std::map<Name, TypeScheme> known;
  for (const auto& d : p.decls) known[d.name] = check_decl(inf, known, d);
  Checker c(inf);
  TypeEnv env;
  env.functions = known;
  TypePtr t = c.infer(env, p.main);
  try {
    inf.narrow(t, Sort::Local);
  } catch (const UnifyFail& f) {
    throw TypeError("T-PROGRAM", "main expression must have a local type: " + f.message,
                    p.main->span());
  }
  return inf.generalize(t);
}

TypeScheme typecheck_unit(const SourceUnit& u) {
  if (u.main) return typecheck_program(Program{u.decls, u.main});
  if (u.decls.empty()) throw TypeError("T-PROGRAM", "empty program", Span{});
  return typecheck_decls(u.decls).at(u.decls.back().name);
}

bool value_has_type(const Value& v, const TypePtr& t, const TypeEnv& env) {
  Inferencer inf;
  Checker c(inf);
  try {
    TypePtr vt = c.infer(env, v.to_expr());
    TypeScheme all = inf.generalize(t);
    inf.unify(vt, inf.instantiate(all));
    return true;
  } catch (const TypeError&) {
    return false;
  } catch (const UnifyFail&) {
    return false;
  }
}

bool type_in_sort(const TypePtr& t, Sort s) {
  Inferencer inf;
  try {
    inf.narrow(t, s);
    return true;
  } catch (const UnifyFail&) {
    return false;
  }
}

namespace {

bool match(const TypePtr& g, const TypePtr& t, const std::vector<int>& quantified,
           std::map<int, TypePtr>& bound) {
  if (const auto* v = g->as<ty::Var>()) {
    if (std::find(quantified.begin(), quantified.end(), v->id) == quantified.end())
      return type_equal(g, t);
    auto it = bound.find(v->id);
    if (it != bound.end()) return type_equal(it->second, t);
    const auto* tv = t->as<ty::Var>();
    if (tv ? !sort_leq(tv->sort, v->sort) : !type_in_sort(t, v->sort)) return false;
    bound.emplace(v->id, t);
    return true;
  }
  if (const auto* c = g->as<ty::Con>()) {
    const auto* d = t->as<ty::Con>();
    if (!d || d->name != c->name || d->args.size() != c->args.size()) return false;
    for (std::size_t i = 0; i < c->args.size(); ++i)
      if (!match(c->args[i], d->args[i], quantified, bound)) return false;
    return true;
  }
  if (const auto* a = g->as<ty::Arrow>()) {
    const auto* b = t->as<ty::Arrow>();
    if (!b || b->params.size() != a->params.size()) return false;
    for (std::size_t i = 0; i < a->params.size(); ++i)
      if (!match(a->params[i], b->params[i], quantified, bound)) return false;
    return match(a->ret, b->ret, quantified, bound);
  }
  const auto* t2 = t->as<ty::Field>();
  return t2 && match(g->as<ty::Field>()->inner, t2->inner, quantified, bound);
}

}  // namespace

bool instance_of(const TypeScheme& specific, const TypeScheme& general) {
  std::map<int, TypePtr> bound;
  return match(general.body, specific.body, general.quantified, bound);
}

}  // namespace fieldcalc
