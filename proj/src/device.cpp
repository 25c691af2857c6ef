#include "fieldcalc/device.hpp"

namespace fieldcalc {

TreePtr make_tree(Value root, std::vector<TreePtr> children) {
  return std::make_shared<const ValueTree>(ValueTree{std::move(root), std::move(children)});
}

bool tree_equal(const TreePtr& a, const TreePtr& b) {
  if (a == b) return true;
  if (!a || !b || !(a->root == b->root) || a->children.size() != b->children.size())
    return false;
  for (std::size_t i = 0; i < a->children.size(); ++i)
    if (!tree_equal(a->children[i], b->children[i])) return false;
  return true;
}

NbrField roots(const VTEnv& env) {
  NbrField f;
  for (const auto& [d, t] : env) {
    if (t->root.is_field())
      throw MalformedEnv("device " + std::to_string(d) + " holds a field where a local value is expected");
    f.entries.emplace_hint(f.entries.end(), d, t->root.local());
  }
  return f;
}

VTEnv project(const VTEnv& env, std::size_t i) {
  VTEnv out;
  for (const auto& [d, t] : env)
    if (i >= 1 && i <= t->children.size()) out.emplace_hint(out.end(), d, t->children[i - 1]);
  return out;
}

VTEnv project_fn(const VTEnv& env, const ExprPtr& fn) {
  VTEnv out;
  for (const auto& [d, t] : env) {
    const auto& cs = t->children;
    if (cs.size() < 2) continue;
    const Value& r = cs[cs.size() - 2]->root;
    if (!r.is_field() && syntactic_equal(r.local(), fn)) out.emplace_hint(out.end(), d, cs.back());
  }
  return out;
}

namespace {

class Evaluator : public FunctionApplier {
 public:
  Evaluator(const Program& p, DeviceId self, const SensorState& sensors, const EvalOptions& o)
      : program_(p), self_(self), sensors_(sensors), fuel_(o.fuel), rng_(o.rng) {}

  TreePtr eval(const ExprPtr& e, const VTEnv& env) {
    if (--fuel_ < 0) throw FuelExhausted("evaluation ran out of fuel");
    if (e->is_value()) {
      if (const auto* f = e->as<expr::FieldLit>()) {
        NbrField r;
        for (const auto& [d, v] : f->field->entries)
          if (d == self_ || env.count(d)) r.entries.emplace_hint(r.entries.end(), d, v);
        return make_tree(Value::field(std::move(r)));
      }
      return make_tree(Value::local(e));
    }
    return std::visit([&](const auto& n) { return rule(e, n, env); }, e->variant());
  }

  Value apply(const ExprPtr& fn, const std::vector<Value>& args) override {
    std::vector<ExprPtr> xs;
    for (const auto& a : args) xs.push_back(a.to_expr());
    return eval(make_apply(fn, std::move(xs)), VTEnv{})->root;
  }

 private:
  template <class T>
  TreePtr rule(const ExprPtr& e, const T&, const VTEnv&) {
    throw EvalError("cannot evaluate open expression " + to_string(e));
  }

  const ExprPtr& local_root(const TreePtr& t, const char* what) {
    if (t->root.is_field()) throw EvalError(std::string(what) + " evaluated to a field");
    return t->root.local();
  }

  TreePtr rule(const ExprPtr&, const expr::Data& n, const VTEnv& env) {
    std::vector<TreePtr> kids;
    std::vector<ExprPtr> args;
    for (std::size_t i = 0; i < n.args.size(); ++i) {
      kids.push_back(eval(n.args[i], project(env, i + 1)));
      args.push_back(local_root(kids.back(), "constructor argument"));
    }
    return make_tree(Value::local(make_data(n.ctor, std::move(args))), std::move(kids));
  }

  TreePtr rule(const ExprPtr&, const expr::Apply& n, const VTEnv& env) {
    std::vector<TreePtr> kids;
    std::vector<Value> args;
    const std::size_t k = n.args.size();
    for (std::size_t i = 0; i < k; ++i) {
      kids.push_back(eval(n.args[i], project(env, i + 1)));
      args.push_back(kids.back()->root);
    }
    kids.push_back(eval(n.fn, project(env, k + 1)));
    const ExprPtr& fv = local_root(kids.back(), "function position");

    if (const auto* b = fv->as<expr::Builtin>()) {
      BuiltinContext ctx;
      ctx.self = self_;
      for (const auto& [d, t] : env) ctx.neighbours.push_back(d);
      ctx.sensors = &sensors_;
      ctx.applier = this;
      ctx.rng = rng_;
      Value v = builtin_eval(b->name, ctx, args);
      return make_tree(std::move(v), std::move(kids));
    }

    const std::vector<Name>* params = nullptr;
    ExprPtr body;
    if (const auto* d = fv->as<expr::DefName>()) {
      const Declaration* decl = program_.find(d->name);
      if (!decl) throw EvalError("unknown function '" + d->name + "'");
      params = &decl->params;
      body = decl->body;
    } else if (const auto* l = fv->as<expr::Lambda>()) {
      params = &l->params;
      body = l->body;
    } else {
      throw EvalError("applying a non-function value " + to_string(fv));
    }
    if (params->size() != k)
      throw ArityError("function " + to_string(fv) + " expects " +
                       std::to_string(params->size()) + " arguments, got " + std::to_string(k));
    ExprPtr inst = substitute(body, *params, args);
    kids.push_back(eval(inst, project_fn(env, fv)));
    Value root = kids.back()->root;
    return make_tree(std::move(root), std::move(kids));
  }

  TreePtr rule(const ExprPtr&, const expr::Rep& n, const VTEnv& env) {
    TreePtr init = eval(n.init, project(env, 1));
    VTEnv inner = project(env, 2);
    Value prev = init->root;
    if (env.count(self_)) {
      auto it = inner.find(self_);
      if (it == inner.end())
        throw MalformedEnv("own previous tree lacks the rep state at device " +
                           std::to_string(self_));
      prev = it->second->root;
    }
    TreePtr body = eval(substitute(n.body, {n.var}, {prev}), inner);
    Value root = body->root;
    return make_tree(std::move(root), {init, body});
  }

  TreePtr rule(const ExprPtr&, const expr::Nbr& n, const VTEnv& env) {
    VTEnv inner = project(env, 1);
    TreePtr body = eval(n.body, inner);
    NbrField f = roots(inner);
    f.entries[self_] = local_root(body, "nbr body");
    return make_tree(Value::field(std::move(f)), {body});
  }

  const Program& program_;
  DeviceId self_;
  const SensorState& sensors_;
  std::int64_t fuel_;
  std::mt19937_64* rng_;
};

}  // namespace

TreePtr eval(const Program& program, DeviceId self, const SensorState& sensors, const VTEnv& env,
             const ExprPtr& e, const EvalOptions& opts) {
  Evaluator ev(program, self, sensors, opts);
  return ev.eval(e, env);
}

}  // namespace fieldcalc
