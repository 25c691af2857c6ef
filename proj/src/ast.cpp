#include "fieldcalc/ast.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

namespace fieldcalc {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t str_hash(const std::string& s) { return std::hash<std::string>{}(s); }

void merge_into(std::vector<Name>& out, const std::vector<Name>& in) {
  if (in.empty()) return;
  std::vector<Name> merged;
  merged.reserve(out.size() + in.size());
  std::set_union(out.begin(), out.end(), in.begin(), in.end(), std::back_inserter(merged));
  out = std::move(merged);
}

void erase_names(std::vector<Name>& names, const std::vector<Name>& bound) {
  std::erase_if(names, [&](const Name& n) {
    return std::find(bound.begin(), bound.end(), n) != bound.end();
  });
}

bool field_equal(const NbrField& a, const NbrField& b) {
  if (a.entries.size() != b.entries.size()) return false;
  auto it = b.entries.begin();
  for (const auto& [d, v] : a.entries) {
    if (d != it->first || !syntactic_equal(v, it->second)) return false;
    ++it;
  }
  return true;
}

}  // namespace

Node::Node(Variant v, Span span) : v_(std::move(v)), span_(span) {
  std::visit(
      [this](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, expr::Var>) {
          hash_ = mix(1, str_hash(n.name));
          free_ = {n.name};
        } else if constexpr (std::is_same_v<T, expr::FieldLit>) {
          hash_ = 2;
          for (const auto& [d, e] : n.field->entries) hash_ = mix(mix(hash_, d), e->hash());
          value_ = true;
          has_field_ = true;
        } else if constexpr (std::is_same_v<T, expr::Data>) {
          hash_ = mix(3, str_hash(n.ctor));
          value_ = true;
          for (const auto& a : n.args) {
            hash_ = mix(hash_, a->hash());
            merge_into(free_, a->free_vars());
            value_ = value_ && a->is_local_value();
            has_field_ = has_field_ || a->has_field();
          }
        } else if constexpr (std::is_same_v<T, expr::Builtin>) {
          hash_ = mix(4, str_hash(n.name));
          value_ = true;
        } else if constexpr (std::is_same_v<T, expr::DefName>) {
          hash_ = mix(5, str_hash(n.name));
          value_ = true;
        } else if constexpr (std::is_same_v<T, expr::Lambda>) {
          hash_ = 6;
          for (const auto& p : n.params) hash_ = mix(hash_, str_hash(p));
          hash_ = mix(hash_, n.body->hash());
          free_ = n.body->free_vars();
          erase_names(free_, n.params);
          value_ = free_.empty();
          has_field_ = n.body->has_field();
        } else if constexpr (std::is_same_v<T, expr::Apply>) {
          hash_ = mix(7, n.fn->hash());
          free_ = n.fn->free_vars();
          has_field_ = n.fn->has_field();
          for (const auto& a : n.args) {
            hash_ = mix(hash_, a->hash());
            merge_into(free_, a->free_vars());
            has_field_ = has_field_ || a->has_field();
          }
        } else if constexpr (std::is_same_v<T, expr::Rep>) {
          hash_ = mix(mix(mix(8, n.init->hash()), str_hash(n.var)), n.body->hash());
          free_ = n.body->free_vars();
          erase_names(free_, {n.var});
          merge_into(free_, n.init->free_vars());
          has_field_ = n.init->has_field() || n.body->has_field();
        } else if constexpr (std::is_same_v<T, expr::Nbr>) {
          hash_ = mix(9, n.body->hash());
          free_ = n.body->free_vars();
          has_field_ = n.body->has_field();
        }
      },
      v_);
}

ExprPtr make_var(Name name, Span span) {
  return std::make_shared<Node>(expr::Var{std::move(name)}, span);
}
ExprPtr make_field(NbrField field, Span span) {
  return std::make_shared<Node>(
      expr::FieldLit{std::make_shared<const NbrField>(std::move(field))}, span);
}
ExprPtr make_data(Name ctor, std::vector<ExprPtr> args, Span span) {
  std::optional<double> number;
  if (args.empty()) number = parse_numeral(ctor);
  return std::make_shared<Node>(expr::Data{std::move(ctor), std::move(args), number}, span);
}
ExprPtr make_num(double value, Span span) {
  return std::make_shared<Node>(expr::Data{numeral_text(value), {}, value}, span);
}
ExprPtr make_bool(bool value, Span span) {
  return std::make_shared<Node>(expr::Data{value ? "True" : "False", {}, std::nullopt}, span);
}
ExprPtr make_builtin(Name name, Span span) {
  return std::make_shared<Node>(expr::Builtin{std::move(name)}, span);
}
ExprPtr make_def(Name name, Span span) {
  return std::make_shared<Node>(expr::DefName{std::move(name)}, span);
}
ExprPtr make_lambda(std::vector<Name> params, ExprPtr body, Span span) {
  return std::make_shared<Node>(expr::Lambda{std::move(params), std::move(body)}, span);
}
ExprPtr make_apply(ExprPtr fn, std::vector<ExprPtr> args, Span span) {
  return std::make_shared<Node>(expr::Apply{std::move(fn), std::move(args)}, span);
}
ExprPtr make_rep(ExprPtr init, Name var, ExprPtr body, Span span) {
  return std::make_shared<Node>(expr::Rep{std::move(init), std::move(var), std::move(body)},
                                span);
}
ExprPtr make_nbr(ExprPtr body, Span span) {
  return std::make_shared<Node>(expr::Nbr{std::move(body)}, span);
}

std::string numeral_text(double value) {
  if (std::isnan(value)) return "NaN";
  if (std::isinf(value)) return value > 0 ? "infinity" : "-infinity";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_numeral(const std::string& text) {
  if (text == "infinity") return std::numeric_limits<double>::infinity();
  if (text == "-infinity") return -std::numeric_limits<double>::infinity();
  if (text == "NaN") return std::numeric_limits<double>::quiet_NaN();
  if (text.empty()) return std::nullopt;
  char c = text[0] == '-' ? (text.size() > 1 ? text[1] : 'x') : text[0];
  if (!(c >= '0' && c <= '9')) return std::nullopt;
  double v = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

std::optional<double> as_number(const ExprPtr& e) {
  if (const auto* d = e->as<expr::Data>()) return d->number;
  return std::nullopt;
}

std::optional<bool> as_bool(const ExprPtr& e) {
  if (const auto* d = e->as<expr::Data>(); d && d->args.empty()) {
    if (d->ctor == "True") return true;
    if (d->ctor == "False") return false;
  }
  return std::nullopt;
}

bool syntactic_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->hash() != b->hash()) return false;
  if (a->variant().index() != b->variant().index()) return false;
  auto all_equal = [](const std::vector<ExprPtr>& x, const std::vector<ExprPtr>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!syntactic_equal(x[i], y[i])) return false;
    return true;
  };
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const T& y = std::get<T>(b->variant());
        if constexpr (std::is_same_v<T, expr::Var>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, expr::FieldLit>) {
          return field_equal(*x.field, *y.field);
        } else if constexpr (std::is_same_v<T, expr::Data>) {
          return x.ctor == y.ctor && all_equal(x.args, y.args);
        } else if constexpr (std::is_same_v<T, expr::Builtin> ||
                             std::is_same_v<T, expr::DefName>) {
          return x.name == y.name;
        } else if constexpr (std::is_same_v<T, expr::Lambda>) {
          return x.params == y.params && syntactic_equal(x.body, y.body);
        } else if constexpr (std::is_same_v<T, expr::Apply>) {
          return syntactic_equal(x.fn, y.fn) && all_equal(x.args, y.args);
        } else if constexpr (std::is_same_v<T, expr::Rep>) {
          return x.var == y.var && syntactic_equal(x.init, y.init) &&
                 syntactic_equal(x.body, y.body);
        } else {
          return syntactic_equal(x.body, y.body);
        }
      },
      a->variant());
}

Value Value::local(ExprPtr e) {
  if (!e || !e->is_local_value())
    throw std::invalid_argument("not a local value: " + (e ? to_string(e) : "<null>"));
  Value v;
  v.local_ = std::move(e);
  return v;
}

Value Value::field(NbrField f) {
  return field(std::make_shared<const NbrField>(std::move(f)));
}

Value Value::field(std::shared_ptr<const NbrField> f) {
  Value v;
  v.field_ = std::move(f);
  return v;
}

const ExprPtr& Value::local() const {
  if (!local_) throw std::logic_error("field value used as local value");
  return local_;
}

const NbrField& Value::field() const {
  if (!field_) throw std::logic_error("local value used as field value");
  return *field_;
}

ExprPtr Value::to_expr() const {
  if (field_) return std::make_shared<Node>(expr::FieldLit{field_}, Span{});
  return local_;
}

bool operator==(const Value& a, const Value& b) {
  if (a.is_field() != b.is_field()) return false;
  if (a.is_field()) return a.field_ == b.field_ || field_equal(*a.field_, *b.field_);
  return syntactic_equal(a.local_, b.local_);
}

Value value_of(const ExprPtr& value_expr) {
  if (const auto* f = value_expr->as<expr::FieldLit>()) return Value::field(f->field);
  return Value::local(value_expr);
}

const Declaration* Program::find(const Name& name) const {
  for (const auto& d : decls)
    if (d.name == name) return &d;
  return nullptr;
}

namespace {

bool mentions_any(const ExprPtr& e, const std::map<Name, Value>& sub) {
  const auto& fv = e->free_vars();
  if (fv.empty()) return false;
  for (const auto& n : fv)
    if (sub.count(n)) return true;
  return false;
}

ExprPtr subst(const ExprPtr& e, const std::map<Name, Value>& sub) {
  if (!mentions_any(e, sub)) return e;
  return std::visit(
      [&](const auto& n) -> ExprPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, expr::Var>) {
          return sub.at(n.name).to_expr();
        } else if constexpr (std::is_same_v<T, expr::Data>) {
          std::vector<ExprPtr> args;
          for (const auto& a : n.args) args.push_back(subst(a, sub));
          return make_data(n.ctor, std::move(args), e->span());
        } else if constexpr (std::is_same_v<T, expr::Lambda>) {
          bool shadows = std::any_of(n.params.begin(), n.params.end(),
                                     [&](const Name& p) { return sub.count(p) > 0; });
          if (!shadows) return make_lambda(n.params, subst(n.body, sub), e->span());
          std::map<Name, Value> inner = sub;
          for (const auto& p : n.params) inner.erase(p);
          return make_lambda(n.params, subst(n.body, inner), e->span());
        } else if constexpr (std::is_same_v<T, expr::Apply>) {
          std::vector<ExprPtr> args;
          for (const auto& a : n.args) args.push_back(subst(a, sub));
          return make_apply(subst(n.fn, sub), std::move(args), e->span());
        } else if constexpr (std::is_same_v<T, expr::Rep>) {
          ExprPtr init = subst(n.init, sub);
          if (!sub.count(n.var)) return make_rep(init, n.var, subst(n.body, sub), e->span());
          std::map<Name, Value> inner = sub;
          inner.erase(n.var);
          return make_rep(init, n.var, subst(n.body, inner), e->span());
        } else if constexpr (std::is_same_v<T, expr::Nbr>) {
          return make_nbr(subst(n.body, sub), e->span());
        } else {
          return e;
        }
      },
      e->variant());
}

}  // namespace

ExprPtr substitute(const ExprPtr& e, const std::map<Name, Value>& sub) { return subst(e, sub); }

ExprPtr substitute(const ExprPtr& e, const std::vector<Name>& names,
                   const std::vector<Value>& values) {
  if (names.size() != values.size()) throw std::invalid_argument("substitute: arity mismatch");
  std::map<Name, Value> sub;
  for (std::size_t i = 0; i < names.size(); ++i) sub[names[i]] = values[i];
  return subst(e, sub);
}

ExprPtr desugar_if(ExprPtr guard, ExprPtr then_branch, ExprPtr else_branch, Span span) {
  auto thunk = [&](bool tag, ExprPtr body) {
    auto pair = make_data("Pair", {make_bool(tag, span), std::move(body)}, span);
    return make_lambda({}, make_apply(make_builtin("snd", span), {pair}, span), span);
  };
  auto sel = make_apply(make_builtin("mux", span),
                        {std::move(guard), thunk(true, std::move(then_branch)),
                         thunk(false, std::move(else_branch))},
                        span);
  return make_apply(sel, {}, span);
}

namespace {

void print(std::ostream& os, const ExprPtr& e, bool strict);

void print_list(std::ostream& os, const std::vector<ExprPtr>& xs, bool strict) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) os << ", ";
    print(os, xs[i], strict);
  }
}

void print(std::ostream& os, const ExprPtr& e, bool strict) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, expr::Var>) {
          os << n.name;
        } else if constexpr (std::is_same_v<T, expr::FieldLit>) {
          if (strict) throw std::invalid_argument("field values have no source syntax");
          os << "[";
          bool first = true;
          for (const auto& [d, v] : n.field->entries) {
            if (!first) os << ", ";
            first = false;
            os << d << "->";
            print(os, v, strict);
          }
          os << "]";
        } else if constexpr (std::is_same_v<T, expr::Data>) {
          os << n.ctor;
          if (!n.args.empty()) {
            os << "(";
            print_list(os, n.args, strict);
            os << ")";
          }
        } else if constexpr (std::is_same_v<T, expr::Builtin> ||
                             std::is_same_v<T, expr::DefName>) {
          os << n.name;
        } else if constexpr (std::is_same_v<T, expr::Lambda>) {
          os << "(";
          for (std::size_t i = 0; i < n.params.size(); ++i) os << (i ? ", " : "") << n.params[i];
          os << ") => ";
          print(os, n.body, strict);
        } else if constexpr (std::is_same_v<T, expr::Apply>) {
          bool wrap = n.fn->template is<expr::Lambda>() || n.fn->template is<expr::Data>();
          if (wrap) os << "(";
          print(os, n.fn, strict);
          if (wrap) os << ")";
          os << "(";
          print_list(os, n.args, strict);
          os << ")";
        } else if constexpr (std::is_same_v<T, expr::Rep>) {
          os << "rep(";
          print(os, n.init, strict);
          os << "){(" << n.var << ") => ";
          print(os, n.body, strict);
          os << "}";
        } else {
          os << "nbr{";
          print(os, n.body, strict);
          os << "}";
        }
      },
      e->variant());
}

}  // namespace

std::string to_string(const ExprPtr& e) {
  std::ostringstream os;
  print(os, e, false);
  return os.str();
}

std::string to_string(const Value& v) { return to_string(v.to_expr()); }

std::string pretty_print(const ExprPtr& e) {
  std::ostringstream os;
  print(os, e, true);
  return os.str();
}

std::string pretty_print(const Program& p) {
  std::ostringstream os;
  for (const auto& d : p.decls) {
    os << "def " << d.name << "(";
    for (std::size_t i = 0; i < d.params.size(); ++i) os << (i ? ", " : "") << d.params[i];
    os << ") {\n  ";
    print(os, d.body, true);
    os << "\n}\n\n";
  }
  if (p.main) {
    print(os, p.main, true);
    os << "\n";
  }
  return os.str();
}

}  // namespace fieldcalc
