#include "fieldcalc/types.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace fieldcalc {

char sort_letter(Sort s) {
  switch (s) {
    case Sort::Any: return 't';
    case Sort::Local: return 'l';
    case Sort::Return: return 'r';
    case Sort::LocalReturn: return 's';
  }
  return '?';
}

Sort sort_meet(Sort a, Sort b) {
  if (a == b) return a;
  if (a == Sort::Any) return b;
  if (b == Sort::Any) return a;
  return Sort::LocalReturn;
}

bool sort_leq(Sort a, Sort b) { return sort_meet(a, b) == a; }

TypePtr t_var(int id, Sort sort) { return std::make_shared<TypeNode>(ty::Var{id, sort}); }
TypePtr t_con(std::string name, std::vector<TypePtr> args) {
  return std::make_shared<TypeNode>(ty::Con{std::move(name), std::move(args)});
}
TypePtr t_num() {
  static const TypePtr t = t_con("num");
  return t;
}
TypePtr t_bool() {
  static const TypePtr t = t_con("bool");
  return t;
}
TypePtr t_pair(TypePtr a, TypePtr b) { return t_con("pair", {std::move(a), std::move(b)}); }
TypePtr t_list(TypePtr a) { return t_con("list", {std::move(a)}); }
TypePtr t_arrow(std::vector<TypePtr> params, TypePtr ret) {
  return std::make_shared<TypeNode>(ty::Arrow{std::move(params), std::move(ret)});
}
TypePtr t_field(TypePtr inner) { return std::make_shared<TypeNode>(ty::Field{std::move(inner)}); }

namespace {

template <class Eq>
bool equal_with(const TypePtr& a, const TypePtr& b, Eq&& var_eq) {
  if (a->variant().index() != b->variant().index()) return false;
  if (const auto* va = a->as<ty::Var>()) return var_eq(*va, *b->as<ty::Var>());
  if (const auto* ca = a->as<ty::Con>()) {
    const auto* cb = b->as<ty::Con>();
    if (ca->name != cb->name || ca->args.size() != cb->args.size()) return false;
    for (std::size_t i = 0; i < ca->args.size(); ++i)
      if (!equal_with(ca->args[i], cb->args[i], var_eq)) return false;
    return true;
  }
  if (const auto* aa = a->as<ty::Arrow>()) {
    const auto* ab = b->as<ty::Arrow>();
    if (aa->params.size() != ab->params.size()) return false;
    for (std::size_t i = 0; i < aa->params.size(); ++i)
      if (!equal_with(aa->params[i], ab->params[i], var_eq)) return false;
    return equal_with(aa->ret, ab->ret, var_eq);
  }
  return equal_with(a->as<ty::Field>()->inner, b->as<ty::Field>()->inner, var_eq);
}

void collect_vars(const TypePtr& t, std::vector<ty::Var>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ty::Var>) {
          auto same = [&](const ty::Var& v) { return v.id == n.id; };
          if (std::find_if(out.begin(), out.end(), same) == out.end()) out.push_back(n);
        } else if constexpr (std::is_same_v<T, ty::Con>) {
          for (const auto& a : n.args) collect_vars(a, out);
        } else if constexpr (std::is_same_v<T, ty::Arrow>) {
          for (const auto& p : n.params) collect_vars(p, out);
          collect_vars(n.ret, out);
        } else {
          collect_vars(n.inner, out);
        }
      },
      t->variant());
}

using Names = std::map<int, std::string>;

Names name_vars(const TypePtr& t) {
  std::vector<ty::Var> vars;
  collect_vars(t, vars);
  std::map<Sort, int> count, seen;
  for (const auto& v : vars) ++count[v.sort];
  Names names;
  for (const auto& v : vars) {
    std::string n(1, sort_letter(v.sort));
    if (count[v.sort] > 1) n += std::to_string(++seen[v.sort]);
    names[v.id] = n;
  }
  return names;
}

void print(std::ostream& os, const TypePtr& t, const Names& names) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ty::Var>) {
          os << names.at(n.id);
        } else if constexpr (std::is_same_v<T, ty::Con>) {
          os << n.name;
          if (!n.args.empty()) {
            os << "(";
            for (std::size_t i = 0; i < n.args.size(); ++i) {
              if (i) os << ", ";
              print(os, n.args[i], names);
            }
            os << ")";
          }
        } else if constexpr (std::is_same_v<T, ty::Arrow>) {
          os << "(";
          for (std::size_t i = 0; i < n.params.size(); ++i) {
            if (i) os << ", ";
            print(os, n.params[i], names);
          }
          os << ") -> ";
          print(os, n.ret, names);
        } else {
          os << "field(";
          print(os, n.inner, names);
          os << ")";
        }
      },
      t->variant());
}

}  // namespace

bool type_equal(const TypePtr& a, const TypePtr& b) {
  return equal_with(a, b, [](const ty::Var& x, const ty::Var& y) {
    return x.id == y.id && x.sort == y.sort;
  });
}

bool alpha_equivalent(const TypeScheme& a, const TypeScheme& b) {
  if (a.quantified.size() != b.quantified.size()) return false;
  std::map<int, int> fwd, bwd;
  auto quant = [](const TypeScheme& s, int id) {
    return std::find(s.quantified.begin(), s.quantified.end(), id) != s.quantified.end();
  };
  return equal_with(a.body, b.body, [&](const ty::Var& x, const ty::Var& y) {
    if (x.sort != y.sort) return false;
    bool qx = quant(a, x.id), qy = quant(b, y.id);
    if (qx != qy) return false;
    if (!qx) return x.id == y.id;
    auto f = fwd.find(x.id);
    auto g = bwd.find(y.id);
    if (f == fwd.end() && g == bwd.end()) {
      fwd[x.id] = y.id;
      bwd[y.id] = x.id;
      return true;
    }
    return f != fwd.end() && g != bwd.end() && f->second == y.id && g->second == x.id;
  });
}

std::string to_string(const TypePtr& t) {
  std::ostringstream os;
  print(os, t, name_vars(t));
  return os.str();
}

std::string to_string(const TypeScheme& s) {
  Names names = name_vars(s.body);
  std::ostringstream os;
  std::vector<ty::Var> vars;
  collect_vars(s.body, vars);
  bool any = false;
  for (const auto& v : vars) {
    if (std::find(s.quantified.begin(), s.quantified.end(), v.id) == s.quantified.end())
      continue;
    os << (any ? " " : "forall ") << names.at(v.id);
    any = true;
  }
  if (any) os << ". ";
  print(os, s.body, names);
  return os.str();
}

namespace {

class TypeReader {
 public:
  explicit TypeReader(std::string_view text) : text_(text) {}

  TypeScheme read_scheme() {
    TypeScheme scheme;
    skip_ws();
    if (peek_word() == "forall") {
      word();
      while (true) {
        skip_ws();
        if (eat('.')) break;
        std::string v = word();
        if (v.empty()) fail("expected type variable");
        scheme.quantified.push_back(var_id(v));
      }
    }
    scheme.body = read();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return scheme;
  }

 private:
  TypePtr read() {
    skip_ws();
    if (eat('(')) {
      std::vector<TypePtr> items;
      skip_ws();
      if (!eat(')')) {
        while (true) {
          items.push_back(read());
          skip_ws();
          if (eat(')')) break;
          if (!eat(',')) fail("expected ',' or ')'");
        }
      }
      skip_ws();
      if (text_.substr(pos_, 2) == "->") {
        pos_ += 2;
        return t_arrow(std::move(items), read());
      }
      if (items.size() != 1) fail("expected '->'");
      return items[0];
    }
    std::string w = word();
    if (w == "num") return t_num();
    if (w == "bool") return t_bool();
    if (w == "field" || w == "pair" || w == "list") {
      auto args = read_args();
      std::size_t want = w == "pair" ? 2 : 1;
      if (args.size() != want) fail("wrong number of arguments to " + w);
      if (w == "field") return t_field(args[0]);
      return t_con(w, std::move(args));
    }
    if (w.empty()) fail("expected a type");
    return t_var(var_id(w), var_sort(w));
  }

  std::vector<TypePtr> read_args() {
    skip_ws();
    if (!eat('(')) fail("expected '('");
    std::vector<TypePtr> args;
    while (true) {
      args.push_back(read());
      skip_ws();
      if (eat(')')) return args;
      if (!eat(',')) fail("expected ',' or ')'");
    }
  }

  Sort var_sort(const std::string& w) {
    switch (w[0]) {
      case 't': return Sort::Any;
      case 'l': return Sort::Local;
      case 'r': return Sort::Return;
      case 's': return Sort::LocalReturn;
    }
    fail("unknown type '" + w + "'");
  }

  int var_id(const std::string& w) {
    var_sort(w);
    auto [it, inserted] = ids_.try_emplace(w, static_cast<int>(ids_.size()));
    return it->second;
  }

  std::string peek_word() {
    std::size_t save = pos_;
    std::string w = word();
    pos_ = save;
    return w;
  }

  std::string word() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '_'))
      ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  bool eat(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw std::invalid_argument("type syntax: " + msg + " at offset " + std::to_string(pos_));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::map<std::string, int> ids_;
};

}  // namespace

TypeScheme parse_type(std::string_view text) { return TypeReader(text).read_scheme(); }

}  // namespace fieldcalc
