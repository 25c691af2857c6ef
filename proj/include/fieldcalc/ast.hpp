#ifndef FIELDCALC_AST_HPP
#define FIELDCALC_AST_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace fieldcalc {

using Name = std::string;
using DeviceId = std::uint64_t;

struct Span {
  int line = 0;
  int column = 0;
  int length = 0;
};

class Node;
using ExprPtr = std::shared_ptr<const Node>;

// Neighbouring field value: device id -> local value.
struct NbrField {
  std::map<DeviceId, ExprPtr> entries;
};

namespace expr {
struct Var {
  Name name;
};
// Runtime only: a neighbouring field value substituted into an expression.
struct FieldLit {
  std::shared_ptr<const NbrField> field;
};
// Constructor application. Numerals are 0-ary constructors whose name is the
// canonical numeral text; `number` caches the parsed value.
struct Data {
  Name ctor;
  std::vector<ExprPtr> args;
  std::optional<double> number;
};
struct Builtin {
  Name name;
};
struct DefName {
  Name name;
};
struct Lambda {
  std::vector<Name> params;
  ExprPtr body;
};
struct Apply {
  ExprPtr fn;
  std::vector<ExprPtr> args;
};
struct Rep {
  ExprPtr init;
  Name var;
  ExprPtr body;
};
struct Nbr {
  ExprPtr body;
};
}  // namespace expr

class Node {
 public:
  using Variant = std::variant<expr::Var, expr::FieldLit, expr::Data, expr::Builtin,
                               expr::DefName, expr::Lambda, expr::Apply, expr::Rep,
                               expr::Nbr>;

  Node(Variant v, Span span);

  const Variant& variant() const { return v_; }
  template <class T>
  const T* as() const {
    return std::get_if<T>(&v_);
  }
  template <class T>
  bool is() const {
    return std::holds_alternative<T>(v_);
  }

  std::size_t hash() const { return hash_; }
  // Sorted, duplicate-free.
  const std::vector<Name>& free_vars() const { return free_; }
  bool closed() const { return free_.empty(); }
  // Value forms: builtins, def names, closed lambdas, data over values, fields.
  bool is_value() const { return value_; }
  bool is_local_value() const { return value_ && !is<expr::FieldLit>(); }
  bool has_field() const { return has_field_; }
  const Span& span() const { return span_; }

 private:
  Variant v_;
  Span span_;
  std::size_t hash_ = 0;
  std::vector<Name> free_;
  bool value_ = false;
  bool has_field_ = false;
};

ExprPtr make_var(Name name, Span span = {});
ExprPtr make_field(NbrField field, Span span = {});
ExprPtr make_data(Name ctor, std::vector<ExprPtr> args, Span span = {});
ExprPtr make_num(double value, Span span = {});
ExprPtr make_bool(bool value, Span span = {});
ExprPtr make_builtin(Name name, Span span = {});
ExprPtr make_def(Name name, Span span = {});
ExprPtr make_lambda(std::vector<Name> params, ExprPtr body, Span span = {});
ExprPtr make_apply(ExprPtr fn, std::vector<ExprPtr> args, Span span = {});
ExprPtr make_rep(ExprPtr init, Name var, ExprPtr body, Span span = {});
ExprPtr make_nbr(ExprPtr body, Span span = {});

// Canonical numeral text: shortest round-trip decimal, "infinity", "-infinity", "NaN".
std::string numeral_text(double value);
std::optional<double> parse_numeral(const std::string& text);
std::optional<double> as_number(const ExprPtr& e);
std::optional<bool> as_bool(const ExprPtr& e);

// Syntactic equality, ignoring source spans. No alpha-equivalence.
bool syntactic_equal(const ExprPtr& a, const ExprPtr& b);

struct ExprHash {
  std::size_t operator()(const ExprPtr& e) const { return e->hash(); }
};
struct ExprEq {
  bool operator()(const ExprPtr& a, const ExprPtr& b) const { return syntactic_equal(a, b); }
};

// Runtime value: a local value expression or a neighbouring field.
class Value {
 public:
  Value() = default;
  static Value local(ExprPtr e);
  static Value field(NbrField f);
  static Value field(std::shared_ptr<const NbrField> f);

  bool is_field() const { return field_ != nullptr; }
  bool empty() const { return !local_ && !field_; }
  const ExprPtr& local() const;
  const NbrField& field() const;
  const std::shared_ptr<const NbrField>& field_ptr() const { return field_; }
  ExprPtr to_expr() const;

  friend bool operator==(const Value& a, const Value& b);

 private:
  ExprPtr local_;
  std::shared_ptr<const NbrField> field_;
};

Value value_of(const ExprPtr& value_expr);

struct Declaration {
  Name name;
  std::vector<Name> params;
  ExprPtr body;
  Span span;
};

struct Program {
  std::vector<Declaration> decls;
  ExprPtr main;

  const Declaration* find(const Name& name) const;
};

// Capture-free because substituted values are closed.
ExprPtr substitute(const ExprPtr& e, const std::map<Name, Value>& sub);
ExprPtr substitute(const ExprPtr& e, const std::vector<Name>& names,
                   const std::vector<Value>& values);

// if(g){a}else{b} as mux(g, ()=>snd(Pair(True,a)), ()=>snd(Pair(False,b)))()
ExprPtr desugar_if(ExprPtr guard, ExprPtr then_branch, ExprPtr else_branch, Span span = {});

// Human-readable rendering; prints fields as [id->v, ...]. Never fails.
std::string to_string(const ExprPtr& e);
std::string to_string(const Value& v);

// Parseable rendering. Throws std::invalid_argument on runtime-only nodes.
std::string pretty_print(const ExprPtr& e);
std::string pretty_print(const Program& p);

}  // namespace fieldcalc

#endif
