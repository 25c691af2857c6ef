#ifndef FIELDCALC_TYPES_HPP
#define FIELDCALC_TYPES_HPP

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace fieldcalc {

// Variable sorts. Any ⊒ Local, Any ⊒ Return, Local ⊓ Return = LocalReturn.
//   Local:       no field types
//   Return:      no arrows returning fields
//   LocalReturn: neither
enum class Sort { Any, Local, Return, LocalReturn };

char sort_letter(Sort s);
Sort sort_meet(Sort a, Sort b);
// a ⊑ b
bool sort_leq(Sort a, Sort b);

class TypeNode;
using TypePtr = std::shared_ptr<const TypeNode>;

namespace ty {
struct Var {
  int id;
  Sort sort;
};
// bool, num, pair(a, b), list(a)
struct Con {
  std::string name;
  std::vector<TypePtr> args;
};
struct Arrow {
  std::vector<TypePtr> params;
  TypePtr ret;
};
struct Field {
  TypePtr inner;
};
}  // namespace ty

class TypeNode {
 public:
  using Variant = std::variant<ty::Var, ty::Con, ty::Arrow, ty::Field>;
  explicit TypeNode(Variant v) : v_(std::move(v)) {}
  const Variant& variant() const { return v_; }
  template <class T>
  const T* as() const {
    return std::get_if<T>(&v_);
  }

 private:
  Variant v_;
};

TypePtr t_var(int id, Sort sort);
TypePtr t_con(std::string name, std::vector<TypePtr> args = {});
TypePtr t_num();
TypePtr t_bool();
TypePtr t_pair(TypePtr a, TypePtr b);
TypePtr t_list(TypePtr a);
TypePtr t_arrow(std::vector<TypePtr> params, TypePtr ret);
TypePtr t_field(TypePtr inner);

struct TypeScheme {
  std::vector<int> quantified;
  TypePtr body;
};

bool type_equal(const TypePtr& a, const TypePtr& b);
// Equal up to a sort-preserving bijective renaming of quantified variables.
bool alpha_equivalent(const TypeScheme& a, const TypeScheme& b);

// "(bool, s) -> s"; variables named by sort letter, numbered when ambiguous.
std::string to_string(const TypePtr& t);
std::string to_string(const TypeScheme& s);

// Parses the notation produced by to_string, with an optional
// "forall v1 v2." prefix. Variable sort comes from its first letter
// (t, l, r, s). Throws std::invalid_argument.
TypeScheme parse_type(std::string_view text);

}  // namespace fieldcalc

#endif
