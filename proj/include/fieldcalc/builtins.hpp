#ifndef FIELDCALC_BUILTINS_HPP
#define FIELDCALC_BUILTINS_HPP

#include <compare>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fieldcalc/ast.hpp"
#include "fieldcalc/errors.hpp"
#include "fieldcalc/evolution.hpp"
#include "fieldcalc/types.hpp"

namespace fieldcalc {

// Sensor readings available to one device at one fire (or one event).
struct SensorState {
  std::map<Name, Value> local;
  std::map<Name, NbrField> neighbour;  // e.g. "nbr-range"
};

// Applies a function value to argument values in isolation: on the calling
// device, against the empty environment. Used by map-hood and fold-hood.
class FunctionApplier {
 public:
  virtual ~FunctionApplier() = default;
  virtual Value apply(const ExprPtr& fn, const std::vector<Value>& args) = 0;
};

struct BuiltinContext {
  DeviceId self = 0;
  // Domain of the aligned environment at the call site. May or may not
  // mention self.
  std::vector<DeviceId> neighbours;
  const SensorState* sensors = nullptr;
  FunctionApplier* applier = nullptr;
  // Seeded pick-hood when set, least device id otherwise.
  std::mt19937_64* rng = nullptr;

  std::vector<DeviceId> field_domain() const;
};

struct BuiltinInfo {
  Name name;
  bool pure = true;
  // Empty for map-hood, whose scheme depends on the call arity.
  std::optional<TypeScheme> scheme;
};

// Looks up plain and decorated builtins (`+[f,f]`, `Pair[l,f]`).
const BuiltinInfo* find_builtin(const Name& name);
bool is_builtin(const Name& name);
std::vector<Name> builtin_names();

// `call_arity` resolves map-hood; other names ignore it.
std::optional<TypeScheme> builtin_scheme(const Name& name,
                                         std::optional<std::size_t> call_arity = std::nullopt);

bool is_constructor(const Name& name);
// Numerals, True, False, Pair, Null, Cons.
std::optional<TypeScheme> constructor_scheme(const Name& name);

bool is_pure(const Name& builtin);

Value builtin_eval(const Name& name, const BuiltinContext& ctx, const std::vector<Value>& args);

// Pointwise application of a decorated builtin `b[f,l,...]`.
Value field_promote_eval(const Name& name, const BuiltinContext& ctx,
                         const std::vector<Value>& args);

// Denotation of a builtin application: the pointwise lift of builtin_eval
// over `domain`, with the per-event context supplied by `context_at`.
FieldEvolution builtin_denot(const Name& name, const EventSet& domain,
                             const std::function<BuiltinContext(EventId)>& context_at,
                             const std::vector<FieldEvolution>& args);

// `=`: structural; numbers compare bit patterns except NaN != NaN;
// functions compare syntactically; fields compare entrywise.
bool values_equal(const Value& a, const Value& b);

// Total order used by `<` and the *-hood minimums. Numbers follow IEEE
// totalOrder, False < True, pairs and lists are lexicographic.
// Throws EvalError on function values.
std::strong_ordering value_compare(const ExprPtr& a, const ExprPtr& b);

}  // namespace fieldcalc

#endif
