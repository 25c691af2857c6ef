#ifndef FIELDCALC_TYPER_HPP
#define FIELDCALC_TYPER_HPP

#include <map>
#include <stdexcept>
#include <string>

#include "fieldcalc/ast.hpp"
#include "fieldcalc/parser.hpp"
#include "fieldcalc/types.hpp"

namespace fieldcalc {

class TypeError : public std::runtime_error {
 public:
  TypeError(std::string rule, std::string message, Span span);
  // Name of the violated typing rule, e.g. "T-REP".
  const std::string& rule() const { return rule_; }
  const std::string& detail() const { return detail_; }
  const Span& span() const { return span_; }
  Diagnostic diagnostic(const std::string& path) const;

 private:
  std::string rule_;
  std::string detail_;
  Span span_;
};

struct TypeEnv {
  std::map<Name, TypePtr> vars;
  std::map<Name, TypeScheme> functions;
};

// Principal type of `e` under `env`, with free type variables left open.
TypePtr infer(const TypeEnv& env, const ExprPtr& e);

// Generalised schemes of every declaration, in order.
std::map<Name, TypeScheme> typecheck_decls(const std::vector<Declaration>& decls);

// Checks all declarations and the main expression, which must have a local
// type. Returns the generalised type of main.
TypeScheme typecheck_program(const Program& p);

// Scheme of the last declaration when there is no main.
TypeScheme typecheck_unit(const SourceUnit& u);

// Whether `v` can be given a type unifiable with `t`.
bool value_has_type(const Value& v, const TypePtr& t, const TypeEnv& env = {});

// Whether a type belongs to a sort: local types carry no fields, return
// types have no arrows returning fields.
bool type_in_sort(const TypePtr& t, Sort s);

// Whether `specific` is obtained from `general` by a sort-respecting
// substitution of general's quantified variables.
bool instance_of(const TypeScheme& specific, const TypeScheme& general);

}  // namespace fieldcalc

#endif
