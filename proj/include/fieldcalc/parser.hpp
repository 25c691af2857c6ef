#ifndef FIELDCALC_PARSER_HPP
#define FIELDCALC_PARSER_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "fieldcalc/ast.hpp"

namespace fieldcalc {

struct SourceFile {
  std::string path;
  std::string text;
};

struct Diagnostic {
  std::string path;
  Span span;
  std::string severity = "error";
  std::string message;
  std::string rule;  // typing rule, when the diagnostic comes from the typer

  // path:line:col: severity: message
  std::string format(bool color = false) const;
};

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(std::vector<Diagnostic> diags);
  const std::vector<Diagnostic>& diagnostics() const { return diags_; }

 private:
  std::vector<Diagnostic> diags_;
};

// Declarations followed by an optional main expression.
struct SourceUnit {
  std::vector<Declaration> decls;
  ExprPtr main;  // null when the file only declares functions
};

SourceUnit parse_unit(const SourceFile& file);
// Requires a main expression.
Program parse_program(const SourceFile& file);
// Concatenates the declarations of several files; main comes from the last
// file that has one.
SourceUnit parse_units(const std::vector<SourceFile>& files);

// Parses a standalone expression. Unknown lower-case identifiers become free
// variables when `allow_free` is set; `defs` names functions in scope.
ExprPtr parse_expr(const std::string& text, bool allow_free = false,
                   const std::vector<Name>& defs = {});

SourceFile read_source(const std::string& path);

}  // namespace fieldcalc

#endif
