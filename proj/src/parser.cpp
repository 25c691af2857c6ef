#include "fieldcalc/parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "fieldcalc/builtins.hpp"

namespace fieldcalc {

std::string Diagnostic::format(bool color) const {
  std::ostringstream os;
  os << (path.empty() ? "<input>" : path) << ":" << span.line << ":" << span.column << ": ";
  if (color) os << (severity == "error" ? "\033[1;31m" : "\033[1;33m");
  os << severity;
  if (color) os << "\033[0m";
  os << ": " << message;
  if (!rule.empty()) os << " [" << rule << "]";
  return os.str();
}

namespace {
std::string join_diags(const std::vector<Diagnostic>& diags) {
  std::string out;
  for (const auto& d : diags) out += (out.empty() ? "" : "\n") + d.format();
  return out;
}
}  // namespace

ParseError::ParseError(std::vector<Diagnostic> diags)
    : std::runtime_error(join_diags(diags)), diags_(std::move(diags)) {}

namespace {

enum class Tok { Ident, Number, Op, LParen, RParen, LBrace, RBrace, Comma, Arrow, Keyword, End };

struct Token {
  Tok kind;
  std::string text;
  Span span;
};

struct Failure {
  Span span;
  std::string message;
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Lexer {
 public:
  explicit Lexer(const std::string& text) : s_(text) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip();
      if (i_ >= s_.size()) {
        out.push_back({Tok::End, "", here(0)});
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  Span here(std::size_t len) const {
    return Span{line_, static_cast<int>(i_ - line_start_) + 1, static_cast<int>(len)};
  }

  void skip() {
    while (i_ < s_.size()) {
      char c = s_[i_];
      if (c == '\n') {
        ++i_;
        ++line_;
        line_start_ = i_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++i_;
      } else if (c == '/' && i_ + 1 < s_.size() && s_[i_ + 1] == '/') {
        while (i_ < s_.size() && s_[i_] != '\n') ++i_;
      } else {
        return;
      }
    }
  }

  Token make(Tok kind, std::size_t start) {
    Span sp{line_, static_cast<int>(start - line_start_) + 1, static_cast<int>(i_ - start)};
    return Token{kind, s_.substr(start, i_ - start), sp};
  }

  // Consumes a `[f,l,...]` suffix directly after a name.
  void decoration() {
    if (i_ >= s_.size() || s_[i_] != '[') return;
    std::size_t j = i_ + 1;
    bool expect_flag = true;
    while (j < s_.size() && s_[j] != ']') {
      char c = s_[j];
      if (expect_flag ? (c != 'f' && c != 'l') : c != ',') return;
      expect_flag = !expect_flag;
      ++j;
    }
    if (j >= s_.size() || expect_flag) return;
    i_ = j + 1;
  }

  Token next() {
    std::size_t start = i_;
    char c = s_[i_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
      if (i_ + 1 < s_.size() && s_[i_] == '.' && std::isdigit(static_cast<unsigned char>(s_[i_ + 1]))) {
        ++i_;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
      }
      if (i_ < s_.size() && (s_[i_] == 'e' || s_[i_] == 'E')) {
        std::size_t j = i_ + 1;
        if (j < s_.size() && (s_[j] == '+' || s_[j] == '-')) ++j;
        if (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) {
          i_ = j;
          while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        }
      }
      return make(Tok::Number, start);
    }
    if (is_ident_start(c)) {
      ++i_;
      while (i_ < s_.size()) {
        if (is_ident_char(s_[i_])) {
          ++i_;
        } else if (s_[i_] == '-' && i_ + 1 < s_.size() && is_ident_start(s_[i_ + 1])) {
          ++i_;
        } else {
          break;
        }
      }
      if (i_ < s_.size() && s_[i_] == '+' && is_builtin(s_.substr(start, i_ - start) + "+")) ++i_;
      decoration();
      Token t = make(Tok::Ident, start);
      static const std::set<std::string> kw = {"def", "rep", "nbr", "if", "else"};
      if (kw.count(t.text)) t.kind = Tok::Keyword;
      return t;
    }
    ++i_;
    switch (c) {
      case '(': return make(Tok::LParen, start);
      case ')': return make(Tok::RParen, start);
      case '{': return make(Tok::LBrace, start);
      case '}': return make(Tok::RBrace, start);
      case ',': return make(Tok::Comma, start);
      case '=':
        if (i_ < s_.size() && s_[i_] == '>') {
          ++i_;
          return make(Tok::Arrow, start);
        }
        decoration();
        return make(Tok::Op, start);
      case '+':
      case '-':
      case '*':
      case '<':
      case '>':
      case '/':
        decoration();
        return make(Tok::Op, start);
      default:
        throw Failure{make(Tok::Op, start).span,
                      std::string("unexpected character '") + c + "'"};
    }
  }

  const std::string& s_;
  std::size_t i_ = 0;
  int line_ = 1;
  std::size_t line_start_ = 0;
};

int precedence(const std::string& op) {
  std::string base = op.substr(0, op.find('['));
  if (base == "*") return 3;
  if (base == "+" || base == "-") return 2;
  if (base == "<" || base == "=") return 1;
  if (base == "and") return 0;
  return -1;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, bool allow_free) : t_(std::move(toks)), allow_free_(allow_free) {}

  void add_defs(const std::vector<Name>& names) { defs_.insert(names.begin(), names.end()); }

  SourceUnit unit(const std::string& path, std::vector<Diagnostic>& diags) {
    for (std::size_t k = 0; k + 1 < t_.size(); ++k)
      if (t_[k].kind == Tok::Keyword && t_[k].text == "def" && t_[k + 1].kind == Tok::Ident)
        defs_.insert(t_[k + 1].text);
    SourceUnit u;
    std::set<Name> seen;
    while (peek().kind == Tok::Keyword && peek().text == "def") {
      try {
        Declaration d = declaration();
        if (!seen.insert(d.name).second)
          throw Failure{d.span, "function '" + d.name + "' is declared twice"};
        u.decls.push_back(std::move(d));
      } catch (const Failure& f) {
        diags.push_back(Diagnostic{path, f.span, "error", f.message, ""});
        scope_.clear();
        ++k_;
        while (peek().kind != Tok::End && !(peek().kind == Tok::Keyword && peek().text == "def"))
          ++k_;
      }
    }
    if (peek().kind == Tok::End) return u;
    try {
      u.main = expression();
      if (peek().kind != Tok::End) fail(peek(), "unexpected '" + peek().text + "' after main expression");
    } catch (const Failure& f) {
      diags.push_back(Diagnostic{path, f.span, "error", f.message, ""});
    }
    return u;
  }

  ExprPtr standalone() {
    ExprPtr e = expression();
    if (peek().kind != Tok::End) fail(peek(), "unexpected '" + peek().text + "'");
    return e;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return t_[std::min(k_ + ahead, t_.size() - 1)];
  }
  Token take() {
    Token t = peek();
    if (k_ < t_.size() - 1) ++k_;
    return t;
  }
  [[noreturn]] void fail(const Token& at, const std::string& msg) {
    throw Failure{at.span, msg};
  }
  Token expect(Tok kind, const char* what) {
    if (peek().kind != kind) {
      std::string got = peek().kind == Tok::End ? "end of input" : "'" + peek().text + "'";
      fail(peek(), std::string("expected ") + what + ", got " + got);
    }
    return take();
  }
  bool at_keyword(const char* kw) const {
    return peek().kind == Tok::Keyword && peek().text == kw;
  }

  Name binder() {
    Token t = expect(Tok::Ident, "a parameter name");
    if (is_constructor(t.text)) fail(t, "'" + t.text + "' is a constructor, not a variable name");
    return t.text;
  }

  std::vector<Name> params() {
    expect(Tok::LParen, "'('");
    std::vector<Name> ps;
    if (peek().kind != Tok::RParen) {
      while (true) {
        Token at = peek();
        Name p = binder();
        if (std::find(ps.begin(), ps.end(), p) != ps.end())
          fail(at, "duplicate parameter '" + p + "'");
        ps.push_back(p);
        if (peek().kind == Tok::Comma) {
          take();
          continue;
        }
        break;
      }
    }
    expect(Tok::RParen, "')'");
    return ps;
  }

  Declaration declaration() {
    Token kw = take();
    Token name = expect(Tok::Ident, "a function name");
    Declaration d;
    d.name = name.text;
    d.span = kw.span;
    d.params = params();
    expect(Tok::LBrace, "'{'");
    scope_ = d.params;
    d.body = expression();
    scope_.clear();
    expect(Tok::RBrace, "'}'");
    return d;
  }

  bool lambda_ahead() const {
    if (peek().kind != Tok::LParen) return false;
    std::size_t j = 1;
    if (peek(j).kind == Tok::RParen) return peek(j + 1).kind == Tok::Arrow;
    while (true) {
      if (peek(j).kind != Tok::Ident) return false;
      ++j;
      if (peek(j).kind == Tok::Comma) {
        ++j;
        continue;
      }
      return peek(j).kind == Tok::RParen && peek(j + 1).kind == Tok::Arrow;
    }
  }

  ExprPtr expression() {
    if (lambda_ahead()) {
      Span sp = peek().span;
      auto ps = params();
      expect(Tok::Arrow, "'=>'");
      std::size_t depth = scope_.size();
      scope_.insert(scope_.end(), ps.begin(), ps.end());
      ExprPtr body = expression();
      scope_.resize(depth);
      return make_lambda(std::move(ps), std::move(body), sp);
    }
    return binary(0);
  }

  std::optional<std::string> infix_op() const {
    const Token& t = peek();
    if (t.kind == Tok::Op) return t.text;
    if (t.kind == Tok::Ident && t.text == "and" && !bound("and")) return t.text;
    return std::nullopt;
  }

  ExprPtr binary(int min_prec) {
    ExprPtr lhs = postfix();
    while (auto op = infix_op()) {
      int prec = precedence(*op);
      if (prec < 0) fail(peek(), "unknown operator '" + *op + "'");
      if (prec < min_prec) break;
      Token t = take();
      if (!is_builtin(t.text)) fail(t, "unknown operator '" + t.text + "'");
      ExprPtr rhs = lambda_ahead() ? expression() : binary(prec + 1);
      lhs = make_apply(make_builtin(t.text, t.span), {lhs, rhs}, t.span);
    }
    return lhs;
  }

  std::vector<ExprPtr> arguments() {
    expect(Tok::LParen, "'('");
    std::vector<ExprPtr> args;
    if (peek().kind != Tok::RParen) {
      while (true) {
        args.push_back(expression());
        if (peek().kind == Tok::Comma) {
          take();
          continue;
        }
        break;
      }
    }
    expect(Tok::RParen, "')' or ','");
    return args;
  }

  ExprPtr postfix() {
    ExprPtr e = atom();
    while (peek().kind == Tok::LParen) {
      Span sp = peek().span;
      e = make_apply(e, arguments(), sp);
    }
    return e;
  }

  bool bound(const Name& n) const {
    return std::find(scope_.rbegin(), scope_.rend(), n) != scope_.rend();
  }

  ExprPtr atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number: {
        Token n = take();
        auto v = parse_numeral(n.text);
        if (!v) fail(n, "malformed number '" + n.text + "'");
        return make_num(*v, n.span);
      }
      case Tok::Op: {
        Token op = take();
        if (op.text == "-" && peek().kind == Tok::Number &&
            peek().span.line == op.span.line && peek().span.column == op.span.column + 1) {
          Token n = take();
          return make_num(-*parse_numeral(n.text), op.span);
        }
        if (op.text == "-" && peek().kind == Tok::Ident && peek().text == "infinity" &&
            peek().span.column == op.span.column + 1) {
          take();
          return make_num(-std::numeric_limits<double>::infinity(), op.span);
        }
        if (!is_builtin(op.text)) fail(op, "unknown operator '" + op.text + "'");
        return make_builtin(op.text, op.span);
      }
      case Tok::LParen: {
        if (lambda_ahead()) return expression();
        take();
        ExprPtr e = expression();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Keyword:
        return keyword_form();
      case Tok::Ident:
        return identifier();
      default:
        fail(t, t.kind == Tok::End ? "unexpected end of input"
                                   : "unexpected '" + t.text + "'");
    }
  }

  ExprPtr keyword_form() {
    Token kw = take();
    if (kw.text == "nbr") {
      expect(Tok::LBrace, "'{' after nbr");
      ExprPtr body = expression();
      expect(Tok::RBrace, "'}'");
      return make_nbr(std::move(body), kw.span);
    }
    if (kw.text == "rep") {
      expect(Tok::LParen, "'(' after rep");
      ExprPtr init = expression();
      expect(Tok::RParen, "')'");
      expect(Tok::LBrace, "'{'");
      expect(Tok::LParen, "'(' before the rep variable");
      Name var = binder();
      expect(Tok::RParen, "')'");
      expect(Tok::Arrow, "'=>'");
      scope_.push_back(var);
      ExprPtr body = expression();
      scope_.pop_back();
      expect(Tok::RBrace, "'}'");
      return make_rep(std::move(init), std::move(var), std::move(body), kw.span);
    }
    if (kw.text == "if") {
      expect(Tok::LParen, "'(' after if");
      ExprPtr guard = expression();
      expect(Tok::RParen, "')'");
      expect(Tok::LBrace, "'{'");
      ExprPtr a = expression();
      expect(Tok::RBrace, "'}'");
      if (!at_keyword("else")) fail(peek(), "expected 'else'");
      take();
      expect(Tok::LBrace, "'{'");
      ExprPtr b = expression();
      expect(Tok::RBrace, "'}'");
      return desugar_if(std::move(guard), std::move(a), std::move(b), kw.span);
    }
    fail(kw, "unexpected '" + kw.text + "'");
  }

  ExprPtr identifier() {
    Token id = take();
    const Name& n = id.text;
    if (bound(n)) return make_var(n, id.span);
    if (defs_.count(n)) return make_def(n, id.span);
    if (is_constructor(n)) {
      std::vector<ExprPtr> args;
      if (peek().kind == Tok::LParen) args = arguments();
      if (auto v = parse_numeral(n); v && !args.empty())
        fail(id, "numeral '" + n + "' takes no arguments");
      if (parse_numeral(n)) return make_num(*parse_numeral(n), id.span);
      return make_data(n, std::move(args), id.span);
    }
    if (is_builtin(n)) return make_builtin(n, id.span);
    if (allow_free_ && !std::isupper(static_cast<unsigned char>(n[0])))
      return make_var(n, id.span);
    fail(id, "unknown identifier '" + n + "'");
  }

  std::vector<Token> t_;
  std::size_t k_ = 0;
  bool allow_free_;
  std::vector<Name> scope_;
  std::set<Name> defs_;
};

SourceUnit parse_one(const SourceFile& file, std::vector<Diagnostic>& diags,
                     const std::vector<Name>& extra_defs) {
  std::vector<Token> toks;
  try {
    toks = Lexer(file.text).run();
  } catch (const Failure& f) {
    diags.push_back(Diagnostic{file.path, f.span, "error", f.message, ""});
    return {};
  }
  Parser p(std::move(toks), false);
  p.add_defs(extra_defs);
  return p.unit(file.path, diags);
}

}  // namespace

SourceUnit parse_unit(const SourceFile& file) {
  std::vector<Diagnostic> diags;
  SourceUnit u = parse_one(file, diags, {});
  if (!diags.empty()) throw ParseError(std::move(diags));
  return u;
}

Program parse_program(const SourceFile& file) {
  SourceUnit u = parse_unit(file);
  if (!u.main) {
    Span end;
    end.line = static_cast<int>(std::count(file.text.begin(), file.text.end(), '\n')) + 1;
    end.column = 1;
    throw ParseError({Diagnostic{file.path, end, "error", "missing main expression", ""}});
  }
  return Program{std::move(u.decls), std::move(u.main)};
}

SourceUnit parse_units(const std::vector<SourceFile>& files) {
  std::vector<Diagnostic> diags;
  SourceUnit out;
  std::vector<Name> defs;
  std::set<Name> seen;
  for (const auto& f : files) {
    SourceUnit u = parse_one(f, diags, defs);
    for (auto& d : u.decls) {
      if (!seen.insert(d.name).second) {
        diags.push_back(Diagnostic{f.path, d.span, "error",
                                   "function '" + d.name + "' is declared twice", ""});
        continue;
      }
      defs.push_back(d.name);
      out.decls.push_back(std::move(d));
    }
    if (u.main) out.main = u.main;
  }
  if (!diags.empty()) throw ParseError(std::move(diags));
  return out;
}

ExprPtr parse_expr(const std::string& text, bool allow_free, const std::vector<Name>& defs) {
  try {
    Parser p(Lexer(text).run(), allow_free);
    p.add_defs(defs);
    return p.standalone();
  } catch (const Failure& f) {
    throw ParseError({Diagnostic{"", f.span, "error", f.message, ""}});
  }
}

SourceFile read_source(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return SourceFile{path, ss.str()};
}

}  // namespace fieldcalc
