#include "accelbmc/frontend.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace accelbmc {

ParseError::ParseError(Kind kind, int line, int column, const std::string& msg)
  : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
    kind_(kind), line_(line), column_(column)
{
}

SourceProgram read_source(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return SourceProgram{ss.str(), path};
}

namespace {

enum class Tok {
  Ident, Number, Assign /* := */, Eq, Ne, Lt, Le, Gt, Ge, Plus, Minus, Star, Caret,
  LParen, RParen, LBrace, RBrace, Semi, Comma, Not, And, Or, End
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

const char* describe(Tok t)
{
  switch (t) {
  case Tok::Ident: return "identifier";
  case Tok::Number: return "number";
  case Tok::Assign: return "':='";
  case Tok::Eq: return "'='";
  case Tok::Ne: return "'!='";
  case Tok::Lt: return "'<'";
  case Tok::Le: return "'<='";
  case Tok::Gt: return "'>'";
  case Tok::Ge: return "'>='";
  case Tok::Plus: return "'+'";
  case Tok::Minus: return "'-'";
  case Tok::Star: return "'*'";
  case Tok::Caret: return "'^'";
  case Tok::LParen: return "'('";
  case Tok::RParen: return "')'";
  case Tok::LBrace: return "'{'";
  case Tok::RBrace: return "'}'";
  case Tok::Semi: return "';'";
  case Tok::Comma: return "','";
  case Tok::Not: return "'!'";
  case Tok::And: return "'&&'";
  case Tok::Or: return "'||'";
  case Tok::End: return "end of input";
  }
  return "?";
}

std::vector<Token> lex(const std::string& text)
{
  static const std::vector<std::pair<std::string, Tok>> symbols = {
    {"\xE2\x89\xA0", Tok::Ne}, {"\xE2\x89\xA4", Tok::Le}, {"\xE2\x89\xA5", Tok::Ge},
    {"\xC2\xAC", Tok::Not},    {"\xE2\x88\xA7", Tok::And}, {"\xE2\x88\xA8", Tok::Or},
    {":=", Tok::Assign}, {"==", Tok::Eq}, {"!=", Tok::Ne}, {"<=", Tok::Le}, {">=", Tok::Ge},
    {"&&", Tok::And}, {"||", Tok::Or}, {"=", Tok::Eq}, {"<", Tok::Lt}, {">", Tok::Gt},
    {"+", Tok::Plus}, {"-", Tok::Minus}, {"*", Tok::Star}, {"^", Tok::Caret},
    {"(", Tok::LParen}, {")", Tok::RParen}, {"{", Tok::LBrace}, {"}", Tok::RBrace},
    {";", Tok::Semi}, {",", Tok::Comma}, {"!", Tok::Not},
  };

  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') {
        advance(1);
      }
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    int tl = line;
    int tc = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) {
        ++j;
      }
      out.push_back({Tok::Ident, text.substr(i, j - i), tl, tc});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
        ++j;
      }
      out.push_back({Tok::Number, text.substr(i, j - i), tl, tc});
      advance(j - i);
      continue;
    }
    bool matched = false;
    for (const auto& [sym, kind] : symbols) {
      if (text.compare(i, sym.size(), sym) == 0) {
        out.push_back({kind, sym, tl, tc});
        advance(sym.size());
        matched = true;
        break;
      }
    }
    if (!matched) {
      throw ParseError(ParseError::Kind::Lexical, tl, tc,
                       std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

bool is_keyword(const std::string& s)
{
  static const char* kw[] = {"unsigned", "assume", "assert", "if", "else", "while",
                             "skip", "true", "false"};
  for (const char* k : kw) {
    if (s == k) {
      return true;
    }
  }
  return false;
}

class Parser {
public:
  Parser(std::vector<Token> toks, std::string path, std::optional<unsigned> width_override)
    : toks_(std::move(toks)), override_(width_override)
  {
    prog_.path = std::move(path);
    if (override_) {
      check_width(*override_, 1, 1);
      prog_.width = *override_;
      return;
    }
    // Every term carries its width, so the declared width must be known
    // before the first initializer is parsed.
    for (std::size_t i = 0; i + 3 < toks_.size(); ++i) {
      if (toks_[i].kind == Tok::Ident && toks_[i].text == "unsigned" &&
          toks_[i + 1].kind == Tok::Lt && toks_[i + 2].kind == Tok::Number &&
          toks_[i + 3].kind == Tok::Gt) {
        unsigned w = parse_width(toks_[i + 2]);
        prog_.width = w;
        break;
      }
    }
  }

  Program run()
  {
    if (peek().kind == Tok::End) {
      throw ParseError(ParseError::Kind::Syntax, peek().line, peek().column, "empty program");
    }
    while (peek_keyword("unsigned")) {
      parse_decl();
    }
    while (peek().kind != Tok::End) {
      if (peek_keyword("unsigned")) {
        error(ParseError::Kind::Syntax, "declarations must precede statements");
      }
      prog_.body.push_back(parse_stmt());
    }
    return std::move(prog_);
  }

private:
  const Token& peek(std::size_t ahead = 0) const
  {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }

  bool peek_keyword(const char* kw) const
  {
    return peek().kind == Tok::Ident && peek().text == kw;
  }

  Token take() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  [[noreturn]] void error(ParseError::Kind kind, const std::string& msg) const
  {
    throw ParseError(kind, peek().line, peek().column, msg);
  }

  Token expect(Tok kind)
  {
    if (peek().kind != kind) {
      std::string found = peek().kind == Tok::End ? "end of input" : "'" + peek().text + "'";
      error(ParseError::Kind::Syntax,
            std::string("expected ") + describe(kind) + ", found " + found);
    }
    return take();
  }

  void expect_keyword(const char* kw)
  {
    if (!peek_keyword(kw)) {
      error(ParseError::Kind::Syntax, std::string("expected '") + kw + "'");
    }
    take();
  }

  unsigned parse_width(const Token& t) const
  {
    unsigned long w = t.text.size() > 3 ? 0 : std::stoul(t.text);
    check_width(static_cast<unsigned>(w), t.line, t.column);
    return static_cast<unsigned>(w);
  }

  void check_width(unsigned w, int line, int col) const
  {
    if (w == 0 || w > kMaxWidth) {
      throw ParseError(ParseError::Kind::Semantic, line, col,
                       "bit width must be between 1 and 64");
    }
  }

  Wide parse_number_value()
  {
    Token t = expect(Tok::Number);
    auto to_wide = [&](const std::string& s) {
      Wide v = 0;
      for (char c : s) {
        v = v * 10 + static_cast<unsigned>(c - '0');
        if (v > width_mask(kMaxWidth)) {
          throw ParseError(ParseError::Kind::Semantic, t.line, t.column, "constant too large");
        }
      }
      return v;
    };
    Wide v = to_wide(t.text);
    std::string shown = t.text;
    if (peek().kind == Tok::Caret) {
      take();
      Token e = expect(Tok::Number);
      shown += "^" + e.text;
      Wide exp = to_wide(e.text);
      Wide base = v;
      v = 1;
      for (Wide k = 0; k < exp; ++k) {
        v *= base;
        if (v > width_mask(kMaxWidth)) {
          throw ParseError(ParseError::Kind::Semantic, t.line, t.column, "constant too large");
        }
      }
    }
    if (v > width_mask(prog_.width)) {
      throw ParseError(ParseError::Kind::Semantic, t.line, t.column,
                       "constant " + shown + " does not fit in " + std::to_string(prog_.width) +
                         " bits");
    }
    return v;
  }

  void parse_decl()
  {
    Token kw = take();
    if (peek().kind == Tok::Lt) {
      take();
      Token w = expect(Tok::Number);
      unsigned width = parse_width(w);
      expect(Tok::Gt);
      if (!override_ && width != prog_.width) {
        throw ParseError(ParseError::Kind::Semantic, kw.line, kw.column,
                         "all variables must share one bit width");
      }
    }
    for (;;) {
      Token id = expect(Tok::Ident);
      if (is_keyword(id.text)) {
        throw ParseError(ParseError::Kind::Syntax, id.line, id.column,
                         "keyword '" + id.text + "' used as a name");
      }
      if (declared_.count(id.text) != 0) {
        throw ParseError(ParseError::Kind::Duplicate, id.line, id.column,
                         "duplicate declaration of " + id.text);
      }
      DeclAst d;
      d.name = id.text;
      d.line = id.line;
      d.column = id.column;
      if (peek().kind == Tok::Assign || peek().kind == Tok::Eq) {
        take();
        d.init = parse_rhs();
      }
      declared_.insert(id.text);
      prog_.decls.push_back(std::move(d));
      if (peek().kind != Tok::Comma) {
        break;
      }
      take();
    }
    expect(Tok::Semi);
  }

  Expr parse_rhs()
  {
    if (peek().kind == Tok::Star && (peek(1).kind == Tok::Semi || peek(1).kind == Tok::Comma)) {
      take();
      return nondet(prog_.width);
    }
    return parse_expr();
  }

  Expr parse_expr()
  {
    Expr e = parse_term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      bool plus = take().kind == Tok::Plus;
      Expr r = parse_term();
      e = plus ? add(std::move(e), std::move(r)) : sub(std::move(e), std::move(r));
    }
    return e;
  }

  Expr parse_term()
  {
    Expr e = parse_atom();
    while (peek().kind == Tok::Star) {
      Token star = take();
      Expr r = parse_atom();
      if (e.kind() != ExprKind::Const && r.kind() != ExprKind::Const) {
        throw ParseError(ParseError::Kind::Semantic, star.line, star.column,
                         "multiplication is only supported by a constant");
      }
      e = mul(std::move(e), std::move(r));
    }
    return e;
  }

  Expr parse_atom()
  {
    const Token& t = peek();
    switch (t.kind) {
    case Tok::Number: return constant(parse_number_value(), prog_.width);
    case Tok::Ident: {
      if (is_keyword(t.text)) {
        error(ParseError::Kind::Syntax, "unexpected keyword '" + t.text + "'");
      }
      if (declared_.count(t.text) == 0) {
        error(ParseError::Kind::Undeclared, "undeclared variable " + t.text);
      }
      return var(take().text, prog_.width);
    }
    case Tok::LParen: {
      take();
      Expr e = parse_expr();
      expect(Tok::RParen);
      return e;
    }
    case Tok::Star:
      error(ParseError::Kind::Syntax, "'*' (nondet) may only be a whole right-hand side");
    default:
      error(ParseError::Kind::Syntax, std::string("expected expression, found ") +
                                        (t.kind == Tok::End ? "end of input" : "'" + t.text + "'"));
    }
  }

  BExpr parse_bexpr()
  {
    std::vector<BExpr> terms{parse_conj()};
    while (peek().kind == Tok::Or) {
      take();
      terms.push_back(parse_conj());
    }
    return bor(std::move(terms));
  }

  BExpr parse_conj()
  {
    std::vector<BExpr> terms{parse_bunary()};
    while (peek().kind == Tok::And) {
      take();
      terms.push_back(parse_bunary());
    }
    return band(std::move(terms));
  }

  static bool is_cmp(Tok k)
  {
    return k == Tok::Eq || k == Tok::Ne || k == Tok::Lt || k == Tok::Le || k == Tok::Gt ||
           k == Tok::Ge;
  }

  BExpr parse_bunary()
  {
    if (peek().kind == Tok::Not) {
      take();
      return bnot(parse_bunary());
    }
    if (peek_keyword("true")) {
      take();
      return btrue();
    }
    if (peek_keyword("false")) {
      take();
      return bfalse();
    }
    if (peek().kind == Tok::LParen) {
      // Either a parenthesized formula or the left operand of a comparison.
      std::size_t save = pos_;
      try {
        take();
        BExpr inner = parse_bexpr();
        expect(Tok::RParen);
        Tok next = peek().kind;
        if (!is_cmp(next) && next != Tok::Plus && next != Tok::Minus && next != Tok::Star) {
          return inner;
        }
      } catch (const ParseError&) {
      }
      pos_ = save;
    }
    return parse_comparison();
  }

  BExpr parse_comparison()
  {
    Expr lhs = parse_expr();
    Tok k = peek().kind;
    if (!is_cmp(k)) {
      error(ParseError::Kind::Syntax, "expected comparison operator");
    }
    take();
    Expr rhs = parse_expr();
    CmpOp op = CmpOp::Eq;
    switch (k) {
    case Tok::Eq: op = CmpOp::Eq; break;
    case Tok::Ne: op = CmpOp::Ne; break;
    case Tok::Lt: op = CmpOp::Lt; break;
    case Tok::Le: op = CmpOp::Le; break;
    case Tok::Gt: op = CmpOp::Gt; break;
    default: op = CmpOp::Ge; break;
    }
    return cmp(op, std::move(lhs), std::move(rhs));
  }

  void parse_condition(AstStmt& s)
  {
    expect(Tok::LParen);
    if (peek().kind == Tok::Star && peek(1).kind == Tok::RParen) {
      take();
      s.nondet_cond = true;
    } else {
      s.cond = parse_bexpr();
    }
    expect(Tok::RParen);
  }

  Block parse_block()
  {
    Block b;
    if (peek().kind != Tok::LBrace) {
      b.push_back(parse_stmt());
      return b;
    }
    take();
    while (peek().kind != Tok::RBrace) {
      if (peek().kind == Tok::End) {
        error(ParseError::Kind::Syntax, "expected '}' before end of input");
      }
      b.push_back(parse_stmt());
    }
    take();
    return b;
  }

  AstStmt parse_stmt()
  {
    AstStmt s;
    s.line = peek().line;
    s.column = peek().column;
    if (peek().kind != Tok::Ident) {
      error(ParseError::Kind::Syntax, "expected statement");
    }
    const std::string word = peek().text;
    if (word == "skip") {
      take();
      expect(Tok::Semi);
      s.kind = AstStmt::Kind::Skip;
    } else if (word == "assume" || word == "assert") {
      take();
      s.kind = word == "assume" ? AstStmt::Kind::Assume : AstStmt::Kind::Assert;
      expect(Tok::LParen);
      s.cond = parse_bexpr();
      expect(Tok::RParen);
      expect(Tok::Semi);
    } else if (word == "if") {
      take();
      s.kind = AstStmt::Kind::If;
      parse_condition(s);
      s.body = parse_block();
      if (peek_keyword("else")) {
        take();
        s.orelse = parse_block();
      }
    } else if (word == "while") {
      take();
      s.kind = AstStmt::Kind::While;
      parse_condition(s);
      s.body = parse_block();
    } else if (is_keyword(word)) {
      error(ParseError::Kind::Syntax, "unexpected keyword '" + word + "'");
    } else {
      if (declared_.count(word) == 0) {
        error(ParseError::Kind::Undeclared, "undeclared variable " + word);
      }
      take();
      if (peek().kind != Tok::Assign && peek().kind != Tok::Eq) {
        error(ParseError::Kind::Syntax, "expected ':='");
      }
      take();
      s.kind = AstStmt::Kind::Assign;
      s.target = var(word, prog_.width);
      s.rhs = parse_rhs();
      expect(Tok::Semi);
    }
    return s;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::optional<unsigned> override_;
  std::set<std::string> declared_;
  Program prog_;
};

} // namespace

Program parse(const SourceProgram& src, std::optional<unsigned> width_override)
{
  auto toks = lex(src.text);
  Parser p(std::move(toks), src.path, width_override);
  return p.run();
}

} // namespace accelbmc
