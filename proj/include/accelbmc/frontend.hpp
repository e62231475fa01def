#pragma once

#include "accelbmc/cfa.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace accelbmc {

struct SourceProgram {
  std::string text;
  std::string path = "<input>";
};

SourceProgram read_source(const std::string& path);

class ParseError : public std::runtime_error {
public:
  enum class Kind { Lexical, Syntax, Undeclared, Duplicate, Semantic };

  ParseError(Kind kind, int line, int column, const std::string& msg);

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }

private:
  Kind kind_;
  int line_;
  int column_;
};

struct AstStmt;
using Block = std::vector<AstStmt>;

struct AstStmt {
  enum class Kind { Assign, Assume, Assert, If, While, Skip };

  Kind kind = Kind::Skip;
  Expr target;               // Assign
  Expr rhs;                  // Assign; a Nondet node for `x := *`
  BExpr cond;                // Assume, Assert, If, While
  bool nondet_cond = false;  // `if (*)` / `while (*)`
  Block body;                // If (then branch), While
  Block orelse;              // If
  int line = 0;
  int column = 0;
};

struct DeclAst {
  std::string name;
  Expr init;  // empty, a term, or a Nondet node
  int line = 0;
  int column = 0;
};

struct Program {
  std::string path;
  unsigned width = 32;
  std::vector<DeclAst> decls;
  Block body;
};

/// Parses the `.imp` mini-language. `width_override` replaces any width
/// given by `unsigned<W>` declarations.
Program parse(const SourceProgram& src, std::optional<unsigned> width_override = std::nullopt);

/// Lowers to a CFA. Assertions become `[!B]` edges into fresh error
/// vertices; syntactically unreachable vertices are dropped and any
/// dropped assertion is reported in `warnings`.
Cfa lower(const Program& program, std::vector<std::string>* warnings = nullptr);

/// GraphViz rendering: error vertices double-circled, accelerator edges
/// bold, automaton bookkeeping edges dashed.
std::string dump_dot(const Cfa& cfa, const std::string& name = "cfa");

} // namespace accelbmc
