#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tsvolterra/time_scale.hpp"

namespace tsvolterra::expr {

// Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := unary ('^' integer)?
//   unary  := '-' unary | atom
//   atom   := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
// '^' accepts a nonnegative integer literal only. Variables are t, s, x.

enum class Builtin { Sigma, Mu, Hk, E, Cos1, Sin1, M, Abs };
enum class Var { T, S, X };
enum class BinOp { Add, Sub, Mul, Div };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Number {
  double value;
};
struct VarRef {
  Var var;
};
struct Negate {
  NodePtr operand;
};
struct Binary {
  BinOp op;
  NodePtr lhs;
  NodePtr rhs;
};
struct Power {
  NodePtr base;
  unsigned exponent;
};
struct Call {
  Builtin fn;
  std::vector<NodePtr> args;
};

struct Node {
  std::variant<Number, VarRef, Negate, Binary, Power, Call> v;
};

class Expr {
public:
  Expr() = default;
  explicit Expr(NodePtr root) : root_(std::move(root)) {}

  bool empty() const noexcept { return !root_; }
  const Node& root() const;
  const NodePtr& root_ptr() const noexcept { return root_; }

  // canonical fully parenthesized form; parse(text()) is structurally equal
  std::string text() const;

private:
  NodePtr root_;
};

bool operator==(const Expr& a, const Expr& b);  // structural equality

// Throws SyntaxError (with 1-based byte offset), UnknownFunction or BadArity.
Expr parse(std::string_view text);

struct EvalEnv {
  TimeScalePtr scale;
  std::optional<double> t;
  std::optional<double> s;
  std::optional<double> x;
};

// Throws UnboundVariable, NotAPoint, DivisionByZero, NotRegressive,
// BackwardUnsupported or BadArgument depending on what goes wrong.
double evaluate(const Expr& e, const EvalEnv& env);

// node builders, mostly for tests and generated instances
Expr number(double v);
Expr variable(Var v);
Expr negate(Expr e);
Expr binary(BinOp op, Expr lhs, Expr rhs);
Expr power(Expr base, unsigned exponent);
Expr call(Builtin fn, std::vector<Expr> args);

const char* builtin_name(Builtin b);
const char* var_name(Var v);

}  // namespace tsvolterra::expr
