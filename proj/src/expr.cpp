#include "tsvolterra/expr.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>

#include "tsvolterra/calculus.hpp"

namespace tsvolterra::expr {

const Node& Expr::root() const {
  if (!root_) throw Error(Errc::BadArgument, "empty expression");
  return *root_;
}

Expr number(double v) { return Expr(std::make_shared<Node>(Node{Number{v}})); }
Expr variable(Var v) { return Expr(std::make_shared<Node>(Node{VarRef{v}})); }
Expr negate(Expr e) { return Expr(std::make_shared<Node>(Node{Negate{e.root_ptr()}})); }
Expr binary(BinOp op, Expr lhs, Expr rhs) {
  return Expr(std::make_shared<Node>(Node{Binary{op, lhs.root_ptr(), rhs.root_ptr()}}));
}
Expr power(Expr base, unsigned exponent) {
  return Expr(std::make_shared<Node>(Node{Power{base.root_ptr(), exponent}}));
}
Expr call(Builtin fn, std::vector<Expr> args) {
  std::vector<NodePtr> nodes;
  nodes.reserve(args.size());
  for (auto& a : args) nodes.push_back(a.root_ptr());
  return Expr(std::make_shared<Node>(Node{Call{fn, std::move(nodes)}}));
}

const char* builtin_name(Builtin b) {
  switch (b) {
    case Builtin::Sigma: return "sigma";
    case Builtin::Mu: return "mu";
    case Builtin::Hk: return "hk";
    case Builtin::E: return "e";
    case Builtin::Cos1: return "cos1";
    case Builtin::Sin1: return "sin1";
    case Builtin::M: return "m";
    case Builtin::Abs: return "abs";
  }
  return "?";
}

const char* var_name(Var v) {
  switch (v) {
    case Var::T: return "t";
    case Var::S: return "s";
    case Var::X: return "x";
  }
  return "?";
}

namespace {

unsigned builtin_arity(Builtin b) {
  switch (b) {
    case Builtin::Sigma:
    case Builtin::Mu:
    case Builtin::Abs: return 1;
    case Builtin::Cos1:
    case Builtin::Sin1: return 2;
    case Builtin::Hk:
    case Builtin::E:
    case Builtin::M: return 3;
  }
  return 0;
}

std::optional<Builtin> builtin_by_name(std::string_view name) {
  if (name == "sigma") return Builtin::Sigma;
  if (name == "mu") return Builtin::Mu;
  if (name == "hk") return Builtin::Hk;
  if (name == "e") return Builtin::E;
  if (name == "cos1") return Builtin::Cos1;
  if (name == "sin1") return Builtin::Sin1;
  if (name == "m") return Builtin::M;
  if (name == "abs") return Builtin::Abs;
  return std::nullopt;
}

std::optional<Var> var_by_name(std::string_view name) {
  if (name == "t") return Var::T;
  if (name == "s") return Var::S;
  if (name == "x") return Var::X;
  return std::nullopt;
}

struct Parser {
  std::string_view src;
  std::size_t pos = 0;

  // offsets in errors are 1-based byte positions
  [[noreturn]] void fail(std::size_t at, const std::string& msg) {
    throw Error(Errc::SyntaxError, msg, at + 1);
  }

  void skip_ws() {
    while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t' || src[pos] == '\n' ||
                                src[pos] == '\r'))
      ++pos;
  }

  bool at_end() {
    skip_ws();
    return pos >= src.size();
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  bool consume(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c, const char* what) {
    skip_ws();
    if (pos >= src.size() || src[pos] != c) fail(pos, std::string("expected ") + what);
    ++pos;
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    while (true) {
      skip_ws();
      if (consume('+')) {
        lhs = std::make_shared<Node>(Node{Binary{BinOp::Add, lhs, parse_term()}});
      } else if (consume('-')) {
        lhs = std::make_shared<Node>(Node{Binary{BinOp::Sub, lhs, parse_term()}});
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_factor();
    while (true) {
      skip_ws();
      if (consume('*')) {
        lhs = std::make_shared<Node>(Node{Binary{BinOp::Mul, lhs, parse_factor()}});
      } else if (consume('/')) {
        lhs = std::make_shared<Node>(Node{Binary{BinOp::Div, lhs, parse_factor()}});
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_factor() {
    NodePtr base = parse_unary();
    skip_ws();
    if (consume('^')) {
      skip_ws();
      std::size_t start = pos;
      if (pos >= src.size() || src[pos] < '0' || src[pos] > '9')
        fail(pos, "expected nonnegative integer exponent");
      std::uint64_t k = 0;
      while (pos < src.size() && src[pos] >= '0' && src[pos] <= '9') {
        k = k * 10 + static_cast<std::uint64_t>(src[pos] - '0');
        if (k > 1000000) fail(start, "exponent too large");
        ++pos;
      }
      if (pos < src.size() && (src[pos] == '.' || src[pos] == 'e' || src[pos] == 'E'))
        fail(start, "expected nonnegative integer exponent");
      return std::make_shared<Node>(Node{Power{base, static_cast<unsigned>(k)}});
    }
    return base;
  }

  NodePtr parse_unary() {
    skip_ws();
    if (consume('-')) return std::make_shared<Node>(Node{Negate{parse_unary()}});
    return parse_atom();
  }

  NodePtr parse_atom() {
    skip_ws();
    if (pos >= src.size()) fail(pos, "expected a value");
    char c = src[pos];
    if (c == '(') {
      ++pos;
      NodePtr inner = parse_expr();
      expect(')', "')'");
      return inner;
    }
    if ((c >= '0' && c <= '9') || (c == '.' && pos + 1 < src.size() && src[pos + 1] >= '0' &&
                                   src[pos + 1] <= '9')) {
      return parse_number();
    }
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') return parse_ident();
    fail(pos, std::string("unexpected character '") + c + "'");
  }

  NodePtr parse_number() {
    double value = 0.0;
    const char* begin = src.data() + pos;
    const char* end = src.data() + src.size();
    auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc{}) fail(pos, "malformed number");
    pos += static_cast<std::size_t>(res.ptr - begin);
    return std::make_shared<Node>(Node{Number{value}});
  }

  NodePtr parse_ident() {
    std::size_t start = pos;
    while (pos < src.size() &&
           ((src[pos] >= 'a' && src[pos] <= 'z') || (src[pos] >= 'A' && src[pos] <= 'Z') ||
            (src[pos] >= '0' && src[pos] <= '9') || src[pos] == '_'))
      ++pos;
    std::string_view name = src.substr(start, pos - start);
    skip_ws();
    if (pos < src.size() && src[pos] == '(') {
      auto fn = builtin_by_name(name);
      if (!fn)
        throw Error(Errc::UnknownFunction, "unknown function '" + std::string(name) + "'",
                    start + 1);
      ++pos;  // '('
      std::vector<NodePtr> args;
      if (peek() == ')') {
        ++pos;
      } else {
        args.push_back(parse_expr());
        while (true) {
          skip_ws();
          if (consume(',')) {
            args.push_back(parse_expr());
          } else if (consume(')')) {
            break;
          } else {
            fail(pos, "expected ',' or ')'");
          }
        }
      }
      if (args.size() != builtin_arity(*fn))
        throw Error(Errc::BadArity, std::string(builtin_name(*fn)) + " takes " +
                                        std::to_string(builtin_arity(*fn)) + " arguments, got " +
                                        std::to_string(args.size()),
                    start + 1);
      return std::make_shared<Node>(Node{Call{*fn, std::move(args)}});
    }
    auto var = var_by_name(name);
    if (!var)
      throw Error(Errc::UnknownFunction, "unknown identifier '" + std::string(name) + "'",
                  start + 1);
    return std::make_shared<Node>(Node{VarRef{*var}});
  }
};

}  // namespace

Expr parse(std::string_view text) {
  Parser p{text};
  NodePtr root = p.parse_expr();
  p.skip_ws();
  if (p.pos < text.size()) p.fail(p.pos, "unexpected trailing input");
  return Expr(root);
}

namespace {

std::string format_number(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void emit(const NodePtr& n, std::string& out);

void emit_binary(const Binary& b, std::string& out) {
  out += '(';
  emit(b.lhs, out);
  switch (b.op) {
    case BinOp::Add: out += '+'; break;
    case BinOp::Sub: out += '-'; break;
    case BinOp::Mul: out += '*'; break;
    case BinOp::Div: out += '/'; break;
  }
  emit(b.rhs, out);
  out += ')';
}

void emit(const NodePtr& n, std::string& out) {
  if (const auto* num = std::get_if<Number>(&n->v)) {
    if (num->value < 0.0) {
      // keep the canonical form inside the grammar: literals are nonnegative
      out += "(-";
      out += format_number(-num->value);
      out += ')';
    } else {
      out += format_number(num->value);
    }
  } else if (const auto* var = std::get_if<VarRef>(&n->v)) {
    out += var_name(var->var);
  } else if (const auto* neg = std::get_if<Negate>(&n->v)) {
    out += "(-";
    emit(neg->operand, out);
    out += ')';
  } else if (const auto* bin = std::get_if<Binary>(&n->v)) {
    emit_binary(*bin, out);
  } else if (const auto* pw = std::get_if<Power>(&n->v)) {
    out += '(';
    emit(pw->base, out);
    out += '^';
    out += std::to_string(pw->exponent);
    out += ')';
  } else if (const auto* c = std::get_if<Call>(&n->v)) {
    out += builtin_name(c->fn);
    out += '(';
    for (std::size_t i = 0; i < c->args.size(); ++i) {
      if (i) out += ',';
      emit(c->args[i], out);
    }
    out += ')';
  }
}

bool node_equal(const NodePtr& a, const NodePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->v.index() != b->v.index()) return false;
  if (const auto* num = std::get_if<Number>(&a->v))
    return num->value == std::get<Number>(b->v).value;
  if (const auto* var = std::get_if<VarRef>(&a->v)) return var->var == std::get<VarRef>(b->v).var;
  if (const auto* neg = std::get_if<Negate>(&a->v))
    return node_equal(neg->operand, std::get<Negate>(b->v).operand);
  if (const auto* bin = std::get_if<Binary>(&a->v)) {
    const auto& other = std::get<Binary>(b->v);
    return bin->op == other.op && node_equal(bin->lhs, other.lhs) &&
           node_equal(bin->rhs, other.rhs);
  }
  if (const auto* pw = std::get_if<Power>(&a->v)) {
    const auto& other = std::get<Power>(b->v);
    return pw->exponent == other.exponent && node_equal(pw->base, other.base);
  }
  const auto& ca = std::get<Call>(a->v);
  const auto& cb = std::get<Call>(b->v);
  if (ca.fn != cb.fn || ca.args.size() != cb.args.size()) return false;
  for (std::size_t i = 0; i < ca.args.size(); ++i)
    if (!node_equal(ca.args[i], cb.args[i])) return false;
  return true;
}

double int_pow(double base, unsigned k) {
  double acc = 1.0;
  double cur = base;
  while (k) {
    if (k & 1u) acc *= cur;
    cur *= cur;
    k >>= 1u;
  }
  return acc;
}

struct Evaluator {
  const EvalEnv& env;

  const TimeScale& scale() const {
    if (!env.scale) throw Error(Errc::BadArgument, "expression needs a time scale to evaluate");
    return *env.scale;
  }

  double eval(const NodePtr& n) const {
    if (const auto* num = std::get_if<Number>(&n->v)) return num->value;
    if (const auto* var = std::get_if<VarRef>(&n->v)) {
      switch (var->var) {
        case Var::T:
          if (!env.t) throw Error(Errc::UnboundVariable, "t is not bound");
          return *env.t;
        case Var::S:
          if (!env.s) throw Error(Errc::UnboundVariable, "s is not bound");
          return *env.s;
        case Var::X:
          if (!env.x) throw Error(Errc::UnboundVariable, "x is not bound");
          return *env.x;
      }
    }
    if (const auto* neg = std::get_if<Negate>(&n->v)) return -eval(neg->operand);
    if (const auto* bin = std::get_if<Binary>(&n->v)) {
      double l = eval(bin->lhs);
      double r = eval(bin->rhs);
      switch (bin->op) {
        case BinOp::Add: return l + r;
        case BinOp::Sub: return l - r;
        case BinOp::Mul: return l * r;
        case BinOp::Div:
          if (r == 0.0) throw Error(Errc::DivisionByZero, "division by zero");
          return l / r;
      }
    }
    if (const auto* pw = std::get_if<Power>(&n->v)) return int_pow(eval(pw->base), pw->exponent);
    const auto& c = std::get<Call>(n->v);
    switch (c.fn) {
      case Builtin::Sigma: return scale().sigma(eval(c.args[0]));
      case Builtin::Mu: return scale().mu(eval(c.args[0]));
      case Builtin::Abs: return std::fabs(eval(c.args[0]));
      case Builtin::Hk: {
        double k_raw = eval(c.args[0]);
        double rounded = std::nearbyint(k_raw);
        if (!(std::fabs(k_raw - rounded) <= 1e-9) || rounded < 0.0)
          throw Error(Errc::BadArgument, "hk order must be a nonnegative integer");
        return monomial(scale(), static_cast<unsigned>(rounded), eval(c.args[1]), eval(c.args[2]));
      }
      case Builtin::E:
        return exp_constant(scale(), eval(c.args[0]), eval(c.args[1]), eval(c.args[2]));
      case Builtin::Cos1:
        return trig(scale(), 1.0, eval(c.args[0]), eval(c.args[1])).cos_value;
      case Builtin::Sin1:
        return trig(scale(), 1.0, eval(c.args[0]), eval(c.args[1])).sin_value;
      case Builtin::M: return mfunc(scale(), eval(c.args[0]), eval(c.args[1]), eval(c.args[2]));
    }
    throw Error(Errc::BadArgument, "unreachable expression node");
  }
};

}  // namespace

std::string Expr::text() const {
  std::string out;
  emit(root_ptr(), out);
  return out;
}

bool operator==(const Expr& a, const Expr& b) { return node_equal(a.root_ptr(), b.root_ptr()); }

double evaluate(const Expr& e, const EvalEnv& env) {
  Evaluator ev{env};
  return ev.eval(e.root_ptr());
}

}  // namespace tsvolterra::expr
