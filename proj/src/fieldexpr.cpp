#include "mobsense/fieldexpr.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <utility>
#include <vector>

#include "mobsense/errors.hpp"

namespace mobsense {

using Op = FieldExpr::Op;
using NodePtr = FieldExpr::NodePtr;
using Node = FieldExpr::Node;

namespace {

NodePtr leaf(Op op) {
  auto n = std::make_shared<Node>();
  n->op = op;
  return n;
}

NodePtr make_const_raw(double v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->value = v;
  return n;
}

NodePtr make_unary(Op op, NodePtr a) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->depth = a->depth + 1;
  n->lhs = std::move(a);
  return n;
}

NodePtr make_binary(Op op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->depth = std::max(a->depth, b->depth) + 1;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

NodePtr make_pow_raw(NodePtr base, int exponent) {
  auto n = std::make_shared<Node>();
  n->op = Op::Pow;
  n->index = exponent;
  n->depth = base->depth + 1;
  n->lhs = std::move(base);
  return n;
}

// Negative constants are always stored as Neg(Const) so that printing and
// re-parsing reproduce the same tree.
NodePtr make_const(double v) {
  if (v < 0.0 || (v == 0.0 && std::signbit(v))) {
    if (v == 0.0) return make_const_raw(0.0);
    return make_unary(Op::Neg, make_const_raw(-v));
  }
  return make_const_raw(v);
}

bool is_const(const NodePtr& n, double* v = nullptr) {
  if (n->op == Op::Const) {
    if (v) *v = n->value;
    return true;
  }
  if (n->op == Op::Neg && n->lhs->op == Op::Const) {
    if (v) *v = -n->lhs->value;
    return true;
  }
  return false;
}

bool is_value(const NodePtr& n, double target) {
  double v;
  return is_const(n, &v) && v == target;
}

// Folding constructors used by differentiation.
NodePtr s_neg(NodePtr a) {
  double v;
  if (is_const(a, &v)) return make_const(-v);
  if (a->op == Op::Neg) return a->lhs;
  return make_unary(Op::Neg, std::move(a));
}

NodePtr s_add(NodePtr a, NodePtr b) {
  double x, y;
  if (is_const(a, &x) && is_const(b, &y) && std::isfinite(x + y)) return make_const(x + y);
  if (is_value(a, 0.0)) return b;
  if (is_value(b, 0.0)) return a;
  return make_binary(Op::Add, std::move(a), std::move(b));
}

NodePtr s_sub(NodePtr a, NodePtr b) {
  double x, y;
  if (is_const(a, &x) && is_const(b, &y) && std::isfinite(x - y)) return make_const(x - y);
  if (is_value(b, 0.0)) return a;
  if (is_value(a, 0.0)) return s_neg(std::move(b));
  return make_binary(Op::Sub, std::move(a), std::move(b));
}

NodePtr s_mul(NodePtr a, NodePtr b) {
  double x, y;
  if (is_const(a, &x) && is_const(b, &y) && std::isfinite(x * y)) return make_const(x * y);
  if (is_value(a, 0.0) || is_value(b, 0.0)) return make_const(0.0);
  if (is_value(a, 1.0)) return b;
  if (is_value(b, 1.0)) return a;
  if (is_value(a, -1.0)) return s_neg(std::move(b));
  if (is_value(b, -1.0)) return s_neg(std::move(a));
  return make_binary(Op::Mul, std::move(a), std::move(b));
}

NodePtr s_div(NodePtr a, NodePtr b) {
  if (is_value(a, 0.0) && !is_value(b, 0.0)) return make_const(0.0);
  if (is_value(b, 1.0)) return a;
  return make_binary(Op::Div, std::move(a), std::move(b));
}

NodePtr s_pow(NodePtr base, int exponent) {
  if (exponent == 0) return make_const(1.0);
  if (exponent == 1) return base;
  return make_pow_raw(std::move(base), exponent);
}

void collect(const Node& n, std::set<std::string>& params, int& dim, bool& time) {
  switch (n.op) {
    case Op::Param: params.insert(n.name); break;
    case Op::Coord: dim = std::max(dim, n.index); break;
    case Op::Time: time = true; break;
    default: break;
  }
  if (n.lhs) collect(*n.lhs, params, dim, time);
  if (n.rhs) collect(*n.rhs, params, dim, time);
}

const char* func_name(Op op) {
  switch (op) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Exp: return "exp";
    case Op::Abs: return "abs";
    case Op::Sqrt: return "sqrt";
    case Op::Sgn: return "sgn";
    default: return nullptr;
  }
}

std::optional<Op> func_op(std::string_view name) {
  if (name == "sin") return Op::Sin;
  if (name == "cos") return Op::Cos;
  if (name == "exp") return Op::Exp;
  if (name == "abs") return Op::Abs;
  if (name == "sqrt") return Op::Sqrt;
  if (name == "sgn") return Op::Sgn;
  return std::nullopt;
}

int precedence(const Node& n) {
  switch (n.op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;
  }
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print(const Node& n, std::string& out) {
  auto wrap = [&out](const Node& child, bool parens) {
    if (parens) out += '(';
    print(child, out);
    if (parens) out += ')';
  };
  switch (n.op) {
    case Op::Const: out += format_number(n.value); return;
    case Op::Coord: out += "x" + std::to_string(n.index); return;
    case Op::Time: out += 't'; return;
    case Op::Param: out += n.name; return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      const int p = precedence(n);
      wrap(*n.lhs, precedence(*n.lhs) < p);
      out += n.op == Op::Add ? " + " : n.op == Op::Sub ? " - " : n.op == Op::Mul ? "*" : "/";
      wrap(*n.rhs, precedence(*n.rhs) <= p);
      return;
    }
    case Op::Neg:
      out += '-';
      wrap(*n.lhs, precedence(*n.lhs) < 3);
      return;
    case Op::Pow:
      wrap(*n.lhs, precedence(*n.lhs) < 4);
      out += '^';
      out += std::to_string(n.index);
      return;
    default:
      out += func_name(n.op);
      out += '(';
      print(*n.lhs, out);
      out += ')';
      return;
  }
}

bool equal_nodes(const Node& a, const Node& b) {
  if (a.op != b.op) return false;
  switch (a.op) {
    case Op::Const:
      if (a.value != b.value) return false;
      break;
    case Op::Coord:
    case Op::Pow:
      if (a.index != b.index) return false;
      break;
    case Op::Param:
      if (a.name != b.name) return false;
      break;
    default: break;
  }
  if (bool(a.lhs) != bool(b.lhs) || bool(a.rhs) != bool(b.rhs)) return false;
  if (a.lhs && !equal_nodes(*a.lhs, *b.lhs)) return false;
  if (a.rhs && !equal_nodes(*a.rhs, *b.rhs)) return false;
  return true;
}

double eval_node(const Node& n, std::span<const double> x, double t, const ParamMap& params) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Coord: return x[static_cast<std::size_t>(n.index - 1)];
    case Op::Time: return t;
    case Op::Param: {
      auto it = params.find(n.name);
      if (it == params.end()) throw UnboundParameterError(n.name);
      return it->second;
    }
    case Op::Add: return eval_node(*n.lhs, x, t, params) + eval_node(*n.rhs, x, t, params);
    case Op::Sub: return eval_node(*n.lhs, x, t, params) - eval_node(*n.rhs, x, t, params);
    case Op::Mul: return eval_node(*n.lhs, x, t, params) * eval_node(*n.rhs, x, t, params);
    case Op::Div: {
      const double num = eval_node(*n.lhs, x, t, params);
      const double den = eval_node(*n.rhs, x, t, params);
      if (den == 0.0) throw DomainError("division by zero");
      return num / den;
    }
    case Op::Neg: return -eval_node(*n.lhs, x, t, params);
    case Op::Pow: {
      const double b = eval_node(*n.lhs, x, t, params);
      if (n.index < 0 && b == 0.0) throw DomainError("zero raised to a negative power");
      return std::pow(b, n.index);
    }
    case Op::Sin: return std::sin(eval_node(*n.lhs, x, t, params));
    case Op::Cos: return std::cos(eval_node(*n.lhs, x, t, params));
    case Op::Exp: return std::exp(eval_node(*n.lhs, x, t, params));
    case Op::Abs: return std::abs(eval_node(*n.lhs, x, t, params));
    case Op::Sqrt: {
      const double a = eval_node(*n.lhs, x, t, params);
      if (a < 0.0) throw DomainError("sqrt of a negative value");
      return std::sqrt(a);
    }
    case Op::Sgn: {
      const double a = eval_node(*n.lhs, x, t, params);
      if (a == 0.0) throw NonSmoothError("derivative of abs evaluated at a kink (argument is zero)");
      return a > 0.0 ? 1.0 : -1.0;
    }
  }
  return 0.0;
}

NodePtr diff_node(const NodePtr& n, std::string_view p) {
  switch (n->op) {
    case Op::Const:
    case Op::Coord:
    case Op::Time: return make_const(0.0);
    case Op::Param: return make_const(n->name == p ? 1.0 : 0.0);
    case Op::Add: return s_add(diff_node(n->lhs, p), diff_node(n->rhs, p));
    case Op::Sub: return s_sub(diff_node(n->lhs, p), diff_node(n->rhs, p));
    case Op::Mul:
      return s_add(s_mul(diff_node(n->lhs, p), n->rhs), s_mul(n->lhs, diff_node(n->rhs, p)));
    case Op::Div: {
      auto du = diff_node(n->lhs, p);
      auto dv = diff_node(n->rhs, p);
      if (is_value(dv, 0.0)) return s_div(du, n->rhs);
      return s_div(s_sub(s_mul(du, n->rhs), s_mul(n->lhs, dv)), s_pow(n->rhs, 2));
    }
    case Op::Neg: return s_neg(diff_node(n->lhs, p));
    case Op::Pow: {
      auto du = diff_node(n->lhs, p);
      const int k = n->index;
      return s_mul(s_mul(make_const(k), s_pow(n->lhs, k - 1)), du);
    }
    case Op::Sin: return s_mul(make_unary(Op::Cos, n->lhs), diff_node(n->lhs, p));
    case Op::Cos: return s_mul(s_neg(make_unary(Op::Sin, n->lhs)), diff_node(n->lhs, p));
    case Op::Exp: return s_mul(n, diff_node(n->lhs, p));
    case Op::Abs: {
      auto du = diff_node(n->lhs, p);
      if (is_value(du, 0.0)) return du;
      return s_mul(make_unary(Op::Sgn, n->lhs), du);
    }
    case Op::Sqrt: {
      auto du = diff_node(n->lhs, p);
      if (is_value(du, 0.0)) return du;
      return s_div(du, s_mul(make_const(2.0), n));
    }
    case Op::Sgn: return make_const(0.0);
  }
  return make_const(0.0);
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind;
  std::size_t offset;
  std::string_view text;
};

class Parser {
 public:
  Parser(std::string_view src, const ParseOptions& opts) : src_(src), opts_(opts) { advance(); }

  NodePtr parse() {
    NodePtr e = expr();
    if (cur_.kind != Tok::End) {
      throw ParseError("unexpected token '" + std::string(cur_.text) + "'", cur_.offset,
                       "operator or end of input");
    }
    return e;
  }

 private:
  std::string_view src_;
  const ParseOptions& opts_;
  std::size_t pos_ = 0;
  Token cur_{Tok::End, 0, {}};
  int nesting_ = 0;

  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }

  void advance() {
    while (pos_ < src_.size() &&
           (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r')) {
      ++pos_;
    }
    const std::size_t start = pos_;
    if (pos_ >= src_.size()) {
      cur_ = {Tok::End, start, {}};
      return;
    }
    const char c = src_[pos_];
    auto single = [&](Tok k) {
      ++pos_;
      cur_ = {k, start, src_.substr(start, 1)};
    };
    switch (c) {
      case '+': return single(Tok::Plus);
      case '-': return single(Tok::Minus);
      case '*': return single(Tok::Star);
      case '/': return single(Tok::Slash);
      case '^': return single(Tok::Caret);
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      default: break;
    }
    if (is_digit(c) || c == '.') {
      while (pos_ < src_.size() && (is_digit(src_[pos_]) || src_[pos_] == '.')) ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        std::size_t q = pos_ + 1;
        if (q < src_.size() && (src_[q] == '+' || src_[q] == '-')) ++q;
        if (q < src_.size() && is_digit(src_[q])) {
          pos_ = q;
          while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
        }
      }
      cur_ = {Tok::Number, start, src_.substr(start, pos_ - start)};
      return;
    }
    if (is_ident_start(c)) {
      while (pos_ < src_.size() && (is_ident_start(src_[pos_]) || is_digit(src_[pos_]))) ++pos_;
      cur_ = {Tok::Ident, start, src_.substr(start, pos_ - start)};
      return;
    }
    throw ParseError("unexpected character", start, "operand or operator");
  }

  NodePtr checked(NodePtr n, std::size_t offset) {
    if (n->depth > opts_.max_depth) throw ParseError("expression nests too deeply", offset);
    return n;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
      const Op op = cur_.kind == Tok::Plus ? Op::Add : Op::Sub;
      const std::size_t at = cur_.offset;
      advance();
      lhs = checked(make_binary(op, lhs, term()), at);
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (cur_.kind == Tok::Star || cur_.kind == Tok::Slash) {
      const Op op = cur_.kind == Tok::Star ? Op::Mul : Op::Div;
      const std::size_t at = cur_.offset;
      advance();
      lhs = checked(make_binary(op, lhs, unary()), at);
    }
    return lhs;
  }

  NodePtr unary() {
    if (cur_.kind == Tok::Minus) {
      const std::size_t at = cur_.offset;
      enter(at);
      advance();
      NodePtr n = checked(make_unary(Op::Neg, unary()), at);
      --nesting_;
      return n;
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    while (cur_.kind == Tok::Caret) {
      const std::size_t at = cur_.offset;
      advance();
      bool negative = false;
      if (cur_.kind == Tok::Minus || cur_.kind == Tok::Plus) {
        negative = cur_.kind == Tok::Minus;
        advance();
      }
      if (cur_.kind != Tok::Number) throw ParseError("missing exponent", cur_.offset, "integer exponent");
      int k = 0;
      const auto text = cur_.text;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), k);
      if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ParseError("exponent must be an integer literal", cur_.offset, "integer exponent");
      }
      advance();
      base = checked(make_pow_raw(base, negative ? -k : k), at);
    }
    return base;
  }

  void enter(std::size_t at) {
    if (++nesting_ > opts_.max_depth) throw ParseError("expression nests too deeply", at);
  }

  NodePtr primary() {
    const Token tok = cur_;
    switch (tok.kind) {
      case Tok::Number: {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), v);
        if (ec != std::errc{} || ptr != tok.text.data() + tok.text.size() || !std::isfinite(v)) {
          throw ParseError("malformed number '" + std::string(tok.text) + "'", tok.offset, "number");
        }
        advance();
        return make_const_raw(v);
      }
      case Tok::LParen: {
        enter(tok.offset);
        advance();
        NodePtr inner = expr();
        if (cur_.kind != Tok::RParen) throw ParseError("unbalanced parenthesis", cur_.offset, "')'");
        advance();
        --nesting_;
        return inner;
      }
      case Tok::Ident: return identifier(tok);
      case Tok::End: throw ParseError("unexpected end of input", tok.offset, "operand");
      default:
        throw ParseError("unexpected token '" + std::string(tok.text) + "'", tok.offset, "operand");
    }
  }

  NodePtr identifier(const Token& tok) {
    const std::string_view name = tok.text;
    advance();
    if (auto f = func_op(name)) {
      if (cur_.kind != Tok::LParen) throw ParseError("function needs an argument", cur_.offset, "'('");
      enter(cur_.offset);
      advance();
      NodePtr arg = expr();
      if (cur_.kind != Tok::RParen) throw ParseError("unbalanced parenthesis", cur_.offset, "')'");
      advance();
      --nesting_;
      return checked(make_unary(*f, arg), tok.offset);
    }
    if (cur_.kind == Tok::LParen) {
      throw ParseError("unknown function '" + std::string(name) + "'", tok.offset,
                       "one of sin, cos, exp, abs, sqrt, sgn");
    }
    if (name == "t") return leaf(Op::Time);
    if (name.size() >= 2 && name[0] == 'x' && is_digit(name[1])) {
      int idx = 0;
      auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
      if (ec == std::errc{} && ptr == name.data() + name.size()) {
        if (idx < 1) throw ParseError("coordinate index must be at least 1", tok.offset, "x1, x2, ...");
        auto n = std::make_shared<Node>();
        n->op = Op::Coord;
        n->index = idx;
        return n;
      }
    }
    if (opts_.known_params && !opts_.known_params->contains(std::string(name))) {
      throw ParseError("unknown identifier '" + std::string(name) + "'", tok.offset, "known parameter");
    }
    auto n = std::make_shared<Node>();
    n->op = Op::Param;
    n->name = std::string(name);
    return n;
  }
};

}  // namespace

FieldExpr::FieldExpr() : FieldExpr(make_const_raw(0.0)) {}

FieldExpr::FieldExpr(NodePtr root) : root_(std::move(root)) {
  std::set<std::string> params;
  collect(*root_, params, dimension_, uses_time_);
  free_params_ = std::make_shared<const std::set<std::string>>(std::move(params));
}

FieldExpr FieldExpr::constant(double value) { return FieldExpr(make_const(value)); }

FieldExpr FieldExpr::coordinate(int index) {
  if (index < 1) throw RangeError("coordinate index must be at least 1");
  auto n = std::make_shared<Node>();
  n->op = Op::Coord;
  n->index = index;
  return FieldExpr(n);
}

FieldExpr FieldExpr::time() { return FieldExpr(leaf(Op::Time)); }

FieldExpr FieldExpr::parameter(std::string name) {
  auto n = std::make_shared<Node>();
  n->op = Op::Param;
  n->name = std::move(name);
  return FieldExpr(n);
}

double FieldExpr::eval(std::span<const double> point, double time, const ParamMap& params) const {
  if (point.size() < static_cast<std::size_t>(dimension_)) {
    throw RangeError("point has dimension " + std::to_string(point.size()) + " but expression uses x" +
                     std::to_string(dimension_));
  }
  const double v = eval_node(*root_, point, time, params);
  if (!std::isfinite(v)) throw DomainError("expression evaluated to a non-finite value");
  return v;
}

bool FieldExpr::is_zero() const noexcept { return is_value(root_, 0.0); }

int FieldExpr::depth() const noexcept { return root_->depth; }

std::string FieldExpr::to_string() const {
  std::string out;
  print(*root_, out);
  return out;
}

bool FieldExpr::structurally_equal(const FieldExpr& other) const {
  return equal_nodes(*root_, *other.root_);
}

FieldExpr operator+(const FieldExpr& a, const FieldExpr& b) {
  return FieldExpr(make_binary(Op::Add, a.root_, b.root_));
}
FieldExpr operator-(const FieldExpr& a, const FieldExpr& b) {
  return FieldExpr(make_binary(Op::Sub, a.root_, b.root_));
}
FieldExpr operator*(const FieldExpr& a, const FieldExpr& b) {
  return FieldExpr(make_binary(Op::Mul, a.root_, b.root_));
}
FieldExpr operator/(const FieldExpr& a, const FieldExpr& b) {
  return FieldExpr(make_binary(Op::Div, a.root_, b.root_));
}
FieldExpr operator-(const FieldExpr& a) { return FieldExpr(make_unary(Op::Neg, a.root_)); }
FieldExpr pow(const FieldExpr& base, int exponent) { return FieldExpr(make_pow_raw(base.root_, exponent)); }
FieldExpr sin(const FieldExpr& a) { return FieldExpr(make_unary(Op::Sin, a.root_)); }
FieldExpr cos(const FieldExpr& a) { return FieldExpr(make_unary(Op::Cos, a.root_)); }
FieldExpr exp(const FieldExpr& a) { return FieldExpr(make_unary(Op::Exp, a.root_)); }
FieldExpr abs(const FieldExpr& a) { return FieldExpr(make_unary(Op::Abs, a.root_)); }
FieldExpr sqrt(const FieldExpr& a) { return FieldExpr(make_unary(Op::Sqrt, a.root_)); }

FieldExpr parse_field(std::string_view source, const ParseOptions& options) {
  Parser parser(source, options);
  return FieldExpr(parser.parse());
}

double eval_field(const FieldExpr& expr, std::span<const double> point, double time,
                  const ParamMap& params) {
  return expr.eval(point, time, params);
}

FieldExpr diff_param(const FieldExpr& expr, std::string_view param) {
  if (!expr.free_params().contains(std::string(param))) return FieldExpr::constant(0.0);
  return FieldExpr(diff_node(expr.root_ptr(), param));
}

}  // namespace mobsense
