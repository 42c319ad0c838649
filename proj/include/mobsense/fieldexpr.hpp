#pragma once

// Scalar-field expressions f(x1..xd, t; params).
//
// Grammar (lowest to highest precedence, equal precedence left-associative):
//
//   expr    := term   (('+' | '-') term)*
//   term    := unary  (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' ['-' | '+'] INTEGER)*
//   primary := NUMBER | 't' | 'x'INDEX | NAME | FUNC '(' expr ')' | '(' expr ')'
//   FUNC    := sin | cos | exp | abs | sqrt | sgn
//
// Coordinates are x1, x2, ... (1-based). Any other identifier is a named
// parameter. Exponents are integer literals only. sgn(0) is an evaluation
// error: it marks a kink of abs and is what diff_param produces for |u|.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>

namespace mobsense {

using ParamMap = std::map<std::string, double, std::less<>>;

class FieldExpr {
 public:
  enum class Op { Const, Coord, Time, Param, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp, Abs, Sqrt, Sgn };

  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

  FieldExpr();  // the constant 0

  static FieldExpr constant(double value);
  static FieldExpr coordinate(int index);  // 1-based
  static FieldExpr time();
  static FieldExpr parameter(std::string name);

  double eval(std::span<const double> point, double time, const ParamMap& params) const;

  const std::set<std::string>& free_params() const noexcept { return *free_params_; }
  int dimension() const noexcept { return dimension_; }
  bool uses_time() const noexcept { return uses_time_; }
  bool is_zero() const noexcept;
  int depth() const noexcept;

  std::string to_string() const;
  bool structurally_equal(const FieldExpr& other) const;

  const Node& root() const noexcept { return *root_; }
  const NodePtr& root_ptr() const noexcept { return root_; }

  friend FieldExpr operator+(const FieldExpr& a, const FieldExpr& b);
  friend FieldExpr operator-(const FieldExpr& a, const FieldExpr& b);
  friend FieldExpr operator*(const FieldExpr& a, const FieldExpr& b);
  friend FieldExpr operator/(const FieldExpr& a, const FieldExpr& b);
  friend FieldExpr operator-(const FieldExpr& a);
  friend FieldExpr pow(const FieldExpr& base, int exponent);
  friend FieldExpr sin(const FieldExpr& a);
  friend FieldExpr cos(const FieldExpr& a);
  friend FieldExpr exp(const FieldExpr& a);
  friend FieldExpr abs(const FieldExpr& a);
  friend FieldExpr sqrt(const FieldExpr& a);

  explicit FieldExpr(NodePtr root);

 private:
  NodePtr root_;
  std::shared_ptr<const std::set<std::string>> free_params_;
  int dimension_ = 0;
  bool uses_time_ = false;
};

struct FieldExpr::Node {
  Op op;
  double value = 0.0;  // Const
  int index = 0;       // Coord index, Pow exponent
  std::string name;    // Param
  NodePtr lhs;
  NodePtr rhs;
  int depth = 1;
};

struct ParseOptions {
  // When set, identifiers outside this set are rejected as unknown.
  std::optional<std::set<std::string>> known_params;
  int max_depth = 512;
};

FieldExpr parse_field(std::string_view source, const ParseOptions& options = {});

double eval_field(const FieldExpr& expr, std::span<const double> point, double time,
                  const ParamMap& params);

/// Symbolic partial derivative. Light constant folding only (0 and 1
/// identities, constant arithmetic); not a simplifier.
FieldExpr diff_param(const FieldExpr& expr, std::string_view param);

}  // namespace mobsense
