#pragma once

#include <array>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dsurf/types.hpp"

namespace dsurf {

enum class Func { Sin, Cos, Tan, Sinh, Cosh, Tanh, Exp, Log, Sqrt, Atan, Atan2 };

const char* func_name(Func f);
int func_arity(Func f);

// Immutable expression tree. Nodes are shared, so copying an Expr is cheap.
struct ExprNode {
  enum class Kind { Number, Param, Pi, Neg, Add, Sub, Mul, Div, Pow, Call };

  Kind kind = Kind::Number;
  double number = 0.0;  // Kind::Number
  int param = 0;        // Kind::Param: 0 or 1
  Func func = Func::Sin;  // Kind::Call
  std::vector<std::shared_ptr<const ExprNode>> args;
  int column = 0;  // 1-based source column, 0 when synthesized
};

using ExprNodePtr = std::shared_ptr<const ExprNode>;

class Expr {
 public:
  Expr() = default;
  explicit Expr(ExprNodePtr root) : root_(std::move(root)) {}

  static Expr constant(double value);
  static Expr parameter(int index);

  const ExprNode& root() const { return *root_; }
  bool empty() const { return root_ == nullptr; }

 private:
  ExprNodePtr root_;
};

// Value, gradient and Hessian of a scalar function of (s1, s2).
struct Jet2 {
  double value = 0.0;
  Vec2 grad = Vec2::Zero();
  double hxx = 0.0;
  double hxy = 0.0;
  double hyy = 0.0;

  Mat2 hess() const {
    Mat2 h;
    h << hxx, hxy, hxy, hyy;
    return h;
  }

  static Jet2 constant(double v) {
    Jet2 j;
    j.value = v;
    return j;
  }
  static Jet2 variable(int index, double v) {
    Jet2 j;
    j.value = v;
    j.grad[index] = 1.0;
    return j;
  }
};

// Precedence: ^ binds tighter than unary minus, which binds tighter than * /,
// which bind tighter than + -. ^ is right-associative.
Expr parse_expression(std::string_view text, const std::array<std::string, 2>& param_names);

double eval(const Expr& expr, const Vec2& s);

// Exact second-order forward-mode derivatives. Throws DomainError at points
// where the function (or its first two derivatives) is not defined.
Jet2 eval_jet2(const Expr& expr, const Vec2& s);

// Fully parenthesised canonical text; parses back to a structurally equal tree.
std::string to_string(const Expr& expr, const std::array<std::string, 2>& param_names);

bool structurally_equal(const Expr& a, const Expr& b);

// True when the expression never references a parameter.
bool is_constant(const Expr& expr);

}  // namespace dsurf
