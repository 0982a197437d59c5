#include "dsurf/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace dsurf {

namespace {

struct FuncInfo {
  Func func;
  const char* name;
  int arity;
};

constexpr FuncInfo kFuncs[] = {
    {Func::Sin, "sin", 1},   {Func::Cos, "cos", 1},   {Func::Tan, "tan", 1},
    {Func::Sinh, "sinh", 1}, {Func::Cosh, "cosh", 1}, {Func::Tanh, "tanh", 1},
    {Func::Exp, "exp", 1},   {Func::Log, "log", 1},   {Func::Sqrt, "sqrt", 1},
    {Func::Atan, "atan", 1}, {Func::Atan2, "atan2", 2},
};

const FuncInfo* find_func(std::string_view name) {
  for (const auto& f : kFuncs) {
    if (name == f.name) return &f;
  }
  return nullptr;
}

ExprNodePtr make_node(ExprNode node) { return std::make_shared<const ExprNode>(std::move(node)); }

ExprNodePtr make_binary(ExprNode::Kind kind, ExprNodePtr lhs, ExprNodePtr rhs, int column) {
  ExprNode n;
  n.kind = kind;
  n.column = column;
  n.args = {std::move(lhs), std::move(rhs)};
  return make_node(std::move(n));
}

// ---------------------------------------------------------------------------
// Lexer + recursive-descent parser

struct Token {
  enum class Type { Number, Ident, Op, LParen, RParen, Comma, End };
  Type type = Type::End;
  std::string text;
  double number = 0.0;
  int column = 0;
};

class Parser {
 public:
  Parser(std::string_view text, const std::array<std::string, 2>& params)
      : text_(text), params_(params) {
    tokenize();
  }

  ExprNodePtr parse() {
    if (tokens_.size() == 1) throw ParseError("empty expression", 0, 1);
    auto e = expr();
    if (peek().type != Token::Type::End) fail_unexpected(peek());
    return e;
  }

 private:
  void tokenize() {
    size_t i = 0;
    while (i < text_.size()) {
      const char c = text_[i];
      const int col = static_cast<int>(i) + 1;
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      Token t;
      t.column = col;
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        size_t j = i;
        while (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j]))) ++j;
        if (j < text_.size() && text_[j] == '.') {
          ++j;
          while (j < text_.size() && std::isdigit(static_cast<unsigned char>(text_[j]))) ++j;
        }
        if (j < text_.size() && (text_[j] == 'e' || text_[j] == 'E')) {
          size_t k = j + 1;
          if (k < text_.size() && (text_[k] == '+' || text_[k] == '-')) ++k;
          if (k < text_.size() && std::isdigit(static_cast<unsigned char>(text_[k]))) {
            while (k < text_.size() && std::isdigit(static_cast<unsigned char>(text_[k]))) ++k;
            j = k;
          }
        }
        t.type = Token::Type::Number;
        t.text = std::string(text_.substr(i, j - i));
        if (t.text == ".") throw ParseError("malformed number", 0, col);
        t.number = std::strtod(t.text.c_str(), nullptr);
        i = j;
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        size_t j = i;
        while (j < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[j])) || text_[j] == '_'))
          ++j;
        t.type = Token::Type::Ident;
        t.text = std::string(text_.substr(i, j - i));
        i = j;
      } else {
        switch (c) {
          case '+':
          case '-':
          case '*':
          case '/':
          case '^':
            t.type = Token::Type::Op;
            break;
          case '(':
            t.type = Token::Type::LParen;
            break;
          case ')':
            t.type = Token::Type::RParen;
            break;
          case ',':
            t.type = Token::Type::Comma;
            break;
          default:
            throw ParseError(std::string("unexpected character '") + c + "'", 0, col);
        }
        t.text = std::string(1, c);
        ++i;
      }
      tokens_.push_back(std::move(t));
    }
    Token end;
    end.type = Token::Type::End;
    end.column = static_cast<int>(text_.size()) + 1;
    tokens_.push_back(end);
  }

  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  bool at_op(char op) const {
    return peek().type == Token::Type::Op && peek().text[0] == op;
  }

  [[noreturn]] void fail_unexpected(const Token& t) const {
    if (t.type == Token::Type::End) throw ParseError("unexpected end of expression", 0, t.column);
    throw ParseError("syntax error near '" + t.text + "'", 0, t.column);
  }

  void expect(Token::Type type, const char* what) {
    if (peek().type != type) {
      if (peek().type == Token::Type::End)
        throw ParseError(std::string("expected ") + what, 0, peek().column);
      throw ParseError(std::string("expected ") + what + " near '" + peek().text + "'", 0,
                       peek().column);
    }
    ++pos_;
  }

  // expr := term (("+"|"-") term)*
  ExprNodePtr expr() {
    auto lhs = term();
    while (at_op('+') || at_op('-')) {
      const Token& op = next();
      auto rhs = term();
      lhs = make_binary(op.text[0] == '+' ? ExprNode::Kind::Add : ExprNode::Kind::Sub,
                        std::move(lhs), std::move(rhs), op.column);
    }
    return lhs;
  }

  // term := unary (("*"|"/") unary)*
  ExprNodePtr term() {
    auto lhs = unary();
    while (at_op('*') || at_op('/')) {
      const Token& op = next();
      auto rhs = unary();
      lhs = make_binary(op.text[0] == '*' ? ExprNode::Kind::Mul : ExprNode::Kind::Div,
                        std::move(lhs), std::move(rhs), op.column);
    }
    return lhs;
  }

  // unary := "-" unary | power
  ExprNodePtr unary() {
    if (at_op('-')) {
      const Token& op = next();
      ExprNode n;
      n.kind = ExprNode::Kind::Neg;
      n.column = op.column;
      n.args = {unary()};
      return make_node(std::move(n));
    }
    return power();
  }

  // power := atom ("^" unary)?
  ExprNodePtr power() {
    auto base = atom();
    if (at_op('^')) {
      const Token& op = next();
      auto exponent = unary();
      return make_binary(ExprNode::Kind::Pow, std::move(base), std::move(exponent), op.column);
    }
    return base;
  }

  ExprNodePtr atom() {
    const Token& t = peek();
    switch (t.type) {
      case Token::Type::Number: {
        next();
        ExprNode n;
        n.kind = ExprNode::Kind::Number;
        n.number = t.number;
        n.column = t.column;
        return make_node(std::move(n));
      }
      case Token::Type::LParen: {
        next();
        auto e = expr();
        expect(Token::Type::RParen, "')'");
        return e;
      }
      case Token::Type::Ident:
        return identifier();
      default:
        fail_unexpected(t);
    }
  }

  ExprNodePtr identifier() {
    const Token& t = next();
    const bool call = peek().type == Token::Type::LParen;
    if (call) {
      const FuncInfo* info = find_func(t.text);
      if (!info) throw ParseError("unknown function: " + t.text, 0, t.column);
      next();
      ExprNode n;
      n.kind = ExprNode::Kind::Call;
      n.func = info->func;
      n.column = t.column;
      n.args.push_back(expr());
      while (peek().type == Token::Type::Comma) {
        next();
        n.args.push_back(expr());
      }
      expect(Token::Type::RParen, "')'");
      if (static_cast<int>(n.args.size()) != info->arity) {
        throw ParseError(std::string("arity mismatch: ") + info->name + " takes " +
                             std::to_string(info->arity) + " argument(s), got " +
                             std::to_string(n.args.size()),
                         0, t.column);
      }
      return make_node(std::move(n));
    }
    ExprNode n;
    n.column = t.column;
    if (t.text == params_[0] || t.text == params_[1]) {
      n.kind = ExprNode::Kind::Param;
      n.param = t.text == params_[0] ? 0 : 1;
      return make_node(std::move(n));
    }
    if (t.text == "pi") {
      n.kind = ExprNode::Kind::Pi;
      return make_node(std::move(n));
    }
    throw ParseError("unknown identifier: " + t.text, 0, t.column);
  }

  std::string_view text_;
  const std::array<std::string, 2>& params_;
  std::vector<Token> tokens_;
  size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Evaluation

double eval_node(const ExprNode& n, const Vec2& s) {
  using K = ExprNode::Kind;
  switch (n.kind) {
    case K::Number:
      return n.number;
    case K::Param:
      return s[n.param];
    case K::Pi:
      return std::numbers::pi;
    case K::Neg:
      return -eval_node(*n.args[0], s);
    case K::Add:
      return eval_node(*n.args[0], s) + eval_node(*n.args[1], s);
    case K::Sub:
      return eval_node(*n.args[0], s) - eval_node(*n.args[1], s);
    case K::Mul:
      return eval_node(*n.args[0], s) * eval_node(*n.args[1], s);
    case K::Div:
      return eval_node(*n.args[0], s) / eval_node(*n.args[1], s);
    case K::Pow:
      return std::pow(eval_node(*n.args[0], s), eval_node(*n.args[1], s));
    case K::Call: {
      const double a = eval_node(*n.args[0], s);
      switch (n.func) {
        case Func::Sin: return std::sin(a);
        case Func::Cos: return std::cos(a);
        case Func::Tan: return std::tan(a);
        case Func::Sinh: return std::sinh(a);
        case Func::Cosh: return std::cosh(a);
        case Func::Tanh: return std::tanh(a);
        case Func::Exp: return std::exp(a);
        case Func::Log: return std::log(a);
        case Func::Sqrt: return std::sqrt(a);
        case Func::Atan: return std::atan(a);
        case Func::Atan2: return std::atan2(a, eval_node(*n.args[1], s));
      }
    }
  }
  return 0.0;
}

[[noreturn]] void domain_fail(const ExprNode& n, const std::string& what) {
  throw DomainError(what + " (node at column " + std::to_string(n.column) + ")");
}

// f(a) with f', f''.
Jet2 chain1(const Jet2& a, double f, double df, double d2f) {
  Jet2 r;
  r.value = f;
  r.grad = df * a.grad;
  r.hxx = df * a.hxx + d2f * a.grad[0] * a.grad[0];
  r.hxy = df * a.hxy + d2f * a.grad[0] * a.grad[1];
  r.hyy = df * a.hyy + d2f * a.grad[1] * a.grad[1];
  return r;
}

// f(a, b) with first partials (fa, fb) and second partials (faa, fab, fbb).
Jet2 chain2(const Jet2& a, const Jet2& b, double f, double fa, double fb, double faa,
            double fab, double fbb) {
  Jet2 r;
  r.value = f;
  r.grad = fa * a.grad + fb * b.grad;
  auto second = [&](int i, int j) {
    return faa * a.grad[i] * a.grad[j] + fbb * b.grad[i] * b.grad[j] +
           fab * (a.grad[i] * b.grad[j] + b.grad[i] * a.grad[j]);
  };
  r.hxx = fa * a.hxx + fb * b.hxx + second(0, 0);
  r.hxy = fa * a.hxy + fb * b.hxy + second(0, 1);
  r.hyy = fa * a.hyy + fb * b.hyy + second(1, 1);
  return r;
}

bool is_constant_jet(const Jet2& j) {
  return j.grad[0] == 0.0 && j.grad[1] == 0.0 && j.hxx == 0.0 && j.hxy == 0.0 && j.hyy == 0.0;
}

Jet2 check_finite(const ExprNode& n, const Jet2& j) {
  if (!std::isfinite(j.value) || !std::isfinite(j.grad[0]) || !std::isfinite(j.grad[1]) ||
      !std::isfinite(j.hxx) || !std::isfinite(j.hxy) || !std::isfinite(j.hyy)) {
    domain_fail(n, "non-finite 2-jet");
  }
  return j;
}

Jet2 jet_node(const ExprNode& n, const Vec2& s) {
  using K = ExprNode::Kind;
  switch (n.kind) {
    case K::Number:
      return Jet2::constant(n.number);
    case K::Param:
      return Jet2::variable(n.param, s[n.param]);
    case K::Pi:
      return Jet2::constant(std::numbers::pi);
    case K::Neg: {
      const Jet2 a = jet_node(*n.args[0], s);
      return chain1(a, -a.value, -1.0, 0.0);
    }
    case K::Add: {
      const Jet2 a = jet_node(*n.args[0], s), b = jet_node(*n.args[1], s);
      return chain2(a, b, a.value + b.value, 1, 1, 0, 0, 0);
    }
    case K::Sub: {
      const Jet2 a = jet_node(*n.args[0], s), b = jet_node(*n.args[1], s);
      return chain2(a, b, a.value - b.value, 1, -1, 0, 0, 0);
    }
    case K::Mul: {
      const Jet2 a = jet_node(*n.args[0], s), b = jet_node(*n.args[1], s);
      return chain2(a, b, a.value * b.value, b.value, a.value, 0, 1, 0);
    }
    case K::Div: {
      const Jet2 a = jet_node(*n.args[0], s), b = jet_node(*n.args[1], s);
      if (b.value == 0.0) domain_fail(n, "division by zero");
      const double ib = 1.0 / b.value;
      return chain2(a, b, a.value * ib, ib, -a.value * ib * ib, 0, -ib * ib,
                    2.0 * a.value * ib * ib * ib);
    }
    case K::Pow: {
      const Jet2 a = jet_node(*n.args[0], s), b = jet_node(*n.args[1], s);
      if (is_constant_jet(b)) {
        const double c = b.value;
        const bool integral = std::floor(c) == c;
        if (a.value < 0.0 && !integral) domain_fail(n, "negative base with non-integer exponent");
        if (a.value == 0.0 && c < 2.0 && !(integral && c >= 0.0)) {
          domain_fail(n, "power not twice differentiable at zero base");
        }
        auto term = [&](double coef, double e) {
          if (coef == 0.0) return 0.0;
          return e == 0.0 ? coef : coef * std::pow(a.value, e);
        };
        return check_finite(n, chain1(a, term(1.0, c), term(c, c - 1.0),
                                      term(c * (c - 1.0), c - 2.0)));
      }
      if (a.value <= 0.0) domain_fail(n, "non-positive base with variable exponent");
      const double la = std::log(a.value);
      const double f = std::pow(a.value, b.value);
      const double fa = b.value * f / a.value;
      const double fb = f * la;
      const double faa = b.value * (b.value - 1.0) * f / (a.value * a.value);
      const double fab = f / a.value * (1.0 + b.value * la);
      const double fbb = f * la * la;
      return check_finite(n, chain2(a, b, f, fa, fb, faa, fab, fbb));
    }
    case K::Call: {
      const Jet2 a = jet_node(*n.args[0], s);
      const double x = a.value;
      switch (n.func) {
        case Func::Sin:
          return chain1(a, std::sin(x), std::cos(x), -std::sin(x));
        case Func::Cos:
          return chain1(a, std::cos(x), -std::sin(x), -std::cos(x));
        case Func::Tan: {
          const double c = std::cos(x);
          if (c == 0.0) domain_fail(n, "tan at a pole");
          const double t = std::tan(x);
          const double sec2 = 1.0 / (c * c);
          return check_finite(n, chain1(a, t, sec2, 2.0 * sec2 * t));
        }
        case Func::Sinh:
          return chain1(a, std::sinh(x), std::cosh(x), std::sinh(x));
        case Func::Cosh:
          return chain1(a, std::cosh(x), std::sinh(x), std::cosh(x));
        case Func::Tanh: {
          const double t = std::tanh(x);
          const double d = 1.0 - t * t;
          return chain1(a, t, d, -2.0 * t * d);
        }
        case Func::Exp: {
          const double e = std::exp(x);
          return check_finite(n, chain1(a, e, e, e));
        }
        case Func::Log:
          if (x <= 0.0) domain_fail(n, "log of non-positive value");
          return chain1(a, std::log(x), 1.0 / x, -1.0 / (x * x));
        case Func::Sqrt: {
          if (x < 0.0) domain_fail(n, "sqrt of negative value");
          if (x == 0.0) domain_fail(n, "sqrt not differentiable at zero");
          const double r = std::sqrt(x);
          return chain1(a, r, 0.5 / r, -0.25 / (r * x));
        }
        case Func::Atan: {
          const double d = 1.0 / (1.0 + x * x);
          return chain1(a, std::atan(x), d, -2.0 * x * d * d);
        }
        case Func::Atan2: {
          // atan2(y, x) with a = y, b = x
          const Jet2 b = jet_node(*n.args[1], s);
          const double y = a.value, xx = b.value;
          const double r2 = xx * xx + y * y;
          if (r2 == 0.0) domain_fail(n, "atan2 at the origin");
          const double r4 = r2 * r2;
          return chain2(a, b, std::atan2(y, xx), xx / r2, -y / r2, -2.0 * xx * y / r4,
                        (y * y - xx * xx) / r4, 2.0 * xx * y / r4);
        }
      }
    }
  }
  return Jet2{};
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_node(const ExprNode& n, const std::array<std::string, 2>& params, std::string& out) {
  using K = ExprNode::Kind;
  auto binary = [&](const char* op) {
    out += '(';
    print_node(*n.args[0], params, out);
    out += op;
    print_node(*n.args[1], params, out);
    out += ')';
  };
  switch (n.kind) {
    case K::Number:
      out += format_number(n.number);
      break;
    case K::Param:
      out += params[n.param];
      break;
    case K::Pi:
      out += "pi";
      break;
    case K::Neg:
      out += "(-";
      print_node(*n.args[0], params, out);
      out += ')';
      break;
    case K::Add: binary(" + "); break;
    case K::Sub: binary(" - "); break;
    case K::Mul: binary(" * "); break;
    case K::Div: binary(" / "); break;
    case K::Pow: binary("^"); break;
    case K::Call:
      out += func_name(n.func);
      out += '(';
      for (size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ", ";
        print_node(*n.args[i], params, out);
      }
      out += ')';
      break;
  }
}

bool equal_nodes(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  switch (a.kind) {
    case ExprNode::Kind::Number:
      if (a.number != b.number) return false;
      break;
    case ExprNode::Kind::Param:
      if (a.param != b.param) return false;
      break;
    case ExprNode::Kind::Call:
      if (a.func != b.func) return false;
      break;
    default:
      break;
  }
  for (size_t i = 0; i < a.args.size(); ++i) {
    if (!equal_nodes(*a.args[i], *b.args[i])) return false;
  }
  return true;
}

bool constant_node(const ExprNode& n) {
  if (n.kind == ExprNode::Kind::Param) return false;
  for (const auto& a : n.args) {
    if (!constant_node(*a)) return false;
  }
  return true;
}

}  // namespace

const char* func_name(Func f) {
  for (const auto& info : kFuncs) {
    if (info.func == f) return info.name;
  }
  return "?";
}

int func_arity(Func f) {
  for (const auto& info : kFuncs) {
    if (info.func == f) return info.arity;
  }
  return 0;
}

Expr Expr::constant(double value) {
  ExprNode n;
  n.kind = ExprNode::Kind::Number;
  n.number = value;
  return Expr(make_node(std::move(n)));
}

Expr Expr::parameter(int index) {
  ExprNode n;
  n.kind = ExprNode::Kind::Param;
  n.param = index;
  return Expr(make_node(std::move(n)));
}

Expr parse_expression(std::string_view text, const std::array<std::string, 2>& param_names) {
  Parser p(text, param_names);
  return Expr(p.parse());
}

double eval(const Expr& expr, const Vec2& s) {
  const double v = eval_node(expr.root(), s);
  if (!std::isfinite(v)) throw DomainError("expression is not finite at this point");
  return v;
}

Jet2 eval_jet2(const Expr& expr, const Vec2& s) { return jet_node(expr.root(), s); }

std::string to_string(const Expr& expr, const std::array<std::string, 2>& param_names) {
  std::string out;
  print_node(expr.root(), param_names, out);
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.empty() || b.empty()) return a.empty() == b.empty();
  return equal_nodes(a.root(), b.root());
}

bool is_constant(const Expr& expr) { return constant_node(expr.root()); }

}  // namespace dsurf
