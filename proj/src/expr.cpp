#include "modp/expr.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <vector>

#include "modp/util.hpp"

namespace modp {

namespace {

enum class Op {
  Const, Coord, Radius,
  Add, Sub, Mul, Div, Pow, Neg,
  Log, Exp, Sqrt, Abs, Sin, Cos, Tan, Tanh, Atanh, Min, Max
};

struct Token {
  enum Kind { Number, Ident, Sym, End } kind;
  double value = 0.0;
  std::string name;
  char sym = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) { advance(); }
  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    if (i_ >= s_.size()) {
      tok_ = {Token::End, 0.0, "", 0};
      return;
    }
    char c = s_[i_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = std::stod(s_.substr(i_), &used);
      i_ += used;
      tok_ = {Token::Number, v, "", 0};
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i_;
      while (j < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_'))
        ++j;
      tok_ = {Token::Ident, 0.0, s_.substr(i_, j - i_), 0};
      i_ = j;
      return;
    }
    tok_ = {Token::Sym, 0.0, "", c};
    ++i_;
  }

  const std::string& s_;
  std::size_t i_ = 0;
  Token tok_;
};

}  // namespace

struct Expr::Node {
  Op op;
  double value = 0.0;  // Const
  int coord = 0;       // Coord
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_const(double v) {
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::Const;
  n->value = v;
  return n;
}

NodePtr make_coord(int i) {
  auto n = std::make_shared<Expr::Node>();
  n->op = Op::Coord;
  n->coord = i;
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : lex_(s) {}

  NodePtr parse() {
    NodePtr e = expr();
    if (lex_.peek().kind != Token::End)
      throw config_error("expr: trailing input after expression");
    return e;
  }

 private:
  NodePtr expr() {
    NodePtr lhs = term();
    while (lex_.peek().kind == Token::Sym &&
           (lex_.peek().sym == '+' || lex_.peek().sym == '-')) {
      char s = lex_.take().sym;
      NodePtr rhs = term();
      lhs = make(s == '+' ? Op::Add : Op::Sub, lhs, rhs);
    }
    return lhs;
  }

  NodePtr term() {
    NodePtr lhs = factor();
    while (lex_.peek().kind == Token::Sym &&
           (lex_.peek().sym == '*' || lex_.peek().sym == '/')) {
      char s = lex_.take().sym;
      NodePtr rhs = factor();
      lhs = make(s == '*' ? Op::Mul : Op::Div, lhs, rhs);
    }
    return lhs;
  }

  // Unary minus binds looser than '^' (so -2^2 == -(2^2)), but '^' accepts
  // a signed exponent (2^-3).
  NodePtr factor() {
    if (lex_.peek().kind == Token::Sym && lex_.peek().sym == '-') {
      lex_.take();
      return make(Op::Neg, factor());
    }
    if (lex_.peek().kind == Token::Sym && lex_.peek().sym == '+') {
      lex_.take();
      return factor();
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (lex_.peek().kind == Token::Sym && lex_.peek().sym == '^') {
      lex_.take();
      NodePtr exp = factor();  // right associative
      return make(Op::Pow, base, exp);
    }
    return base;
  }

  NodePtr primary() {
    Token t = lex_.take();
    if (t.kind == Token::Number) return make_const(t.value);
    if (t.kind == Token::Sym && t.sym == '(') {
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (t.kind == Token::Ident) {
      if (lex_.peek().kind == Token::Sym && lex_.peek().sym == '(')
        return call(t.name);
      return ident(t.name);
    }
    throw config_error("expr: unexpected token");
  }

  NodePtr ident(const std::string& name) {
    if (name == "pi") return make_const(kPi);
    if (name == "e") return make_const(std::exp(1.0));
    if (name == "r") return make(Op::Radius);
    if (name == "x") return make_coord(0);
    if (name == "y") return make_coord(1);
    if (name == "z") return make_coord(2);
    if (name == "w") return make_coord(3);
    if (name.size() == 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '9')
      return make_coord(name[1] - '1');
    throw config_error("expr: unknown identifier '" + name + "'");
  }

  NodePtr call(const std::string& name) {
    expect('(');
    std::vector<NodePtr> args;
    if (!(lex_.peek().kind == Token::Sym && lex_.peek().sym == ')')) {
      args.push_back(expr());
      while (lex_.peek().kind == Token::Sym && lex_.peek().sym == ',') {
        lex_.take();
        args.push_back(expr());
      }
    }
    expect(')');
    auto unary_fn = [&](Op op) {
      if (args.size() != 1)
        throw config_error("expr: " + name + " takes 1 argument");
      return make(op, args[0]);
    };
    auto binary_fn = [&](Op op) {
      if (args.size() != 2)
        throw config_error("expr: " + name + " takes 2 arguments");
      return make(op, args[0], args[1]);
    };
    if (name == "log") return unary_fn(Op::Log);
    if (name == "exp") return unary_fn(Op::Exp);
    if (name == "sqrt") return unary_fn(Op::Sqrt);
    if (name == "abs") return unary_fn(Op::Abs);
    if (name == "sin") return unary_fn(Op::Sin);
    if (name == "cos") return unary_fn(Op::Cos);
    if (name == "tan") return unary_fn(Op::Tan);
    if (name == "tanh") return unary_fn(Op::Tanh);
    if (name == "atanh") return unary_fn(Op::Atanh);
    if (name == "pow") return binary_fn(Op::Pow);
    if (name == "min") return binary_fn(Op::Min);
    if (name == "max") return binary_fn(Op::Max);
    throw config_error("expr: unknown function '" + name + "'");
  }

  void expect(char c) {
    Token t = lex_.take();
    if (t.kind != Token::Sym || t.sym != c)
      throw config_error(std::string("expr: expected '") + c + "'");
  }

  Lexer lex_;
};

double eval_node(const Expr::Node& n, std::span<const double> x) {
  auto coord = [&](int i) { return i < static_cast<int>(x.size()) ? x[i] : 0.0; };
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Coord: return coord(n.coord);
    case Op::Radius: {
      double s = 0.0;
      for (double c : x) s += c * c;
      return std::sqrt(s);
    }
    case Op::Add: return eval_node(*n.a, x) + eval_node(*n.b, x);
    case Op::Sub: return eval_node(*n.a, x) - eval_node(*n.b, x);
    case Op::Mul: return eval_node(*n.a, x) * eval_node(*n.b, x);
    case Op::Div: return eval_node(*n.a, x) / eval_node(*n.b, x);
    case Op::Pow: return std::pow(eval_node(*n.a, x), eval_node(*n.b, x));
    case Op::Neg: return -eval_node(*n.a, x);
    case Op::Log: return std::log(eval_node(*n.a, x));
    case Op::Exp: return std::exp(eval_node(*n.a, x));
    case Op::Sqrt: return std::sqrt(eval_node(*n.a, x));
    case Op::Abs: return std::abs(eval_node(*n.a, x));
    case Op::Sin: return std::sin(eval_node(*n.a, x));
    case Op::Cos: return std::cos(eval_node(*n.a, x));
    case Op::Tan: return std::tan(eval_node(*n.a, x));
    case Op::Tanh: return std::tanh(eval_node(*n.a, x));
    case Op::Atanh: return std::atanh(eval_node(*n.a, x));
    case Op::Min: return std::min(eval_node(*n.a, x), eval_node(*n.b, x));
    case Op::Max: return std::max(eval_node(*n.a, x), eval_node(*n.b, x));
  }
  return 0.0;
}

}  // namespace

Expr Expr::parse(const std::string& text) {
  Parser p(text);
  Expr e;
  e.root_ = p.parse();
  e.text_ = text;
  return e;
}

Expr::Expr() = default;
Expr::Expr(const Expr&) = default;
Expr::Expr(Expr&&) noexcept = default;
Expr& Expr::operator=(const Expr&) = default;
Expr& Expr::operator=(Expr&&) noexcept = default;
Expr::~Expr() = default;

double Expr::eval(std::span<const double> point) const {
  if (!root_) throw config_error("expr: evaluating empty expression");
  return eval_node(*root_, point);
}

}  // namespace modp
