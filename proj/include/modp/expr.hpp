#pragma once

// Small arithmetic expression evaluator for scalar fields on chart
// coordinates. Used by chart configs (conformal factor), Q fields and
// user-defined analytic mappings.
//
// Variables: x1..x4 (aliases x, y, z, w), r = |x| (Euclidean norm of the
// chart point). Constants: pi, e. Operators: + - * / ^ (right assoc) and
// unary minus. Functions: log exp sqrt abs sin cos tan tanh atanh pow min max.

#include <memory>
#include <span>
#include <string>

namespace modp {

class Expr {
 public:
  // Throws config_error on parse failure.
  static Expr parse(const std::string& text);

  Expr();
  Expr(const Expr&);
  Expr(Expr&&) noexcept;
  Expr& operator=(const Expr&);
  Expr& operator=(Expr&&) noexcept;
  ~Expr();

  bool empty() const { return root_ == nullptr; }
  const std::string& text() const { return text_; }

  // Evaluates at a point; coords beyond the point's size read as 0.
  // Singularities produce +/-inf or NaN, never throw.
  double eval(std::span<const double> point) const;

  struct Node;  // opaque; defined in expr.cpp

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace modp
