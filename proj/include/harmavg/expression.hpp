#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "harmavg/geometry.hpp"

namespace harmavg {

class ExpressionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Scalar field written as arithmetic text.
///
/// Variables: x, y, z, r (Euclidean norm), theta (atan2(y, x)).
/// Constants: pi, e, decimal numbers.
/// Operators: + - * / ^ (right-associative), unary minus.
/// Functions: sin cos tan exp log sqrt abs.
class Expression {
 public:
  /// Throws ExpressionError on malformed input.
  static Expression parse(std::string_view text);

  double operator()(const Point& x) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  Expression(std::string text, std::shared_ptr<const Node> root)
      : text_(std::move(text)), root_(std::move(root)) {}

  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace harmavg
