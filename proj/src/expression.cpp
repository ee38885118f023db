#include "harmavg/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

namespace harmavg {

struct Expression::Node {
  enum class Op {
    number, var_x, var_y, var_z, var_r, var_theta,
    add, sub, mul, div, pow, neg,
    sin, cos, tan, exp, log, sqrt, abs
  };
  Op op;
  double value = 0.0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;
using Op = Node::Op;

NodePtr leaf(Op op, double value = 0.0) {
  return std::make_shared<const Node>(Node{op, value, nullptr, nullptr});
}

NodePtr unary(Op op, NodePtr arg) {
  return std::make_shared<const Node>(Node{op, 0.0, std::move(arg), nullptr});
}

NodePtr binary(Op op, NodePtr a, NodePtr b) {
  return std::make_shared<const Node>(Node{op, 0.0, std::move(a), std::move(b)});
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip_space();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ExpressionError("expression \"" + std::string(s_) + "\": " + what +
                          " at position " + std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr n = term();
    for (;;) {
      if (accept('+')) {
        n = binary(Op::add, n, term());
      } else if (accept('-')) {
        n = binary(Op::sub, n, term());
      } else {
        return n;
      }
    }
  }

  NodePtr term() {
    NodePtr n = signed_factor();
    for (;;) {
      if (accept('*')) {
        n = binary(Op::mul, n, signed_factor());
      } else if (accept('/')) {
        n = binary(Op::div, n, signed_factor());
      } else {
        return n;
      }
    }
  }

  // Unary minus binds looser than '^': -2^2 = -4.
  NodePtr signed_factor() {
    if (accept('-')) return unary(Op::neg, signed_factor());
    if (accept('+')) return signed_factor();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return binary(Op::pow, base, signed_factor());
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (accept('(')) {
      NodePtr n = expr();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return name();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::string rest(s_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) fail("bad number");
    pos_ += static_cast<std::size_t>(end - rest.c_str());
    return leaf(Op::number, v);
  }

  NodePtr name() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      ++pos_;
    }
    const std::string id(s_.substr(start, pos_ - start));
    if (id == "x") return leaf(Op::var_x);
    if (id == "y") return leaf(Op::var_y);
    if (id == "z") return leaf(Op::var_z);
    if (id == "r") return leaf(Op::var_r);
    if (id == "theta") return leaf(Op::var_theta);
    if (id == "pi") return leaf(Op::number, std::numbers::pi);
    if (id == "e") return leaf(Op::number, std::numbers::e);
    static const std::pair<const char*, Op> kFunctions[] = {
        {"sin", Op::sin}, {"cos", Op::cos}, {"tan", Op::tan},   {"exp", Op::exp},
        {"log", Op::log}, {"sqrt", Op::sqrt}, {"abs", Op::abs}};
    for (const auto& [fname, op] : kFunctions) {
      if (id == fname) {
        if (!accept('(')) fail("expected '(' after " + id);
        NodePtr arg = expr();
        if (!accept(')')) fail("expected ')'");
        return unary(op, arg);
      }
    }
    pos_ = start;
    fail("unknown name '" + id + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

double evaluate(const Node& n, const Point& p) {
  switch (n.op) {
    case Op::number: return n.value;
    case Op::var_x: return p[0];
    case Op::var_y: return p[1];
    case Op::var_z: return p[2];
    case Op::var_r: return std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    case Op::var_theta: return std::atan2(p[1], p[0]);
    case Op::add: return evaluate(*n.lhs, p) + evaluate(*n.rhs, p);
    case Op::sub: return evaluate(*n.lhs, p) - evaluate(*n.rhs, p);
    case Op::mul: return evaluate(*n.lhs, p) * evaluate(*n.rhs, p);
    case Op::div: return evaluate(*n.lhs, p) / evaluate(*n.rhs, p);
    case Op::pow: return std::pow(evaluate(*n.lhs, p), evaluate(*n.rhs, p));
    case Op::neg: return -evaluate(*n.lhs, p);
    case Op::sin: return std::sin(evaluate(*n.lhs, p));
    case Op::cos: return std::cos(evaluate(*n.lhs, p));
    case Op::tan: return std::tan(evaluate(*n.lhs, p));
    case Op::exp: return std::exp(evaluate(*n.lhs, p));
    case Op::log: return std::log(evaluate(*n.lhs, p));
    case Op::sqrt: return std::sqrt(evaluate(*n.lhs, p));
    case Op::abs: return std::abs(evaluate(*n.lhs, p));
  }
  return 0.0;
}

}  // namespace

Expression Expression::parse(std::string_view text) {
  Parser parser(text);
  NodePtr root = parser.parse();
  return Expression(std::string(text), std::move(root));
}

double Expression::operator()(const Point& x) const { return evaluate(*root_, x); }

}  // namespace harmavg
