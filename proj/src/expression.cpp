#include "nhqm/expression.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace nhqm {

enum class NodeOp { Constant, Time, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Sqrt, Abs };

struct Expression::Node {
  NodeOp op = NodeOp::Constant;
  Complex value{};
  std::size_t offset = 0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

struct FunctionName {
  std::string_view name;
  NodeOp op;
};

constexpr std::array<FunctionName, 5> kFunctions{{{"sin", NodeOp::Sin},
                                                  {"cos", NodeOp::Cos},
                                                  {"exp", NodeOp::Exp},
                                                  {"sqrt", NodeOp::Sqrt},
                                                  {"abs", NodeOp::Abs}}};

NodePtr make(NodeOp op, std::size_t offset, NodePtr lhs = nullptr, NodePtr rhs = nullptr, Complex value = {}) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->offset = offset;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  n->value = value;
  return n;
}

class Parser {
public:
  Parser(std::string_view src, const ParameterMap& params) : src_(src), params_(params) {}

  NodePtr parse() {
    NodePtr root = expr();
    skip_space();
    if (pos_ != src_.size()) fail(ErrorKind::SyntaxError, "unexpected '" + std::string(1, src_[pos_]) + "'");
    return root;
  }

private:
  [[noreturn]] void fail(ErrorKind kind, const std::string& what) const { fail_at(kind, what, pos_); }

  [[noreturn]] void fail_at(ErrorKind kind, const std::string& what, std::size_t at) const {
    throw Error(kind, "expression error at byte " + std::to_string(at) + ": " + what, at);
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= src_.size()) fail(ErrorKind::SyntaxError, std::string("expected '") + c + "' before end of input");
      fail(ErrorKind::SyntaxError, std::string("expected '") + c + "'");
    }
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      skip_space();
      const std::size_t at = pos_;
      if (accept('+')) {
        lhs = make(NodeOp::Add, at, lhs, term());
      } else if (accept('-')) {
        lhs = make(NodeOp::Sub, at, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      skip_space();
      const std::size_t at = pos_;
      if (accept('*')) {
        lhs = make(NodeOp::Mul, at, lhs, unary());
      } else if (accept('/')) {
        lhs = make(NodeOp::Div, at, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    skip_space();
    const std::size_t at = pos_;
    if (accept('-')) return make(NodeOp::Neg, at, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    skip_space();
    const std::size_t at = pos_;
    if (accept('^')) return make(NodeOp::Pow, at, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= src_.size()) fail(ErrorKind::SyntaxError, "unexpected end of input");
    const std::size_t at = pos_;
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) ++pos_;
      const std::string_view name = src_.substr(at, pos_ - at);
      skip_space();
      if (pos_ < src_.size() && src_[pos_] == '(') {
        for (const auto& f : kFunctions) {
          if (f.name == name) {
            ++pos_;
            NodePtr arg = expr();
            expect(')');
            return make(f.op, at, arg);
          }
        }
        fail_at(ErrorKind::UnknownFunction, "unknown function '" + std::string(name) + "'", at);
      }
      if (name == "t") return make(NodeOp::Time, at);
      if (name == "i") return make(NodeOp::Constant, at, nullptr, nullptr, Complex(0.0, 1.0));
      if (name == "pi") return make(NodeOp::Constant, at, nullptr, nullptr, Complex(std::numbers::pi, 0.0));
      if (auto it = params_.find(name); it != params_.end()) {
        return make(NodeOp::Constant, at, nullptr, nullptr, it->second);
      }
      fail_at(ErrorKind::UnknownIdentifier, "unknown identifier '" + std::string(name) + "'", at);
    }
    fail(ErrorKind::SyntaxError, "unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::size_t at = pos_;
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        pos_ = look;
        digits();
      }
    }
    double v = 0.0;
    const auto res = std::from_chars(src_.data() + at, src_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != src_.data() + pos_) {
      fail_at(ErrorKind::SyntaxError, "malformed number '" + std::string(src_.substr(at, pos_ - at)) + "'", at);
    }
    return make(NodeOp::Constant, at, nullptr, nullptr, Complex(v, 0.0));
  }

  std::string_view src_;
  const ParameterMap& params_;
  std::size_t pos_ = 0;
};

Complex checked_div(Complex num, Complex den, std::size_t offset) {
  if (den == Complex(0.0, 0.0)) {
    throw Error(ErrorKind::DivisionByZero, "division by zero at byte " + std::to_string(offset), offset);
  }
  return num / den;
}

Complex power(Complex base, Complex exponent, std::size_t offset) {
  // Small integer exponents by repeated multiplication, so t^2 is exact.
  if (exponent.imag() == 0.0 && std::abs(exponent.real()) <= 64.0 && exponent.real() == std::trunc(exponent.real())) {
    const int n = static_cast<int>(exponent.real());
    Complex acc(1.0, 0.0);
    for (int k = 0; k < std::abs(n); ++k) acc *= base;
    return n < 0 ? checked_div(1.0, acc, offset) : acc;
  }
  if (base == Complex(0.0, 0.0)) {
    if (exponent.real() > 0.0) return {0.0, 0.0};
    throw Error(ErrorKind::DivisionByZero, "zero raised to a non-positive power at byte " + std::to_string(offset),
                offset);
  }
  return std::pow(base, exponent);
}

Complex evaluate(const Expression::Node& n, double t) {
  switch (n.op) {
    case NodeOp::Constant: return n.value;
    case NodeOp::Time: return {t, 0.0};
    case NodeOp::Add: return evaluate(*n.lhs, t) + evaluate(*n.rhs, t);
    case NodeOp::Sub: return evaluate(*n.lhs, t) - evaluate(*n.rhs, t);
    case NodeOp::Mul: return evaluate(*n.lhs, t) * evaluate(*n.rhs, t);
    case NodeOp::Div: return checked_div(evaluate(*n.lhs, t), evaluate(*n.rhs, t), n.offset);
    case NodeOp::Pow: return power(evaluate(*n.lhs, t), evaluate(*n.rhs, t), n.offset);
    case NodeOp::Neg: return -evaluate(*n.lhs, t);
    case NodeOp::Sin: return std::sin(evaluate(*n.lhs, t));
    case NodeOp::Cos: return std::cos(evaluate(*n.lhs, t));
    case NodeOp::Exp: return std::exp(evaluate(*n.lhs, t));
    case NodeOp::Sqrt: {
      // Negation leaves a -0 imaginary part, which would select the lower
      // side of the branch cut.
      Complex z = evaluate(*n.lhs, t);
      if (z.imag() == 0.0) z.imag(0.0);
      return std::sqrt(z);
    }
    case NodeOp::Abs: return {std::abs(evaluate(*n.lhs, t)), 0.0};
  }
  return {};
}

bool uses_time(const Expression::Node& n) {
  if (n.op == NodeOp::Time) return true;
  return (n.lhs && uses_time(*n.lhs)) || (n.rhs && uses_time(*n.rhs));
}

std::string real_literal(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print(const Expression::Node& n, std::string& out) {
  auto binary = [&](const char* op) {
    out += '(';
    print(*n.lhs, out);
    out += op;
    print(*n.rhs, out);
    out += ')';
  };
  auto call = [&](const char* name) {
    out += name;
    out += '(';
    print(*n.lhs, out);
    out += ')';
  };
  switch (n.op) {
    case NodeOp::Constant:
      out += "((" + real_literal(n.value.real()) + ")";
      if (n.value.imag() != 0.0) out += "+(" + real_literal(n.value.imag()) + ")*i";
      out += ')';
      return;
    case NodeOp::Time: out += 't'; return;
    case NodeOp::Add: binary("+"); return;
    case NodeOp::Sub: binary("-"); return;
    case NodeOp::Mul: binary("*"); return;
    case NodeOp::Div: binary("/"); return;
    case NodeOp::Pow: binary("^"); return;
    case NodeOp::Neg:
      out += "(-";
      print(*n.lhs, out);
      out += ')';
      return;
    case NodeOp::Sin: call("sin"); return;
    case NodeOp::Cos: call("cos"); return;
    case NodeOp::Exp: call("exp"); return;
    case NodeOp::Sqrt: call("sqrt"); return;
    case NodeOp::Abs: call("abs"); return;
  }
}

}  // namespace

Complex Expression::eval(double t) const {
  if (!root_) throw Error(ErrorKind::UsageError, "evaluating an empty expression");
  return evaluate(*root_, t);
}

bool Expression::depends_on_t() const { return root_ && uses_time(*root_); }

std::string Expression::to_string() const {
  std::string out;
  if (root_) print(*root_, out);
  return out;
}

Expression parse_expression(std::string_view src, const ParameterMap& params) {
  return Expression(Parser(src, params).parse());
}

}  // namespace nhqm
