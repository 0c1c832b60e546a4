#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "nhqm/linalg.hpp"

namespace nhqm {

// Arithmetic over the complex numbers in one real variable `t`.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?
//   primary := number | identifier | function '(' expr ')' | '(' expr ')'
//
// Built-in identifiers are `t`, `i` and `pi`; functions are sin, cos, exp,
// sqrt (principal branch) and abs. Named parameters supplied at parse time are
// folded into constants.
class Expression {
public:
  struct Node;

  Expression() = default;
  explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

  Complex eval(double t) const;
  bool depends_on_t() const;

  // Fully parenthesized form with 17 significant digits. Parsing it back gives
  // an expression that evaluates identically.
  std::string to_string() const;

  bool empty() const { return root_ == nullptr; }

private:
  std::shared_ptr<const Node> root_;
};

using ParameterMap = std::map<std::string, Complex, std::less<>>;

// Errors carry the byte offset of the offending token in Error::index().
Expression parse_expression(std::string_view src, const ParameterMap& params = {});

}  // namespace nhqm
