#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "finsler/chart.hpp"

namespace finsler {

/// Parse failure. `offset` is the 1-based byte position of the offending
/// character (0 for errors not tied to a position).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t offset)
      : std::runtime_error(message), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

namespace detail {
struct ExprNode;
}

/// Scalar field over chart coordinates x1..xn.
///
///   expr   := term (('+' | '-') term)*
///   term   := factor (('*' | '/') factor)*
///   factor := base ('^' integer)?
///   base   := number | 'x' digits | '(' expr ')' | func '(' expr ')'
///   func   := sqrt | exp | log | sin | cos | abs
///
/// There is no unary minus; write "0 - x1".
class FieldExpression {
 public:
  static FieldExpression parse(const std::string& text);

  const std::string& source() const { return source_; }
  // Highest variable index used (0 for constants).
  int max_variable() const { return max_variable_; }
  // Throws ParseError if a variable index exceeds `dim`.
  void bind(int dim) const;

  double operator()(const Vec& x) const;
  // Fully parenthesised form; numbers with 17 significant digits.
  std::string print() const;

 private:
  std::string source_;
  std::shared_ptr<const detail::ExprNode> root_;
  int max_variable_ = 0;
};

}  // namespace finsler
