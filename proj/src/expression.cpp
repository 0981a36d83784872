#include "finsler/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <vector>

namespace finsler {

namespace detail {

enum class Op { number, variable, add, sub, mul, div, pow, sqrt, exp, log, sin, cos, abs };

struct ExprNode {
  Op op;
  double number = 0.0;
  int index = 0;  // variable index (1-based) or integer exponent
  std::shared_ptr<const ExprNode> lhs;
  std::shared_ptr<const ExprNode> rhs;
};

}  // namespace detail

namespace {

using detail::ExprNode;
using detail::Op;
using NodePtr = std::shared_ptr<const ExprNode>;

struct Function {
  const char* name;
  Op op;
};

constexpr Function kFunctions[] = {{"sqrt", Op::sqrt}, {"exp", Op::exp}, {"log", Op::log},
                                   {"sin", Op::sin},   {"cos", Op::cos}, {"abs", Op::abs}};

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  NodePtr run() {
    auto e = expr();
    skip();
    if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

  int max_variable() const { return max_var_; }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("syntax error at offset " + std::to_string(pos_ + 1) + ": " + what, pos_ + 1);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  static NodePtr binary(Op op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->lhs = std::move(a);
    n->rhs = std::move(b);
    return n;
  }

  NodePtr expr() {
    auto lhs = term();
    while (peek('+') || peek('-')) {
      const Op op = s_[pos_++] == '+' ? Op::add : Op::sub;
      lhs = binary(op, lhs, term());
    }
    return lhs;
  }

  NodePtr term() {
    auto lhs = factor();
    while (peek('*') || peek('/')) {
      const Op op = s_[pos_++] == '*' ? Op::mul : Op::div;
      lhs = binary(op, lhs, factor());
    }
    return lhs;
  }

  NodePtr factor() {
    auto b = base();
    if (peek('^')) {
      ++pos_;
      skip();
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (pos_ == start) fail("expected an integer exponent");
      int e = 0;
      const auto r = std::from_chars(s_.data() + start, s_.data() + pos_, e);
      if (r.ec != std::errc()) {
        pos_ = start;
        fail("exponent out of range");
      }
      auto n = std::make_shared<ExprNode>();
      n->op = Op::pow;
      n->index = e;
      n->lhs = std::move(b);
      return n;
    }
    return b;
  }

  NodePtr base() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = expr();
      if (!peek(')')) fail("expected ')'");
      ++pos_;
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string word = s_.substr(start, pos_ - start);
      if (word == "x") return variable(start);
      for (const auto& f : kFunctions) {
        if (word == f.name) {
          if (!peek('(')) fail("expected '(' after " + word);
          ++pos_;
          auto arg = expr();
          if (!peek(')')) fail("expected ')'");
          ++pos_;
          auto n = std::make_shared<ExprNode>();
          n->op = f.op;
          n->lhs = std::move(arg);
          return n;
        }
      }
      pos_ = start;
      fail("unknown name '" + word + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr variable(std::size_t start) {
    const std::size_t digits = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == digits) fail("expected a variable index after 'x'");
    int k = 0;
    const auto r = std::from_chars(s_.data() + digits, s_.data() + pos_, k);
    if (r.ec != std::errc() || k < 1) {
      pos_ = start;
      fail("variables are x1, x2, ...");
    }
    max_var_ = std::max(max_var_, k);
    auto n = std::make_shared<ExprNode>();
    n->op = Op::variable;
    n->index = k;
    return n;
  }

  NodePtr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      const std::size_t b = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return pos_ - b;
    };
    std::size_t mantissa = digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) fail("malformed number");
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail("malformed exponent");
    }
    double v = 0.0;
    const auto r = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (r.ec != std::errc() || r.ptr != s_.data() + pos_ || !std::isfinite(v)) {
      pos_ = start;
      fail("number out of range");
    }
    auto n = std::make_shared<ExprNode>();
    n->op = Op::number;
    n->number = v;
    return n;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int max_var_ = 0;
};

double power(double b, int e) {
  double r = 1.0;
  while (e > 0) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

double eval(const ExprNode& n, const Vec& x) {
  switch (n.op) {
    case Op::number: return n.number;
    case Op::variable: return x[n.index - 1];
    case Op::add: return eval(*n.lhs, x) + eval(*n.rhs, x);
    case Op::sub: return eval(*n.lhs, x) - eval(*n.rhs, x);
    case Op::mul: return eval(*n.lhs, x) * eval(*n.rhs, x);
    case Op::div: return eval(*n.lhs, x) / eval(*n.rhs, x);
    case Op::pow: return power(eval(*n.lhs, x), n.index);
    case Op::sqrt: return std::sqrt(eval(*n.lhs, x));
    case Op::exp: return std::exp(eval(*n.lhs, x));
    case Op::log: return std::log(eval(*n.lhs, x));
    case Op::sin: return std::sin(eval(*n.lhs, x));
    case Op::cos: return std::cos(eval(*n.lhs, x));
    case Op::abs: return std::abs(eval(*n.lhs, x));
  }
  return 0.0;
}

void print_node(const ExprNode& n, std::string& out) {
  auto bin = [&](const char* sym) {
    out += '(';
    print_node(*n.lhs, out);
    out += sym;
    print_node(*n.rhs, out);
    out += ')';
  };
  switch (n.op) {
    case Op::number: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.number);
      out += buf;
      return;
    }
    case Op::variable: out += "x" + std::to_string(n.index); return;
    case Op::add: bin(" + "); return;
    case Op::sub: bin(" - "); return;
    case Op::mul: bin(" * "); return;
    case Op::div: bin(" / "); return;
    case Op::pow:
      out += '(';
      print_node(*n.lhs, out);
      out += "^" + std::to_string(n.index) + ")";
      return;
    default:
      for (const auto& f : kFunctions) {
        if (f.op == n.op) {
          out += f.name;
          out += '(';
          print_node(*n.lhs, out);
          out += ')';
          return;
        }
      }
  }
}

}  // namespace

FieldExpression FieldExpression::parse(const std::string& text) {
  bool blank = true;
  for (char c : text) blank = blank && std::isspace(static_cast<unsigned char>(c));
  if (blank) throw ParseError("empty expression", 0);
  Parser p(text);
  FieldExpression f;
  f.source_ = text;
  f.root_ = p.run();
  f.max_variable_ = p.max_variable();
  return f;
}

void FieldExpression::bind(int dim) const {
  if (max_variable_ > dim)
    throw ParseError("expression '" + source_ + "' uses x" + std::to_string(max_variable_) +
                         " but the chart has dimension " + std::to_string(dim),
                     0);
}

double FieldExpression::operator()(const Vec& x) const {
  if (max_variable_ > x.size()) bind(static_cast<int>(x.size()));
  return eval(*root_, x);
}

std::string FieldExpression::print() const {
  std::string out;
  print_node(*root_, out);
  return out;
}

}  // namespace finsler
