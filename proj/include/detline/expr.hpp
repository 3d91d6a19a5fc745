#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace detline::expr {

using complex = std::complex<double>;
using ParamMap = std::map<std::string, complex, std::less<>>;

enum class NodeKind { Number, ImagUnit, Pi, Variable, Parameter, Negate, Binary, Call };

enum class Func { Sin, Cos, Tan, Exp, Log, Sqrt, Sinh, Cosh, Abs, Re, Im, Conj };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind = NodeKind::Number;
  double number = 0.0;   // Number
  std::string name;      // Parameter
  char op = 0;           // Binary: one of + - * / ^
  Func func = Func::Sin; // Call
  std::vector<NodePtr> args;
};

// Thrown by parse(). `offset` is the byte offset into the source text.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& message);
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Unbound parameter or a domain violation during evaluation.
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EvalOptions {
  // Treat log/sqrt of negative reals as domain errors instead of taking the
  // principal complex branch.
  bool real_mode = false;
};

// Immutable expression tree. Copies share structure.
class Expression {
 public:
  Expression() = default;
  explicit Expression(NodePtr root) : root_(std::move(root)) {}

  const Node& root() const { return *root_; }
  bool empty() const { return root_ == nullptr; }

  complex evaluate(double x, const ParamMap& params, EvalOptions opts = {}) const;

  // Names of every parameter referenced by the expression.
  std::set<std::string> parameters() const;
  bool depends_on_x() const;

  // Fully parenthesised rendering; parse(to_string()) is structurally equal.
  std::string to_string() const;

 private:
  NodePtr root_;
};

Expression parse(std::string_view text);

bool structurally_equal(const Expression& lhs, const Expression& rhs);

// Expression whose value is the complex conjugate of `e` for real x and real
// parameter values.
Expression conjugate(const Expression& e);

std::string_view func_name(Func f);

}  // namespace detline::expr
