#include "detline/expr.hpp"

#include <fmt/format.h>

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>

namespace detline::expr {

namespace {

constexpr std::array<std::pair<std::string_view, Func>, 12> kFunctions{{
    {"sin", Func::Sin},
    {"cos", Func::Cos},
    {"tan", Func::Tan},
    {"exp", Func::Exp},
    {"log", Func::Log},
    {"sqrt", Func::Sqrt},
    {"sinh", Func::Sinh},
    {"cosh", Func::Cosh},
    {"abs", Func::Abs},
    {"re", Func::Re},
    {"im", Func::Im},
    {"conj", Func::Conj},
}};

std::optional<Func> lookup_function(std::string_view name) {
  for (const auto& [n, f] : kFunctions)
    if (n == name) return f;
  return std::nullopt;
}

NodePtr make_leaf(NodeKind kind) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  return n;
}

NodePtr make_number(double v) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Number;
  n->number = v;
  return n;
}

NodePtr make_parameter(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Parameter;
  n->name = std::move(name);
  return n;
}

NodePtr make_negate(NodePtr arg) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Negate;
  n->args = {std::move(arg)};
  return n;
}

NodePtr make_binary(char op, NodePtr lhs, NodePtr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Binary;
  n->op = op;
  n->args = {std::move(lhs), std::move(rhs)};
  return n;
}

NodePtr make_call(Func f, NodePtr arg) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Call;
  n->func = f;
  n->args = {std::move(arg)};
  return n;
}

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Grammar:
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | ident | ident '(' sum ')' | '(' sum ')'
class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse_all() {
    skip_ws();
    if (at_end()) throw ParseError(pos_, "expected expression, found end of input");
    NodePtr root = parse_sum();
    skip_ws();
    if (!at_end())
      throw ParseError(pos_, fmt::format("expected operator or end of input, found '{}'", text_[pos_]));
    return root;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void skip_ws() {
    while (!at_end() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                         text_[pos_] == '\r'))
      ++pos_;
  }

  NodePtr parse_sum() {
    NodePtr lhs = parse_product();
    for (;;) {
      skip_ws();
      char c = peek();
      if (c != '+' && c != '-') return lhs;
      ++pos_;
      lhs = make_binary(c, lhs, parse_product());
    }
  }

  NodePtr parse_product() {
    NodePtr lhs = parse_unary();
    for (;;) {
      skip_ws();
      char c = peek();
      if (c != '*' && c != '/') return lhs;
      ++pos_;
      lhs = make_binary(c, lhs, parse_unary());
    }
  }

  NodePtr parse_unary() {
    skip_ws();
    if (peek() == '-') {
      ++pos_;
      return make_negate(parse_unary());
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    skip_ws();
    if (peek() == '^') {
      ++pos_;
      return make_binary('^', base, parse_unary());
    }
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (at_end()) throw ParseError(pos_, "expected operand, found end of input");
    char c = peek();
    if (is_digit(c) || (c == '.' && pos_ + 1 < text_.size() && is_digit(text_[pos_ + 1])))
      return parse_number();
    if (is_ident_start(c)) return parse_identifier();
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_sum();
      expect_close();
      return inner;
    }
    throw ParseError(pos_, fmt::format("expected operand, found '{}'", c));
  }

  void expect_close() {
    skip_ws();
    if (peek() != ')') {
      if (at_end()) throw ParseError(pos_, "expected ')', found end of input");
      throw ParseError(pos_, fmt::format("expected ')', found '{}'", peek()));
    }
    ++pos_;
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    while (!at_end() && is_digit(peek())) ++pos_;
    if (peek() == '.') {
      ++pos_;
      while (!at_end() && is_digit(peek())) ++pos_;
    }
    if (peek() == 'e' || peek() == 'E') {
      std::size_t save = pos_;
      ++pos_;
      if (peek() == '+' || peek() == '-') ++pos_;
      if (!is_digit(peek())) {
        pos_ = save;  // not an exponent; leave 'e' for the caller to reject
      } else {
        while (!at_end() && is_digit(peek())) ++pos_;
      }
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_)
      throw ParseError(start, "malformed numeric literal");
    return make_number(value);
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (!at_end() && is_ident_char(peek())) ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    std::size_t after = pos_;
    skip_ws();
    if (peek() == '(') {
      auto f = lookup_function(name);
      if (!f) throw ParseError(start, fmt::format("unknown function '{}'", name));
      ++pos_;
      NodePtr arg = parse_sum();
      expect_close();
      return make_call(*f, arg);
    }
    pos_ = after;
    if (lookup_function(name))
      throw ParseError(pos_, fmt::format("expected '(' after function name '{}'", name));
    if (name == "x") return make_leaf(NodeKind::Variable);
    if (name == "i") return make_leaf(NodeKind::ImagUnit);
    if (name == "pi") return make_leaf(NodeKind::Pi);
    return make_parameter(std::move(name));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

bool is_real(const complex& z) { return z.imag() == 0.0; }

bool is_integer_valued(const complex& z) {
  return is_real(z) && std::isfinite(z.real()) && std::trunc(z.real()) == z.real() &&
         std::abs(z.real()) <= 1.0e9;
}

complex power(const complex& base, const complex& exponent) {
  if (is_integer_valued(exponent)) {
    const double n = exponent.real();
    if (base == complex(0.0) && n < 0) throw EvalError("division by zero in power");
    if (is_real(base)) return {std::pow(base.real(), n), 0.0};
    complex result(1.0);
    complex b = n < 0 ? complex(1.0) / base : base;
    auto k = static_cast<long long>(std::abs(n));
    while (k > 0) {
      if (k & 1) result *= b;
      b *= b;
      k >>= 1;
    }
    return result;
  }
  if (is_real(base) && base.real() < 0.0)
    throw EvalError("non-integer power of a negative real base");
  if (base == complex(0.0)) {
    if (exponent.real() > 0.0) return {0.0, 0.0};
    throw EvalError("zero base raised to a non-positive power");
  }
  if (is_real(base) && is_real(exponent)) return {std::pow(base.real(), exponent.real()), 0.0};
  return std::exp(exponent * std::log(base));
}

complex apply(Func f, const complex& z, const EvalOptions& opts) {
  const bool real = is_real(z);
  const double a = z.real();
  switch (f) {
    case Func::Sin: return real ? complex(std::sin(a)) : std::sin(z);
    case Func::Cos: return real ? complex(std::cos(a)) : std::cos(z);
    case Func::Tan: return real ? complex(std::tan(a)) : std::tan(z);
    case Func::Exp: return real ? complex(std::exp(a)) : std::exp(z);
    case Func::Sinh: return real ? complex(std::sinh(a)) : std::sinh(z);
    case Func::Cosh: return real ? complex(std::cosh(a)) : std::cosh(z);
    case Func::Log:
      if (z == complex(0.0)) throw EvalError("log of zero");
      if (real && a > 0.0) return complex(std::log(a));
      if (real && opts.real_mode) throw EvalError("log of a negative real");
      if (real) return {std::log(-a), std::numbers::pi};
      return std::log(z);
    case Func::Sqrt:
      if (real && a >= 0.0) return complex(std::sqrt(a));
      if (real && opts.real_mode) throw EvalError("sqrt of a negative real");
      if (real) return {0.0, std::sqrt(-a)};
      return std::sqrt(z);
    case Func::Abs: return complex(std::abs(z));
    case Func::Re: return complex(z.real());
    case Func::Im: return complex(z.imag());
    case Func::Conj: return std::conj(z);
  }
  return z;
}

complex eval_node(const Node& n, double x, const ParamMap& params, const EvalOptions& opts) {
  switch (n.kind) {
    case NodeKind::Number: return complex(n.number);
    case NodeKind::ImagUnit: return {0.0, 1.0};
    case NodeKind::Pi: return complex(std::numbers::pi);
    case NodeKind::Variable: return complex(x);
    case NodeKind::Parameter: {
      auto it = params.find(n.name);
      if (it == params.end()) throw EvalError(fmt::format("unbound parameter '{}'", n.name));
      return it->second;
    }
    case NodeKind::Negate: return -eval_node(*n.args[0], x, params, opts);
    case NodeKind::Binary: {
      const complex lhs = eval_node(*n.args[0], x, params, opts);
      const complex rhs = eval_node(*n.args[1], x, params, opts);
      switch (n.op) {
        case '+': return lhs + rhs;
        case '-': return lhs - rhs;
        case '*':
          if (is_real(lhs) && is_real(rhs)) return complex(lhs.real() * rhs.real());
          return lhs * rhs;
        case '/':
          if (rhs == complex(0.0)) throw EvalError("division by zero");
          if (is_real(lhs) && is_real(rhs)) return complex(lhs.real() / rhs.real());
          return lhs / rhs;
        case '^': return power(lhs, rhs);
      }
      throw EvalError(fmt::format("unknown operator '{}'", n.op));
    }
    case NodeKind::Call: return apply(n.func, eval_node(*n.args[0], x, params, opts), opts);
  }
  return {};
}

void collect_parameters(const Node& n, std::set<std::string>& out) {
  if (n.kind == NodeKind::Parameter) out.insert(n.name);
  for (const auto& a : n.args) collect_parameters(*a, out);
}

bool mentions_x(const Node& n) {
  if (n.kind == NodeKind::Variable) return true;
  for (const auto& a : n.args)
    if (mentions_x(*a)) return true;
  return false;
}

void render(const Node& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::Number: out += fmt::format("{}", n.number); return;
    case NodeKind::ImagUnit: out += 'i'; return;
    case NodeKind::Pi: out += "pi"; return;
    case NodeKind::Variable: out += 'x'; return;
    case NodeKind::Parameter: out += n.name; return;
    case NodeKind::Negate:
      out += "(-";
      render(*n.args[0], out);
      out += ')';
      return;
    case NodeKind::Binary:
      out += '(';
      render(*n.args[0], out);
      out += ' ';
      out += n.op;
      out += ' ';
      render(*n.args[1], out);
      out += ')';
      return;
    case NodeKind::Call:
      out += func_name(n.func);
      out += '(';
      render(*n.args[0], out);
      out += ')';
      return;
  }
}

bool equal_nodes(const Node& a, const Node& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  switch (a.kind) {
    case NodeKind::Number:
      if (a.number != b.number) return false;
      break;
    case NodeKind::Parameter:
      if (a.name != b.name) return false;
      break;
    case NodeKind::Binary:
      if (a.op != b.op) return false;
      break;
    case NodeKind::Call:
      if (a.func != b.func) return false;
      break;
    default: break;
  }
  for (std::size_t k = 0; k < a.args.size(); ++k)
    if (!equal_nodes(*a.args[k], *b.args[k])) return false;
  return true;
}

NodePtr conjugate_node(const NodePtr& n) {
  switch (n->kind) {
    case NodeKind::ImagUnit: return make_negate(n);
    case NodeKind::Number:
    case NodeKind::Pi:
    case NodeKind::Variable:
    case NodeKind::Parameter: return n;
    case NodeKind::Call:
      // re, im and abs already produce real values of the original argument.
      if (n->func == Func::Re || n->func == Func::Im || n->func == Func::Abs) return n;
      return make_call(n->func, conjugate_node(n->args[0]));
    case NodeKind::Negate: return make_negate(conjugate_node(n->args[0]));
    case NodeKind::Binary:
      return make_binary(n->op, conjugate_node(n->args[0]), conjugate_node(n->args[1]));
  }
  return n;
}

}  // namespace

ParseError::ParseError(std::size_t offset, const std::string& message)
    : std::runtime_error(fmt::format("syntax error at offset {}: {}", offset, message)),
      offset_(offset) {}

complex Expression::evaluate(double x, const ParamMap& params, EvalOptions opts) const {
  if (!root_) throw EvalError("empty expression");
  complex v = eval_node(*root_, x, params, opts);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw EvalError("non-finite result");
  return v;
}

std::set<std::string> Expression::parameters() const {
  std::set<std::string> out;
  if (root_) collect_parameters(*root_, out);
  return out;
}

bool Expression::depends_on_x() const { return root_ && mentions_x(*root_); }

std::string Expression::to_string() const {
  std::string out;
  if (root_) render(*root_, out);
  return out;
}

Expression parse(std::string_view text) { return Expression(Parser(text).parse_all()); }

bool structurally_equal(const Expression& lhs, const Expression& rhs) {
  if (lhs.empty() || rhs.empty()) return lhs.empty() == rhs.empty();
  return equal_nodes(lhs.root(), rhs.root());
}

Expression conjugate(const Expression& e) {
  if (e.empty()) return e;
  return Expression(conjugate_node(std::make_shared<const Node>(e.root())));
}

std::string_view func_name(Func f) {
  for (const auto& [n, g] : kFunctions)
    if (g == f) return n;
  return "?";
}

}  // namespace detline::expr
