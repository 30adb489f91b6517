#pragma once

// A small arithmetic language for objective integrands, dynamics and path
// constraints:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?          (right associative)
//   primary := number | variable | func '(' expr ')' | '(' expr ')'
//
// Variables are t, y1..y{n_x}, u1..u{n_u}. Functions: sin cos exp abs tanh sqrt.

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fgps::expr {

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& message, std::size_t offset)
      : std::runtime_error(message + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// A variable index outside the declared (n_x, n_u) arity.
class ArityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EvalError : public std::runtime_error {
 public:
  enum class Kind { DivisionByZero, NegativeSqrt, NonFinite, ArityMismatch };
  EvalError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

enum class Func { Sin, Cos, Exp, Abs, Tanh, Sqrt };
enum class VarKind { Time, State, Control };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  enum class Kind { Number, Variable, Negate, Add, Sub, Mul, Div, Pow, Call };
  Kind kind;
  double number = 0.0;
  VarKind var = VarKind::Time;
  std::size_t index = 0;  // 0-based for states and controls
  Func func = Func::Sin;
  NodePtr lhs{};
  NodePtr rhs{};
};

struct EvalEnv {
  double t = 0.0;
  std::span<const double> y;
  std::span<const double> u;
};

/// Immutable parsed expression; cheap to copy and share across threads.
class Expr {
 public:
  Expr() = default;
  Expr(NodePtr root, std::size_t n_x, std::size_t n_u, std::string source)
      : root_(std::move(root)), n_x_(n_x), n_u_(n_u), source_(std::move(source)) {}

  const Node& root() const { return *root_; }
  std::size_t n_x() const { return n_x_; }
  std::size_t n_u() const { return n_u_; }
  const std::string& source() const { return source_; }

  double eval(const EvalEnv& env) const;

 private:
  NodePtr root_;
  std::size_t n_x_ = 0;
  std::size_t n_u_ = 0;
  std::string source_;
};

Expr parse(std::string_view text, std::size_t n_x, std::size_t n_u);

/// Fully parenthesized rendering that parses back to the same tree.
std::string print(const Expr& e);

bool structurally_equal(const Node& a, const Node& b);

}  // namespace fgps::expr
