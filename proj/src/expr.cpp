#include "fgps/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace fgps::expr {

namespace {

struct FuncName {
  std::string_view name;
  Func func;
};

constexpr FuncName kFunctions[] = {{"sin", Func::Sin},   {"cos", Func::Cos},
                                   {"exp", Func::Exp},   {"abs", Func::Abs},
                                   {"tanh", Func::Tanh}, {"sqrt", Func::Sqrt}};

std::string_view func_name(Func f) {
  for (const auto& entry : kFunctions) {
    if (entry.func == f) return entry.name;
  }
  return "?";
}

NodePtr make(Node node) { return std::make_shared<const Node>(std::move(node)); }

class Parser {
 public:
  Parser(std::string_view text, std::size_t n_x, std::size_t n_u)
      : text_(text), n_x_(n_x), n_u_(n_u) {}

  NodePtr parse_all() {
    NodePtr root = parse_expr();
    skip_space();
    if (pos_ != text_.size()) {
      throw SyntaxError("unexpected '" + std::string(1, text_[pos_]) + "'", pos_);
    }
    return root;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      throw SyntaxError(std::string("expected '") + c + "'", pos_);
    }
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = make({.kind = Node::Kind::Add, .lhs = lhs, .rhs = parse_term()});
      } else if (accept('-')) {
        lhs = make({.kind = Node::Kind::Sub, .lhs = lhs, .rhs = parse_term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = make({.kind = Node::Kind::Mul, .lhs = lhs, .rhs = parse_unary()});
      } else if (accept('/')) {
        lhs = make({.kind = Node::Kind::Div, .lhs = lhs, .rhs = parse_unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return make({.kind = Node::Kind::Negate, .lhs = parse_unary()});
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (accept('^')) return make({.kind = Node::Kind::Pow, .lhs = base, .rhs = parse_unary()});
    return base;
  }

  NodePtr parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) throw SyntaxError("unexpected end of expression", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    throw SyntaxError("unexpected '" + std::string(1, c) + "'", pos_);
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    const auto digits = [&] {
      while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
    };
    digits();
    if (end < text_.size() && text_[end] == '.') {
      ++end;
      digits();
    }
    if (end < text_.size() && (text_[end] == 'e' || text_[end] == 'E')) {
      std::size_t exp_end = end + 1;
      if (exp_end < text_.size() && (text_[exp_end] == '+' || text_[exp_end] == '-')) ++exp_end;
      if (exp_end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[exp_end]))) {
        end = exp_end;
        digits();
      }
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + end, value);
    if (ec != std::errc() || ptr != text_.data() + end) {
      throw SyntaxError("malformed number", start);
    }
    pos_ = end;
    return make({.kind = Node::Kind::Number, .number = value});
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);

    for (const auto& entry : kFunctions) {
      if (entry.name == name) {
        expect('(');
        NodePtr arg = parse_expr();
        expect(')');
        return make({.kind = Node::Kind::Call, .func = entry.func, .lhs = arg});
      }
    }
    if (name == "t") return make({.kind = Node::Kind::Variable, .var = VarKind::Time});

    if (name.size() >= 2 && (name[0] == 'y' || name[0] == 'u')) {
      std::size_t index = 0;
      const auto digits = name.substr(1);
      const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
      if (ec == std::errc() && ptr == digits.data() + digits.size() && index >= 1 &&
          digits[0] != '0') {
        const bool state = name[0] == 'y';
        const std::size_t limit = state ? n_x_ : n_u_;
        if (index > limit) {
          throw ArityError("variable '" + std::string(name) + "' exceeds declared arity " +
                           std::to_string(limit) + " (offset " + std::to_string(start) + ")");
        }
        return make({.kind = Node::Kind::Variable,
                     .var = state ? VarKind::State : VarKind::Control,
                     .index = index - 1});
      }
    }
    throw SyntaxError("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view text_;
  std::size_t n_x_;
  std::size_t n_u_;
  std::size_t pos_ = 0;
};

double checked(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw EvalError(EvalError::Kind::NonFinite, std::string("non-finite result in ") + what);
  }
  return v;
}

double eval_node(const Node& n, const EvalEnv& env) {
  switch (n.kind) {
    case Node::Kind::Number:
      return n.number;
    case Node::Kind::Variable:
      switch (n.var) {
        case VarKind::Time:
          return env.t;
        case VarKind::State:
          return env.y[n.index];
        case VarKind::Control:
          return env.u[n.index];
      }
      break;
    case Node::Kind::Negate:
      return -eval_node(*n.lhs, env);
    case Node::Kind::Add:
      return checked(eval_node(*n.lhs, env) + eval_node(*n.rhs, env), "addition");
    case Node::Kind::Sub:
      return checked(eval_node(*n.lhs, env) - eval_node(*n.rhs, env), "subtraction");
    case Node::Kind::Mul:
      return checked(eval_node(*n.lhs, env) * eval_node(*n.rhs, env), "multiplication");
    case Node::Kind::Div: {
      const double num = eval_node(*n.lhs, env);
      const double den = eval_node(*n.rhs, env);
      if (den == 0.0) throw EvalError(EvalError::Kind::DivisionByZero, "division by zero");
      return checked(num / den, "division");
    }
    case Node::Kind::Pow:
      return checked(std::pow(eval_node(*n.lhs, env), eval_node(*n.rhs, env)), "power");
    case Node::Kind::Call: {
      const double x = eval_node(*n.lhs, env);
      switch (n.func) {
        case Func::Sin:
          return std::sin(x);
        case Func::Cos:
          return std::cos(x);
        case Func::Exp:
          return checked(std::exp(x), "exp");
        case Func::Abs:
          return std::fabs(x);
        case Func::Tanh:
          return std::tanh(x);
        case Func::Sqrt:
          if (x < 0.0) {
            throw EvalError(EvalError::Kind::NegativeSqrt, "sqrt of negative value");
          }
          return std::sqrt(x);
      }
      break;
    }
  }
  throw EvalError(EvalError::Kind::NonFinite, "corrupt expression tree");
}

void print_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case Node::Kind::Number: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.number);
      out += buf;
      return;
    }
    case Node::Kind::Variable:
      if (n.var == VarKind::Time) {
        out += 't';
      } else {
        out += n.var == VarKind::State ? 'y' : 'u';
        out += std::to_string(n.index + 1);
      }
      return;
    case Node::Kind::Negate:
      out += "(-";
      print_node(*n.lhs, out);
      out += ')';
      return;
    case Node::Kind::Call:
      out += func_name(n.func);
      out += '(';
      print_node(*n.lhs, out);
      out += ')';
      return;
    default:
      break;
  }
  char op = '+';
  switch (n.kind) {
    case Node::Kind::Sub: op = '-'; break;
    case Node::Kind::Mul: op = '*'; break;
    case Node::Kind::Div: op = '/'; break;
    case Node::Kind::Pow: op = '^'; break;
    default: break;
  }
  out += '(';
  print_node(*n.lhs, out);
  out += op;
  print_node(*n.rhs, out);
  out += ')';
}

}  // namespace

Expr parse(std::string_view text, std::size_t n_x, std::size_t n_u) {
  Parser parser(text, n_x, n_u);
  return Expr(parser.parse_all(), n_x, n_u, std::string(text));
}

double Expr::eval(const EvalEnv& env) const {
  if (!root_) throw EvalError(EvalError::Kind::NonFinite, "empty expression");
  if (env.y.size() != n_x_ || env.u.size() != n_u_) {
    throw EvalError(EvalError::Kind::ArityMismatch,
                    "environment arity (" + std::to_string(env.y.size()) + ", " +
                        std::to_string(env.u.size()) + ") does not match expression arity (" +
                        std::to_string(n_x_) + ", " + std::to_string(n_u_) + ")");
  }
  return checked(eval_node(*root_, env), "expression");
}

std::string print(const Expr& e) {
  std::string out;
  print_node(e.root(), out);
  return out;
}

bool structurally_equal(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Node::Kind::Number:
      return a.number == b.number;
    case Node::Kind::Variable:
      return a.var == b.var && a.index == b.index;
    case Node::Kind::Negate:
      return structurally_equal(*a.lhs, *b.lhs);
    case Node::Kind::Call:
      return a.func == b.func && structurally_equal(*a.lhs, *b.lhs);
    default:
      return structurally_equal(*a.lhs, *b.lhs) && structurally_equal(*a.rhs, *b.rhs);
  }
}

}  // namespace fgps::expr
