#include "ribound/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <utility>

namespace ribound {

struct Expr::Node {
  Kind kind;
  double value = 0.0;               // Literal
  std::size_t slot = 0;             // Variable
  std::string name;                 // Variable
  BinOp op = BinOp::Add;            // Binary
  Fn fn = Fn::Exp;                  // Call
  NodePtr a, b;                     // operands (b unused for unary)
};

namespace {

using Node = Expr::Node;
using NodePtr = std::shared_ptr<const Node>;
using BinOp = Expr::BinOp;
using Fn = Expr::Fn;
using Kind = Expr::Kind;

NodePtr make_literal(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Literal;
  n->value = v;
  return n;
}

NodePtr make_binary(BinOp op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Binary;
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

struct FnInfo {
  const char* name;
  Fn fn;
  int arity;
};

constexpr FnInfo kFns[] = {
    {"exp", Fn::Exp, 1}, {"ln", Fn::Ln, 1},   {"sqrt", Fn::Sqrt, 1}, {"abs", Fn::Abs, 1},
    {"min", Fn::Min, 2}, {"max", Fn::Max, 2}, {"pow", Fn::Pow, 2},
};

const FnInfo* lookup_fn(std::string_view id) {
  for (const auto& f : kFns)
    if (id == f.name) return &f;
  return nullptr;
}

std::string format_literal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Precedence used by both the parser and the printer. Larger binds tighter.
int node_prec(const Node& n) {
  switch (n.kind) {
    case Kind::Binary:
      switch (n.op) {
        case BinOp::Add:
        case BinOp::Sub:
          return 1;
        case BinOp::Mul:
        case BinOp::Div:
          return 2;
        case BinOp::Pow:
          return 4;
      }
      return 1;
    case Kind::Negate:
      return 3;
    default:
      return 5;
  }
}

void print_node(const Node& n, int min_prec, std::string& out) {
  const int prec = node_prec(n);
  const bool parens = prec < min_prec;
  if (parens) out += '(';
  switch (n.kind) {
    case Kind::Literal:
      out += format_literal(n.value);
      break;
    case Kind::Variable:
      out += n.name;
      break;
    case Kind::Negate:
      out += '-';
      print_node(*n.a, 5, out);
      break;
    case Kind::Binary: {
      const char* sym = "+";
      switch (n.op) {
        case BinOp::Add: sym = "+"; break;
        case BinOp::Sub: sym = "-"; break;
        case BinOp::Mul: sym = "*"; break;
        case BinOp::Div: sym = "/"; break;
        case BinOp::Pow: sym = "^"; break;
      }
      if (n.op == BinOp::Pow) {
        // grammar: power := primary '^' unary, right-associative
        print_node(*n.a, 5, out);
        out += sym;
        print_node(*n.b, 3, out);
      } else {
        print_node(*n.a, prec, out);
        out += sym;
        print_node(*n.b, prec + 1, out);
      }
      break;
    }
    case Kind::Call: {
      for (const auto& f : kFns)
        if (f.fn == n.fn) out += f.name;
      out += '(';
      print_node(*n.a, 0, out);
      if (n.b) {
        out += ',';
        print_node(*n.b, 0, out);
      }
      out += ')';
      break;
    }
  }
  if (parens) out += ')';
}

void print_tree(const Node& n, std::string& out) {
  switch (n.kind) {
    case Kind::Literal:
      out += format_literal(n.value);
      break;
    case Kind::Variable:
      out += n.name;
      break;
    case Kind::Negate:
      out += "(- ";
      print_tree(*n.a, out);
      out += ')';
      break;
    case Kind::Binary: {
      out += '(';
      switch (n.op) {
        case BinOp::Add: out += '+'; break;
        case BinOp::Sub: out += '-'; break;
        case BinOp::Mul: out += '*'; break;
        case BinOp::Div: out += '/'; break;
        case BinOp::Pow: out += '^'; break;
      }
      out += ' ';
      print_tree(*n.a, out);
      out += ' ';
      print_tree(*n.b, out);
      out += ')';
      break;
    }
    case Kind::Call:
      out += '(';
      for (const auto& f : kFns)
        if (f.fn == n.fn) out += f.name;
      out += ' ';
      print_tree(*n.a, out);
      if (n.b) {
        out += ' ';
        print_tree(*n.b, out);
      }
      out += ')';
      break;
  }
}

std::string describe(const Node& n) {
  std::string s;
  print_node(n, 0, s);
  return s;
}

double eval_node(const Node& n, std::span<const double> values) {
  switch (n.kind) {
    case Kind::Literal:
      return n.value;
    case Kind::Variable:
      return values[n.slot];
    case Kind::Negate:
      return -eval_node(*n.a, values);
    case Kind::Binary: {
      const double a = eval_node(*n.a, values);
      const double b = eval_node(*n.b, values);
      switch (n.op) {
        case BinOp::Add: return a + b;
        case BinOp::Sub: return a - b;
        case BinOp::Mul: return a * b;
        case BinOp::Div:
          if (std::fabs(b) < 1e-300)
            throw EvalError("division by near-zero denominator in '" + describe(n) + "'");
          return a / b;
        case BinOp::Pow:
          if (a < 0.0 && std::rint(b) != b)
            throw EvalError("negative base with non-integer exponent in '" + describe(n) + "'");
          if (a == 0.0 && b < 0.0)
            throw EvalError("zero base with negative exponent in '" + describe(n) + "'");
          return std::pow(a, b);
      }
      return 0.0;
    }
    case Kind::Call: {
      const double a = eval_node(*n.a, values);
      switch (n.fn) {
        case Fn::Exp:
          return std::exp(a);
        case Fn::Ln:
          if (!(a > 0.0)) throw EvalError("logarithm of non-positive value in '" + describe(n) + "'");
          return std::log(a);
        case Fn::Sqrt:
          if (a < 0.0) throw EvalError("square root of negative value in '" + describe(n) + "'");
          return std::sqrt(a);
        case Fn::Abs:
          return std::fabs(a);
        case Fn::Min:
          return std::fmin(a, eval_node(*n.b, values));
        case Fn::Max:
          return std::fmax(a, eval_node(*n.b, values));
        case Fn::Pow: {
          const double b = eval_node(*n.b, values);
          if (a < 0.0 && std::rint(b) != b)
            throw EvalError("negative base with non-integer exponent in '" + describe(n) + "'");
          if (a == 0.0 && b < 0.0)
            throw EvalError("zero base with negative exponent in '" + describe(n) + "'");
          return std::pow(a, b);
        }
      }
      return 0.0;
    }
  }
  return 0.0;
}

}  // namespace

struct ExprParser {
  std::string_view text;
  std::size_t pos = 0;
  const std::vector<std::string>& vars;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, pos); }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      skip_ws();
      if (eat('+'))
        lhs = make_binary(BinOp::Add, lhs, parse_term());
      else if (eat('-'))
        lhs = make_binary(BinOp::Sub, lhs, parse_term());
      else
        return lhs;
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      skip_ws();
      if (eat('*'))
        lhs = make_binary(BinOp::Mul, lhs, parse_unary());
      else if (eat('/'))
        lhs = make_binary(BinOp::Div, lhs, parse_unary());
      else
        return lhs;
    }
  }

  NodePtr parse_unary() {
    skip_ws();
    if (eat('-')) {
      auto n = std::make_shared<Node>();
      n->kind = Kind::Negate;
      n->a = parse_unary();
      return n;
    }
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    skip_ws();
    if (eat('^')) return make_binary(BinOp::Pow, base, parse_unary());
    return base;
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos >= text.size()) fail("expected an operand");
    const char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    if (eat('(')) {
      NodePtr inner = parse_expr();
      if (!eat(')')) fail("expected ')'");
      return inner;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr parse_number() {
    double v = 0.0;
    const char* begin = text.data() + pos;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec == std::errc::result_out_of_range) fail("numeric literal out of range");
    if (ec != std::errc() || ptr == begin) fail("malformed numeric literal");
    pos = static_cast<std::size_t>(ptr - text.data());
    return make_literal(v);
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    const std::string_view id = text.substr(start, pos - start);
    skip_ws();
    if (pos < text.size() && text[pos] == '(') {
      const FnInfo* f = lookup_fn(id);
      if (!f) throw SyntaxError("unknown function '" + std::string(id) + "'", start);
      ++pos;  // '('
      auto n = std::make_shared<Node>();
      n->kind = Kind::Call;
      n->fn = f->fn;
      n->a = parse_expr();
      int got = 1;
      while (eat(',')) {
        if (got == 1 && f->arity == 2)
          n->b = parse_expr();
        else
          parse_expr();  // consume, count, and reject below
        ++got;
      }
      if (!eat(')')) fail("expected ')'");
      if (got != f->arity)
        throw SyntaxError("function '" + std::string(f->name) + "' expects " +
                              std::to_string(f->arity) + " argument(s), got " + std::to_string(got),
                          start);
      return n;
    }
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (id == vars[i]) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Variable;
        n->slot = i;
        n->name = std::string(id);
        return n;
      }
    }
    if (id == "e") return make_literal(2.718281828459045235360287);
    if (id == "pi") return make_literal(3.141592653589793238462643);
    throw SyntaxError("unknown identifier '" + std::string(id) + "'", start);
  }
};

Expr::Expr(NodePtr root, std::vector<std::string> vars)
    : root_(std::move(root)), vars_(std::move(vars)) {}

Expr Expr::parse(std::string_view text, const std::vector<std::string>& variables) {
  ExprParser p{text, 0, variables};
  p.skip_ws();
  if (p.pos >= text.size()) throw SyntaxError("empty expression", 0);
  NodePtr root = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("unexpected trailing input");
  return Expr(std::move(root), variables);
}

double Expr::eval(std::span<const double> values) const {
  if (values.size() != vars_.size())
    throw std::invalid_argument("expression over " + std::to_string(vars_.size()) +
                                " variable(s) evaluated with " + std::to_string(values.size()));
  return eval_node(*root_, values);
}

std::string Expr::str() const {
  std::string out;
  print_node(*root_, 0, out);
  return out;
}

std::string Expr::tree() const {
  std::string out;
  print_tree(*root_, out);
  return out;
}

}  // namespace ribound
