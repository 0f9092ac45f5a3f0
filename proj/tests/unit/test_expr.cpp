#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "ribound/expr.hpp"

using ribound::EvalError;
using ribound::Expr;
using ribound::SyntaxError;

namespace {
const std::vector<std::string> kNone;
const std::vector<std::string> kX = {"x"};
const std::vector<std::string> kTS = {"t", "s"};
}  // namespace

TEST_CASE("arithmetic and precedence") {
  CHECK(Expr::parse("2+3*4", kNone).eval() == doctest::Approx(14.0));
  CHECK(Expr::parse("(2+3)*4", kNone).eval() == doctest::Approx(20.0));
  CHECK(Expr::parse("2^3^2", kNone).eval() == doctest::Approx(512.0));  // right-assoc
  CHECK(Expr::parse("-2^2", kNone).eval() == doctest::Approx(-4.0));
  CHECK(Expr::parse("7-3-2", kNone).eval() == doctest::Approx(2.0));  // left-assoc
  CHECK(Expr::parse("1/8", kNone).eval() == doctest::Approx(0.125));
  CHECK(Expr::parse("1.5e-3*2", kNone).eval() == doctest::Approx(0.003));
}

TEST_CASE("variables bind positionally") {
  const Expr e = Expr::parse("t-s", kTS);
  CHECK(e.eval(2.0, 3.0) == doctest::Approx(-1.0));
  const Expr r = Expr::parse("t-s", {"s", "t"});
  CHECK(r.eval(2.0, 3.0) == doctest::Approx(1.0));  // here t is slot 1
  CHECK_THROWS_AS(e.eval(1.0), std::invalid_argument);
}

TEST_CASE("builtins and constants") {
  CHECK(Expr::parse("exp(1)", kNone).eval() == doctest::Approx(std::exp(1.0)));
  CHECK(Expr::parse("e", kNone).eval() == doctest::Approx(std::exp(1.0)));
  CHECK(Expr::parse("pi", kNone).eval() == doctest::Approx(3.14159265358979));
  CHECK(Expr::parse("ln(e)", kNone).eval() == doctest::Approx(1.0));
  CHECK(Expr::parse("sqrt(9)", kNone).eval() == doctest::Approx(3.0));
  CHECK(Expr::parse("abs(0-4)", kNone).eval() == doctest::Approx(4.0));
  CHECK(Expr::parse("min(2,3)", kNone).eval() == doctest::Approx(2.0));
  CHECK(Expr::parse("max(2,3)", kNone).eval() == doctest::Approx(3.0));
  CHECK(Expr::parse("pow(2,10)", kNone).eval() == doctest::Approx(1024.0));
  CHECK(Expr::parse("x^0.5", kX).eval(16.0) == doctest::Approx(4.0));
}

TEST_CASE("syntax errors carry a position") {
  CHECK_THROWS_AS(Expr::parse("2+*3", kNone), SyntaxError);
  CHECK_THROWS_AS(Expr::parse("2+", kNone), SyntaxError);
  CHECK_THROWS_AS(Expr::parse("(2+3", kNone), SyntaxError);
  CHECK_THROWS_AS(Expr::parse("bogus(1)", kNone), SyntaxError);
  CHECK_THROWS_AS(Expr::parse("min(1)", kNone), SyntaxError);
  CHECK_THROWS_AS(Expr::parse("t", kNone), SyntaxError);  // unknown variable
  try {
    Expr::parse("2+*3", kNone);
  } catch (const SyntaxError& e) {
    CHECK(e.position == 2);
  }
}

TEST_CASE("evaluation leaves the domain loudly") {
  CHECK_THROWS_AS(Expr::parse("ln(0-1)", kNone).eval(), EvalError);
  CHECK_THROWS_AS(Expr::parse("sqrt(0-1)", kNone).eval(), EvalError);
  CHECK_THROWS_AS(Expr::parse("1/x", kX).eval(0.0), EvalError);
  CHECK_THROWS_AS(Expr::parse("x^0.5", kX).eval(-2.0), EvalError);
  CHECK_THROWS_AS(Expr::parse("0^(0-1)", kNone).eval(), EvalError);
}

TEST_CASE("str round-trips through the parser") {
  const char* samples[] = {"2+3*4", "x^2-1/(x+3)", "exp(x)*ln(x+2)", "-x^2",
                           "min(x, 2*x)/max(1, x)"};
  for (const char* s : samples) {
    const Expr a = Expr::parse(s, kX);
    const Expr b = Expr::parse(a.str(), kX);
    for (double x : {0.5, 1.0, 2.75}) CHECK(a.eval(x) == doctest::Approx(b.eval(x)));
  }
}

TEST_CASE("tree renders fully parenthesized prefix form") {
  CHECK(Expr::parse("2*t+1", {"t"}).tree() == "(+ (* 2 t) 1)");
  CHECK(Expr::parse("0", kNone).tree() == "0");
}
