#include <doctest.h>

#include "deckrec/expr.hpp"

using namespace deckrec;

namespace {

const std::vector<std::string> kXYP{"x", "y", "p"};

ExactPoly parse_poly(const std::string& s, const std::vector<std::string>& names = kXYP) {
  return parse_rational(s, names).numerator();
}

// Random sparse polynomial with small integer coefficients.
Poly random_poly(Rng& rng, std::size_t nvars, int terms, int max_deg) {
  std::vector<Term<Complex>> out;
  for (int k = 0; k < terms; ++k) {
    ExponentVector e(nvars);
    for (std::size_t i = 0; i < nvars; ++i) e[i] = static_cast<int>(rng.uniform() * (max_deg + 1));
    out.push_back({rng.complex_normal(), e});
  }
  return Poly(nvars, out);
}

}  // namespace

TEST_CASE("monomial order is graded with earlier variables first") {
  const auto mons = monomials_up_to_degree(2, 1, 2, true);
  std::vector<std::string> shown;
  for (const auto& e : mons) shown.push_back(format_polynomial(Poly::monomial(e, 1.0), kXYP));
  const std::vector<std::string> expected{"1", "x", "y", "p", "x^2", "x*y", "x*p", "y^2", "y*p", "p^2"};
  CHECK(shown == expected);
  for (std::size_t i = 1; i < mons.size(); ++i) CHECK(monomial_less(mons[i - 1], mons[i]));
}

TEST_CASE("monomial counts match binomials") {
  CHECK(monomials_up_to_degree(3, 2, 3, true).size() == binomial(5 + 3, 3));
  const auto indep = monomials_up_to_degree(3, 2, 3, false);
  CHECK(indep.size() == binomial(3 + 3, 3));
  for (const auto& e : indep) CHECK(e[3] + e[4] == 0);
  CHECK(binomial(22 + 3, 3) == 2300);
}

TEST_CASE("canonical form merges and drops cancelled terms") {
  const ExactPoly p = parse_poly("x*y - y*x + 2*x + x^2 - x^2 + 3");
  CHECK(format_polynomial(p, kXYP) == "2*x + 3");
  CHECK(format_polynomial(parse_poly("-(x + 1)"), kXYP) == "-x - 1");
  CHECK(format_polynomial(parse_poly("0*x"), kXYP) == "0");
}

TEST_CASE("exact arithmetic with rationals and imaginary literals") {
  const ExactPoly p = parse_poly("(1/2*x + 1i)^2");
  CHECK(equal_exact(p, parse_poly("1/4*x^2 + 1i*x - 1")));
  const Complex z = parse_complex("3/4 - 2.5i");
  CHECK(z.real() == doctest::Approx(0.75));
  CHECK(z.imag() == doctest::Approx(-2.5));
  CHECK(parse_complex("1e-3").real() == doctest::Approx(1e-3));
  CHECK(parse_complex("0.070710678").real() == doctest::Approx(0.070710678));
}

TEST_CASE("bare i is an identifier, not the imaginary unit") {
  const ExactRatFun f = parse_rational("2*i + 3i", {"i"});
  CHECK(format_rational(f, {"i"}) == "2*i + 3i");
}

TEST_CASE("rational functions format with minimal parentheses") {
  CHECK(format_rational(parse_rational("1/x", kXYP), kXYP) == "1/x");
  CHECK(format_rational(parse_rational("(1 - y)/(-1 - y - p)", kXYP), kXYP) == "(-y + 1)/(-p - y - 1)");
  CHECK(format_rational(parse_rational("x/2", kXYP), kXYP) == "(1/2)*x");
}

TEST_CASE("derivative and product rule agree on random polynomials") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Poly f = random_poly(rng, 3, 5, 3);
    const Poly g = random_poly(rng, 3, 5, 3);
    for (std::size_t i = 0; i < 3; ++i) {
      const Poly lhs = (f * g).derivative(i);
      const Poly rhs = f.derivative(i) * g + f * g.derivative(i);
      CHECK(approx_equal(lhs, rhs, 1e-10));
    }
  }
}

TEST_CASE("evaluation is a ring homomorphism") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Poly f = random_poly(rng, 2, 4, 4);
    const Poly g = random_poly(rng, 2, 4, 4);
    const VectorXc pt = rng.complex_normal_vector(2);
    const Complex ef = evaluate(f, pt), eg = evaluate(g, pt);
    CHECK(std::abs(evaluate(f + g, pt) - (ef + eg)) < 1e-9 * (1 + std::abs(ef) + std::abs(eg)));
    CHECK(std::abs(evaluate(f * g, pt) - ef * eg) < 1e-9 * (1 + std::abs(ef * eg)));
    CHECK(std::abs(evaluate(f.pow(3), pt) - ef * ef * ef) < 1e-8 * (1 + std::abs(ef * ef * ef)));
  }
}

TEST_CASE("rational function arithmetic evaluates consistently") {
  const ExactRatFun a = parse_rational("x/(y + 1)", kXYP);
  const ExactRatFun b = parse_rational("1/(x - p)", kXYP);
  VectorXc pt(3);
  pt << Complex(0.3, 0.1), Complex(-0.7, 0.4), Complex(1.2, -0.5);
  const Complex ea = evaluate(a, pt), eb = evaluate(b, pt);
  CHECK(std::abs(evaluate(a + b, pt) - (ea + eb)) < 1e-12);
  CHECK(std::abs(evaluate(a * b, pt) - ea * eb) < 1e-12);
  CHECK(std::abs(evaluate(a / b, pt) - ea / eb) < 1e-12);
  CHECK(std::abs(evaluate(a.pow(2) - b, pt) - (ea * ea - eb)) < 1e-12);
}

TEST_CASE("system parsing") {
  const System s = parse_system(R"(
    # comment
    unknowns x, y;
    parameters p;
    equations
      x^2 + x + p;
      x + y + p;
  )");
  CHECK(s.n() == 2);
  CHECK(s.m() == 1);
  CHECK(s.variable_names() == std::vector<std::string>{"x", "y", "p"});
  CHECK(*s.variable_index("p") == 2);
  CHECK_FALSE(s.variable_index("q"));
  const auto J = jacobian(s);
  CHECK(format_polynomial(J[0][0], s.variable_names()) == "2*x + 1");
  CHECK(format_polynomial(J[1][1], s.variable_names()) == "1");

  const System empty_params = parse_system("unknowns x; parameters ; equations x^2 - 2;");
  CHECK(empty_params.m() == 0);
}

TEST_CASE("system parse errors carry positions") {
  auto fails_at = [](const std::string& text, int line) {
    try {
      parse_system(text);
    } catch (const ParseError& e) {
      CAPTURE(text);
      CHECK(e.line() == line);
      return true;
    }
    return false;
  };
  CHECK(fails_at("unknowns x;\nparameters p;\nequations x^2 + ;", 3));
  CHECK(fails_at("unknowns x, y;\nparameters p;\nequations x + p;", 3));
  CHECK(fails_at("unknowns x;\nparameters x;\nequations x;", 2));
  CHECK(fails_at("unknowns x;\nparameters p;\nequations 1/x;", 3));
  CHECK(fails_at("unknowns x;\nparameters p;\nequations q + x;", 3));
  CHECK(fails_at("unknowns x;\nparameters p;\nequations x - x;", 3));
  CHECK(fails_at("unknowns x;\nparameters p;\nequations x^-1;", 3));
  CHECK(fails_at("unknowns x;\nequations x;", 2));
}

TEST_CASE("constant denominators are allowed in equations") {
  const System s = parse_system("unknowns x; parameters p; equations (x^2 + p)/2;");
  CHECK(format_polynomial(s.equations()[0], s.variable_names()) == "0.5*x^2 + 0.5*p");
}
