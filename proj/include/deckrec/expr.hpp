#pragma once

// Sparse multivariate polynomials and rational functions over complex
// coefficients, parametric polynomial systems, and their text formats.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "deckrec/types.hpp"

namespace deckrec {

using Rational = boost::multiprecision::cpp_rational;

/// Complex number with exact rational real and imaginary parts.
struct ExactComplex {
  Rational re{0};
  Rational im{0};

  ExactComplex() = default;
  ExactComplex(Rational r, Rational i = Rational(0)) : re(std::move(r)), im(std::move(i)) {}
  explicit ExactComplex(long long v) : re(v) {}

  friend ExactComplex operator+(const ExactComplex& a, const ExactComplex& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend ExactComplex operator-(const ExactComplex& a, const ExactComplex& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend ExactComplex operator-(const ExactComplex& a) { return {-a.re, -a.im}; }
  friend ExactComplex operator*(const ExactComplex& a, const ExactComplex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend ExactComplex operator/(const ExactComplex& a, const ExactComplex& b) {
    const Rational den = b.re * b.re + b.im * b.im;
    if (den == 0) throw Error("division by exact zero");
    return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
  }
  ExactComplex& operator+=(const ExactComplex& o) { return *this = *this + o; }
  ExactComplex& operator*=(const ExactComplex& o) { return *this = *this * o; }
  friend bool operator==(const ExactComplex& a, const ExactComplex& b) {
    return a.re == b.re && a.im == b.im;
  }
};

/// Per-scalar helpers so polynomial code is generic over coefficient type.
template <typename Scalar>
struct CoefficientTraits;

template <>
struct CoefficientTraits<Complex> {
  static bool is_zero(const Complex& c) { return c == Complex(0.0, 0.0); }
  static Complex to_complex(const Complex& c) { return c; }
  static Complex from_int(long long v) { return Complex(static_cast<double>(v), 0.0); }
};

template <>
struct CoefficientTraits<ExactComplex> {
  static bool is_zero(const ExactComplex& c) { return c.re == 0 && c.im == 0; }
  static Complex to_complex(const ExactComplex& c) {
    return {c.re.convert_to<double>(), c.im.convert_to<double>()};
  }
  static ExactComplex from_int(long long v) { return ExactComplex(v); }
};

/// Exponents of one monomial over (unknowns, parameters).
class ExponentVector {
 public:
  ExponentVector() = default;
  explicit ExponentVector(std::size_t length) : e_(length, 0) {}
  explicit ExponentVector(std::vector<int> e);

  static ExponentVector unit(std::size_t length, std::size_t index, int power = 1);

  std::size_t size() const { return e_.size(); }
  int operator[](std::size_t i) const { return e_[i]; }
  int& operator[](std::size_t i) { return e_[i]; }
  int total_degree() const;
  const std::vector<int>& entries() const { return e_; }

  auto begin() const { return e_.begin(); }
  auto end() const { return e_.end(); }

  friend ExponentVector operator+(const ExponentVector& a, const ExponentVector& b);
  friend bool operator==(const ExponentVector& a, const ExponentVector& b) = default;

 private:
  std::vector<int> e_;
};

/// Graded order with earlier variables ranked first inside a degree:
/// 1 < x < y < p < x^2 < x*y < ...
bool monomial_less(const ExponentVector& a, const ExponentVector& b);

struct ExponentVectorHash {
  std::size_t operator()(const ExponentVector& e) const;
};

template <typename Scalar>
struct Term {
  Scalar coefficient;
  ExponentVector exponent;
};

/// Sparse polynomial in `nvars` variables, kept in canonical form: no zero
/// coefficients, distinct exponents sorted by `monomial_less`.
template <typename Scalar>
class Polynomial {
 public:
  using Traits = CoefficientTraits<Scalar>;

  Polynomial() = default;
  explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}
  Polynomial(std::size_t nvars, std::vector<Term<Scalar>> terms);

  static Polynomial constant(std::size_t nvars, const Scalar& c);
  static Polynomial variable(std::size_t nvars, std::size_t index);
  static Polynomial monomial(const ExponentVector& e, const Scalar& c);

  std::size_t nvars() const { return nvars_; }
  const std::vector<Term<Scalar>>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  int total_degree() const;
  /// Coefficient of the zero exponent (the constant term).
  Scalar constant_term() const;

  Polynomial operator-() const;
  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) { return add(a, b, false); }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return add(a, b, true); }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) { return multiply(a, b); }
  Polynomial scaled(const Scalar& c) const;
  Polynomial pow(int k) const;

  /// Partial derivative with respect to variable `index`.
  Polynomial derivative(std::size_t index) const;

  template <typename Other, typename Fn>
  Polynomial<Other> map_coefficients(Fn fn) const {
    std::vector<Term<Other>> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) out.push_back({fn(t.coefficient), t.exponent});
    return Polynomial<Other>(nvars_, std::move(out));
  }

  Polynomial<Complex> to_complex() const {
    return map_coefficients<Complex>([](const Scalar& c) { return Traits::to_complex(c); });
  }

 private:
  static Polynomial add(const Polynomial& a, const Polynomial& b, bool subtract);
  static Polynomial multiply(const Polynomial& a, const Polynomial& b);
  void canonicalize();

  std::size_t nvars_ = 0;
  std::vector<Term<Scalar>> terms_;
};

using Poly = Polynomial<Complex>;
using ExactPoly = Polynomial<ExactComplex>;

/// Re-sorts and merges an arbitrary term list. Idempotent.
template <typename Scalar>
Polynomial<Scalar> canonical(const Polynomial<Scalar>& p) {
  return Polynomial<Scalar>(p.nvars(), p.terms());
}

/// Exact equality for exact coefficients.
bool equal_exact(const ExactPoly& a, const ExactPoly& b);
/// Coefficient-wise equality up to `tol` (absolute, on the union of supports).
bool approx_equal(const Poly& a, const Poly& b, double tol);

/// Evaluates sum(c * point^e) term by term.
template <typename Scalar>
Complex evaluate(const Polynomial<Scalar>& poly, const Eigen::Ref<const VectorXc>& point);

/// Evaluates the monomial point^e.
Complex evaluate_monomial(const ExponentVector& e, const Eigen::Ref<const VectorXc>& point);

/// Quotient of two polynomials; the denominator is never the zero polynomial.
template <typename Scalar>
class RationalFunction {
 public:
  RationalFunction() = default;
  explicit RationalFunction(Polynomial<Scalar> numerator);
  /// A constant denominator is folded into the numerator.
  RationalFunction(Polynomial<Scalar> numerator, Polynomial<Scalar> denominator);

  const Polynomial<Scalar>& numerator() const { return num_; }
  const Polynomial<Scalar>& denominator() const { return den_; }
  std::size_t nvars() const { return num_.nvars(); }
  /// max(deg numerator, deg denominator)
  int degree() const;

  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
    if (a.den_.is_constant() && b.den_.is_constant())
      return RationalFunction(a.num_ + b.num_);
    return RationalFunction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) {
    return a + (-b);
  }
  RationalFunction operator-() const { return RationalFunction(-num_, den_); }
  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    return RationalFunction(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
    if (b.num_.is_zero()) throw Error("division by the zero polynomial");
    return RationalFunction(a.num_ * b.den_, a.den_ * b.num_);
  }
  RationalFunction pow(int k) const { return RationalFunction(num_.pow(k), den_.pow(k)); }

  RationalFunction<Complex> to_complex() const {
    return RationalFunction<Complex>(num_.to_complex(), den_.to_complex());
  }

 private:
  Polynomial<Scalar> num_;
  Polynomial<Scalar> den_;
};

using RatFun = RationalFunction<Complex>;
using ExactRatFun = RationalFunction<ExactComplex>;

/// Returns num/den evaluated at `point`.
template <typename Scalar>
Complex evaluate(const RationalFunction<Scalar>& rf, const Eigen::Ref<const VectorXc>& point) {
  return evaluate(rf.numerator(), point) / evaluate(rf.denominator(), point);
}

/// Square parametric polynomial system F(x; p) = 0 with n unknowns and m
/// parameters. Variables are ordered unknowns first, then parameters.
class System {
 public:
  System() = default;
  /// Validates squareness, name uniqueness and exponent lengths.
  System(std::vector<std::string> unknowns, std::vector<std::string> parameters,
         std::vector<ExactPoly> equations);
  System(std::vector<std::string> unknowns, std::vector<std::string> parameters,
         std::vector<Poly> equations);

  std::size_t n() const { return unknowns_.size(); }
  std::size_t m() const { return parameters_.size(); }
  std::size_t nvars() const { return n() + m(); }
  const std::vector<std::string>& unknowns() const { return unknowns_; }
  const std::vector<std::string>& parameters() const { return parameters_; }
  std::vector<std::string> variable_names() const;
  const std::vector<Poly>& equations() const { return equations_; }
  /// Exact coefficients, present when the system came from rational text.
  const std::optional<std::vector<ExactPoly>>& exact_equations() const { return exact_; }

  /// Index of a variable name in the combined (unknowns, parameters) order.
  std::optional<std::size_t> variable_index(const std::string& name) const;

  /// Stacks x and p into one point of length n+m.
  VectorXc join(const Eigen::Ref<const VectorXc>& x, const Eigen::Ref<const VectorXc>& p) const;

 private:
  void validate() const;

  std::vector<std::string> unknowns_;
  std::vector<std::string> parameters_;
  std::vector<Poly> equations_;
  std::optional<std::vector<ExactPoly>> exact_;
};

/// Symbolic n x n Jacobian with respect to the unknowns only.
std::vector<std::vector<Poly>> jacobian(const System& system);

/// All monomials of total degree <= `degree` in (x, p), or in x alone when
/// `parameter_dependent` is false (parameter exponents then stay zero).
/// Output follows `monomial_less`.
std::vector<ExponentVector> monomials_up_to_degree(std::size_t n, std::size_t m, int degree,
                                                   bool parameter_dependent);

/// Binomial coefficient C(a, b) as an unsigned 64-bit count.
std::uint64_t binomial(std::uint64_t a, std::uint64_t b);

// ---------------------------------------------------------------------------
// Text formats

/// Syntax or semantic error in input text, with a 1-based position.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Parses `unknowns ...; parameters ...; equations e1; e2; ...`.
System parse_system(const std::string& text);

/// Parses one expression over the given variable names; `/` is allowed and
/// produces a genuine rational function.
ExactRatFun parse_rational(const std::string& text, const std::vector<std::string>& names);

/// Parses a complex literal such as `1.5-2e-3i`, `-4i`, `3`.
Complex parse_complex(const std::string& text);
std::string format_complex(const Complex& c);

template <typename Scalar>
std::string format_polynomial(const Polynomial<Scalar>& poly, const std::vector<std::string>& names);

/// ASCII formula, e.g. "1/x" or "-x - 1"; a unit denominator is elided.
template <typename Scalar>
std::string format_rational(const RationalFunction<Scalar>& rf, const std::vector<std::string>& names);

}  // namespace deckrec
