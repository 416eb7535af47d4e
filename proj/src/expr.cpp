#include "deckrec/expr.hpp"

#include <array>
#include <charconv>
#include <limits>
#include <set>
#include <sstream>

#include <boost/container_hash/hash.hpp>

namespace deckrec {

ExponentVector::ExponentVector(std::vector<int> e) : e_(std::move(e)) {
  for (int v : e_)
    if (v < 0) throw Error("negative exponent");
}

ExponentVector ExponentVector::unit(std::size_t length, std::size_t index, int power) {
  ExponentVector e(length);
  e.e_.at(index) = power;
  return e;
}

int ExponentVector::total_degree() const {
  int s = 0;
  for (int v : e_) s += v;
  return s;
}

ExponentVector operator+(const ExponentVector& a, const ExponentVector& b) {
  if (a.size() != b.size()) throw Error("exponent length mismatch");
  ExponentVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r.e_[i] = a.e_[i] + b.e_[i];
  return r;
}

bool monomial_less(const ExponentVector& a, const ExponentVector& b) {
  const int da = a.total_degree();
  const int db = b.total_degree();
  if (da != db) return da < db;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] > b[i];
  return false;
}

std::size_t ExponentVectorHash::operator()(const ExponentVector& e) const {
  return boost::hash_range(e.begin(), e.end());
}

// ---------------------------------------------------------------------------
// Polynomial

template <typename Scalar>
Polynomial<Scalar>::Polynomial(std::size_t nvars, std::vector<Term<Scalar>> terms)
    : nvars_(nvars), terms_(std::move(terms)) {
  for (const auto& t : terms_)
    if (t.exponent.size() != nvars_) throw Error("exponent length does not match variable count");
  canonicalize();
}

template <typename Scalar>
void Polynomial<Scalar>::canonicalize() {
  std::stable_sort(terms_.begin(), terms_.end(), [](const Term<Scalar>& a, const Term<Scalar>& b) {
    return monomial_less(a.exponent, b.exponent);
  });
  std::vector<Term<Scalar>> merged;
  merged.reserve(terms_.size());
  for (auto& t : terms_) {
    if (!merged.empty() && merged.back().exponent == t.exponent)
      merged.back().coefficient += t.coefficient;
    else
      merged.push_back(std::move(t));
  }
  terms_.clear();
  for (auto& t : merged)
    if (!Traits::is_zero(t.coefficient)) terms_.push_back(std::move(t));
}

template <typename Scalar>
Polynomial<Scalar> Polynomial<Scalar>::constant(std::size_t nvars, const Scalar& c) {
  return Polynomial(nvars, {{c, ExponentVector(nvars)}});
}

template <typename Scalar>
Polynomial<Scalar> Polynomial<Scalar>::variable(std::size_t nvars, std::size_t index) {
  return Polynomial(nvars, {{Traits::from_int(1), ExponentVector::unit(nvars, index)}});
}

template <typename Scalar>
Polynomial<Scalar> Polynomial<Scalar>::monomial(const ExponentVector& e, const Scalar& c) {
  return Polynomial(e.size(), {{c, e}});
}

template <typename Scalar>
bool Polynomial<Scalar>::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].exponent.total_degree() == 0);
}

template <typename Scalar>
int Polynomial<Scalar>::total_degree() const {
  return terms_.empty() ? 0 : terms_.back().exponent.total_degree();
}

template <typename Scalar>
Scalar Polynomial<Scalar>::constant_term() const {
  if (!terms_.empty() && terms_[0].exponent.total_degree() == 0) return terms_[0].coefficient;
  return Traits::from_int(0);
}

template <typename Scalar>
Polynomial<Scalar> Polynomial<Scalar>::operator-() const {
  Polynomial r = *this;
  for (auto& t : r.terms_) t.coefficient = Traits::from_int(0) - t.coefficient;
  return r;
}

template <typename Scalar>
Polynomial<Scalar> Polynomial<Scalar>::scaled(const Scalar& c) const {
  std::vector<Term<Scalar>> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) out.push_back({t.coefficient * c, t.exponent});
  return Polynomial(nvars_, std::move(out));
}

template <typename Scalar>
Polynomial<Scalar> Polynomial<Scalar>::add(const Polynomial& a, const Polynomial& b, bool subtract) {
  if (a.nvars_ != b.nvars_) throw Error("variable count mismatch");
  std::vector<Term<Scalar>> out = a.terms_;
  out.reserve(a.terms_.size() + b.terms_.size());
  for (const auto& t : b.terms_)
    out.push_back({subtract ? Traits::from_int(0) - t.coefficient : t.coefficient, t.exponent});
  return Polynomial(a.nvars_, std::move(out));
}

template <typename Scalar>
Polynomial<Scalar> Polynomial<Scalar>::multiply(const Polynomial& a, const Polynomial& b) {
  if (a.nvars_ != b.nvars_) throw Error("variable count mismatch");
  std::vector<Term<Scalar>> out;
  out.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& s : a.terms_)
    for (const auto& t : b.terms_) out.push_back({s.coefficient * t.coefficient, s.exponent + t.exponent});
  return Polynomial(a.nvars_, std::move(out));
}

template <typename Scalar>
Polynomial<Scalar> Polynomial<Scalar>::pow(int k) const {
  if (k < 0) throw Error("negative polynomial power");
  Polynomial result = constant(nvars_, Traits::from_int(1));
  Polynomial base = *this;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

template <typename Scalar>
Polynomial<Scalar> Polynomial<Scalar>::derivative(std::size_t index) const {
  if (index >= nvars_) throw Error("derivative index out of range");
  std::vector<Term<Scalar>> out;
  for (const auto& t : terms_) {
    const int e = t.exponent[index];
    if (e == 0) continue;
    ExponentVector ex = t.exponent;
    ex[index] = e - 1;
    out.push_back({t.coefficient * Traits::from_int(e), std::move(ex)});
  }
  return Polynomial(nvars_, std::move(out));
}

template class Polynomial<Complex>;
template class Polynomial<ExactComplex>;

bool equal_exact(const ExactPoly& a, const ExactPoly& b) {
  if (a.nvars() != b.nvars() || a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a.terms()[i].exponent == b.terms()[i].exponent)) return false;
    if (!(a.terms()[i].coefficient == b.terms()[i].coefficient)) return false;
  }
  return true;
}

bool approx_equal(const Poly& a, const Poly& b, double tol) {
  const Poly diff = a - b;
  for (const auto& t : diff.terms())
    if (std::abs(t.coefficient) > tol) return false;
  return true;
}

namespace {

Complex ipow(Complex z, int k) {
  Complex r(1.0, 0.0);
  while (k > 0) {
    if (k & 1) r *= z;
    k >>= 1;
    if (k > 0) z *= z;
  }
  return r;
}

}  // namespace

Complex evaluate_monomial(const ExponentVector& e, const Eigen::Ref<const VectorXc>& point) {
  if (static_cast<Eigen::Index>(e.size()) != point.size()) throw Error("evaluation point has wrong length");
  Complex v(1.0, 0.0);
  for (std::size_t i = 0; i < e.size(); ++i)
    if (e[i] != 0) v *= ipow(point[static_cast<Eigen::Index>(i)], e[i]);
  return v;
}

template <typename Scalar>
Complex evaluate(const Polynomial<Scalar>& poly, const Eigen::Ref<const VectorXc>& point) {
  if (static_cast<Eigen::Index>(poly.nvars()) != point.size())
    throw Error("evaluation point has wrong length");
  Complex sum(0.0, 0.0);
  for (const auto& t : poly.terms())
    sum += CoefficientTraits<Scalar>::to_complex(t.coefficient) * evaluate_monomial(t.exponent, point);
  return sum;
}

template Complex evaluate(const Polynomial<Complex>&, const Eigen::Ref<const VectorXc>&);
template Complex evaluate(const Polynomial<ExactComplex>&, const Eigen::Ref<const VectorXc>&);

// ---------------------------------------------------------------------------
// RationalFunction

template <typename Scalar>
RationalFunction<Scalar>::RationalFunction(Polynomial<Scalar> numerator)
    : num_(std::move(numerator)),
      den_(Polynomial<Scalar>::constant(num_.nvars(), CoefficientTraits<Scalar>::from_int(1))) {}

template <typename Scalar>
RationalFunction<Scalar>::RationalFunction(Polynomial<Scalar> numerator, Polynomial<Scalar> denominator)
    : num_(std::move(numerator)), den_(std::move(denominator)) {
  if (den_.is_zero()) throw Error("rational function with zero denominator");
  if (num_.nvars() != den_.nvars()) throw Error("variable count mismatch");
  if (den_.is_constant()) {
    const Scalar c = den_.constant_term();
    num_ = num_.scaled(CoefficientTraits<Scalar>::from_int(1) / c);
    den_ = Polynomial<Scalar>::constant(num_.nvars(), CoefficientTraits<Scalar>::from_int(1));
  }
}

template <typename Scalar>
int RationalFunction<Scalar>::degree() const {
  return std::max(num_.total_degree(), den_.total_degree());
}

template class RationalFunction<Complex>;
template class RationalFunction<ExactComplex>;

// ---------------------------------------------------------------------------
// System

System::System(std::vector<std::string> unknowns, std::vector<std::string> parameters,
               std::vector<ExactPoly> equations)
    : unknowns_(std::move(unknowns)), parameters_(std::move(parameters)) {
  for (const auto& e : equations) equations_.push_back(e.to_complex());
  exact_ = std::move(equations);
  validate();
}

System::System(std::vector<std::string> unknowns, std::vector<std::string> parameters,
               std::vector<Poly> equations)
    : unknowns_(std::move(unknowns)), parameters_(std::move(parameters)), equations_(std::move(equations)) {
  validate();
}

void System::validate() const {
  if (unknowns_.empty()) throw Error("system has no unknowns");
  if (equations_.size() != unknowns_.size())
    throw Error("system is not square: " + std::to_string(equations_.size()) + " equations, " +
                std::to_string(unknowns_.size()) + " unknowns");
  std::set<std::string> seen;
  for (const auto& name : variable_names())
    if (!seen.insert(name).second) throw Error("duplicate variable name '" + name + "'");
  for (std::size_t i = 0; i < equations_.size(); ++i) {
    if (equations_[i].nvars() != nvars()) throw Error("equation has wrong variable count");
    if (equations_[i].is_zero()) throw Error("equation " + std::to_string(i + 1) + " is identically zero");
  }
}

std::vector<std::string> System::variable_names() const {
  std::vector<std::string> names = unknowns_;
  names.insert(names.end(), parameters_.begin(), parameters_.end());
  return names;
}

std::optional<std::size_t> System::variable_index(const std::string& name) const {
  for (std::size_t i = 0; i < unknowns_.size(); ++i)
    if (unknowns_[i] == name) return i;
  for (std::size_t i = 0; i < parameters_.size(); ++i)
    if (parameters_[i] == name) return unknowns_.size() + i;
  return std::nullopt;
}

VectorXc System::join(const Eigen::Ref<const VectorXc>& x, const Eigen::Ref<const VectorXc>& p) const {
  if (x.size() != static_cast<Eigen::Index>(n()) || p.size() != static_cast<Eigen::Index>(m()))
    throw Error("point has wrong dimensions");
  VectorXc pt(x.size() + p.size());
  pt << x, p;
  return pt;
}

std::vector<std::vector<Poly>> jacobian(const System& system) {
  std::vector<std::vector<Poly>> J(system.n());
  for (std::size_t i = 0; i < system.n(); ++i) {
    J[i].reserve(system.n());
    for (std::size_t j = 0; j < system.n(); ++j) J[i].push_back(system.equations()[i].derivative(j));
  }
  return J;
}

namespace {

void monomials_of_degree(std::size_t k, int degree, std::size_t pos, ExponentVector& cur,
                         std::vector<ExponentVector>& out) {
  if (pos + 1 == k) {
    cur[pos] = degree;
    out.push_back(cur);
    cur[pos] = 0;
    return;
  }
  for (int e = degree; e >= 0; --e) {
    cur[pos] = e;
    monomials_of_degree(k, degree - e, pos + 1, cur, out);
  }
  cur[pos] = 0;
}

}  // namespace

std::vector<ExponentVector> monomials_up_to_degree(std::size_t n, std::size_t m, int degree,
                                                   bool parameter_dependent) {
  if (degree < 0) throw Error("negative degree bound");
  const std::size_t k = parameter_dependent ? n + m : n;
  std::vector<ExponentVector> out;
  ExponentVector cur(n + m);
  if (k == 0) {
    out.push_back(cur);
    return out;
  }
  for (int d = 0; d <= degree; ++d) monomials_of_degree(k, d, 0, cur, out);
  return out;
}

std::uint64_t binomial(std::uint64_t a, std::uint64_t b) {
  if (b > a) return 0;
  b = std::min(b, a - b);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= b; ++i) {
    r = r * (a - b + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) throw Error("binomial coefficient overflow");
  }
  return static_cast<std::uint64_t>(r);
}

// ---------------------------------------------------------------------------
// Formatting

namespace {

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string format_rational_number(const Rational& r) {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1) os << "/" << denominator(r);
  return os.str();
}

struct CoefficientText {
  bool negative = false;
  std::string magnitude;  // empty when the magnitude is exactly one
  bool compound = false;  // needs parentheses when followed by a monomial
};

CoefficientText describe(const ExactComplex& c) {
  CoefficientText t;
  if (c.im == 0) {
    t.negative = c.re < 0;
    const Rational a = t.negative ? Rational(-c.re) : c.re;
    if (a != 1) t.magnitude = format_rational_number(a);
    t.compound = denominator(a) != 1;
  } else if (c.re == 0) {
    t.negative = c.im < 0;
    const Rational a = t.negative ? Rational(-c.im) : c.im;
    if (denominator(a) == 1) {
      t.magnitude = format_rational_number(a) + "i";
    } else {
      t.magnitude = "(" + format_rational_number(a) + "*1i)";
    }
  } else {
    std::string s = format_rational_number(c.re);
    const Rational ai = c.im < 0 ? Rational(-c.im) : c.im;
    s += c.im < 0 ? "-" : "+";
    if (denominator(ai) == 1)
      s += format_rational_number(ai) + "i";
    else
      s += format_rational_number(ai) + "*1i";
    t.magnitude = "(" + s + ")";
  }
  return t;
}

CoefficientText describe(const Complex& c) {
  CoefficientText t;
  if (c.imag() == 0.0) {
    t.negative = std::signbit(c.real());
    const double a = std::abs(c.real());
    if (a != 1.0) t.magnitude = format_double(a);
  } else if (c.real() == 0.0) {
    t.negative = std::signbit(c.imag());
    t.magnitude = format_double(std::abs(c.imag())) + "i";
  } else {
    t.magnitude = "(" + format_complex(c) + ")";
  }
  return t;
}

std::string format_monomial(const ExponentVector& e, const std::vector<std::string>& names) {
  std::string s;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += names.at(i);
    if (e[i] > 1) s += "^" + std::to_string(e[i]);
  }
  return s;
}

template <typename Scalar>
bool is_simple_denominator(const Polynomial<Scalar>& den) {
  if (den.size() != 1) return false;
  const auto& t = den.terms()[0];
  if (!(t.coefficient == CoefficientTraits<Scalar>::from_int(1))) return false;
  int vars = 0;
  for (int v : t.exponent) vars += v > 0 ? 1 : 0;
  return vars == 1;
}

}  // namespace

std::string format_complex(const Complex& c) {
  if (c.imag() == 0.0) return format_double(c.real());
  if (c.real() == 0.0) return format_double(c.imag()) + "i";
  std::string s = format_double(c.real());
  if (!std::signbit(c.imag())) s += "+";
  return s + format_double(c.imag()) + "i";
}

template <typename Scalar>
std::string format_polynomial(const Polynomial<Scalar>& poly, const std::vector<std::string>& names) {
  if (poly.is_zero()) return "0";
  std::string out;
  const auto& terms = poly.terms();
  for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
    const CoefficientText c = describe(it->coefficient);
    const std::string mono = format_monomial(it->exponent, names);
    if (out.empty())
      out += c.negative ? "-" : "";
    else
      out += c.negative ? " - " : " + ";
    if (mono.empty()) {
      out += c.magnitude.empty() ? "1" : c.magnitude;
    } else {
      if (!c.magnitude.empty()) out += (c.compound ? "(" + c.magnitude + ")" : c.magnitude) + "*";
      out += mono;
    }
  }
  return out;
}

template std::string format_polynomial(const Polynomial<Complex>&, const std::vector<std::string>&);
template std::string format_polynomial(const Polynomial<ExactComplex>&, const std::vector<std::string>&);

template <typename Scalar>
std::string format_rational(const RationalFunction<Scalar>& rf, const std::vector<std::string>& names) {
  const std::string num = format_polynomial(rf.numerator(), names);
  if (rf.denominator().is_constant()) return num;
  const std::string den = format_polynomial(rf.denominator(), names);
  const std::string n = rf.numerator().size() > 1 ? "(" + num + ")" : num;
  const std::string d = is_simple_denominator(rf.denominator()) ? den : "(" + den + ")";
  return n + "/" + d;
}

template std::string format_rational(const RationalFunction<Complex>&, const std::vector<std::string>&);
template std::string format_rational(const RationalFunction<ExactComplex>&, const std::vector<std::string>&);

}  // namespace deckrec
