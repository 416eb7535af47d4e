#include <algorithm>
#include <cctype>
#include <map>

#include "deckrec/expr.hpp"

namespace deckrec {

ParseError::ParseError(const std::string& message, int line, int column)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message), line_(line), column_(column) {}

namespace {

enum class Tok { Ident, Number, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, Semi, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t k) {
    for (std::size_t j = 0; j < k; ++j, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    const int l = line;
    const int cl = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      out.push_back({Tok::Ident, text.substr(i, j - i), l, cl});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j < text.size() && text[j] == '.') {
        ++j;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      }
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
          while (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) ++k;
          j = k;
        }
      }
      if (j < text.size() && text[j] == 'i' &&
          !(j + 1 < text.size() && (std::isalnum(static_cast<unsigned char>(text[j + 1])) || text[j + 1] == '_')))
        ++j;
      const std::string lit = text.substr(i, j - i);
      if (lit == "." || lit == ".i") throw ParseError("malformed number", l, cl);
      out.push_back({Tok::Number, lit, l, cl});
      advance(j - i);
      continue;
    }
    Tok kind;
    switch (c) {
      case '+': kind = Tok::Plus; break;
      case '-': kind = Tok::Minus; break;
      case '*': kind = Tok::Star; break;
      case '/': kind = Tok::Slash; break;
      case '^': kind = Tok::Caret; break;
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case ',': kind = Tok::Comma; break;
      case ';': kind = Tok::Semi; break;
      default: throw ParseError(std::string("unexpected character '") + c + "'", l, cl);
    }
    out.push_back({kind, std::string(1, c), l, cl});
    advance(1);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

// Exact value of a literal such as 12, 1.25, 3e-4 or 2.5i.
ExactComplex literal_value(const Token& tok) {
  std::string s = tok.text;
  bool imaginary = false;
  if (!s.empty() && s.back() == 'i') {
    imaginary = true;
    s.pop_back();
  }
  std::string mantissa = s;
  long exp10 = 0;
  const auto epos = s.find_first_of("eE");
  if (epos != std::string::npos) {
    mantissa = s.substr(0, epos);
    exp10 = std::stol(s.substr(epos + 1));
  }
  std::string digits;
  const auto dot = mantissa.find('.');
  if (dot != std::string::npos) {
    digits = mantissa.substr(0, dot) + mantissa.substr(dot + 1);
    exp10 -= static_cast<long>(mantissa.size() - dot - 1);
  } else {
    digits = mantissa;
  }
  if (digits.empty()) throw ParseError("malformed number", tok.line, tok.column);
  digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
  const boost::multiprecision::cpp_int base(digits);
  boost::multiprecision::cpp_int scale = 1;
  for (long k = 0; k < std::abs(exp10); ++k) scale *= 10;
  const Rational value = exp10 >= 0 ? Rational(base * scale) : Rational(base, scale);
  return imaginary ? ExactComplex(Rational(0), value) : ExactComplex(value);
}

class ExpressionParser {
 public:
  ExpressionParser(const std::vector<Token>& toks, std::size_t& pos, const std::map<std::string, std::size_t>& vars)
      : toks_(toks), pos_(pos), vars_(vars) {}

  ExactRatFun expression() {
    ExactRatFun acc = term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const bool minus = next().kind == Tok::Minus;
      ExactRatFun rhs = term();
      acc = minus ? acc - rhs : acc + rhs;
    }
    return acc;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }

  ExactRatFun term() {
    ExactRatFun acc = unary();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const Token& op = next();
      ExactRatFun rhs = unary();
      if (op.kind == Tok::Star) {
        acc = acc * rhs;
      } else {
        if (rhs.numerator().is_zero()) throw ParseError("division by zero", op.line, op.column);
        acc = acc / rhs;
      }
    }
    return acc;
  }

  ExactRatFun unary() {
    if (peek().kind == Tok::Minus) {
      next();
      return -unary();
    }
    if (peek().kind == Tok::Plus) {
      next();
      return unary();
    }
    return power();
  }

  ExactRatFun power() {
    ExactRatFun base = primary();
    if (peek().kind == Tok::Caret) {
      next();
      const Token& e = next();
      if (e.kind != Tok::Number || e.text.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("exponent must be a non-negative integer", e.line, e.column);
      if (e.text.size() > 6) throw ParseError("exponent too large", e.line, e.column);
      base = base.pow(std::stoi(e.text));
    }
    return base;
  }

  ExactRatFun primary() {
    const Token& t = next();
    const std::size_t nv = vars_.size();
    switch (t.kind) {
      case Tok::Number:
        return ExactRatFun(ExactPoly::constant(nv, literal_value(t)));
      case Tok::Ident: {
        const auto it = vars_.find(t.text);
        if (it == vars_.end()) throw ParseError("undeclared variable '" + t.text + "'", t.line, t.column);
        return ExactRatFun(ExactPoly::variable(nv, it->second));
      }
      case Tok::LParen: {
        ExactRatFun inner = expression();
        const Token& close = next();
        if (close.kind != Tok::RParen) throw ParseError("expected ')'", close.line, close.column);
        return inner;
      }
      default:
        throw ParseError(t.kind == Tok::End ? "unexpected end of input" : "unexpected '" + t.text + "'", t.line,
                         t.column);
    }
  }

  const std::vector<Token>& toks_;
  std::size_t& pos_;
  const std::map<std::string, std::size_t>& vars_;
};

std::map<std::string, std::size_t> index_names(const std::vector<std::string>& names) {
  std::map<std::string, std::size_t> vars;
  for (std::size_t i = 0; i < names.size(); ++i) vars.emplace(names[i], i);
  return vars;
}

void expect_keyword(const std::vector<Token>& toks, std::size_t& pos, const std::string& word) {
  const Token& t = toks[pos];
  if (t.kind != Tok::Ident || t.text != word) throw ParseError("expected '" + word + "'", t.line, t.column);
  ++pos;
}

std::vector<std::string> identifier_list(const std::vector<Token>& toks, std::size_t& pos,
                                         const std::vector<std::string>& taken = {}) {
  std::vector<std::string> names;
  while (toks[pos].kind != Tok::Semi) {
    const Token& t = toks[pos];
    if (t.kind != Tok::Ident) throw ParseError("expected an identifier", t.line, t.column);
    if (std::find(names.begin(), names.end(), t.text) != names.end() ||
        std::find(taken.begin(), taken.end(), t.text) != taken.end())
      throw ParseError("duplicate name '" + t.text + "'", t.line, t.column);
    names.push_back(t.text);
    ++pos;
    if (toks[pos].kind == Tok::Comma) ++pos;
  }
  ++pos;
  return names;
}

}  // namespace

System parse_system(const std::string& text) {
  const std::vector<Token> toks = tokenize(text);
  std::size_t pos = 0;
  expect_keyword(toks, pos, "unknowns");
  std::vector<std::string> unknowns = identifier_list(toks, pos);
  expect_keyword(toks, pos, "parameters");
  std::vector<std::string> parameters = identifier_list(toks, pos, unknowns);
  for (const auto& u : unknowns)
    for (const auto& p : parameters)
      if (u == p) throw ParseError("'" + u + "' declared as both unknown and parameter", 1, 1);
  expect_keyword(toks, pos, "equations");

  std::vector<std::string> names = unknowns;
  names.insert(names.end(), parameters.begin(), parameters.end());
  const auto vars = index_names(names);

  std::vector<ExactPoly> equations;
  while (toks[pos].kind != Tok::End) {
    const Token& start = toks[pos];
    ExpressionParser parser(toks, pos, vars);
    ExactRatFun rf = parser.expression();
    if (!rf.denominator().is_constant())
      throw ParseError("equation has a non-constant denominator; clear it by hand", start.line, start.column);
    if (rf.numerator().is_zero())
      throw ParseError("equation is identically zero", start.line, start.column);
    equations.push_back(rf.numerator());
    const Token& sep = toks[pos];
    if (sep.kind == Tok::Semi)
      ++pos;
    else if (sep.kind != Tok::End)
      throw ParseError("expected ';' after equation", sep.line, sep.column);
  }
  const Token& end = toks[pos];
  if (equations.size() != unknowns.size())
    throw ParseError("system is not square: " + std::to_string(equations.size()) + " equations for " +
                         std::to_string(unknowns.size()) + " unknowns",
                     end.line, end.column);
  try {
    return System(std::move(unknowns), std::move(parameters), std::move(equations));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what(), end.line, end.column);
  }
}

ExactRatFun parse_rational(const std::string& text, const std::vector<std::string>& names) {
  const std::vector<Token> toks = tokenize(text);
  std::size_t pos = 0;
  const auto vars = index_names(names);
  ExpressionParser parser(toks, pos, vars);
  ExactRatFun rf = parser.expression();
  const Token& t = toks[pos];
  if (t.kind != Tok::End) throw ParseError("unexpected '" + t.text + "'", t.line, t.column);
  return rf;
}

Complex parse_complex(const std::string& text) {
  const ExactRatFun rf = parse_rational(text, {});
  return CoefficientTraits<ExactComplex>::to_complex(rf.numerator().constant_term());
}

}  // namespace deckrec
