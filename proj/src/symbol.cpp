#include "pspi/symbol.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "pspi/error.hpp"

namespace pspi {

PolynomialSymbol::PolynomialSymbol(const std::vector<Monomial>& terms) {
  std::set<Key> seen;
  for (const auto& t : terms) {
    if (t.p_power < 0 || t.q_power < 0) fail(ErrorKind::InvalidConfig, "symbol exponents must be >= 0");
    if (!std::isfinite(t.coeff)) fail(ErrorKind::InvalidConfig, "symbol coefficient is not finite");
    if (!seen.insert({t.p_power, t.q_power}).second)
      fail(ErrorKind::InvalidConfig, "symbol exponents must be unique per term");
    add_term(t.p_power, t.q_power, t.coeff);
  }
}

void PolynomialSymbol::add_term(int a, int b, double c) {
  const Key key{a, b};
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    if (c != 0.0) terms_.emplace(key, c);
    return;
  }
  it->second += c;
  if (it->second == 0.0) terms_.erase(it);
}

PolynomialSymbol PolynomialSymbol::constant(double c) { return PolynomialSymbol({{0, 0, c}}); }
PolynomialSymbol PolynomialSymbol::p() { return PolynomialSymbol({{1, 0, 1.0}}); }
PolynomialSymbol PolynomialSymbol::q() { return PolynomialSymbol({{0, 1, 1.0}}); }
PolynomialSymbol PolynomialSymbol::harmonic() { return PolynomialSymbol({{2, 0, 0.5}, {0, 2, 0.5}}); }

std::complex<double> PolynomialSymbol::operator()(std::complex<double> p, std::complex<double> q) const {
  if (terms_.empty()) return 0.0;
  const int deg = degree();
  std::vector<std::complex<double>> pp(static_cast<std::size_t>(deg + 1)), qp(static_cast<std::size_t>(deg + 1));
  pp[0] = qp[0] = 1.0;
  for (int k = 1; k <= deg; ++k) {
    pp[static_cast<std::size_t>(k)] = pp[static_cast<std::size_t>(k - 1)] * p;
    qp[static_cast<std::size_t>(k)] = qp[static_cast<std::size_t>(k - 1)] * q;
  }
  std::complex<double> acc = 0.0;
  for (const auto& [key, c] : terms_)
    acc += c * pp[static_cast<std::size_t>(key.first)] * qp[static_cast<std::size_t>(key.second)];
  return acc;
}

double PolynomialSymbol::operator()(double p, double q) const {
  double acc = 0.0;
  for (const auto& [key, c] : terms_) acc += c * std::pow(p, key.first) * std::pow(q, key.second);
  return acc;
}

int PolynomialSymbol::degree() const {
  int d = 0;
  for (const auto& [key, c] : terms_) d = std::max(d, key.first + key.second);
  return d;
}

bool PolynomialSymbol::depends_on_p() const {
  for (const auto& [key, c] : terms_)
    if (key.first > 0) return true;
  return false;
}

std::vector<Monomial> PolynomialSymbol::monomials() const {
  std::vector<Monomial> out;
  for (const auto& [key, c] : terms_) out.push_back({key.first, key.second, c});
  return out;
}

std::vector<double> PolynomialSymbol::q_coefficients() const {
  if (depends_on_p()) fail(ErrorKind::UnsupportedSymbol, "expected a potential V(q), got " + to_string());
  std::vector<double> c(static_cast<std::size_t>(degree() + 1), 0.0);
  for (const auto& [key, v] : terms_) c[static_cast<std::size_t>(key.second)] = v;
  return c;
}

std::string PolynomialSymbol::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [key, c] : terms_) {
    double mag = c;
    if (!first) {
      os << (c < 0 ? " - " : " + ");
      mag = std::abs(c);
    }
    first = false;
    os << mag;
    if (key.first > 0) os << "*p^" << key.first;
    if (key.second > 0) os << "*q^" << key.second;
  }
  return os.str();
}

PolynomialSymbol PolynomialSymbol::operator+(const PolynomialSymbol& o) const {
  PolynomialSymbol r = *this;
  for (const auto& [key, c] : o.terms_) r.add_term(key.first, key.second, c);
  return r;
}

PolynomialSymbol PolynomialSymbol::operator-(const PolynomialSymbol& o) const { return *this + o * -1.0; }

PolynomialSymbol PolynomialSymbol::operator*(const PolynomialSymbol& o) const {
  PolynomialSymbol r;
  for (const auto& [ka, ca] : terms_)
    for (const auto& [kb, cb] : o.terms_) r.add_term(ka.first + kb.first, ka.second + kb.second, ca * cb);
  return r;
}

PolynomialSymbol PolynomialSymbol::operator*(double s) const {
  PolynomialSymbol r;
  if (s == 0.0) return r;
  for (const auto& [key, c] : terms_) r.add_term(key.first, key.second, c * s);
  return r;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  PolynomialSymbol parse() {
    PolynomialSymbol r = expr();
    skip();
    if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
    return r;
  }

 private:
  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorKind::Parse, "symbol \"" + std::string(s_) + "\" at offset " + std::to_string(pos_) + ": " + msg);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  bool at_factor_start() {
    skip();
    if (pos_ >= s_.size()) return false;
    const char c = s_[pos_];
    return c == 'p' || c == 'q' || c == '(' || c == '.' || std::isdigit(static_cast<unsigned char>(c));
  }

  double number() {
    skip();
    const char* begin = s_.data() + pos_;
    const char* end = s_.data() + s_.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr == begin) error("expected a number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return v;
  }

  int exponent() {
    skip();
    const char* begin = s_.data() + pos_;
    const char* end = s_.data() + s_.size();
    int v = 0;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr == begin || v < 0) error("expected a non-negative integer exponent");
    if (v > 64) error("exponent too large");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return v;
  }

  PolynomialSymbol expr() {
    double sign = 1.0;
    if (peek('+')) {
      ++pos_;
    } else if (peek('-')) {
      ++pos_;
      sign = -1.0;
    }
    PolynomialSymbol r = term() * sign;
    while (true) {
      if (peek('+')) {
        ++pos_;
        r = r + term();
      } else if (peek('-')) {
        ++pos_;
        r = r - term();
      } else {
        return r;
      }
    }
  }

  PolynomialSymbol term() {
    PolynomialSymbol r = factor();
    while (true) {
      if (peek('*')) {
        ++pos_;
        r = r * factor();
      } else if (peek('/')) {
        ++pos_;
        const double d = number();
        if (d == 0.0) error("division by zero");
        r = r * (1.0 / d);
      } else if (at_factor_start()) {
        r = r * factor();
      } else {
        return r;
      }
    }
  }

  PolynomialSymbol factor() {
    skip();
    if (pos_ >= s_.size()) error("unexpected end of input");
    PolynomialSymbol base;
    const char c = s_[pos_];
    if (c == 'p') {
      ++pos_;
      base = PolynomialSymbol::p();
    } else if (c == 'q') {
      ++pos_;
      base = PolynomialSymbol::q();
    } else if (c == '(') {
      ++pos_;
      base = expr();
      if (!peek(')')) error("expected ')'");
      ++pos_;
    } else {
      base = PolynomialSymbol::constant(number());
      if (base.is_zero()) base = PolynomialSymbol();
    }
    if (peek('^')) {
      ++pos_;
      const int e = exponent();
      PolynomialSymbol r = PolynomialSymbol::constant(1.0);
      for (int k = 0; k < e; ++k) r = r * base;
      return r;
    }
    return base;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

PolynomialSymbol PolynomialSymbol::parse(std::string_view text) { return Parser(text).parse(); }

}  // namespace pspi
