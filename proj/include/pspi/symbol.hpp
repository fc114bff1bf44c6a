#pragma once

#include <complex>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pspi {

struct Monomial {
  int p_power = 0;
  int q_power = 0;
  double coeff = 0.0;
};

// Operating envelope for quantization and lattice constructions.
inline constexpr int kMaxSymbolDegree = 8;

/// Classical Hamiltonian h(p, q) as a finite real polynomial.
///
/// Symbols are evaluated by direct substitution, so complex arguments are
/// allowed; the coherent-state lattice evaluates h at complex midpoints.
///
/// Text form accepted by parse():
///
///   expr   := ['+'|'-'] term { ('+'|'-') term }
///   term   := factor { ['*'] factor } { '/' number }
///   factor := (number | 'p' | 'q' | '(' expr ')') [ '^' integer ]
///
/// Division is by numeric constants only, so every accepted string names a
/// polynomial. Examples: "0", "q^2/2", "(p^2+q^2)/2", "0.25*q^4 - q".
class PolynomialSymbol {
 public:
  using Key = std::pair<int, int>;  // (p power, q power)

  PolynomialSymbol() = default;
  explicit PolynomialSymbol(const std::vector<Monomial>& terms);

  static PolynomialSymbol constant(double c);
  static PolynomialSymbol p();
  static PolynomialSymbol q();
  // (p^2 + q^2) / 2
  static PolynomialSymbol harmonic();
  static PolynomialSymbol parse(std::string_view text);

  std::complex<double> operator()(std::complex<double> p, std::complex<double> q) const;
  double operator()(double p, double q) const;

  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  bool depends_on_p() const;
  const std::map<Key, double>& terms() const { return terms_; }
  std::vector<Monomial> monomials() const;

  // Coefficients c_k of q^k for a q-only symbol; throws UnsupportedSymbol
  // if any term carries a power of p.
  std::vector<double> q_coefficients() const;

  // Canonical term list, e.g. "0.5*p^2 + 0.5*q^2". Round-trips through parse().
  std::string to_string() const;

  PolynomialSymbol operator+(const PolynomialSymbol& o) const;
  PolynomialSymbol operator-(const PolynomialSymbol& o) const;
  PolynomialSymbol operator*(const PolynomialSymbol& o) const;
  PolynomialSymbol operator*(double s) const;

  bool operator==(const PolynomialSymbol& o) const { return terms_ == o.terms_; }

 private:
  void add_term(int a, int b, double c);

  std::map<Key, double> terms_;
};

}  // namespace pspi
