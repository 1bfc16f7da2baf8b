#pragma once

#include <span>
#include <string>
#include <vector>

namespace drc {

struct Term {
  std::vector<int> exps;
  double coeff = 0.0;
};

/// Sparse multivariate polynomial. Terms are canonicalized on construction:
/// sorted by exponent vector, duplicates merged, exact-zero coefficients
/// dropped. Tiny nonzero coefficients are kept verbatim.
struct Polynomial {
  int arity = 0;
  std::vector<Term> terms;

  // arity-1 fast path: dense coefficients c[0] + c[1] x + ... evaluated by
  // Horner. Term-by-term summation can produce inf - inf = NaN when a
  // trajectory legitimately diverges (|x| huge and the leading terms have
  // mixed signs); Horner keeps the dominant sign.
  std::vector<double> dense1d;

  Polynomial() = default;
  Polynomial(int arity_, std::vector<Term> raw);

  double eval(std::span<const double> point) const;

  bool operator==(const Polynomial& o) const {
    if (arity != o.arity || terms.size() != o.terms.size()) return false;
    for (std::size_t i = 0; i < terms.size(); ++i)
      if (terms[i].exps != o.terms[i].exps || terms[i].coeff != o.terms[i].coeff)
        return false;
    return true;
  }
};

/// 1-D helper: pairs of (degree, coefficient).
Polynomial poly_1d(const std::vector<std::pair<int, double>>& degree_coeff);

Polynomial poly_constant(int arity, double c);

/// Text format: one term per line, exponents then coefficient, e.g.
///   "2 0 1  -0.5"  ==  -0.5 * x0^2 * x2.
/// Blank lines and lines starting with '#' are skipped.
Polynomial parse_polynomial(const std::string& text, int arity);
std::string format_polynomial(const Polynomial& p);

}  // namespace drc
