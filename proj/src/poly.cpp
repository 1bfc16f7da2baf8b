#include "drc/poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace drc {

namespace {

double pow_int(double x, int e) {
  double r = 1.0;
  while (e > 0) {
    if (e & 1) r *= x;
    x *= x;
    e >>= 1;
  }
  return r;
}

}  // namespace

Polynomial::Polynomial(int arity_, std::vector<Term> raw) : arity(arity_) {
  for (const auto& t : raw) {
    if (static_cast<int>(t.exps.size()) != arity)
      throw std::invalid_argument("polynomial term arity mismatch");
    for (int e : t.exps)
      if (e < 0) throw std::invalid_argument("negative exponent");
  }
  std::sort(raw.begin(), raw.end(),
            [](const Term& a, const Term& b) { return a.exps < b.exps; });
  for (const auto& t : raw) {
    if (!terms.empty() && terms.back().exps == t.exps)
      terms.back().coeff += t.coeff;
    else
      terms.push_back(t);
  }
  std::erase_if(terms, [](const Term& t) { return t.coeff == 0.0; });

  if (arity == 1) {
    int deg = 0;
    for (const auto& t : terms) deg = std::max(deg, t.exps[0]);
    dense1d.assign(static_cast<std::size_t>(deg) + 1, 0.0);
    for (const auto& t : terms) dense1d[t.exps[0]] += t.coeff;
  }
}

double Polynomial::eval(std::span<const double> point) const {
  if (static_cast<int>(point.size()) != arity)
    throw std::invalid_argument("polynomial eval dimension mismatch");
  if (arity == 1) {
    // Horner seeded with the leading coefficient: a zero seed would turn
    // x = +/-inf into 0*inf = NaN, and diverging trajectories are legitimate
    // inputs here (one-sided safe sets).
    double x = point[0];
    std::size_t i = dense1d.size();
    double acc = dense1d[--i];
    while (i-- > 0) acc = acc * x + dense1d[i];
    return acc;
  }
  double acc = 0.0;
  for (const auto& t : terms) {
    double m = t.coeff;
    for (int k = 0; k < arity; ++k)
      if (t.exps[k] != 0) m *= pow_int(point[k], t.exps[k]);
    acc += m;
  }
  return acc;
}

Polynomial poly_1d(const std::vector<std::pair<int, double>>& degree_coeff) {
  std::vector<Term> ts;
  ts.reserve(degree_coeff.size());
  for (auto [d, c] : degree_coeff) ts.push_back({{d}, c});
  return Polynomial(1, std::move(ts));
}

Polynomial poly_constant(int arity, double c) {
  return Polynomial(arity, {Term{std::vector<int>(arity, 0), c}});
}

Polynomial parse_polynomial(const std::string& text, int arity) {
  std::vector<Term> ts;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    Term t;
    t.exps.resize(arity);
    for (int k = 0; k < arity; ++k)
      if (!(ls >> t.exps[k]))
        throw std::invalid_argument("polynomial parse: bad exponent in '" + line + "'");
    if (!(ls >> t.coeff))
      throw std::invalid_argument("polynomial parse: missing coefficient in '" + line + "'");
    ts.push_back(std::move(t));
  }
  return Polynomial(arity, std::move(ts));
}

std::string format_polynomial(const Polynomial& p) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& t : p.terms) {
    for (std::size_t k = 0; k < t.exps.size(); ++k) out << t.exps[k] << ' ';
    out << ' ' << t.coeff << '\n';
  }
  return out.str();
}

}  // namespace drc
