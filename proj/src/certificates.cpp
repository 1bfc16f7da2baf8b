#include "drc/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "drc/dual.hpp"
#include "drc/parallel.hpp"
#include "drc/rng.hpp"

namespace drc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double dist_pow(std::span<const double> a, std::span<const double> b, double p) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  if (p == 2.0) return s;
  if (p == 1.0) return std::sqrt(s);
  return std::pow(std::sqrt(s), p);
}

void validate_candidate(const CertificateCandidate& cand, const SystemModel& model) {
  if (cand.eta <= 0.0)
    throw std::invalid_argument("certificate: eta must be positive");
  if (cand.beta > 0.0)
    throw std::invalid_argument("certificate: beta must be <= 0");
  if (static_cast<int>(cand.control.size()) != model.m)
    throw std::invalid_argument("certificate: control arity != input dimension");
  if (cand.v_bar.arity != model.n)
    throw std::invalid_argument("certificate: v_bar arity != state dimension");
}

// Probe points: dense grid over the verify box plus a grid over the initial
// set's bounding box, so the initial-level condition is never checked
// against an accidentally empty probe set.
std::vector<std::vector<double>> make_probes(const SystemModel& model,
                                             const Box& verify_box, int density) {
  std::optional<Box> x0bb = model.init.bounding_box();
  if (!x0bb)
    throw std::invalid_argument("certificate check: initial set lacks a bounding box");
  for (int k = 0; k < verify_box.dim(); ++k)
    if (x0bb->lo[k] < verify_box.lo[k] - 1e-12 ||
        x0bb->hi[k] > verify_box.hi[k] + 1e-12)
      throw std::invalid_argument("certificate check: verify_box must contain X0");
  std::vector<std::vector<double>> probes = box_grid(verify_box, density);
  std::vector<std::vector<double>> extra = box_grid(*x0bb, density);
  probes.insert(probes.end(), extra.begin(), extra.end());
  return probes;
}

ConditionRecord reduce_margins(std::string id, const std::vector<double>& margins,
                               const std::vector<std::vector<double>>& probes,
                               double tol) {
  ConditionRecord rec;
  rec.id = std::move(id);
  rec.worst_margin = kInf;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    if (std::isnan(margins[i])) continue;  // condition not applicable here
    if (margins[i] < rec.worst_margin) {
      rec.worst_margin = margins[i];
      rec.worst_point = probes[i];
    }
  }
  rec.pass = rec.worst_margin >= -tol;
  return rec;
}

struct Densities {
  int state;
  int disturbance;
};

Densities pick_densities(const SystemModel& model, const CheckOptions& opt) {
  Densities d{};
  d.state = opt.state_density > 0 ? opt.state_density : (model.n == 1 ? 401 : 17);
  d.disturbance =
      opt.disturbance_density > 0 ? opt.disturbance_density : (model.n == 1 ? 101 : 17);
  return d;
}

}  // namespace

std::vector<double> CertificateCandidate::control_at(std::span<const double> x) const {
  std::vector<double> u(control.size());
  for (std::size_t k = 0; k < control.size(); ++k) u[k] = control[k].eval(x);
  return u;
}

const ConditionRecord* VerificationReport::find(std::string_view id) const {
  for (const auto& c : conditions)
    if (c.id == id) return &c;
  return nullptr;
}

VerificationReport check_drcbc(const CertificateCandidate& cand,
                               const SystemModel& model, const AmbiguitySet& amb,
                               const CheckOptions& opt) {
  validate_candidate(cand, model);
  amb.validate();
  const Densities dens = pick_densities(model, opt);
  const auto probes = make_probes(model, opt.verify_box, dens.state);
  auto wgrid = box_grid(model.disturbance_box, dens.disturbance);
  for (const auto& a : amb.nominal.atoms) wgrid.push_back(a);

  const std::size_t P = probes.size();
  const std::size_t K = wgrid.size();
  std::vector<double> m_out(P, kNaN), m_in(P, kNaN), m_step(P, kNaN),
      m_ctrl(P, kNaN), m_init(P, kNaN);
  std::vector<char> in_s(P, 0);
  std::vector<double> vbar_x(P, 0.0);
  std::vector<double> vf(P * K, kNaN);  // v_bar after one step, per (probe, w)

  parallel_for(P, opt.workers, [&](std::size_t i) {
    const auto& x = probes[i];
    const bool s = model.safe.contains(x);
    in_s[i] = s ? 1 : 0;
    const double vb = cand.v_bar.eval(x);
    vbar_x[i] = vb;
    if (s)
      m_in[i] = 1.0 - vb;
    else
      m_out[i] = -vb;
    const std::vector<double> u = cand.control_at(x);
    m_ctrl[i] = model.inputs.margin(u);
    if (model.init.contains(x)) m_init[i] = vb - cand.delta;
    if (s)
      for (std::size_t j = 0; j < K; ++j)
        vf[i * K + j] = cand.v_bar.eval(model.step(x, u, wgrid[j]));
  });

  // multiplier interval pre-pass: range of v_bar over the probed reachable set
  double vmin = kInf, vmax = -kInf;
  for (std::size_t i = 0; i < P; ++i) {
    if (!in_s[i]) continue;
    for (std::size_t j = 0; j < K; ++j) {
      vmin = std::min(vmin, vf[i * K + j]);
      vmax = std::max(vmax, vf[i * K + j]);
    }
  }
  const double range = vmax > vmin ? vmax - vmin : 0.0;
  const double theta_pow = std::pow(amb.theta, amb.p);

  parallel_for(P, opt.workers, [&](std::size_t i) {
    if (!in_s[i]) return;
    std::vector<double> row(vf.begin() + i * K, vf.begin() + (i + 1) * K);
    DiscreteDualResult r = dual_value_discrete(wgrid, row, amb.nominal, amb.theta,
                                               amb.p, opt.lambda_tolerance, range);
    m_step[i] = r.value - vbar_x[i] / cand.eta - cand.beta;
  });

  VerificationReport rep;
  rep.conditions.push_back(
      reduce_margins("outside_safe_level", m_out, probes, opt.margin_tolerance));
  rep.conditions.push_back(
      reduce_margins("inside_safe_level", m_in, probes, opt.margin_tolerance));
  rep.conditions.push_back(
      reduce_margins("robust_step", m_step, probes, opt.margin_tolerance));
  rep.conditions.push_back(
      reduce_margins("control_membership", m_ctrl, probes, opt.margin_tolerance));
  rep.conditions.push_back(
      reduce_margins("initial_level", m_init, probes, opt.margin_tolerance));
  rep.overall = true;
  for (const auto& c : rep.conditions) rep.overall = rep.overall && c.pass;
  rep.state_density.assign(model.n, dens.state);
  rep.disturbance_density = dens.disturbance;
  rep.margin_tolerance = opt.margin_tolerance;
  rep.lambda_max = amb.theta > 0.0 ? range / theta_pow : 0.0;
  rep.verify_box = opt.verify_box;
  return rep;
}

double safety_lower_bound(const CertificateCandidate& cand, int T, double v0) {
  if (cand.eta <= 0.0)
    throw std::invalid_argument("safety_lower_bound: eta must be positive");
  if (T < 0) throw std::invalid_argument("safety_lower_bound: negative horizon");
  if (cand.eta == 1.0) return v0 + static_cast<double>(T) * cand.beta;
  const double r = 1.0 / cand.eta;
  const double geom = (1.0 - std::pow(r, T)) / (1.0 - r);
  return std::pow(cand.eta, -T) * v0 + cand.beta * geom;
}

VerificationReport check_sos_conditions(const CertificateCandidate& cand,
                                        const SosBundle& bundle,
                                        const SystemModel& model,
                                        const AmbiguitySet& amb,
                                        const CheckOptions& opt) {
  validate_candidate(cand, model);
  amb.validate();
  const int M = amb.nominal.count();
  if (static_cast<int>(bundle.l_polys.size()) != M)
    throw std::invalid_argument("check_sos_conditions: need one l_i per atom");
  if (bundle.lambda_poly.arity != model.n)
    throw std::invalid_argument("check_sos_conditions: lambda arity != state dim");

  const Densities dens = pick_densities(model, opt);
  const auto probes = make_probes(model, opt.verify_box, dens.state);
  auto wgrid = box_grid(model.disturbance_box, dens.disturbance);
  for (const auto& a : amb.nominal.atoms) wgrid.push_back(a);

  const std::size_t P = probes.size();
  const double theta_pow = std::pow(amb.theta, amb.p);
  std::vector<double> m_out(P, kNaN), m_in(P, kNaN), m_init(P, kNaN),
      m_dual(P, kNaN), m_inner(P, kNaN), m_mult(P, kNaN), m_ctrl(P, kNaN);

  parallel_for(P, opt.workers, [&](std::size_t i) {
    const auto& x = probes[i];
    const double vb = cand.v_bar.eval(x);
    const std::vector<double> u = cand.control_at(x);
    m_ctrl[i] = model.inputs.margin(u);
    if (model.init.contains(x)) m_init[i] = vb - cand.delta;
    if (!model.safe.contains(x)) {
      m_out[i] = -vb;
      return;
    }
    m_in[i] = 1.0 - vb;
    const double lam = bundle.lambda_poly.eval(x);
    m_mult[i] = lam;
    double expect_l = 0.0;
    double worst_inner = kInf;
    for (int a = 0; a < M; ++a) {
      const double la = bundle.l_polys[a].eval(x);
      expect_l += amb.nominal.probs[a] * la;
      double inner = kInf;
      for (const auto& w : wgrid)
        inner = std::min(inner, cand.v_bar.eval(model.step(x, u, w)) +
                                    lam * dist_pow(w, amb.nominal.atoms[a], amb.p));
      worst_inner = std::min(worst_inner, inner - la);
    }
    m_inner[i] = worst_inner;
    m_dual[i] = expect_l - theta_pow * lam - vb / cand.eta - cand.beta;
  });

  VerificationReport rep;
  rep.conditions.push_back(
      reduce_margins("outside_safe_level", m_out, probes, opt.margin_tolerance));
  rep.conditions.push_back(
      reduce_margins("inside_safe_level", m_in, probes, opt.margin_tolerance));
  rep.conditions.push_back(
      reduce_margins("initial_level", m_init, probes, opt.margin_tolerance));
  rep.conditions.push_back(
      reduce_margins("dual_feasibility", m_dual, probes, opt.margin_tolerance));
  rep.conditions.push_back(
      reduce_margins("inner_bound", m_inner, probes, opt.margin_tolerance));
  rep.conditions.push_back(
      reduce_margins("multiplier_sign", m_mult, probes, opt.margin_tolerance));
  rep.conditions.push_back(
      reduce_margins("control_membership", m_ctrl, probes, opt.margin_tolerance));
  rep.overall = true;
  for (const auto& c : rep.conditions) rep.overall = rep.overall && c.pass;
  rep.state_density.assign(model.n, dens.state);
  rep.disturbance_density = dens.disturbance;
  rep.margin_tolerance = opt.margin_tolerance;
  rep.verify_box = opt.verify_box;
  return rep;
}

namespace {

struct QuarticTerm {
  int e[4];
  double c;
};

// Fixture coefficients are kept exactly as printed by the originating
// synthesis run (4 significant digits); near-zero terms retained verbatim.
constexpr QuarticTerm kVbar4[] = {
    {{4, 0, 0, 0}, -0.2498},   {{3, 1, 0, 0}, -0.4521},
    {{3, 0, 1, 0}, 6.218e-16}, {{3, 0, 0, 1}, -2.981e-18},
    {{3, 0, 0, 0}, 0.03694},   {{2, 2, 0, 0}, -0.3542},
    {{2, 1, 1, 0}, 6.744e-16}, {{2, 1, 0, 1}, 3.973e-17},
    {{2, 1, 0, 0}, 0.08168},   {{2, 0, 2, 0}, -0.6311},
    {{2, 0, 1, 1}, -5.627e-5}, {{2, 0, 1, 0}, -9.227e-16},
    {{2, 0, 0, 2}, -0.233},    {{2, 0, 0, 1}, 2.663e-18},
    {{2, 0, 0, 0}, -0.9242},   {{1, 3, 0, 0}, -0.3872},
    {{1, 2, 1, 0}, 4.514e-16}, {{1, 2, 0, 1}, -1.482e-17},
    {{1, 2, 0, 0}, 0.05211},   {{1, 1, 2, 0}, -0.2759},
    {{1, 1, 1, 1}, 0.0001882}, {{1, 1, 1, 0}, -7.616e-16},
    {{1, 1, 0, 2}, -0.4317},   {{1, 1, 0, 1}, 4.62e-17},
    {{1, 1, 0, 0}, 0.156},     {{1, 0, 3, 0}, 1.353e-15},
    {{1, 0, 2, 1}, -1.112e-16},{{1, 0, 2, 0}, 0.08263},
    {{1, 0, 1, 2}, 4.98e-16},  {{1, 0, 1, 1}, -0.003198},
    {{1, 0, 1, 0}, 1.376e-16}, {{1, 0, 0, 3}, -1.151e-17},
    {{1, 0, 0, 2}, 0.001856},  {{1, 0, 0, 1}, 1.674e-17},
    {{1, 0, 0, 0}, -0.0001112},{{0, 4, 0, 0}, -0.2656},
    {{0, 3, 1, 0}, 5.129e-16}, {{0, 3, 0, 1}, 6.286e-17},
    {{0, 3, 0, 0}, 0.006773},  {{0, 2, 2, 0}, -0.6401},
    {{0, 2, 1, 1}, 0.0004495}, {{0, 2, 1, 0}, 2.007e-16},
    {{0, 2, 0, 2}, -0.2745},   {{0, 2, 0, 1}, 3.15e-17},
    {{0, 2, 0, 0}, -0.9106},   {{0, 1, 3, 0}, 6.695e-16},
    {{0, 1, 2, 1}, 9.216e-17}, {{0, 1, 2, 0}, 0.03181},
    {{0, 1, 1, 2}, 5.334e-16}, {{0, 1, 1, 1}, -0.002691},
    {{0, 1, 1, 0}, 1.647e-16}, {{0, 1, 0, 3}, 6.922e-17},
    {{0, 1, 0, 2}, 0.003741},  {{0, 1, 0, 1}, -2.836e-18},
    {{0, 1, 0, 0}, -0.0001082},{{0, 0, 4, 0}, -0.5929},
    {{0, 0, 3, 1}, 0.001256},  {{0, 0, 3, 0}, -2.266e-16},
    {{0, 0, 2, 2}, -0.5173},   {{0, 0, 2, 1}, -1.794e-16},
    {{0, 0, 2, 0}, -0.8271},   {{0, 0, 1, 3}, 3.418e-5},
    {{0, 0, 1, 2}, -2.969e-17},{{0, 0, 1, 1}, 3.805e-5},
    {{0, 0, 1, 0}, 2.483e-18}, {{0, 0, 0, 4}, -0.01936},
    {{0, 0, 0, 3}, 9.653e-18}, {{0, 0, 0, 2}, -0.9872},
    {{0, 0, 0, 1}, -1.874e-19},{{0, 0, 0, 0}, 0.9999},
};

constexpr QuarticTerm kControl4[] = {
    {{4, 0, 0, 0}, 0.01773},   {{3, 1, 0, 0}, -0.0004027},
    {{3, 0, 1, 0}, 3.374e-16}, {{3, 0, 0, 1}, -1.196e-16},
    {{3, 0, 0, 0}, 0.0007027}, {{2, 2, 0, 0}, -0.0216},
    {{2, 1, 1, 0}, -6.616e-17},{{2, 1, 0, 1}, 3.953e-17},
    {{2, 1, 0, 0}, 0.002888},  {{2, 0, 2, 0}, -0.08656},
    {{2, 0, 1, 1}, -3.015e-5}, {{2, 0, 1, 0}, -2.731e-16},
    {{2, 0, 0, 2}, -0.02166},  {{2, 0, 0, 1}, -1.158e-16},
    {{2, 0, 0, 0}, -0.03417},  {{1, 3, 0, 0}, 0.003754},
    {{1, 2, 1, 0}, -7.503e-16},{{1, 2, 0, 1}, -1.241e-16},
    {{1, 2, 0, 0}, 0.00351},   {{1, 1, 2, 0}, -0.002516},
    {{1, 1, 1, 1}, 0.0009659}, {{1, 1, 1, 0}, -3.586e-18},
    {{1, 1, 0, 2}, -0.0003268},{{1, 1, 0, 1}, -1.388e-16},
    {{1, 1, 0, 0}, -0.005415}, {{1, 0, 3, 0}, -2.386e-16},
    {{1, 0, 2, 1}, -1.456e-16},{{1, 0, 2, 0}, 0.005017},
    {{1, 0, 1, 2}, -7.791e-16},{{1, 0, 1, 1}, -0.006335},
    {{1, 0, 1, 0}, -1.291e-15},{{1, 0, 0, 3}, -1.341e-16},
    {{1, 0, 0, 2}, 0.002866},  {{1, 0, 0, 1}, 1.0e-16},
    {{1, 0, 0, 0}, 0.001509},  {{0, 4, 0, 0}, 0.04643},
    {{0, 3, 1, 0}, 2.58e-17},  {{0, 3, 0, 1}, -2.009e-16},
    {{0, 3, 0, 0}, 0.0003539}, {{0, 2, 2, 0}, -0.02193},
    {{0, 2, 1, 1}, 0.000234},  {{0, 2, 1, 0}, -2.226e-17},
    {{0, 2, 0, 2}, 0.05167},   {{0, 2, 0, 1}, -2.946e-17},
    {{0, 2, 0, 0}, -0.07807},  {{0, 1, 3, 0}, 5.043e-17},
    {{0, 1, 2, 1}, 6.089e-17}, {{0, 1, 2, 0}, 0.0002895},
    {{0, 1, 1, 2}, -1.03e-16}, {{0, 1, 1, 1}, -0.001483},
    {{0, 1, 1, 0}, -3.494e-17},{{0, 1, 0, 3}, -3.811e-16},
    {{0, 1, 0, 2}, 0.0006056}, {{0, 1, 0, 1}, 2.91e-16},
    {{0, 1, 0, 0}, -0.0001431},{{0, 0, 4, 0}, 0.01818},
    {{0, 0, 3, 1}, 0.0003328}, {{0, 0, 3, 0}, -6.936e-17},
    {{0, 0, 2, 2}, -0.02228},  {{0, 0, 2, 1}, 9.971e-17},
    {{0, 0, 2, 0}, -0.03461},  {{0, 0, 1, 3}, -0.0001048},
    {{0, 0, 1, 2}, 2.35e-17},  {{0, 0, 1, 1}, -1.252e-5},
    {{0, 0, 1, 0}, 9.886e-17}, {{0, 0, 0, 4}, 0.04612},
    {{0, 0, 0, 3}, 1.458e-18}, {{0, 0, 0, 2}, -0.07739},
    {{0, 0, 0, 1}, -1.024e-17},{{0, 0, 0, 0}, 0.9907},
};

Polynomial quartic_poly(std::span<const QuarticTerm> table) {
  std::vector<Term> terms;
  terms.reserve(table.size());
  for (const auto& q : table)
    terms.push_back(Term{{q.e[0], q.e[1], q.e[2], q.e[3]}, q.c});
  return Polynomial(4, std::move(terms));
}

}  // namespace

CertificateCandidate builtin_certificate(std::string_view name) {
  CertificateCandidate c;
  c.name = std::string(name);
  c.eta = 1.0;
  c.delta = 0.96;
  if (name == "v_bar_1") {
    c.v_bar = poly_1d({{4, -0.0002964}, {3, 0.0127}, {2, -0.1396},
                       {1, -0.02132}, {0, 0.9917}});
    c.control = {poly_1d({{4, 1.837e-6}, {3, 3.752e-6}, {2, -0.002694},
                          {1, 0.01221}, {0, 1.888}})};
    c.beta = -0.0015;
    return c;
  }
  if (name == "v_bar_2") {
    c.v_bar = poly_1d({{4, -1.691e-5}, {3, 0.003356}, {2, -0.1835},
                       {1, -0.05924}, {0, 0.9851}});
    c.control = {poly_1d({{4, 6.812e-8}, {3, -8.57e-6}, {2, 0.0007303},
                          {1, -0.0308}, {0, 1.517}})};
    c.beta = -0.0015;
    return c;
  }
  if (name == "v_bar_4d") {
    c.v_bar = quartic_poly(kVbar4);
    c.control = {quartic_poly(kControl4)};
    c.beta = -0.0004;
    return c;
  }
  throw std::invalid_argument("unknown certificate fixture: " + std::string(name));
}

AmbiguitySet builtin_certificate_ambiguity(std::string_view name) {
  double sd = 0.0, lo = 0.0, hi = 0.0, theta = 0.0;
  if (name == "v_bar_1") {
    sd = 2.0, lo = -4.0, hi = 1.0, theta = 0.1;
  } else if (name == "v_bar_2") {
    sd = 2.0, lo = -4.0, hi = 1.0, theta = 0.01;
  } else if (name == "v_bar_4d") {
    sd = 0.8, lo = -0.8, hi = 0.8, theta = 0.1;
  } else {
    throw std::invalid_argument("unknown certificate fixture: " + std::string(name));
  }
  AmbiguitySet amb;
  for (std::uint64_t i = 0; i < 5; ++i) {
    SplitRng r = SplitRng::child(0, i);
    amb.nominal.atoms.push_back({r.truncated_normal(0.0, sd, lo, hi)});
  }
  amb.nominal.probs.assign(5, 0.2);
  amb.theta = theta;
  amb.p = 2.0;
  amb.validate();
  return amb;
}

Box builtin_certificate_verify_box(std::string_view name) {
  if (name == "v_bar_1" || name == "v_bar_2") {
    // covers X0 = [-0.5, 0] plus T-step growth under bounded inputs and
    // disturbances; the safe set itself is unbounded above
    return Box{{-2.0}, {4.0}};
  }
  if (name == "v_bar_4d") {
    return Box{{-1.0, -1.0, -1.0, -1.0}, {1.0, 1.0, 1.0, 1.0}};
  }
  throw std::invalid_argument("unknown certificate fixture: " + std::string(name));
}

void write_report_csv(std::ostream& os, const VerificationReport& rep) {
  os << "# certificate-report-csv v1\n";
  os << "condition,pass,worst_margin,worst_point\n";
  os << std::setprecision(17);
  for (const auto& c : rep.conditions) {
    os << c.id << "," << (c.pass ? 1 : 0) << "," << c.worst_margin << ",\"";
    for (std::size_t k = 0; k < c.worst_point.size(); ++k)
      os << (k ? ";" : "") << c.worst_point[k];
    os << "\"\n";
  }
  os << "overall," << (rep.overall ? 1 : 0) << ",,\n";
}

std::string format_report(const VerificationReport& rep) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "certificate check (" << (rep.overall ? "PASS" : "FAIL") << ")\n";
  os << "  grid: " << (rep.state_density.empty() ? 0 : rep.state_density[0])
     << " per state dim, " << rep.disturbance_density
     << " per disturbance dim over [";
  for (int k = 0; k < rep.verify_box.dim(); ++k)
    os << (k ? "; " : "") << rep.verify_box.lo[k] << ", " << rep.verify_box.hi[k];
  os << "]; margin tolerance " << rep.margin_tolerance
     << "; multiplier bound " << rep.lambda_max << "\n";
  for (const auto& c : rep.conditions) {
    os << "  " << (c.pass ? "pass" : "FAIL") << "  " << c.id << "  worst margin ";
    if (c.worst_point.empty()) {
      os << "n/a (no applicable probe)\n";
      continue;
    }
    os << c.worst_margin << " at (";
    for (std::size_t k = 0; k < c.worst_point.size(); ++k)
      os << (k ? ", " : "") << c.worst_point[k];
    os << ")\n";
  }
  os << "  note: grid evaluation with recorded worst margins, not a proof;"
        " densify to tighten\n";
  return os.str();
}

}  // namespace drc
