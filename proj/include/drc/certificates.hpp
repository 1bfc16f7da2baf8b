#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "drc/distribution.hpp"
#include "drc/poly.hpp"
#include "drc/region.hpp"
#include "drc/system.hpp"

namespace drc {

/// Barrier certificate candidate: a state polynomial v_bar with an associated
/// polynomial control law, the decay pair (eta, beta), and the initial-set
/// level delta used by the safety lower bound.
struct CertificateCandidate {
  std::string name;
  Polynomial v_bar;
  std::vector<Polynomial> control;  // m polynomials over x
  double eta = 1.0;
  double beta = 0.0;   // <= 0
  double delta = 0.0;

  std::vector<double> control_at(std::span<const double> x) const;
};

struct ConditionRecord {
  std::string id;
  bool pass = false;
  /// Worst (smallest) margin seen over the probe grid; +inf when no probe
  /// was applicable (vacuous condition, counts as pass).
  double worst_margin = 0.0;
  std::vector<double> worst_point;
};

struct VerificationReport {
  std::vector<ConditionRecord> conditions;
  bool overall = false;
  std::vector<int> state_density;
  int disturbance_density = 0;
  double margin_tolerance = 1e-4;
  /// Multiplier interval bound used by the inner robust evaluation
  /// (range of v_bar over the probed reachable set divided by theta^p).
  double lambda_max = 0.0;
  Box verify_box;

  const ConditionRecord* find(std::string_view id) const;
};

struct CheckOptions {
  Box verify_box;
  /// Probe points per state dimension; 0 picks 401 for 1-D models and 17
  /// per dimension otherwise.
  int state_density = 0;
  /// Disturbance grid points per dimension; 0 picks 101 for scalar
  /// disturbances of 1-D models and 17 otherwise.
  int disturbance_density = 0;
  /// Margins below -margin_tolerance fail; verification is grid-based, not
  /// a proof, so borderline certificates should be re-run denser.
  double margin_tolerance = 1e-4;
  double lambda_tolerance = 1e-9;
  int workers = 1;
};

/// Grid verification of the barrier conditions:
///   outside_safe_level: v_bar(x) <= 0 at probes outside the safe set,
///   inside_safe_level:  v_bar(x) <= 1 at probes inside the safe set,
///   robust_step: robust inner value of v_bar after one step under the
///     candidate's own control law >= v_bar(x)/eta + beta at probes in S,
///   control_membership: u(x) inside the input set at every probe,
///   initial_level: v_bar(x) >= delta at probes inside the initial set.
/// The robust inner value is the exact dual over the disturbance probe grid
/// (atoms appended), with the multiplier interval from a range pre-pass.
/// Throws if verify_box does not contain the initial set.
VerificationReport check_drcbc(const CertificateCandidate& cand,
                               const SystemModel& model, const AmbiguitySet& amb,
                               const CheckOptions& opt);

/// eta^{-T} * v0 + beta * sum_{i=0}^{T-1} eta^{-i} (closed form; T when
/// eta == 1). Monotone in v0 and beta.
double safety_lower_bound(const CertificateCandidate& cand, int T, double v0);

/// Auxiliary polynomials of a full certificate-program solution: the
/// multiplier lambda(x) and one inner lower bound l_i(x) per nominal atom.
struct SosBundle {
  Polynomial lambda_poly;
  std::vector<Polynomial> l_polys;
};

/// Grid check of the pointwise implications a full program solution must
/// satisfy: the three level conditions of check_drcbc, the decomposed
/// inner-value inequalities
///   dual_feasibility: sum_i p_i l_i(x) - theta^p lambda(x) - v_bar(x)/eta
///     - beta >= 0 on S,
///   inner_bound: l_i(x) <= v_bar(f(x,u(x),w)) + lambda(x) d^p(w, atom_i)
///     on S x W probes, every atom,
///   multiplier_sign: lambda(x) >= 0 on S,
/// and input feasibility of u(x) over the whole box.
VerificationReport check_sos_conditions(const CertificateCandidate& cand,
                                        const SosBundle& bundle,
                                        const SystemModel& model,
                                        const AmbiguitySet& amb,
                                        const CheckOptions& opt);

/// Bundled fixture candidates: "v_bar_1" and "v_bar_2" (scalar system, with
/// controls), "v_bar_4d". Coefficients are kept exactly as printed by the
/// originating synthesis run (4 significant digits; near-zero terms
/// retained verbatim).
CertificateCandidate builtin_certificate(std::string_view name);

/// Companion ambiguity sets for the fixtures: 5-sample empirical nominals
/// drawn from the corresponding truncated-Gaussian disturbance model with a
/// fixed master seed, theta = 0.1 / 0.01 / 0.1, p = 2.
AmbiguitySet builtin_certificate_ambiguity(std::string_view name);

/// Default verification box per fixture ([-2,4] for the scalar pair, the
/// unit cube bound for the 4-D candidate).
Box builtin_certificate_verify_box(std::string_view name);

void write_report_csv(std::ostream& os, const VerificationReport& report);
std::string format_report(const VerificationReport& report);

}  // namespace drc
