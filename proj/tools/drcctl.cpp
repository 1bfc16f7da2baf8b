// Command-line front end: synthesis, evaluation, simulation, certificate
// checking, the sampled-nominal study, and the self-check oracles. The CLI
// owns every file write; compute layers never touch the filesystem. Outputs
// carry no timestamps, so identical (config, seed) runs produce identical
// bytes for any worker count.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "drc/certificates.hpp"
#include "drc/config.hpp"
#include "drc/distribution.hpp"
#include "drc/grid.hpp"
#include "drc/oracle_suite.hpp"
#include "drc/simulate.hpp"
#include "drc/study.hpp"
#include "drc/synthesis.hpp"
#include "drc/system.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace drc;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::uint64_t seed = 0;
  int workers = 0;  // 0 keeps the config/default value
  std::string out_dir = ".";
  bool verbose = false;
  bool full_scale = false;
};

// the cache key covers exactly the sections that determine synthesis output
const std::vector<std::string> kSynthSections = {"ambiguity", "grid", "model",
                                                 "solver"};

ConfigFile require_config(const GlobalOpts& g) {
  if (g.config_path.empty())
    throw std::invalid_argument("this subcommand needs --config");
  return ConfigFile::load_file(g.config_path);
}

/// Sampled nominals depend on the effective sampling seed, so fold it into
/// the hashed view when the config does not pin one itself.
std::uint64_t synth_hash(ConfigFile cfg, std::uint64_t seed) {
  if (cfg.has("ambiguity", "samples") && !cfg.has("ambiguity", "seed"))
    cfg.set("ambiguity", "seed", std::to_string(seed));
  return cfg.hash(kSynthSections);
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

fs::path out_file(const GlobalOpts& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  return fs::path(g.out_dir) / name;
}

void write_manifest(const GlobalOpts& g, const std::string& name, json j) {
  j["tool"] = "drcctl";
  j["version"] = library_version();
  j["seed"] = g.seed;
  write_text_file(out_file(g, name).string(), j.dump(2) + "\n");
}

std::vector<std::string> split_on(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

/// Polynomial from a single config value: terms separated by ',', each term
/// "e1 .. en coeff" (the multi-line format with commas for line breaks).
Polynomial poly_from_value(std::string text, int arity) {
  for (char& c : text)
    if (c == ',') c = '\n';
  return parse_polynomial(text, arity);
}

CertificateCandidate certificate_from_config(const ConfigFile& cfg,
                                             const SystemModel& model) {
  auto vb = cfg.get("certificate", "v_bar");
  if (!vb) throw std::invalid_argument("config: [certificate] v_bar is required");
  auto ctrl = cfg.get("certificate", "control");
  if (!ctrl) throw std::invalid_argument("config: [certificate] control is required");
  CertificateCandidate c;
  c.name = cfg.get_or("certificate", "name", "custom");
  c.v_bar = poly_from_value(*vb, model.n);
  for (const std::string& part : split_on(*ctrl, '|'))
    c.control.push_back(poly_from_value(part, model.n));
  c.eta = cfg.get_double("certificate", "eta", 1.0);
  c.beta = cfg.get_double("certificate", "beta", 0.0);
  c.delta = cfg.get_double("certificate", "delta", 0.0);
  return c;
}

Box verify_box_from_config(const ConfigFile& cfg, const SystemModel& model) {
  std::vector<double> lo = cfg.get_doubles("certificate", "box_lo");
  std::vector<double> hi = cfg.get_doubles("certificate", "box_hi");
  if (!lo.empty() || !hi.empty()) {
    if (lo.size() != hi.size() || static_cast<int>(lo.size()) != model.n)
      throw std::invalid_argument("config: certificate box dimension mismatch");
    return Box{lo, hi};
  }
  auto bb = model.safe.bounding_box();
  if (!bb)
    throw std::invalid_argument(
        "config: the safe set is unbounded; give [certificate] box_lo/box_hi");
  return *bb;
}

std::string spec_name(SpecKind k) {
  return k == SpecKind::reach_avoid ? "reach_avoid" : "safety";
}

CacheBlob load_cache_or_throw(const std::string& path, std::uint64_t expected) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open cache file: " + path);
  auto blob = read_cache(is, expected);
  if (!blob)
    throw std::runtime_error(
        "cache rejected (config hash mismatch or corrupt file); re-run synth "
        "with this config");
  return std::move(*blob);
}

json point_json(const std::vector<double>& x) {
  json a = json::array();
  for (double v : x) a.push_back(v);
  return a;
}

// --- subcommands -------------------------------------------------------------

int run_synth(const GlobalOpts& g) {
  ConfigFile cfg = require_config(g);
  SystemModel model = model_from_config(cfg);
  SpecKind kind = kind_from_config(cfg, model);
  StateGrid grid = grid_from_config(cfg, model);
  SolverConfig solver = solver_from_config(cfg);
  if (g.workers > 0) solver.workers = g.workers;
  InterpMode interp = interp_from_config(cfg);
  AmbiguityLoad amb = ambiguity_from_config(cfg, model, g.seed);
  std::uint64_t hash = synth_hash(cfg, g.seed);

  SynthesisResult res =
      value_iteration(model, amb.amb, grid, solver, kind, false, interp);

  {
    std::ofstream os(out_file(g, "value_grid.csv"));
    write_value_grid_csv(os, res.values);
  }
  {
    std::ofstream os(out_file(g, "policy.csv"));
    write_policy_csv(os, res.policy);
  }
  {
    std::ofstream os(out_file(g, "synth.cache"), std::ios::binary);
    write_cache(os, res.values, res.policy, hash);
  }
  std::vector<std::string> outputs = {"value_grid.csv", "policy.csv", "synth.cache"};
  if (!amb.drawn_samples.empty()) {
    std::ofstream os(out_file(g, "ambiguity_samples.csv"));
    os << "# ambiguity-samples-csv v1\n" << std::setprecision(17);
    for (const auto& s : amb.drawn_samples) {
      for (std::size_t k = 0; k < s.size(); ++k) os << (k ? "," : "") << s[k];
      os << "\n";
    }
    outputs.push_back("ambiguity_samples.csv");
  }

  auto [min_v, min_x] = min_over_initial(
      res.values, model, cfg.get_double("simulation", "eval_resolution", 0.01));
  std::printf("synthesized %s policy for %s (theta=%g, p=%g, %d atoms)\n",
              spec_name(kind).c_str(), model.name.c_str(), amb.amb.theta, amb.amb.p,
              amb.amb.nominal.count());
  std::printf("min over initial set: %.6f at (", min_v);
  for (std::size_t k = 0; k < min_x.size(); ++k)
    std::printf("%s%g", k ? ", " : "", min_x[k]);
  std::printf(")\n");
  if (g.verbose)
    std::printf("grid nodes: %zu, stages: %d, off-box clamped queries: %llu\n",
                grid.total(), model.horizon,
                static_cast<unsigned long long>(res.values.clamp_count.load()));

  json j;
  j["command"] = "synth";
  j["config"] = g.config_path;
  j["config_hash"] = hex64(hash);
  j["model"] = model.name;
  j["spec"] = spec_name(kind);
  j["theta"] = amb.amb.theta;
  j["p"] = amb.amb.p;
  j["atoms"] = amb.amb.nominal.count();
  j["min_over_initial"] = min_v;
  j["min_over_initial_at"] = point_json(min_x);
  j["outputs"] = outputs;
  write_manifest(g, "synth.manifest.json", j);
  return 0;
}

int run_eval(const GlobalOpts& g, const std::string& cache_path, double alpha,
             bool has_alpha) {
  ConfigFile cfg = require_config(g);
  SystemModel model = model_from_config(cfg);
  CacheBlob blob = load_cache_or_throw(cache_path, synth_hash(cfg, g.seed));
  PolicyTable policy = policy_from_blob(blob);

  TrueDistribution truth = true_dist_from_config(cfg, model, "simulation");
  NominalDistribution dist;
  switch (truth.kind) {
    case TrueDistribution::Kind::finite_support:
      dist = truth.finite;
      break;
    case TrueDistribution::Kind::uniform_box: {
      if (model.l != 1)
        throw std::invalid_argument(
            "eval: built-in uniform discretization is 1-D only; give explicit "
            "atoms");
      int atoms = cfg.get_int("simulation", "eval_atoms", 201);
      dist = discretize_uniform_1d(truth.box, atoms);
      break;
    }
    case TrueDistribution::Kind::truncated_gaussian:
      throw std::invalid_argument(
          "eval: exact evaluation needs a finite-support distribution "
          "(distribution = uniform or atoms)");
  }

  ValueGrid ev = evaluate_fixed_distribution(model, policy, dist, blob.grid,
                                             blob.kind, blob.interp);
  auto [min_v, min_x] = min_over_initial(
      ev, model, cfg.get_double("simulation", "eval_resolution", 0.01));
  {
    std::ofstream os(out_file(g, "eval_value_grid.csv"));
    write_value_grid_csv(os, ev);
  }
  std::printf("evaluated %s policy under %d fixed atoms\n",
              spec_name(blob.kind).c_str(), dist.count());
  std::printf("min over initial set: %.6f at (", min_v);
  for (std::size_t k = 0; k < min_x.size(); ++k)
    std::printf("%s%g", k ? ", " : "", min_x[k]);
  std::printf(")\n");

  json j;
  j["command"] = "eval";
  j["config"] = g.config_path;
  j["cache"] = cache_path;
  j["model"] = model.name;
  j["spec"] = spec_name(blob.kind);
  j["eval_atoms"] = dist.count();
  j["min_over_initial"] = min_v;
  j["min_over_initial_at"] = point_json(min_x);
  j["outputs"] = json::array({"eval_value_grid.csv"});

  int rc = 0;
  if (has_alpha) {
    bool ok = min_v >= alpha;
    std::printf("threshold alpha=%.6f: %s\n", alpha, ok ? "PASS" : "FAIL");
    j["alpha"] = alpha;
    j["alpha_pass"] = ok;
    rc = ok ? 0 : 1;
  }
  write_manifest(g, "eval.manifest.json", j);
  return rc;
}

int run_simulate(const GlobalOpts& g, const std::string& cache_path,
                 const std::string& fixture) {
  if (cache_path.empty() == fixture.empty())
    throw std::invalid_argument("simulate needs exactly one of --cache or --fixture");

  SystemModel model;
  CertificateCandidate cert;
  PolicyTable policy;
  PolicySource source = static_cast<const PolicyTable*>(nullptr);
  SimulationConfig sim;
  json j;
  j["command"] = "simulate";

  bool have_cfg = !g.config_path.empty();
  ConfigFile cfg;
  if (have_cfg) cfg = ConfigFile::load_file(g.config_path);

  if (!fixture.empty()) {
    model = builtin_system(fixture == "v_bar_4d" ? "safety_4d" : "safety_1d");
    cert = builtin_certificate(fixture);
    if (have_cfg) {
      sim = simulation_from_config(cfg, model, g.seed);
    } else {
      // the fixture family's canonical true distribution
      double sd = fixture == "v_bar_4d" ? 0.8 : 2.0;
      sim.dist = TrueDistribution::truncated_gaussian(
          std::vector<double>(model.l, 0.0), std::vector<double>(model.l, sd),
          model.disturbance_box);
      sim.seed = g.seed;
    }
    sim.kind = SpecKind::safety;
    source = &cert;
    j["fixture"] = fixture;
  } else {
    if (!have_cfg)
      throw std::invalid_argument("simulate --cache needs --config for the model");
    model = model_from_config(cfg);
    CacheBlob blob = load_cache_or_throw(cache_path, synth_hash(cfg, g.seed));
    policy = policy_from_blob(blob);
    sim = simulation_from_config(cfg, model, g.seed);
    sim.kind = blob.kind;
    source = &policy;
    j["cache"] = cache_path;
  }
  if (g.full_scale) sim.trials = 10000;
  if (g.workers > 0) sim.workers = g.workers;

  SimulationReport rep = monte_carlo(model, source, sim);
  std::printf("%d/%d successes, rate %.4f, 95%% Wilson [%.4f, %.4f]\n",
              rep.successes, rep.trials, rep.rate, rep.wilson_lo, rep.wilson_hi);

  {
    std::ofstream os(out_file(g, "simulate.csv"));
    os << "# simulate-csv v1\n";
    os << "trials,successes,rate,wilson_lo,wilson_hi\n";
    os << std::setprecision(17) << rep.trials << "," << rep.successes << ","
       << rep.rate << "," << rep.wilson_lo << "," << rep.wilson_hi << "\n";
  }
  std::vector<std::string> outputs = {"simulate.csv"};
  if (sim.log_trajectories) {
    std::ofstream os(out_file(g, "trajectories.csv"));
    os << "# trajectories-csv v1\n";
    os << "trial,success,step";
    for (int k = 0; k < model.n; ++k) os << ",x" << k + 1;
    os << "\n" << std::setprecision(17);
    for (std::size_t i = 0; i < rep.logs.size(); ++i) {
      const TrialLog& log = rep.logs[i];
      for (std::size_t t = 0; t < log.states.size(); ++t) {
        os << i << "," << (log.success ? 1 : 0) << "," << t;
        for (double v : log.states[t]) os << "," << v;
        os << "\n";
      }
    }
    outputs.push_back("trajectories.csv");
  }

  if (have_cfg) j["config"] = g.config_path;
  j["model"] = model.name;
  j["spec"] = spec_name(sim.kind);
  j["trials"] = rep.trials;
  j["successes"] = rep.successes;
  j["rate"] = rep.rate;
  j["wilson"] = json::array({rep.wilson_lo, rep.wilson_hi});
  j["outputs"] = outputs;
  write_manifest(g, "simulate.manifest.json", j);
  return 0;
}

int run_check_cert(const GlobalOpts& g, const std::string& fixture,
                   int state_density, int dist_density, double margin_tol,
                   bool sos) {
  SystemModel model;
  CertificateCandidate cand;
  AmbiguitySet amb;
  CheckOptions opt;
  std::optional<SosBundle> bundle;

  if (!fixture.empty()) {
    model = builtin_system(fixture == "v_bar_4d" ? "safety_4d" : "safety_1d");
    cand = builtin_certificate(fixture);
    amb = builtin_certificate_ambiguity(fixture);
    opt.verify_box = builtin_certificate_verify_box(fixture);
    if (sos)
      throw std::invalid_argument(
          "--sos needs a config with [certificate] lambda and l polynomials");
  } else {
    ConfigFile cfg = require_config(g);
    model = model_from_config(cfg);
    cand = certificate_from_config(cfg, model);
    amb = ambiguity_from_config(cfg, model, g.seed).amb;
    opt.verify_box = verify_box_from_config(cfg, model);
    if (sos) {
      auto lam = cfg.get("certificate", "lambda");
      auto ls = cfg.get("certificate", "l");
      if (!lam || !ls)
        throw std::invalid_argument(
            "--sos needs [certificate] lambda and l (one polynomial per atom, "
            "separated by '|')");
      SosBundle b;
      b.lambda_poly = poly_from_value(*lam, model.n);
      for (const std::string& part : split_on(*ls, '|'))
        b.l_polys.push_back(poly_from_value(part, model.n));
      bundle = std::move(b);
    }
  }
  opt.state_density = state_density;
  opt.disturbance_density = dist_density;
  opt.margin_tolerance = margin_tol;
  if (g.workers > 0) opt.workers = g.workers;

  VerificationReport rep = check_drcbc(cand, model, amb, opt);
  std::fputs(format_report(rep).c_str(), stdout);
  double bound = safety_lower_bound(cand, model.horizon, cand.delta);
  std::printf("safety lower bound from delta=%.6g over T=%d: %.6f\n", cand.delta,
              model.horizon, bound);
  {
    std::ofstream os(out_file(g, "cert_report.csv"));
    write_report_csv(os, rep);
  }

  json j;
  j["command"] = "check-cert";
  if (!fixture.empty()) j["fixture"] = fixture;
  if (!g.config_path.empty()) j["config"] = g.config_path;
  j["candidate"] = cand.name;
  j["model"] = model.name;
  j["overall"] = rep.overall;
  j["safety_lower_bound"] = bound;
  json conds = json::array();
  for (const auto& c : rep.conditions)
    conds.push_back(
        {{"id", c.id}, {"pass", c.pass}, {"worst_margin", c.worst_margin}});
  j["conditions"] = conds;
  std::vector<std::string> outputs = {"cert_report.csv"};

  bool ok = rep.overall;
  if (bundle) {
    VerificationReport rep2 = check_sos_conditions(cand, *bundle, model, amb, opt);
    std::fputs(format_report(rep2).c_str(), stdout);
    std::ofstream os(out_file(g, "sos_report.csv"));
    write_report_csv(os, rep2);
    outputs.push_back("sos_report.csv");
    j["sos_overall"] = rep2.overall;
    ok = ok && rep2.overall;
  }
  j["outputs"] = outputs;
  write_manifest(g, "check_cert.manifest.json", j);
  return ok ? 0 : 1;
}

int run_study(const GlobalOpts& g) {
  ConfigFile cfg = require_config(g);
  StudyConfig st = study_from_config(cfg, g.seed);
  if (g.full_scale) st.repetitions = 100;
  if (g.workers > 0) st.solver.workers = g.workers;

  StudyResult res = run_group_study(st);
  {
    std::ofstream os(out_file(g, "study_rows.csv"));
    write_study_rows_csv(os, res);
  }
  {
    std::ofstream os(out_file(g, "study_groups.csv"));
    write_study_groups_csv(os, res);
  }
  for (const auto& row : res.groups) {
    std::printf(
        "group %d (N=%d, theta=%g): robust success %.0f%% avg %.4f (succ %.4f) | "
        "baseline success %.0f%% avg %.4f (succ %.4f)\n",
        row.group_index, row.samples, row.theta, 100.0 * row.dr_success_rate,
        row.dr_avg_all, row.dr_avg_succ, 100.0 * row.base_success_rate,
        row.base_avg_all, row.base_avg_succ);
  }
  int failed = 0;
  for (const auto& row : res.rows)
    if (!row.ok) {
      ++failed;
      std::fprintf(stderr, "repetition failed (group %d rep %d): %s\n",
                   row.group_index, row.rep, row.error.c_str());
    }

  json j;
  j["command"] = "study";
  j["config"] = g.config_path;
  j["config_hash"] = hex64(cfg.hash({"model", "solver", "study"}));
  j["model"] = st.model;
  j["repetitions"] = st.repetitions;
  j["alpha"] = st.alpha;
  j["failed_repetitions"] = failed;
  json groups = json::array();
  for (const auto& row : res.groups)
    groups.push_back({{"samples", row.samples},
                      {"theta", row.theta},
                      {"dr_success_rate", row.dr_success_rate},
                      {"base_success_rate", row.base_success_rate},
                      {"dr_avg_succ", row.dr_avg_succ},
                      {"base_avg_succ", row.base_avg_succ}});
  j["groups"] = groups;
  j["outputs"] = json::array({"study_rows.csv", "study_groups.csv"});
  write_manifest(g, "study.manifest.json", j);
  return 0;
}

int run_oracle(int count, double tol) {
  SuiteReport d = duality_suite(count, tol);
  std::printf("duality suite: %s (%d fixtures, worst gap %.3e, tol %.1e)\n",
              d.pass ? "PASS" : "FAIL", d.checked, d.worst, tol);
  if (!d.worst_detail.empty()) std::printf("  worst: %s\n", d.worst_detail.c_str());
  SuiteReport gm = game_suite(tol);
  std::printf("game suite: %s (%d comparisons, worst difference %.3e, tol %.1e)\n",
              gm.pass ? "PASS" : "FAIL", gm.checked, gm.worst, tol);
  if (!gm.worst_detail.empty())
    std::printf("  worst: %s\n", gm.worst_detail.c_str());
  return (d.pass && gm.pass) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributionally robust control synthesis and verification"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("-c,--config", g.config_path, "configuration file (INI sections)");
  app.add_option("--seed", g.seed, "master seed (default 0)");
  app.add_option("-j,--workers", g.workers, "worker threads (default: config)");
  app.add_option("-o,--out", g.out_dir, "output directory (default .)");
  app.add_flag("-v,--verbose", g.verbose, "extra diagnostics");
  app.add_flag("--full-scale", g.full_scale,
               "full-scale counts (study: 100 repetitions, simulate: 10000 trials)");

  app.add_subcommand("synth",
                     "synthesize a robust policy and write value/policy artifacts");

  std::string eval_cache = "synth.cache";
  double eval_alpha = 0.0;
  auto* eval_cmd =
      app.add_subcommand("eval", "exact policy evaluation under a fixed distribution");
  eval_cmd->add_option("--cache", eval_cache, "synthesis cache file");
  auto* alpha_opt =
      eval_cmd->add_option("--alpha", eval_alpha, "threshold; exit 1 when min < alpha");

  std::string sim_cache, sim_fixture;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo rollout estimate");
  sim_cmd->add_option("--cache", sim_cache, "synthesis cache file");
  sim_cmd->add_option("--fixture", sim_fixture,
                      "built-in certificate fixture (v_bar_1 | v_bar_2 | v_bar_4d)");

  std::string cert_fixture;
  int cert_sdensity = 0, cert_ddensity = 0;
  double cert_tol = 1e-4;
  bool cert_sos = false;
  auto* cert_cmd =
      app.add_subcommand("check-cert", "verify barrier-certificate conditions");
  cert_cmd->add_option("--fixture", cert_fixture,
                       "built-in fixture (v_bar_1 | v_bar_2 | v_bar_4d)");
  cert_cmd->add_option("--state-density", cert_sdensity,
                       "probe points per state dimension (0 = default)");
  cert_cmd->add_option("--disturbance-density", cert_ddensity,
                       "probe points per disturbance dimension (0 = default)");
  cert_cmd->add_option("--margin-tol", cert_tol, "margin tolerance (default 1e-4)");
  cert_cmd->add_flag("--sos", cert_sos,
                     "also check the decomposed program conditions (needs lambda/l)");

  app.add_subcommand("study", "sampled-nominal study over (N, theta) groups");

  int oracle_count = 100;
  double oracle_tol = 1e-6;
  auto* oracle_cmd =
      app.add_subcommand("oracle", "run the duality and game self-check suites");
  oracle_cmd->add_option("--count", oracle_count, "duality fixtures (default 100)");
  oracle_cmd->add_option("--tol", oracle_tol, "comparison tolerance (default 1e-6)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "synth") return run_synth(g);
    if (cmd == "eval")
      return run_eval(g, eval_cache, eval_alpha, alpha_opt->count() > 0);
    if (cmd == "simulate") return run_simulate(g, sim_cache, sim_fixture);
    if (cmd == "check-cert")
      return run_check_cert(g, cert_fixture, cert_sdensity, cert_ddensity, cert_tol,
                            cert_sos);
    if (cmd == "study") return run_study(g);
    if (cmd == "oracle") return run_oracle(oracle_count, oracle_tol);
    std::fprintf(stderr, "error: unknown subcommand '%s'\n", cmd.c_str());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
