#include "drc/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace drc {

std::string library_version() { return "0.1.0"; }

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
  if (!out) throw std::runtime_error("short write: " + path);
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string strip_comment(const std::string& line) {
  for (std::size_t i = 0; i < line.size(); ++i) {
    if ((line[i] == '#' || line[i] == ';') &&
        (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t'))
      return line.substr(0, i);
  }
  return line;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (trim(s.substr(used)).empty()) return v;
  } catch (...) {
  }
  throw std::invalid_argument("config: bad number for " + what + ": '" + s + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<double> parse_numbers(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::string norm = s;
  std::replace(norm.begin(), norm.end(), ',', ' ');
  std::istringstream is(norm);
  std::string tok;
  while (is >> tok) out.push_back(parse_double(tok, what));
  return out;
}

}  // namespace

ConfigFile ConfigFile::parse(const std::string& text) {
  ConfigFile cfg;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": unterminated section header");
      section = lower(trim(line.substr(1, line.size() - 2)));
      cfg.sections[section];  // record even if empty
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    std::string key = lower(trim(line.substr(0, eq)));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": empty key");
    cfg.sections[section][key] = value;
  }
  return cfg;
}

ConfigFile ConfigFile::load_file(const std::string& path) {
  return parse(read_text_file(path));
}

bool ConfigFile::has(const std::string& sec, const std::string& key) const {
  return get(sec, key).has_value();
}

std::optional<std::string> ConfigFile::get(const std::string& sec,
                                           const std::string& key) const {
  auto s = sections.find(lower(sec));
  if (s == sections.end()) return std::nullopt;
  auto k = s->second.find(lower(key));
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

std::string ConfigFile::get_or(const std::string& sec, const std::string& key,
                               const std::string& fallback) const {
  return get(sec, key).value_or(fallback);
}

double ConfigFile::get_double(const std::string& sec, const std::string& key,
                              double fallback) const {
  auto v = get(sec, key);
  return v ? parse_double(*v, sec + "." + key) : fallback;
}

int ConfigFile::get_int(const std::string& sec, const std::string& key,
                        int fallback) const {
  double v = get_double(sec, key, fallback);
  int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw std::invalid_argument("config: " + sec + "." + key + " must be an integer");
  return i;
}

std::uint64_t ConfigFile::get_u64(const std::string& sec, const std::string& key,
                                  std::uint64_t fallback) const {
  auto v = get(sec, key);
  if (!v) return fallback;
  try {
    return std::stoull(*v);
  } catch (...) {
    throw std::invalid_argument("config: bad unsigned for " + sec + "." + key);
  }
}

bool ConfigFile::get_bool(const std::string& sec, const std::string& key,
                          bool fallback) const {
  auto v = get(sec, key);
  if (!v) return fallback;
  std::string s = lower(trim(*v));
  if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
  if (s == "0" || s == "false" || s == "no" || s == "off") return false;
  throw std::invalid_argument("config: bad boolean for " + sec + "." + key);
}

std::vector<double> ConfigFile::get_doubles(const std::string& sec,
                                            const std::string& key) const {
  auto v = get(sec, key);
  if (!v) return {};
  return parse_numbers(*v, sec + "." + key);
}

void ConfigFile::set(const std::string& sec, const std::string& key,
                     const std::string& value) {
  sections[lower(sec)][lower(key)] = value;
}

std::uint64_t ConfigFile::hash(const std::vector<std::string>& only_sections) const {
  auto wanted = [&](const std::string& sec) {
    if (only_sections.empty()) return true;
    for (const auto& s : only_sections)
      if (lower(s) == sec) return true;
    return false;
  };
  std::uint64_t h = 14695981039346656037ull;
  auto feed = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  for (const auto& [sec, kv] : sections) {
    if (!wanted(sec)) continue;
    for (const auto& [k, v] : kv) {
      feed("[" + sec + "]" + k + "=" + v + "\n");
    }
  }
  return h;
}

// --- section loaders ---------------------------------------------------------

SystemModel model_from_config(const ConfigFile& cfg) {
  std::string name = cfg.get_or("model", "builtin", "room_temperature");
  SystemModel m = builtin_system(name);
  int T = cfg.get_int("model", "horizon", m.horizon);
  if (T < 1) throw std::invalid_argument("config: model.horizon must be >= 1");
  m.horizon = T;
  return m;
}

SpecKind kind_from_config(const ConfigFile& cfg, const SystemModel& model) {
  std::string def = model.target ? "reach_avoid" : "safety";
  std::string s = cfg.get_or("model", "spec", def);
  if (s == "reach_avoid") return SpecKind::reach_avoid;
  if (s == "safety") return SpecKind::safety;
  throw std::invalid_argument("config: model.spec must be reach_avoid or safety");
}

StateGrid grid_from_config(const ConfigFile& cfg, const SystemModel& model) {
  std::optional<Box> box;
  std::vector<double> lo = cfg.get_doubles("grid", "box_lo");
  std::vector<double> hi = cfg.get_doubles("grid", "box_hi");
  if (!lo.empty() || !hi.empty()) {
    if (static_cast<int>(lo.size()) != model.n ||
        static_cast<int>(hi.size()) != model.n)
      throw std::invalid_argument("config: grid.box_lo/box_hi dimension mismatch");
    box = Box{lo, hi};
  } else {
    box = model.safe.bounding_box();
    if (!box)
      throw std::invalid_argument(
          "config: grid.box_lo/box_hi required for an unbounded safe set");
  }
  std::vector<double> pts = cfg.get_doubles("grid", "points");
  if (!pts.empty()) {
    std::vector<int> npts;
    if (pts.size() == 1) pts.assign(model.n, pts[0]);
    for (double p : pts) npts.push_back(static_cast<int>(p));
    return StateGrid(*box, npts);
  }
  return StateGrid(*box, cfg.get_double("grid", "resolution", 0.01));
}

InterpMode interp_from_config(const ConfigFile& cfg) {
  std::string s = cfg.get_or("grid", "interp", "multilinear");
  if (s == "multilinear") return InterpMode::multilinear;
  if (s == "corner_min") return InterpMode::corner_min;
  throw std::invalid_argument("config: grid.interp must be multilinear or corner_min");
}

SolverConfig solver_from_config(const ConfigFile& cfg) {
  SolverConfig s;
  s.lambda_tolerance = cfg.get_double("solver", "lambda_tolerance", s.lambda_tolerance);
  s.disturbance_grid_initial =
      cfg.get_int("solver", "disturbance_grid_initial", s.disturbance_grid_initial);
  s.refinement_rounds = cfg.get_int("solver", "refinement_rounds", s.refinement_rounds);
  s.refinement_shrink =
      cfg.get_double("solver", "refinement_shrink", s.refinement_shrink);
  s.input_grid = cfg.get_int("solver", "input_grid", s.input_grid);
  s.workers = cfg.get_int("solver", "workers", s.workers);
  return s;
}

NominalDistribution parse_atom_list(const std::string& text, int dim) {
  NominalDistribution d;
  std::vector<double> weights;
  bool any_weight = false;
  for (const std::string& part : split(text, ',')) {
    if (trim(part).empty()) continue;
    std::vector<std::string> vw = split(part, ':');
    if (vw.size() > 2)
      throw std::invalid_argument("atom list: more than one ':' in an atom");
    std::vector<double> coords = parse_numbers(vw[0], "atom coordinates");
    if (static_cast<int>(coords.size()) != dim)
      throw std::invalid_argument("atom list: atom dimension mismatch");
    double w = -1.0;
    if (vw.size() == 2) {
      w = parse_double(trim(vw[1]), "atom weight");
      any_weight = true;
    }
    d.atoms.push_back(std::move(coords));
    weights.push_back(w);
  }
  if (d.atoms.empty()) throw std::invalid_argument("atom list: no atoms");
  if (any_weight) {
    for (double w : weights)
      if (w < 0.0)
        throw std::invalid_argument("atom list: weights must be given for all atoms");
    d.probs = weights;
  } else {
    d.probs.assign(d.atoms.size(), 1.0 / d.atoms.size());
  }
  return d;
}

TrueDistribution true_dist_from_config(const ConfigFile& cfg,
                                       const SystemModel& model,
                                       const std::string& section) {
  Box box = model.disturbance_box;
  std::vector<double> lo = cfg.get_doubles(section, "box_lo");
  std::vector<double> hi = cfg.get_doubles(section, "box_hi");
  if (!lo.empty() || !hi.empty()) {
    if (lo.size() != hi.size() || static_cast<int>(lo.size()) != model.l)
      throw std::invalid_argument("config: " + section + " box dimension mismatch");
    box = Box{lo, hi};
  }
  std::string kind = cfg.get_or(section, "distribution", "uniform");
  if (kind == "uniform") return TrueDistribution::uniform(box);
  if (kind == "truncated_gaussian") {
    std::vector<double> mean = cfg.get_doubles(section, "mean");
    std::vector<double> sd = cfg.get_doubles(section, "std");
    if (mean.empty()) mean.assign(model.l, 0.0);
    if (mean.size() == 1 && model.l > 1) mean.assign(model.l, mean[0]);
    if (sd.size() == 1 && model.l > 1) sd.assign(model.l, sd[0]);
    if (static_cast<int>(mean.size()) != model.l ||
        static_cast<int>(sd.size()) != model.l)
      throw std::invalid_argument("config: " + section + " mean/std dimensions");
    return TrueDistribution::truncated_gaussian(mean, sd, box);
  }
  if (kind == "atoms") {
    auto text = cfg.get(section, "atoms");
    if (!text)
      throw std::invalid_argument("config: " + section +
                                  ".atoms required for a finite distribution");
    return TrueDistribution::finite_support(parse_atom_list(*text, model.l));
  }
  throw std::invalid_argument("config: unknown distribution kind '" + kind + "'");
}

AmbiguityLoad ambiguity_from_config(const ConfigFile& cfg, const SystemModel& model,
                                    std::uint64_t default_seed) {
  AmbiguityLoad out;
  out.amb.theta = cfg.get_double("ambiguity", "theta", 0.0);
  out.amb.p = cfg.get_double("ambiguity", "p", 1.0);
  if (auto atoms = cfg.get("ambiguity", "atoms")) {
    out.amb.nominal = parse_atom_list(*atoms, model.l);
  } else {
    int n = cfg.get_int("ambiguity", "samples", 0);
    if (n < 1)
      throw std::invalid_argument(
          "config: [ambiguity] needs atoms = ... or samples = N");
    std::string dist_section =
        cfg.has("ambiguity", "distribution") ? "ambiguity" : "simulation";
    TrueDistribution truth = true_dist_from_config(cfg, model, dist_section);
    std::uint64_t seed = cfg.get_u64("ambiguity", "seed", default_seed);
    SplitRng rng = SplitRng::child(seed, 0);
    for (int i = 0; i < n; ++i) out.drawn_samples.push_back(truth.sample(rng));
    out.amb.nominal = empirical_nominal(out.drawn_samples, model.disturbance_box);
  }
  out.amb.validate();
  return out;
}

SimulationConfig simulation_from_config(const ConfigFile& cfg,
                                        const SystemModel& model,
                                        std::uint64_t default_seed) {
  SimulationConfig sim;
  sim.trials = cfg.get_int("simulation", "trials", sim.trials);
  sim.seed = cfg.get_u64("simulation", "seed", default_seed);
  sim.dist = true_dist_from_config(cfg, model, "simulation");
  sim.kind = kind_from_config(cfg, model);
  std::string init = cfg.get_or("simulation", "init", "uniform");
  if (init == "uniform") {
    sim.init_mode = InitMode::uniform;
  } else if (init == "fixed") {
    sim.init_mode = InitMode::fixed;
    sim.fixed_x0 = cfg.get_doubles("simulation", "x0");
    if (static_cast<int>(sim.fixed_x0.size()) != model.n)
      throw std::invalid_argument("config: simulation.x0 dimension mismatch");
  } else if (init == "grid") {
    sim.init_mode = InitMode::grid;
    sim.init_resolution =
        cfg.get_double("simulation", "init_resolution", sim.init_resolution);
  } else {
    throw std::invalid_argument("config: simulation.init must be uniform|fixed|grid");
  }
  sim.log_trajectories =
      cfg.get_bool("simulation", "log_trajectories", sim.log_trajectories);
  return sim;
}

StudyConfig study_from_config(const ConfigFile& cfg, std::uint64_t default_seed) {
  StudyConfig s;
  if (auto groups = cfg.get("study", "groups")) {
    for (const std::string& part : split(*groups, ',')) {
      if (trim(part).empty()) continue;
      std::vector<std::string> nt = split(part, ':');
      if (nt.size() != 2)
        throw std::invalid_argument("config: study.groups entries are N:theta");
      StudyGroup g;
      g.samples = static_cast<int>(parse_double(trim(nt[0]), "study group N"));
      g.theta = parse_double(trim(nt[1]), "study group theta");
      s.groups.push_back(g);
    }
  }
  s.repetitions = cfg.get_int("study", "repetitions", s.repetitions);
  s.alpha = cfg.get_double("study", "alpha", s.alpha);
  s.seed = cfg.get_u64("study", "seed", default_seed);
  s.grid_resolution = cfg.get_double("study", "grid_resolution", s.grid_resolution);
  s.eval_resolution = cfg.get_double("study", "eval_resolution", s.eval_resolution);
  s.eval_atoms = cfg.get_int("study", "eval_atoms", s.eval_atoms);
  s.p = cfg.get_double("study", "p", s.p);
  s.solver = solver_from_config(cfg);
  s.model = cfg.get_or("model", "builtin", s.model);
  return s;
}

}  // namespace drc
