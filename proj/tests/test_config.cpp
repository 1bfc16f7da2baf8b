#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "doctest.h"
#include "drc/config.hpp"

using namespace drc;

namespace {

const char* kRoom = R"(
# synthesis setup
[model]
builtin = room_temperature
spec = reach_avoid

[ambiguity]
theta = 0.05
p = 1
atoms = -0.06:0.25, 0.0:0.5, 0.06:0.25

[grid]
resolution = 0.02

[solver]
workers = 2
disturbance_grid_initial = 33

[simulation]
trials = 1234
distribution = uniform
init = fixed
x0 = 23.7
)";

}  // namespace

TEST_CASE("parsing: sections, comments, case folding, errors") {
  ConfigFile cfg = ConfigFile::parse(
      "[Alpha]\nKey = Value x  # trailing comment\n\n[beta]\nn = 3\nf=2.5\n"
      "flag = true\nlist = 1, 2.5 , -3\n");
  CHECK(cfg.get("alpha", "key") == std::string("Value x"));
  CHECK(cfg.get("ALPHA", "KEY") == std::string("Value x"));  // names fold, values kept
  CHECK_FALSE(cfg.has("alpha", "missing"));
  CHECK(cfg.get_or("alpha", "missing", "dflt") == "dflt");
  CHECK(cfg.get_int("beta", "n", 0) == 3);
  CHECK(cfg.get_double("beta", "f", 0.0) == 2.5);
  CHECK(cfg.get_bool("beta", "flag", false));
  CHECK(cfg.get_doubles("beta", "list") == std::vector<double>{1.0, 2.5, -3.0});

  CHECK_THROWS_AS(ConfigFile::parse("[open\n"), std::invalid_argument);
  CHECK_THROWS_AS(ConfigFile::parse("[s]\nno equals here\n"), std::invalid_argument);
  CHECK_THROWS_AS(ConfigFile::parse("[s]\n= v\n"), std::invalid_argument);

  ConfigFile bad = ConfigFile::parse("[s]\nx = not_a_number\nb = maybe\n");
  CHECK_THROWS_AS(bad.get_double("s", "x", 0.0), std::invalid_argument);
  CHECK_THROWS_AS(bad.get_int("s", "x", 0), std::invalid_argument);
  CHECK_THROWS_AS(bad.get_bool("s", "b", false), std::invalid_argument);
}

TEST_CASE("hash: stable under reordering, sensitive to values, filterable") {
  ConfigFile a = ConfigFile::parse("[m]\nx = 1\ny = 2\n[g]\nr = 0.5\n");
  ConfigFile b = ConfigFile::parse("[g]\nr = 0.5\n[m]\ny = 2\nx = 1\n");
  CHECK(a.hash({}) == b.hash({}));

  ConfigFile c = ConfigFile::parse("[m]\nx = 1\ny = 3\n[g]\nr = 0.5\n");
  CHECK(a.hash({}) != c.hash({}));

  // filtering to [m] ignores differences elsewhere
  ConfigFile d = ConfigFile::parse("[m]\nx = 1\ny = 2\n[g]\nr = 0.9\n");
  CHECK(a.hash({"m"}) == d.hash({"m"}));
  CHECK(a.hash({}) != d.hash({}));

  // set() feeds back into the hash
  ConfigFile e = a;
  e.set("m", "x", "7");
  CHECK(a.hash({"m"}) != e.hash({"m"}));
}

TEST_CASE("file round-trip") {
  auto path =
      (std::filesystem::temp_directory_path() / "drc_config_roundtrip.ini").string();
  write_text_file(path, "[s]\nkey = 12\n");
  CHECK(read_text_file(path) == "[s]\nkey = 12\n");
  ConfigFile cfg = ConfigFile::load_file(path);
  CHECK(cfg.get_int("s", "key", 0) == 12);
  std::remove(path.c_str());
  CHECK_THROWS_AS(ConfigFile::load_file(path), std::runtime_error);
  CHECK_FALSE(library_version().empty());
}

TEST_CASE("model, grid and solver loaders") {
  ConfigFile cfg = ConfigFile::parse(kRoom);
  SystemModel m = model_from_config(cfg);
  CHECK(m.name == "room_temperature");
  CHECK(kind_from_config(cfg, m) == SpecKind::reach_avoid);

  StateGrid g = grid_from_config(cfg, m);
  CHECK(g.dim() == 1);
  CHECK(g.step(0) <= 0.02 + 1e-12);
  // default working box is the safe bounding box [23, 26]
  CHECK(g.box.lo[0] == doctest::Approx(23.0));
  CHECK(g.box.hi[0] == doctest::Approx(26.0));

  SolverConfig s = solver_from_config(cfg);
  CHECK(s.workers == 2);
  CHECK(s.disturbance_grid_initial == 33);
  CHECK(s.refinement_rounds == 3);  // untouched default

  ConfigFile horizon = ConfigFile::parse("[model]\nbuiltin = safety_1d\nhorizon = 7\n");
  CHECK(model_from_config(horizon).horizon == 7);
  CHECK(kind_from_config(horizon, model_from_config(horizon)) == SpecKind::safety);

  CHECK_THROWS_AS(model_from_config(ConfigFile::parse("[model]\nbuiltin = nope\n")),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      model_from_config(ConfigFile::parse("[model]\nbuiltin = safety_1d\nhorizon = 0\n")),
      std::invalid_argument);
  // grid for an unbounded safe set needs an explicit box
  CHECK_THROWS_AS(
      grid_from_config(ConfigFile::parse("[model]\nbuiltin = safety_1d\n"),
                       builtin_system("safety_1d")),
      std::invalid_argument);
}

TEST_CASE("ambiguity loader: explicit atoms and sampled nominals") {
  ConfigFile cfg = ConfigFile::parse(kRoom);
  SystemModel m = model_from_config(cfg);

  AmbiguityLoad amb = ambiguity_from_config(cfg, m, 0);
  CHECK(amb.amb.theta == 0.05);
  CHECK(amb.amb.p == 1.0);
  REQUIRE(amb.amb.nominal.count() == 3);
  CHECK(amb.amb.nominal.probs[1] == 0.5);
  CHECK(amb.amb.nominal.atoms[0][0] == -0.06);
  CHECK(amb.drawn_samples.empty());  // nothing was sampled

  ConfigFile scfg = ConfigFile::parse(
      "[model]\nbuiltin = room_temperature\n[ambiguity]\ntheta = 0.1\nsamples = 5\n");
  SystemModel sm = model_from_config(scfg);
  AmbiguityLoad s1 = ambiguity_from_config(scfg, sm, 42);
  CHECK(s1.drawn_samples.size() == 5);
  CHECK_NOTHROW(s1.amb.nominal.validate(&sm.disturbance_box));
  // same seed reproduces, different seed varies
  AmbiguityLoad s2 = ambiguity_from_config(scfg, sm, 42);
  CHECK(s1.drawn_samples == s2.drawn_samples);
  AmbiguityLoad s3 = ambiguity_from_config(scfg, sm, 43);
  CHECK(s1.drawn_samples != s3.drawn_samples);
  // an explicit seed key beats the default seed
  ConfigFile pinned = ConfigFile::parse(
      "[model]\nbuiltin = room_temperature\n[ambiguity]\ntheta = 0.1\nsamples = 5\n"
      "seed = 42\n");
  AmbiguityLoad s4 = ambiguity_from_config(pinned, sm, 999);
  CHECK(s4.drawn_samples == s1.drawn_samples);

  CHECK_THROWS_AS(
      ambiguity_from_config(
          ConfigFile::parse("[model]\nbuiltin = room_temperature\n[ambiguity]\ntheta = 0.1\n"),
          sm, 0),
      std::invalid_argument);
}

TEST_CASE("simulation and study loaders") {
  ConfigFile cfg = ConfigFile::parse(kRoom);
  SystemModel m = model_from_config(cfg);
  SimulationConfig sim = simulation_from_config(cfg, m, 77);
  CHECK(sim.trials == 1234);
  CHECK(sim.seed == 77);
  CHECK(sim.init_mode == InitMode::fixed);
  REQUIRE(sim.fixed_x0.size() == 1);
  CHECK(sim.fixed_x0[0] == 23.7);
  CHECK(sim.dist.kind == TrueDistribution::Kind::uniform_box);
  CHECK(sim.dist.box.lo[0] == m.disturbance_box.lo[0]);

  ConfigFile tg = ConfigFile::parse(
      "[model]\nbuiltin = safety_1d\n[simulation]\ndistribution = truncated_gaussian\n"
      "mean = 0\nstd = 2\n");
  SystemModel sm = model_from_config(tg);
  SimulationConfig tsim = simulation_from_config(tg, sm, 0);
  CHECK(tsim.dist.kind == TrueDistribution::Kind::truncated_gaussian);
  CHECK(tsim.dist.std[0] == 2.0);

  ConfigFile st = ConfigFile::parse(
      "[model]\nbuiltin = room_temperature\n[study]\ngroups = 5:0.05, 10:0.1\n"
      "repetitions = 3\nalpha = 0.9\ngrid_resolution = 0.05\n[solver]\nworkers = 1\n");
  StudyConfig sc = study_from_config(st, 5);
  REQUIRE(sc.groups.size() == 2);
  CHECK(sc.groups[0].samples == 5);
  CHECK(sc.groups[0].theta == 0.05);
  CHECK(sc.groups[1].samples == 10);
  CHECK(sc.repetitions == 3);
  CHECK(sc.seed == 5);
  CHECK(sc.model == "room_temperature");

  CHECK_THROWS_AS(study_from_config(
                      ConfigFile::parse("[study]\ngroups = 5-0.05\n"), 0),
                  std::invalid_argument);
}

TEST_CASE("atom list parsing") {
  NominalDistribution d = parse_atom_list("-0.5:0.25, 0.5:0.75", 1);
  REQUIRE(d.count() == 2);
  CHECK(d.probs[0] == 0.25);
  CHECK(d.probs[1] == 0.75);

  // equal weights when none are given
  NominalDistribution e = parse_atom_list("-1, 0, 1", 1);
  CHECK(e.probs == std::vector<double>(3, 1.0 / 3.0));

  // multi-dimensional coordinates are space separated
  NominalDistribution m2 = parse_atom_list("0 0:0.5, 1 -1:0.5", 2);
  CHECK(m2.atoms[1] == std::vector<double>{1.0, -1.0});

  CHECK_THROWS_AS(parse_atom_list("", 1), std::invalid_argument);
  CHECK_THROWS_AS(parse_atom_list("1 2, 3", 1), std::invalid_argument);
  CHECK_THROWS_AS(parse_atom_list("1:0.5, 2", 1), std::invalid_argument);
  CHECK_THROWS_AS(parse_atom_list("1:0.5:0.5", 1), std::invalid_argument);
}
