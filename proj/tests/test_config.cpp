#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "hwdd/config.hpp"
#include "hwdd/output.hpp"

using namespace hwdd;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string parse_error(const std::string& text) {
  try {
    parse_config_text(text, "cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool mentions(const std::string& err, const std::string& frag) {
  return !err.empty() && err.find(frag) != std::string::npos;
}

// RAII guard: point HWDD_DATA at a path, restore the previous value on exit
struct DataEnvGuard {
  std::string saved;
  bool had = false;
  explicit DataEnvGuard(const std::string& path) {
    if (const char* old = std::getenv("HWDD_DATA")) {
      saved = old;
      had = true;
    }
    setenv("HWDD_DATA", path.c_str(), 1);
  }
  ~DataEnvGuard() {
    if (had)
      setenv("HWDD_DATA", saved.c_str(), 1);
    else
      unsetenv("HWDD_DATA");
  }
};

std::filesystem::path write_temp(const std::string& name, const std::string& body) {
  std::filesystem::path p = std::filesystem::temp_directory_path() / name;
  std::ofstream out(p);
  out << body;
  out.close();
  return p;
}

}  // namespace

TEST_CASE("full preserve config parses with defaults filled") {
  RunConfig rc = parse_config_text(R"({
    "version": 1,
    "experiment": "preserve",
    "d": 3,
    "sequences": [{"name": "none"}, {"name": "dxd", "reps": 2, "label": "pair"}],
    "noise": {"dephasing": [{"qudit": 0, "sigma": 0.35}]},
    "time_grid": {"start_us": 0.5, "stop_us": 2.0, "points": 4}
  })",
                                   "cfg");

  CHECK(rc.version == 1);
  CHECK(rc.experiment == "preserve");
  CHECK(rc.output_dir == "out");
  CHECK(rc.exp.register_dims == std::vector<int>{3});
  REQUIRE(rc.exp.sequences.size() == 2);
  CHECK(rc.exp.sequences[0].name == "none");
  CHECK(rc.exp.sequences[1].reps == 2);
  CHECK(rc.exp.sequences[1].label == "pair");
  REQUIRE(rc.exp.noise.dephasing.size() == 1);
  CHECK(rc.exp.noise.dephasing[0].sigma == 0.35);
  CHECK(rc.exp.noise.bath_dim == 1);
  REQUIRE(rc.exp.time_grid.size() == 4);
  CHECK(rc.exp.time_grid[0] == doctest::Approx(0.5));
  CHECK(rc.exp.time_grid[3] == doctest::Approx(2.0));
  CHECK(rc.exp.tau_mode == "scaled");
  CHECK(rc.exp.pulse_error == 0.0);
  CHECK(rc.exp.shots == 1000);
  CHECK(rc.exp.seed == 0);
  CHECK(rc.exp.threads == 1);
  CHECK(nlohmann::json::parse(rc.exp.config_json)["experiment"] == "preserve");
}

TEST_CASE("cross-Kerr config mixes inline tables and device keys") {
  RunConfig rc = parse_config_text(R"({
    "version": 1,
    "experiment": "crosskerr",
    "d": 3,
    "qudits": 3,
    "sequences": [{"name": "spectator"}],
    "noise": {"cross_kerr": [
      {"pair": [0, 1], "rates_mhz": [[0.1, 0.2], [0.3, 0.4]]},
      {"pair": [1, 2], "rates_key": "qutrit/Q2-Q3"}
    ]},
    "time_grid": [0.0, 1.0, 2.0],
    "shots": 3,
    "seed": 5,
    "threads": 2
  })",
                                   "cfg");

  CHECK(rc.exp.register_dims == std::vector<int>{3, 3, 3});
  REQUIRE(rc.exp.noise.couplings.size() == 2);
  CHECK(rc.exp.noise.couplings[0].a == 0);
  CHECK(rc.exp.noise.couplings[0].b == 1);
  CHECK(rc.exp.noise.couplings[0].rates.alpha(0, 0) == doctest::Approx(kTwoPi * 0.1));
  CHECK(rc.exp.noise.couplings[1].key == "qutrit/Q2-Q3");
  CHECK(rc.exp.noise.couplings[1].rates.alpha(1, 1) == doctest::Approx(kTwoPi * 0.615));
  CHECK(rc.exp.shots == 3);
  CHECK(rc.exp.threads == 2);
}

TEST_CASE("scaling config parses with defaults") {
  RunConfig rc = parse_config_text(
      R"({"version": 1, "experiment": "scaling", "scaling": {}})", "cfg");
  CHECK(rc.scaling.d == 3);
  CHECK(rc.scaling.sequence == "universal");
  CHECK(rc.scaling.hamiltonian == "random_hw");
  CHECK(rc.scaling.bath_dim == 1);
  CHECK(rc.scaling.scale == 1.0);
  CHECK(rc.scaling.bath_scale == 0.0);
  CHECK(rc.scaling.tau_min == 1e-4);
  CHECK(rc.scaling.tau_max == 1e-2);
  CHECK(rc.scaling.points == 16);
  CHECK(rc.scaling.seed == 42);

  RunConfig full = parse_config_text(R"({
    "version": 1, "experiment": "scaling",
    "scaling": {"d": 3, "sequence": "ckdd", "hamiltonian": "cross_kerr",
                "rates_key": "qutrit/Q1-Q2", "bath_dim": 2, "bath_scale": 0.4,
                "tau_min_us": 1e-3, "tau_max_us": 3.2e-2, "points": 12, "seed": 7}
  })",
                                     "cfg");
  CHECK(full.scaling.sequence == "ckdd");
  CHECK(full.scaling.rates_key == "qutrit/Q1-Q2");
  CHECK(full.scaling.bath_scale == 0.4);
  CHECK(full.scaling.points == 12);
}

TEST_CASE("config rejections name the offending key") {
  const std::vector<std::pair<std::string, std::string>> cases = {
      {R"({nope)", "not valid JSON"},
      {R"([1, 2])", "top level"},
      {R"({"experiment": "preserve"})", "version"},
      {R"({"version": 2, "experiment": "preserve"})", "version"},
      {R"({"version": 1, "experiment": "warp"})", "experiment"},
      {R"({"version": 1, "experiment": "preserve", "d": 3, "extra": 1,
           "sequences": [{"name": "none"}], "time_grid": [1.0]})",
       "extra"},
      {R"({"version": 1, "experiment": "preserve", "d": 1,
           "sequences": [{"name": "none"}], "time_grid": [1.0]})",
       "d: must be >= 2"},
      {R"({"version": 1, "experiment": "preserve", "d": 3, "qudits": 2,
           "sequences": [{"name": "none"}], "time_grid": [1.0]})",
       "qudits"},
      {R"({"version": 1, "experiment": "crosskerr", "d": 3, "qudits": 4,
           "sequences": [{"name": "none"}], "time_grid": [1.0]})",
       "qudits"},
      {R"({"version": 1, "experiment": "bell", "d": 4,
           "sequences": [{"name": "none"}], "time_grid": [1.0]})",
       "two qutrits"},
      {R"({"version": 1, "experiment": "preserve", "d": 3,
           "sequences": [], "time_grid": [1.0]})",
       "sequences"},
      {R"({"version": 1, "experiment": "preserve", "d": 3,
           "sequences": [{"name": "zigzag"}], "time_grid": [1.0]})",
       "unknown sequence name"},
      {R"({"version": 1, "experiment": "preserve", "d": 3,
           "sequences": [{"name": "universal", "reps": 2}], "time_grid": [1.0]})",
       "only the dxd sequence takes repetitions"},
      {R"({"version": 1, "experiment": "preserve", "d": 3,
           "sequences": [{"name": "dxd", "reps": 0}], "time_grid": [1.0]})",
       "reps"},
      {R"({"version": 1, "experiment": "preserve", "d": 3,
           "sequences": [{"name": "none", "speed": 9}], "time_grid": [1.0]})",
       "speed"},
      {R"({"version": 1, "experiment": "preserve", "d": 3,
           "sequences": [{"name": "none"}], "noise": {"wobble": 1}, "time_grid": [1.0]})",
       "wobble"},
      {R"({"version": 1, "experiment": "preserve", "d": 3,
           "sequences": [{"name": "none"}],
           "noise": {"dephasing": [{"qudit": 1, "sigma": 0.1}]}, "time_grid": [1.0]})",
       "qudit"},
      {R"({"version": 1, "experiment": "preserve", "d": 3,
           "sequences": [{"name": "none"}],
           "noise": {"dephasing": [{"sigma": -0.1}]}, "time_grid": [1.0]})",
       "sigma"},
      {R"({"version": 1, "experiment": "preserve", "d": 3,
           "sequences": [{"name": "none"}],
           "noise": {"dephasing": [{"sigma": 0.1, "sigma_nu": [0.1]}]}, "time_grid": [1.0]})",
       "sigma_nu"},
      {R"({"version": 1, "experiment": "crosskerr", "d": 3,
           "sequences": [{"name": "none"}],
           "noise": {"cross_kerr": [{"pair": [0, 1], "rates_key": "qutrit/Q1-Q2",
                                     "rates_mhz": [[1, 0], [0, 1]]}]},
           "time_grid": [1.0]})",
       "exactly one of"},
      {R"({"version": 1, "experiment": "crosskerr", "d": 3,
           "sequences": [{"name": "none"}],
           "noise": {"cross_kerr": [{"pair": [0, 1]}]}, "time_grid": [1.0]})",
       "exactly one of"},
      {R"({"version": 1, "experiment": "crosskerr", "d": 3,
           "sequences": [{"name": "none"}],
           "noise": {"cross_kerr": [{"pair": [1, 1], "rates_key": "qutrit/Q1-Q2"}]},
           "time_grid": [1.0]})",
       "pair"},
      {R"({"version": 1, "experiment": "crosskerr", "d": 3,
           "sequences": [{"name": "none"}],
           "noise": {"cross_kerr": [{"pair": [0, 1], "rates_mhz": [[1.0]]}]},
           "time_grid": [1.0]})",
       "rates_mhz"},
      {R"({"version": 1, "experiment": "crosskerr", "d": 3,
           "sequences": [{"name": "none"}],
           "noise": {"cross_kerr": [{"pair": [0, 1], "rates_key": "ququart/Q1-Q2"}]},
           "time_grid": [1.0]})",
       "rates_key"},
      {R"({"version": 1, "experiment": "preserve", "d": 3,
           "sequences": [{"name": "none"}]})",
       "time_grid"},
      {R"({"version": 1, "experiment": "preserve", "d": 3,
           "sequences": [{"name": "none"}], "time_grid": [2.0, 1.0]})",
       "strictly increasing"},
      {R"({"version": 1, "experiment": "preserve", "d": 3,
           "sequences": [{"name": "none"}], "time_grid": [-1.0, 1.0]})",
       ">= 0"},
      {R"({"version": 1, "experiment": "preserve", "d": 3,
           "sequences": [{"name": "none"}],
           "time_grid": {"start_us": 0, "stop_us": 1, "points": 1}})",
       "points"},
      {R"({"version": 1, "experiment": "preserve", "d": 3,
           "sequences": [{"name": "none"}], "time_grid": [1.0], "tau_mode": "loose"})",
       "tau_mode"},
      {R"({"version": 1, "experiment": "preserve", "d": 3,
           "sequences": [{"name": "none"}], "time_grid": [1.0], "tau_mode": "fixed"})",
       "tau_us"},
      {R"({"version": 1, "experiment": "preserve", "d": 3,
           "sequences": [{"name": "none"}], "time_grid": [1.0], "pulse_error": 0.25})",
       "pulse_error"},
      {R"({"version": 1, "experiment": "preserve", "d": 3,
           "sequences": [{"name": "none"}], "time_grid": [1.0], "shots": 0})",
       "shots"},
      {R"({"version": 1, "experiment": "preserve", "d": 3,
           "sequences": [{"name": "none"}], "time_grid": [1.0], "threads": 0})",
       "threads"},
      {R"({"version": 1, "experiment": "scaling"})", "scaling"},
      {R"({"version": 1, "experiment": "scaling", "scaling": {"warp": 1}})", "warp"},
      {R"({"version": 1, "experiment": "scaling", "d": 3, "scaling": {}})",
       "top level: unknown key 'd'"},
      {R"({"version": 1, "experiment": "scaling",
           "scaling": {"sequence": "ckdd"}})",
       "cross_kerr"},
      {R"({"version": 1, "experiment": "scaling",
           "scaling": {"hamiltonian": "cross_kerr", "rates_key": "qutrit/Q1-Q2"}})",
       "cross_kerr"},
      {R"({"version": 1, "experiment": "scaling",
           "scaling": {"hamiltonian": "cross_kerr"}})",
       "rates_key"},
      {R"({"version": 1, "experiment": "scaling", "scaling": {"points": 3}})", "points"},
      {R"({"version": 1, "experiment": "scaling",
           "scaling": {"tau_min_us": 0.01, "tau_max_us": 0.001}})",
       "tau_min_us"},
  };

  for (const auto& [text, frag] : cases) {
    CAPTURE(text);
    CAPTURE(frag);
    CHECK(mentions(parse_error(text), frag));
  }
}

TEST_CASE("config files load from disk with the path in error messages") {
  std::filesystem::path good = write_temp(
      "hwdd_cfg_ok.json",
      R"({"version": 1, "experiment": "preserve", "d": 2,
          "sequences": [{"name": "none"}], "time_grid": [1.0]})");
  RunConfig rc = load_config(good.string());
  CHECK(rc.exp.register_dims == std::vector<int>{2});

  CHECK_THROWS_WITH_AS(load_config("/nonexistent/hwdd.json"),
                       "/nonexistent/hwdd.json: cannot open config file", ConfigError);

  std::filesystem::path bad = write_temp("hwdd_cfg_bad.json", "{");
  try {
    load_config(bad.string());
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(mentions(e.what(), bad.string()));
  }
  std::filesystem::remove(good);
  std::filesystem::remove(bad);
}

TEST_CASE("bundled device rate tables resolve by family/pair key") {
  CrossKerrMatrix a = load_device_rates("qutrit/Q1-Q2");
  CHECK(a.d == 3);
  CHECK(a.alpha.rows() == 2);
  CHECK(a.alpha(0, 0) == doctest::Approx(kTwoPi * 0.112));
  CHECK(a.alpha(1, 0) == doctest::Approx(kTwoPi * -0.515));

  CrossKerrMatrix q = load_device_rates("ququart/Q1-Q2");
  CHECK(q.d == 4);
  CHECK(q.alpha(2, 2) == doctest::Approx(kTwoPi * 0.345));

  CHECK_THROWS_AS(load_device_rates("noslash"), ConfigError);
  CHECK_THROWS_AS(load_device_rates("/pair"), ConfigError);
  CHECK_THROWS_AS(load_device_rates("family/"), ConfigError);
  CHECK(mentions(parse_error(""), "not valid JSON"));  // keep helper exercised

  try {
    load_device_rates("imaginary/Q1-Q2");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(mentions(e.what(), "imaginary"));
  }
  try {
    load_device_rates("qutrit/Q9-Q9");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(mentions(e.what(), "Q9-Q9"));
  }
}

TEST_CASE("HWDD_DATA overrides the bundled rate tables") {
  std::filesystem::path p = write_temp("hwdd_rates_override.json", R"({
    "qutrit": {"d": 3, "units": "MHz",
               "pairs": {"Q1-Q2": {"11": 9.0, "12": 0.0, "21": 0.0, "22": 0.0}}}
  })");
  {
    DataEnvGuard guard(p.string());
    CHECK(device_rates_path() == p.string());
    CrossKerrMatrix m = load_device_rates("qutrit/Q1-Q2");
    CHECK(m.alpha(0, 0) == doctest::Approx(kTwoPi * 9.0));
    CHECK(m.alpha(1, 1) == 0.0);
  }
  // pointing at the containing directory finds device_rates.json inside it
  std::filesystem::path dir = std::filesystem::temp_directory_path() / "hwdd_rates_dir";
  std::filesystem::create_directories(dir);
  std::filesystem::copy_file(p, dir / "device_rates.json",
                             std::filesystem::copy_options::overwrite_existing);
  {
    DataEnvGuard guard(dir.string());
    CHECK(device_rates_path() == (dir / "device_rates.json").string());
    CHECK(load_device_rates("qutrit/Q1-Q2").alpha(0, 0) == doctest::Approx(kTwoPi * 9.0));
  }
  // back to the bundled table once the override is gone
  CHECK(load_device_rates("qutrit/Q1-Q2").alpha(0, 0) == doctest::Approx(kTwoPi * 0.112));

  std::filesystem::remove(p);
  std::filesystem::remove_all(dir);
}

TEST_CASE("malformed rate tables are rejected with precise messages") {
  const std::vector<std::pair<std::string, std::string>> cases = {
      {R"({"qutrit": {"d": 3, "units": "GHz",
                      "pairs": {"Q1-Q2": {"11": 1, "12": 0, "21": 0, "22": 0}}}})",
       "units"},
      {R"({"qutrit": {"d": 3, "units": "MHz",
                      "pairs": {"Q1-Q2": {"11": 1, "12": 0, "21": 0}}}})",
       "missing level key '22'"},
      {R"({"qutrit": {"d": 3, "units": "MHz",
                      "pairs": {"Q1-Q2": {"11": 1, "12": 0, "21": 0, "22": 0, "13": 1}}}})",
       "bad level key '13'"},
      {R"({"qutrit": {"d": 3, "units": "MHz", "pairs": {"Q1-Q2": 5}}})", "must be an object"},
      {R"(not json)", "not valid JSON"},
  };
  for (const auto& [body, frag] : cases) {
    CAPTURE(body);
    std::filesystem::path p = write_temp("hwdd_rates_bad.json", body);
    DataEnvGuard guard(p.string());
    try {
      load_device_rates("qutrit/Q1-Q2");
      FAIL_CHECK("expected ConfigError for: " << frag);
    } catch (const ConfigError& e) {
      CHECK(mentions(e.what(), frag));
    }
    std::filesystem::remove(p);
  }
}

TEST_CASE("seventeen-digit formatting round-trips doubles exactly") {
  for (double v : {1.0 / 3.0, 0.1, 12345.6789, 1e-17, 5e-324, 0.0, 2.0,
                   0.35000000000000003, -1.5e300}) {
    std::string s = format_g17(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(format_g17(0.5) == "0.5");
  CHECK(format_g17(1.0) == "1");
}

TEST_CASE("CSV export shape, formatting, and quoting") {
  ExperimentResult r;
  r.experiment = "preserve";
  r.d = 3;
  r.seed = 9;
  r.times = {0.5, 1.0};
  Curve c;
  c.label = "a,b";  // forces quoting
  c.sequence = "none";
  c.mean = {0.25, 0.5};
  c.stderr_ = {0.0, 0.125};
  r.curves.push_back(c);

  CHECK(result_csv(r) ==
        "time_us,fidelity_mean,fidelity_stderr,label,sequence,d,seed\n"
        "0.5,0.25,0,\"a,b\",none,3,9\n"
        "1,0.5,0.125,\"a,b\",none,3,9\n");

  r.curves[0].mean.pop_back();
  CHECK_THROWS_AS(result_csv(r), NumericError);
}

TEST_CASE("experiment outputs land as csv, json, and svg") {
  ExperimentResult r;
  r.experiment = "preserve";
  r.d = 3;
  r.seed = 1;
  r.times = {0.5, 1.0};
  r.curves.push_back({"no-dd", "none", {0.9, 0.8}, {0.01, 0.01}});
  r.config_json = R"({"experiment": "preserve"})";

  std::filesystem::path dir = std::filesystem::temp_directory_path() / "hwdd_out_test";
  std::filesystem::remove_all(dir);
  emit_outputs(r, dir.string());

  std::ifstream csv(dir / "result.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "time_us,fidelity_mean,fidelity_stderr,label,sequence,d,seed");

  std::ifstream jf(dir / "result.json");
  nlohmann::json meta = nlohmann::json::parse(jf);
  CHECK(meta.contains("library_version"));
  CHECK(meta["curves"][0]["label"] == "no-dd");
  CHECK(meta["config"]["experiment"] == "preserve");

  std::ifstream svg(dir / "plot.svg");
  std::string svg_text((std::istreambuf_iterator<char>(svg)), std::istreambuf_iterator<char>());
  CHECK(mentions(svg_text, "<svg"));
  CHECK(mentions(svg_text, "no-dd"));

  ExperimentResult bad = r;
  bad.curves[0].mean[0] = 1.5;
  CHECK_THROWS_AS(emit_outputs(bad, dir.string()), NumericError);

  ExperimentResult empty = r;
  empty.times.clear();
  CHECK_THROWS_AS(emit_outputs(empty, dir.string()), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("scaling outputs include the fit and a log-log plot") {
  ScalingResult r;
  for (int k = 0; k < 6; ++k) {
    double tau = 1e-3 * std::pow(4.0, k);
    r.tau_values.push_back(tau);
    r.infidelities.push_back(2.0 * std::pow(tau, 4.0));
  }
  r.slope = 4.0;
  r.intercept = std::log(2.0);
  r.r_squared = 0.9999;
  r.points_used = 6;

  std::filesystem::path dir = std::filesystem::temp_directory_path() / "hwdd_scaling_out";
  std::filesystem::remove_all(dir);
  emit_scaling_outputs(r, "universal d=3", "{}", 42, dir.string());

  std::ifstream csv(dir / "result.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "tau_us,infidelity,label,seed");

  std::ifstream jf(dir / "result.json");
  nlohmann::json meta = nlohmann::json::parse(jf);
  CHECK(meta["fit"]["slope"] == 4.0);
  CHECK(meta["fit"]["points_used"] == 6);

  std::ifstream svg(dir / "plot.svg");
  std::string svg_text((std::istreambuf_iterator<char>(svg)), std::istreambuf_iterator<char>());
  CHECK(mentions(svg_text, "slope = 4.000"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("experiment dispatch routes by name and rejects scaling") {
  RunConfig rc = parse_config_text(R"({
    "version": 1, "experiment": "preserve", "d": 2,
    "sequences": [{"name": "none"}, {"name": "dxd"}],
    "noise": {"dephasing": [{"sigma": 0.3}]},
    "time_grid": [0.5, 1.0], "shots": 4, "seed": 2
  })",
                                   "cfg");
  ExperimentResult res = run_experiment(rc);
  CHECK(res.experiment == "preserve");
  REQUIRE(res.curves.size() == 2);
  CHECK(res.curves[0].mean.size() == 2);

  RunConfig sc = parse_config_text(
      R"({"version": 1, "experiment": "scaling", "scaling": {}})", "cfg");
  CHECK_THROWS_AS(run_experiment(sc), ConfigError);
}

TEST_CASE("tau sweep drives the quartic fit end to end") {
  ScalingSpec spec;  // defaults: universal on a random Hamiltonian, d = 3
  spec.points = 10;
  ScalingResult r = run_scaling(spec);
  CHECK(r.slope == doctest::Approx(4.0).epsilon(0.15));
  CHECK(r.r_squared > 0.99);
  CHECK(r.tau_values.size() == 10);

  ScalingSpec free_spec;
  free_spec.sequence = "free";
  free_spec.points = 10;
  ScalingResult fr = run_scaling(free_spec);
  CHECK(fr.slope == doctest::Approx(2.0).epsilon(0.1));

  // staggered pulses cancel a pure cross-Kerr coupling to machine precision:
  // every sweep point sits below the fit window, so the fit must refuse
  ScalingSpec ck;
  ck.sequence = "ckdd";
  ck.hamiltonian = "cross_kerr";
  ck.rates_key = "qutrit/Q1-Q2";
  ck.points = 6;
  CHECK_THROWS_AS(run_scaling(ck), NumericError);

  ScalingSpec bad;
  bad.hamiltonian = "cross_kerr";
  bad.rates_key = "qutrit/Q1-Q2";
  bad.d = 4;  // table is d = 3
  CHECK_THROWS_AS(run_scaling(bad), ConfigError);
}
