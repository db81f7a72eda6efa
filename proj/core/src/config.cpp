#include "hwdd/config.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace hwdd {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
  throw ConfigError(origin + ": " + msg);
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& origin, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      fail(origin, where + ": unknown key '" + it.key() + "'");
}

const json* find(const json& obj, const std::string& key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

int get_int(const json& obj, const std::string& key, const std::string& origin) {
  const json* v = find(obj, key);
  if (!v) fail(origin, "missing required key '" + key + "'");
  if (!v->is_number_integer()) fail(origin, key + ": must be an integer");
  return v->get<int>();
}

int get_int_or(const json& obj, const std::string& key, int def, const std::string& origin) {
  const json* v = find(obj, key);
  if (!v) return def;
  if (!v->is_number_integer()) fail(origin, key + ": must be an integer");
  return v->get<int>();
}

double get_num(const json& obj, const std::string& key, const std::string& origin) {
  const json* v = find(obj, key);
  if (!v) fail(origin, "missing required key '" + key + "'");
  if (!v->is_number()) fail(origin, key + ": must be a number");
  return v->get<double>();
}

double get_num_or(const json& obj, const std::string& key, double def,
                  const std::string& origin) {
  const json* v = find(obj, key);
  if (!v) return def;
  if (!v->is_number()) fail(origin, key + ": must be a number");
  return v->get<double>();
}

std::string get_str(const json& obj, const std::string& key, const std::string& origin) {
  const json* v = find(obj, key);
  if (!v) fail(origin, "missing required key '" + key + "'");
  if (!v->is_string()) fail(origin, key + ": must be a string");
  return v->get<std::string>();
}

std::string get_str_or(const json& obj, const std::string& key, const std::string& def,
                       const std::string& origin) {
  const json* v = find(obj, key);
  if (!v) return def;
  if (!v->is_string()) fail(origin, key + ": must be a string");
  return v->get<std::string>();
}

std::uint64_t get_u64_or(const json& obj, const std::string& key, std::uint64_t def,
                         const std::string& origin) {
  const json* v = find(obj, key);
  if (!v) return def;
  if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
    fail(origin, key + ": must be a non-negative integer");
  return v->get<std::uint64_t>();
}

std::vector<double> parse_time_grid(const json& v, const std::string& origin) {
  std::vector<double> grid;
  if (v.is_array()) {
    for (const json& t : v) {
      if (!t.is_number()) fail(origin, "time_grid: entries must be numbers");
      grid.push_back(t.get<double>());
    }
  } else if (v.is_object()) {
    reject_unknown_keys(v, {"start_us", "stop_us", "points"}, origin, "time_grid");
    double start = get_num(v, "start_us", origin);
    double stop = get_num(v, "stop_us", origin);
    int points = get_int(v, "points", origin);
    if (points < 2) fail(origin, "time_grid.points: must be >= 2");
    if (!(stop > start)) fail(origin, "time_grid.stop_us: must exceed start_us");
    for (int k = 0; k < points; ++k)
      grid.push_back(start + (stop - start) * k / double(points - 1));
  } else {
    fail(origin, "time_grid: must be an array of times or {start_us, stop_us, points}");
  }
  if (grid.empty()) fail(origin, "time_grid: must not be empty");
  if (grid.front() < 0.0) fail(origin, "time_grid: times must be >= 0");
  for (size_t k = 1; k < grid.size(); ++k)
    if (grid[k] <= grid[k - 1]) fail(origin, "time_grid: times must be strictly increasing");
  return grid;
}

const std::set<std::string> kSequenceNames = {"none", "dxd",       "universal",
                                              "ckdd", "spectator", "simultaneous"};

std::vector<SequenceSpec> parse_sequences(const json& v, const std::string& origin) {
  if (!v.is_array() || v.empty())
    fail(origin, "sequences: must be a non-empty array");
  std::vector<SequenceSpec> out;
  for (const json& e : v) {
    if (!e.is_object()) fail(origin, "sequences: entries must be objects");
    reject_unknown_keys(e, {"name", "reps", "label"}, origin, "sequences");
    SequenceSpec s;
    s.name = get_str(e, "name", origin);
    if (!kSequenceNames.count(s.name))
      fail(origin, "sequences.name: unknown sequence name '" + s.name + "'");
    s.reps = get_int_or(e, "reps", 1, origin);
    if (s.reps < 1) fail(origin, "sequences.reps: must be >= 1");
    if (s.reps != 1 && s.name != "dxd")
      fail(origin, "sequences.reps: only the dxd sequence takes repetitions");
    s.label = get_str_or(e, "label", "", origin);
    out.push_back(std::move(s));
  }
  return out;
}

CrossKerrMatrix parse_rates_mhz(const json& v, int d, const std::string& origin) {
  if (!v.is_array() || static_cast<int>(v.size()) != d - 1)
    fail(origin, "rates_mhz: must be a (d-1)x(d-1) array of rows");
  Eigen::MatrixXd mhz(d - 1, d - 1);
  for (int i = 0; i < d - 1; ++i) {
    const json& row = v[i];
    if (!row.is_array() || static_cast<int>(row.size()) != d - 1)
      fail(origin, "rates_mhz: must be a (d-1)x(d-1) array of rows");
    for (int j = 0; j < d - 1; ++j) {
      if (!row[j].is_number()) fail(origin, "rates_mhz: entries must be numbers");
      mhz(i, j) = row[j].get<double>();
    }
  }
  return CrossKerrMatrix::from_mhz(d, mhz);
}

NoiseModel parse_noise(const json& v, int d, int qudits, const std::string& origin) {
  NoiseModel noise;
  if (!v.is_object()) fail(origin, "noise: must be an object");
  reject_unknown_keys(v, {"dephasing", "cross_kerr", "bath_dim"}, origin, "noise");

  if (const json* deph = find(v, "dephasing")) {
    if (!deph->is_array()) fail(origin, "noise.dephasing: must be an array");
    for (const json& e : *deph) {
      if (!e.is_object()) fail(origin, "noise.dephasing: entries must be objects");
      reject_unknown_keys(e, {"qudit", "sigma", "sigma_nu"}, origin, "noise.dephasing");
      DephasingSpec spec;
      spec.qudit = get_int_or(e, "qudit", 0, origin);
      if (spec.qudit < 0 || spec.qudit >= qudits)
        fail(origin, "noise.dephasing.qudit: index out of range");
      spec.sigma = get_num_or(e, "sigma", 0.0, origin);
      if (spec.sigma < 0.0) fail(origin, "noise.dephasing.sigma: must be >= 0");
      if (const json* sn = find(e, "sigma_nu")) {
        if (!sn->is_array() || static_cast<int>(sn->size()) != d - 1)
          fail(origin, "noise.dephasing.sigma_nu: must list d-1 values");
        for (const json& x : *sn) {
          if (!x.is_number() || x.get<double>() < 0.0)
            fail(origin, "noise.dephasing.sigma_nu: values must be numbers >= 0");
          spec.sigma_nu.push_back(x.get<double>());
        }
      }
      noise.dephasing.push_back(std::move(spec));
    }
  }

  if (const json* ck = find(v, "cross_kerr")) {
    if (!ck->is_array()) fail(origin, "noise.cross_kerr: must be an array");
    for (const json& e : *ck) {
      if (!e.is_object()) fail(origin, "noise.cross_kerr: entries must be objects");
      reject_unknown_keys(e, {"pair", "rates_key", "rates_mhz"}, origin, "noise.cross_kerr");
      CouplingSpec c;
      const json* pair = find(e, "pair");
      if (!pair || !pair->is_array() || pair->size() != 2 || !(*pair)[0].is_number_integer() ||
          !(*pair)[1].is_number_integer())
        fail(origin, "noise.cross_kerr.pair: must be [a, b] register indices");
      c.a = (*pair)[0].get<int>();
      c.b = (*pair)[1].get<int>();
      if (c.a < 0 || c.b < 0 || c.a >= qudits || c.b >= qudits || c.a == c.b)
        fail(origin, "noise.cross_kerr.pair: indices out of range");
      const json* key = find(e, "rates_key");
      const json* mhz = find(e, "rates_mhz");
      if ((key != nullptr) == (mhz != nullptr))
        fail(origin, "noise.cross_kerr: give exactly one of rates_key, rates_mhz");
      if (key) {
        if (!key->is_string()) fail(origin, "noise.cross_kerr.rates_key: must be a string");
        c.key = key->get<std::string>();
        c.rates = load_device_rates(c.key);
        if (c.rates.d != d)
          fail(origin, "noise.cross_kerr.rates_key: '" + c.key + "' is a d=" +
                           std::to_string(c.rates.d) + " table but the register has d=" +
                           std::to_string(d));
      } else {
        c.rates = parse_rates_mhz(*mhz, d, origin);
      }
      noise.couplings.push_back(std::move(c));
    }
  }

  noise.bath_dim = get_int_or(v, "bath_dim", 1, origin);
  if (noise.bath_dim < 1) fail(origin, "noise.bath_dim: must be >= 1");
  return noise;
}

ScalingSpec parse_scaling(const json& v, const std::string& origin) {
  if (!v.is_object()) fail(origin, "scaling: must be an object");
  reject_unknown_keys(v,
                      {"d", "sequence", "hamiltonian", "rates_key", "bath_dim", "scale",
                       "bath_scale", "tau_min_us", "tau_max_us", "points", "seed"},
                      origin, "scaling");
  ScalingSpec s;
  s.d = get_int_or(v, "d", 3, origin);
  if (s.d < 2) fail(origin, "scaling.d: must be >= 2");
  s.sequence = get_str_or(v, "sequence", "universal", origin);
  static const std::set<std::string> kScalingSeqs = {"universal", "dxd", "ckdd",
                                                     "simultaneous", "free"};
  if (!kScalingSeqs.count(s.sequence))
    fail(origin, "scaling.sequence: unknown sequence name '" + s.sequence + "'");
  s.hamiltonian = get_str_or(v, "hamiltonian", "random_hw", origin);
  if (s.hamiltonian != "random_hw" && s.hamiltonian != "cross_kerr")
    fail(origin, "scaling.hamiltonian: must be 'random_hw' or 'cross_kerr'");
  s.rates_key = get_str_or(v, "rates_key", "", origin);
  if (s.hamiltonian == "cross_kerr" && s.rates_key.empty())
    fail(origin, "scaling.rates_key: required when hamiltonian is 'cross_kerr'");
  if ((s.sequence == "ckdd" || s.sequence == "simultaneous") != (s.hamiltonian == "cross_kerr"))
    fail(origin, "scaling.sequence: two-qudit sequences pair with the cross_kerr hamiltonian");
  s.bath_dim = get_int_or(v, "bath_dim", 1, origin);
  if (s.bath_dim < 1) fail(origin, "scaling.bath_dim: must be >= 1");
  s.scale = get_num_or(v, "scale", 1.0, origin);
  s.bath_scale = get_num_or(v, "bath_scale", 0.0, origin);
  if (s.bath_scale < 0.0) fail(origin, "scaling.bath_scale: must be >= 0");
  s.tau_min = get_num_or(v, "tau_min_us", 1e-4, origin);
  s.tau_max = get_num_or(v, "tau_max_us", 1e-2, origin);
  if (!(s.tau_min > 0.0) || !(s.tau_max > s.tau_min))
    fail(origin, "scaling.tau_min_us/tau_max_us: need 0 < tau_min_us < tau_max_us");
  s.points = get_int_or(v, "points", 16, origin);
  if (s.points < 4) fail(origin, "scaling.points: must be >= 4");
  s.seed = get_u64_or(v, "seed", 42, origin);
  return s;
}

int default_qudits(const std::string& experiment) {
  if (experiment == "preserve") return 1;
  if (experiment == "crosskerr") return 2;
  return 2;  // bell
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(origin, std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(origin, "top level: must be a JSON object");

  RunConfig rc;
  rc.version = get_int(j, "version", origin);
  if (rc.version != 1) fail(origin, "version: only version 1 is supported");
  rc.experiment = get_str(j, "experiment", origin);
  rc.output_dir = get_str_or(j, "output_dir", "out", origin);

  static const std::set<std::string> kExperiments = {"preserve", "crosskerr", "bell",
                                                     "scaling"};
  if (!kExperiments.count(rc.experiment))
    fail(origin, "experiment: must be one of preserve, crosskerr, bell, scaling");

  if (rc.experiment == "scaling") {
    reject_unknown_keys(j, {"version", "experiment", "output_dir", "scaling"}, origin,
                        "top level");
    const json* sc = find(j, "scaling");
    if (!sc) fail(origin, "missing required key 'scaling'");
    rc.scaling = parse_scaling(*sc, origin);
    rc.exp.config_json = j.dump();
    return rc;
  }

  reject_unknown_keys(j,
                      {"version", "experiment", "output_dir", "d", "qudits", "sequences",
                       "noise", "time_grid", "tau_mode", "tau_us", "pulse_error", "shots",
                       "seed", "threads"},
                      origin, "top level");

  int d = get_int(j, "d", origin);
  if (d < 2) fail(origin, "d: must be >= 2");
  int qudits = get_int_or(j, "qudits", default_qudits(rc.experiment), origin);
  if (rc.experiment == "preserve" && qudits != 1)
    fail(origin, "qudits: the preserve experiment runs on a single qudit");
  if (rc.experiment == "crosskerr" && qudits != 2 && qudits != 3)
    fail(origin, "qudits: the crosskerr experiment runs on 2 or 3 qudits");
  if (rc.experiment == "bell" && (qudits != 2 || d != 3))
    fail(origin, "qudits: the bell experiment runs on two qutrits (d = 3)");

  ExperimentConfig& e = rc.exp;
  e.register_dims.assign(qudits, d);

  const json* seqs = find(j, "sequences");
  if (!seqs) fail(origin, "missing required key 'sequences'");
  e.sequences = parse_sequences(*seqs, origin);

  if (const json* noise = find(j, "noise"))
    e.noise = parse_noise(*noise, d, qudits, origin);

  const json* grid = find(j, "time_grid");
  if (!grid) fail(origin, "missing required key 'time_grid'");
  e.time_grid = parse_time_grid(*grid, origin);

  e.tau_mode = get_str_or(j, "tau_mode", "scaled", origin);
  if (e.tau_mode != "scaled" && e.tau_mode != "fixed")
    fail(origin, "tau_mode: must be 'scaled' or 'fixed'");
  e.tau = get_num_or(j, "tau_us", 0.0, origin);
  if (e.tau_mode == "fixed" && !(e.tau > 0.0))
    fail(origin, "tau_us: must be > 0 in fixed mode");
  e.pulse_error = get_num_or(j, "pulse_error", 0.0, origin);
  if (std::abs(e.pulse_error) >= 0.2)
    fail(origin, "pulse_error: magnitude must be < 0.2");
  e.shots = get_int_or(j, "shots", 1000, origin);
  if (e.shots < 1) fail(origin, "shots: must be >= 1");
  e.seed = get_u64_or(j, "seed", 0, origin);
  e.threads = get_int_or(j, "threads", 1, origin);
  if (e.threads < 1) fail(origin, "threads: must be >= 1");
  e.config_json = j.dump();
  return rc;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

std::string device_rates_path() {
  namespace fs = std::filesystem;
  if (const char* env = std::getenv("HWDD_DATA")) {
    fs::path p(env);
    if (fs::is_directory(p)) p /= "device_rates.json";
    return p.string();
  }
  if (fs::exists("device_rates.json")) return "device_rates.json";
#ifdef HWDD_DATA_DIR
  return std::string(HWDD_DATA_DIR) + "/device_rates.json";
#else
  return "device_rates.json";
#endif
}

CrossKerrMatrix load_device_rates(const std::string& key) {
  auto slash = key.find('/');
  if (slash == std::string::npos || slash == 0 || slash + 1 == key.size())
    throw ConfigError("rates_key: expected 'family/pair', got '" + key + "'");
  std::string family = key.substr(0, slash);
  std::string pair = key.substr(slash + 1);

  std::string path = device_rates_path();
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open device rates file");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": not valid JSON: " + e.what());
  }

  const json* fam = find(j, family);
  if (!fam) throw ConfigError(path + ": no rate family '" + family + "'");
  int d = get_int(*fam, "d", path);
  if (d < 2) throw ConfigError(path + ": " + family + ".d: must be >= 2");
  std::string units = get_str(*fam, "units", path);
  if (units != "MHz")
    throw ConfigError(path + ": " + family + ".units: only 'MHz' tables are supported");
  const json* pairs = find(*fam, "pairs");
  if (!pairs || !pairs->is_object())
    throw ConfigError(path + ": " + family + ".pairs: must be an object");
  const json* tab = find(*pairs, pair);
  if (!tab) throw ConfigError(path + ": no pair '" + pair + "' in family '" + family + "'");
  if (!tab->is_object())
    throw ConfigError(path + ": " + family + ".pairs." + pair + ": must be an object");

  Eigen::MatrixXd mhz = Eigen::MatrixXd::Zero(d - 1, d - 1);
  Eigen::MatrixXd seen = Eigen::MatrixXd::Zero(d - 1, d - 1);
  for (auto it = tab->begin(); it != tab->end(); ++it) {
    const std::string& k = it.key();
    if (k.size() != 2 || k[0] < '1' || k[1] < '1' || k[0] > char('0' + d - 1) ||
        k[1] > char('0' + d - 1))
      throw ConfigError(path + ": " + family + ".pairs." + pair + ": bad level key '" + k +
                        "' (expected two digits in 1.." + std::to_string(d - 1) + ")");
    if (!it.value().is_number())
      throw ConfigError(path + ": " + family + ".pairs." + pair + "." + k +
                        ": must be a number");
    int i = k[0] - '1', jj = k[1] - '1';
    mhz(i, jj) = it.value().get<double>();
    seen(i, jj) = 1.0;
  }
  for (int i = 0; i < d - 1; ++i)
    for (int jj = 0; jj < d - 1; ++jj)
      if (seen(i, jj) == 0.0)
        throw ConfigError(path + ": " + family + ".pairs." + pair + ": missing level key '" +
                          std::to_string(i + 1) + std::to_string(jj + 1) + "'");
  return CrossKerrMatrix::from_mhz(d, mhz);
}

}  // namespace hwdd
