// Copyright 2026 The rydpump Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rydpump/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace ryd {

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"spectrum", "effective", "evolve", "trajectory", "steady",
                                              "witness",  "darkscan",  "scaling", "bloch",     "fig2a",
                                              "fig2b",    "fig3",      "fig4"};
  return names;
}

ConfigValidationError::ConfigValidationError(std::vector<FieldError> errors)
    : ConfigError(errors.empty() ? "" : errors.front().field,
                  errors.empty() ? "invalid configuration" : errors.front().message),
      errors_(std::move(errors)) {}

json ConfigValidationError::to_json() const {
  json list = json::array();
  for (const auto& e : errors_) list.push_back({{"field", e.field}, {"message", e.message}});
  return {{"status", "error"}, {"code", kExitConfig}, {"errors", list}};
}

int default_workers() {
  if (const char* env = std::getenv("RYD_WORKERS")) {
    try {
      const int w = std::stoi(env);
      if (w >= 1) return w;
    } catch (const std::exception&) {
    }
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

namespace {

const double kDarkResonanceXi = std::pow(3.0, 1.0 / 6.0);

// Collects every problem with its field path instead of stopping at the first.
class Reader {
 public:
  explicit Reader(const json& root) : root_(root) {}

  std::vector<FieldError> errors;

  void fail(const std::string& field, const std::string& msg) { errors.push_back({field, msg}); }

  const json* section(const std::string& name, std::initializer_list<const char*> allowed) {
    if (!root_.contains(name)) return nullptr;
    const json& s = root_.at(name);
    if (!s.is_object()) {
      fail(name, "must be an object");
      return nullptr;
    }
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = s.begin(); it != s.end(); ++it) {
      if (!ok.count(it.key())) fail(name + "." + it.key(), "unknown key");
    }
    return &s;
  }

  std::optional<double> number(const json* s, const std::string& sec, const std::string& key, bool required) {
    const std::string path = sec + "." + key;
    if (!s || !s->contains(key) || s->at(key).is_null()) {
      if (required) fail(path, "required");
      return std::nullopt;
    }
    if (!s->at(key).is_number()) {
      fail(path, "must be a number");
      return std::nullopt;
    }
    return s->at(key).get<double>();
  }

  std::optional<long long> integer(const json* s, const std::string& sec, const std::string& key, bool required) {
    const std::string path = sec + "." + key;
    if (!s || !s->contains(key) || s->at(key).is_null()) {
      if (required) fail(path, "required");
      return std::nullopt;
    }
    if (!s->at(key).is_number_integer()) {
      fail(path, "must be an integer");
      return std::nullopt;
    }
    return s->at(key).get<long long>();
  }

  std::optional<std::string> string(const json* s, const std::string& sec, const std::string& key) {
    if (!s || !s->contains(key) || s->at(key).is_null()) return std::nullopt;
    if (!s->at(key).is_string()) {
      fail(sec + "." + key, "must be a string");
      return std::nullopt;
    }
    return s->at(key).get<std::string>();
  }

  template <class T>
  std::optional<std::vector<T>> list(const json* s, const std::string& sec, const std::string& key, bool required) {
    const std::string path = sec + "." + key;
    if (!s || !s->contains(key) || s->at(key).is_null()) {
      if (required) fail(path, "required");
      return std::nullopt;
    }
    const json& v = s->at(key);
    if (!v.is_array()) {
      fail(path, "must be a list");
      return std::nullopt;
    }
    std::vector<T> out;
    for (const auto& e : v) {
      if constexpr (std::is_same_v<T, std::string>) {
        if (!e.is_string()) {
          fail(path, "entries must be strings");
          return std::nullopt;
        }
      } else if constexpr (std::is_integral_v<T>) {
        if (!e.is_number_integer()) {
          fail(path, "entries must be integers");
          return std::nullopt;
        }
      } else {
        if (!e.is_number()) {
          fail(path, "entries must be numbers");
          return std::nullopt;
        }
      }
      out.push_back(e.get<T>());
    }
    return out;
  }

 private:
  const json& root_;
};

bool uses_lattice(const std::string& s) {
  return s == "spectrum" || s == "effective" || s == "evolve" || s == "trajectory" || s == "steady" ||
         s == "witness" || s == "fig2b" || s == "fig3";
}

bool uses_drive(const std::string& s) { return uses_lattice(s) || s == "fig2a"; }

bool uses_probe(const std::string& s) { return uses_drive(s) && s != "spectrum" && s != "effective"; }

bool uses_time(const std::string& s) {
  return s == "evolve" || s == "trajectory" || s == "fig2b" || s == "fig3";
}

bool uses_trajectories(const std::string& s) { return s == "trajectory" || s == "fig3"; }

std::vector<int> default_fig4_sizes() {
  std::set<int> n;
  for (int k = 4; k <= 124; k += 6) n.insert(k);
  for (int k = 6; k <= 126; k += 10) n.insert(k);
  n.insert(128);
  return {n.begin(), n.end()};
}

std::vector<int> to_one_based(const std::vector<int>& v) {
  std::vector<int> out;
  for (int s : v) out.push_back(s + 1);
  return out;
}

json normalized_echo(const ScenarioConfig& c) {
  json j;
  j["scenario"] = c.scenario;
  j["output"] = c.output.string();
  const bool lattice = uses_lattice(c.scenario) || c.scenario == "fig2a" || c.scenario == "darkscan";
  if (lattice) j["lattice"] = {{"n_sites", c.n_sites}, {"a0", c.a0}, {"xi", c.xi}, {"p", c.p}};
  if (c.scenario == "scaling" || c.scenario == "fig4") j["lattice"] = {{"xi", c.xi}};
  if (uses_drive(c.scenario)) {
    json d{{"omega", c.drive.omega},
           {"gamma_r", c.drive.gamma_r},
           {"gamma_reservoir", c.gamma_reservoir},
           {"reservoir_sites", to_one_based(c.drive.reservoir_sites)}};
    if (c.drive.delta) {
      d["delta"] = *c.drive.delta;
    } else if (c.n_sites >= 2 && c.scenario != "fig2a") {
      d["delta"] = c.drive.detuning(lattice_for_drive(c.n_sites, c.a0, c.xi, c.drive, c.p));
    } else {
      d["delta"] = "half nearest-neighbour shift";
    }
    j["drive"] = d;
  }
  if (uses_drive(c.scenario)) {
    json dyn{{"tier", to_string(c.tier)}, {"truncation", to_string(c.truncation)}};
    if (uses_time(c.scenario)) {
      dyn["t_final"] = c.t_final;
      dyn["samples"] = c.samples;
      dyn["initial_excited"] = to_one_based(c.initial_excited);
    }
    if (uses_trajectories(c.scenario)) {
      dyn["n_traj"] = c.n_traj;
      dyn["seed"] = c.seed;
      dyn["dt"] = c.dt;
    }
    j["dynamics"] = dyn;
    if (uses_probe(c.scenario)) j["witness"] = {{"probe_sites", to_one_based(c.probe_sites)}, {"grid", c.grid}};
  }
  if (!c.n_list.empty() || !c.xi_list.empty() || !c.a0_list.empty()) {
    json s;
    if (!c.n_list.empty()) s["n_list"] = c.n_list;
    if (!c.xi_list.empty()) s["xi_list"] = c.xi_list;
    if (!c.a0_list.empty()) s["a0_list"] = c.a0_list;
    std::vector<std::string> rules;
    for (auto r : c.rules) rules.push_back(to_string(r));
    if (!rules.empty()) s["rules"] = rules;
    j["scan"] = s;
  }
  if (c.scenario == "bloch") {
    j["dressing"] = {{"omega_d", c.dressing.omega_d},
                     {"delta_d", c.dressing.delta_d},
                     {"gamma_e", c.dressing.gamma_e},
                     {"gamma_r", c.dressing.gamma_r},
                     {"t_final", c.bloch_t_final},
                     {"dt", c.bloch_dt}};
  }
  j["workers"] = c.workers;
  return j;
}

}  // namespace

ScenarioConfig validate_config(const json& raw, const RunOverrides& ov) {
  if (!raw.is_object()) throw ConfigValidationError(std::vector<FieldError>{{"", "configuration must be a JSON object"}});
  Reader rd(raw);
  const std::set<std::string> top{"scenario", "output", "lattice", "drive", "dynamics", "witness", "scan", "dressing"};
  for (auto it = raw.begin(); it != raw.end(); ++it) {
    if (!top.count(it.key())) rd.fail(it.key(), "unknown key");
  }
  ScenarioConfig c;
  const json* root_ptr = &raw;
  if (ov.scenario) {
    c.scenario = *ov.scenario;
    if (auto s = rd.string(root_ptr, "", "scenario"); s && *s != c.scenario) {
      rd.fail("scenario", "config names '" + *s + "' but the command is '" + c.scenario + "'");
    }
  } else if (auto s = rd.string(root_ptr, "", "scenario")) {
    c.scenario = *s;
  } else {
    rd.fail("scenario", "required");
  }
  const auto& names = scenario_names();
  if (!c.scenario.empty() && std::find(names.begin(), names.end(), c.scenario) == names.end()) {
    rd.fail("scenario", "unknown scenario '" + c.scenario + "'");
    throw ConfigValidationError(rd.errors);
  }
  if (auto o = rd.string(root_ptr, "", "output")) c.output = *o;
  if (ov.output) c.output = *ov.output;

  const json* lat = rd.section("lattice", {"n_sites", "a0", "xi", "p"});
  const json* drv = rd.section("drive", {"omega", "delta", "gamma_r", "gamma_reservoir", "reservoir_sites"});
  const json* dyn = rd.section("dynamics", {"tier", "truncation", "t_final", "samples", "n_traj", "seed", "dt",
                                            "initial_excited"});
  const json* wit = rd.section("witness", {"probe_sites", "grid"});
  const json* scan = rd.section("scan", {"n_list", "xi_list", "a0_list", "rules"});
  const json* dress = rd.section("dressing", {"omega_d", "delta_d", "gamma_e", "gamma_r", "t_final", "dt"});

  const std::string& sc = c.scenario;
  const bool need_lattice = uses_lattice(sc);
  const bool is_fig2a = sc == "fig2a";
  const bool is_scan = sc == "scaling" || sc == "fig4";

  // Lattice.
  const auto n = rd.integer(lat, "lattice", "n_sites", need_lattice || sc == "darkscan");
  c.n_sites = n ? static_cast<int>(*n) : (is_fig2a ? 4 : 0);
  const auto a0 = rd.number(lat, "lattice", "a0", need_lattice);
  c.a0 = a0.value_or(is_scan || sc == "darkscan" ? 0.13 : 0.0);
  const auto xi = rd.number(lat, "lattice", "xi", need_lattice);
  c.xi = xi.value_or(kDarkResonanceXi);
  c.p = static_cast<int>(rd.integer(lat, "lattice", "p", false).value_or(6));
  if (need_lattice || is_fig2a || sc == "darkscan") {
    try {
      LatticeSpec spec{c.n_sites, need_lattice ? c.a0 : 1.0, need_lattice ? c.xi : 1.0, c.p, 1.0};
      spec.validate();
    } catch (const ConfigError& e) {
      rd.fail(e.field(), e.message());
    }
  }
  if (is_scan && !(c.xi > 0.0 && c.xi < 2.0)) rd.fail("lattice.xi", "must lie in (0, 2)");

  // Drive.
  if (uses_drive(sc)) {
    const auto omega = rd.number(drv, "drive", "omega", true);
    if (omega && !(*omega > 0.0)) rd.fail("drive.omega", "must be positive");
    c.drive.omega = omega.value_or(1.0);
    c.drive.delta = rd.number(drv, "drive", "delta", false);
    c.drive.gamma_r = rd.number(drv, "drive", "gamma_r", false).value_or(1e-4);
    if (!(c.drive.gamma_r >= 0.0)) rd.fail("drive.gamma_r", "must be non-negative");
    c.gamma_reservoir = rd.number(drv, "drive", "gamma_reservoir", false).value_or(1.0);
    if (!(c.gamma_reservoir >= 0.0)) rd.fail("drive.gamma_reservoir", "must be non-negative");
    std::vector<int> res;
    if (auto r = rd.list<int>(drv, "drive", "reservoir_sites", false)) {
      for (int s : *r) {
        if (s < 1 || s > c.n_sites) {
          rd.fail("drive.reservoir_sites", "site " + std::to_string(s) + " outside 1..N");
        } else {
          res.push_back(s - 1);
        }
      }
    } else if (c.n_sites >= 2) {
      res = {0, c.n_sites - 1};
    }
    if (c.n_sites >= 1) {
      try {
        c.drive = [&] {
          DriveConfig d = DriveConfig::with_reservoir(c.n_sites, c.drive.omega, res, c.drive.gamma_r, c.gamma_reservoir);
          d.delta = c.drive.delta;
          return d;
        }();
      } catch (const ConfigError& e) {
        rd.fail(e.field(), e.message());
      }
    }
    std::vector<int> probe;
    if (auto pr = rd.list<int>(wit, "witness", "probe_sites", false)) {
      for (int s : *pr) {
        if (s < 1 || s > c.n_sites) {
          rd.fail("witness.probe_sites", "site " + std::to_string(s) + " outside 1..N");
        } else {
          probe.push_back(s - 1);
        }
      }
      if (pr->empty()) rd.fail("witness.probe_sites", "must not be empty");
    } else {
      for (int i = 0; i < c.n_sites; ++i) {
        if (std::find(res.begin(), res.end(), i) == res.end()) probe.push_back(i);
      }
    }
    c.probe_sites = probe;
    if (uses_probe(sc) && c.probe_sites.empty() && c.n_sites > 0) rd.fail("witness.probe_sites", "every site is a reservoir site");
    c.grid = static_cast<int>(rd.integer(wit, "witness", "grid", false).value_or(200));
    if (c.grid < 2) rd.fail("witness.grid", "must be at least 2");
  }

  // Dynamics.
  c.tier = is_fig2a ? Tier::full : Tier::effective;
  if (auto t = rd.string(dyn, "dynamics", "tier")) {
    try {
      c.tier = tier_from_string(*t);
    } catch (const ConfigError& e) {
      rd.fail("dynamics.tier", e.message());
    }
  }
  if (ov.tier) c.tier = *ov.tier;
  if (auto t = rd.string(dyn, "dynamics", "truncation")) {
    try {
      c.truncation = truncation_from_string(*t);
    } catch (const ConfigError& e) {
      rd.fail("dynamics.truncation", e.message());
    }
  }
  const auto tf = rd.number(dyn, "dynamics", "t_final", uses_time(sc));
  c.t_final = tf.value_or(0.0);
  if (uses_time(sc) && tf && !(*tf > 0.0)) rd.fail("dynamics.t_final", "must be positive");
  c.samples = static_cast<int>(rd.integer(dyn, "dynamics", "samples", false).value_or(201));
  if (c.samples < 2) rd.fail("dynamics.samples", "need at least 2 samples");
  const long long ntraj = rd.integer(dyn, "dynamics", "n_traj", false).value_or(500);
  if (ntraj < 1) rd.fail("dynamics.n_traj", "must be positive");
  c.n_traj = static_cast<std::size_t>(std::max(1LL, ntraj));
  c.seed = static_cast<std::uint64_t>(rd.integer(dyn, "dynamics", "seed", false).value_or(1));
  if (ov.seed) c.seed = *ov.seed;
  c.dt = rd.number(dyn, "dynamics", "dt", false).value_or(0.01);
  if (!(c.dt > 0.0)) rd.fail("dynamics.dt", "must be positive");
  if (auto ex = rd.list<int>(dyn, "dynamics", "initial_excited", false)) {
    for (int s : *ex) {
      if (s < 1 || s > c.n_sites) {
        rd.fail("dynamics.initial_excited", "site " + std::to_string(s) + " outside 1..N");
      } else {
        c.initial_excited.push_back(s - 1);
      }
    }
  }
  if (c.tier == Tier::full && (uses_drive(sc)) && c.n_sites > kDenseSiteLimit) {
    rd.fail("lattice.n_sites", "full tier supports at most " + std::to_string(kDenseSiteLimit) + " sites");
  }
  if (uses_drive(sc) && c.n_sites > kDenseSiteLimit) {
    rd.fail("lattice.n_sites", "state analysis supports at most " + std::to_string(kDenseSiteLimit) + " sites");
  }

  // Scans.
  if (auto l = rd.list<int>(scan, "scan", "n_list", sc == "scaling")) c.n_list = *l;
  if (sc == "fig4" && c.n_list.empty()) c.n_list = default_fig4_sizes();
  for (int v : c.n_list) {
    if (v < 2 || v > 512) rd.fail("scan.n_list", "N must lie in 2..512");
  }
  if (auto l = rd.list<double>(scan, "scan", "xi_list", sc == "darkscan" || is_fig2a)) c.xi_list = *l;
  for (double v : c.xi_list) {
    if (!(v > 0.0 && v < 2.0)) rd.fail("scan.xi_list", "xi must lie in (0, 2)");
  }
  if (auto l = rd.list<double>(scan, "scan", "a0_list", is_fig2a)) c.a0_list = *l;
  for (double v : c.a0_list) {
    if (!(v > 0.0)) rd.fail("scan.a0_list", "a0 must be positive");
  }
  if (auto l = rd.list<std::string>(scan, "scan", "rules", false)) {
    for (const auto& r : *l) {
      try {
        c.rules.push_back(reservoir_rule_from_string(r));
      } catch (const ConfigError& e) {
        rd.fail("scan.rules", e.message());
      }
    }
  }
  if (is_scan && c.rules.empty()) {
    c.rules = sc == "fig4" ? std::vector<ReservoirRule>{ReservoirRule::edges, ReservoirRule::zeros}
                           : std::vector<ReservoirRule>{ReservoirRule::edges};
  }

  // Dressing.
  if (sc == "bloch") {
    const auto od = rd.number(dress, "dressing", "omega_d", true);
    const auto ge = rd.number(dress, "dressing", "gamma_e", true);
    c.dressing.omega_d = od.value_or(0.0);
    c.dressing.gamma_e = ge.value_or(1.0);
    c.dressing.delta_d = rd.number(dress, "dressing", "delta_d", false).value_or(0.0);
    c.dressing.gamma_r = rd.number(dress, "dressing", "gamma_r", false).value_or(1.0);
    try {
      c.dressing.validate();
      const double gamma = effective_decay_rate(c.dressing);
      const double fastest = std::max({c.dressing.gamma_e / 2.0, c.dressing.omega_d, std::abs(c.dressing.delta_d)});
      c.bloch_t_final = rd.number(dress, "dressing", "t_final", false).value_or(5.0 / gamma);
      c.bloch_dt = rd.number(dress, "dressing", "dt", false).value_or(0.05 / fastest);
      if (!(c.bloch_t_final > 0.0)) rd.fail("dressing.t_final", "must be positive");
      if (!(c.bloch_dt > 0.0) || c.bloch_dt * fastest >= 0.1) {
        rd.fail("dressing.dt", "must satisfy dt * max(gamma_e/2, omega_d, |delta_d|) < 0.1");
      }
    } catch (const ConfigError& e) {
      rd.fail(e.field(), e.message());
    }
  }

  c.workers = ov.workers ? *ov.workers : default_workers();
  if (c.workers < 1) rd.fail("workers", "must be positive");

  if (!rd.errors.empty()) throw ConfigValidationError(rd.errors);
  c.normalized = normalized_echo(c);
  return c;
}

ScenarioConfig validate_config_file(const std::filesystem::path& path, const RunOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigValidationError(std::vector<FieldError>{{"config", "cannot open " + path.string()}});
  json raw;
  try {
    raw = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigValidationError(std::vector<FieldError>{{"config", std::string("parse error: ") + e.what()}});
  }
  return validate_config(raw, overrides);
}

// ---------------------------------------------------------------------------
// Scenario runners.

namespace {

struct SampleMetrics {
  double t = 0.0;
  double fidelity = 0.0;
  double delta = 0.0;
  std::optional<double> y_c;
  double p0 = 0.0, p1 = 0.0, p_ge2 = 0.0;
  double concurrence = std::nan("");
  Physicality phys;
};

const std::vector<std::string> kTimeseriesHeader{"t",  "fidelity",   "delta",       "y_c",
                                                 "p0", "p1",         "p_ge2",       "concurrence",
                                                 "trace_error", "hermiticity_error", "min_eigenvalue"};

class Analyzer {
 public:
  Analyzer(const ScenarioConfig& c, const BasisIndexer& basis)
      : basis_(basis),
        probe_(c.probe_sites),
        target_(make_w_state(static_cast<int>(c.probe_sites.size()), iota(c.probe_sites.size()))),
        w_(register_depth_for(std::max<int>(2, static_cast<int>(c.probe_sites.size())))) {}

  SampleMetrics operator()(double t, const CMatrix& sector_rho) const {
    SampleMetrics m;
    m.t = t;
    m.phys = physicality(sector_rho);
    const CMatrix h = 0.5 * (sector_rho + sector_rho.adjoint());
    const QuantumState full = QuantumState::from_sector(basis_, h, 1e-6);
    const QuantumState red = partial_trace(full, probe_);
    m.fidelity = fidelity(red, target_);
    const WitnessReport rep = witness(red, w_);
    m.delta = rep.delta;
    m.y_c = rep.y_c;
    m.p0 = rep.p0;
    m.p1 = rep.p1;
    m.p_ge2 = rep.p_ge2;
    if (probe_.size() == 2) m.concurrence = concurrence(red.matrix());
    return m;
  }

  const WProjectorBasis& w_basis() const { return w_; }
  const QuantumState& target() const { return target_; }

 private:
  static std::vector<int> iota(std::size_t n) {
    std::vector<int> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = static_cast<int>(k);
    return v;
  }

  BasisIndexer basis_;
  std::vector<int> probe_;
  QuantumState target_;
  WProjectorBasis w_;
};

double opt_or_nan(const std::optional<double>& v) { return v ? *v : std::nan(""); }

void write_timeseries(const std::filesystem::path& path, const std::vector<SampleMetrics>& rows) {
  CsvWriter w(path, kTimeseriesHeader);
  for (const auto& m : rows) {
    w.cell(m.t).cell(m.fidelity).cell(m.delta).cell(opt_or_nan(m.y_c)).cell(m.p0).cell(m.p1).cell(m.p_ge2);
    w.cell(m.concurrence).cell(m.phys.trace_error).cell(m.phys.hermiticity_error).cell(m.phys.min_eigenvalue);
    w.end_row();
  }
}

LatticeSpec spec_of(const ScenarioConfig& c) { return lattice_for_drive(c.n_sites, c.a0, c.xi, c.drive, c.p); }

CMatrix initial_rho(const ScenarioConfig& c, const BasisIndexer& basis) {
  std::uint64_t mask = 0;
  for (int s : c.initial_excited) mask |= std::uint64_t{1} << s;
  const long k = basis.index_of(mask);
  if (k < 0) throw ConfigError("dynamics.initial_excited", "initial configuration lies outside the simulated sector");
  const auto d = static_cast<Eigen::Index>(basis.dim());
  CMatrix rho = CMatrix::Zero(d, d);
  rho(k, k) = 1.0;
  return rho;
}

CVector initial_psi(const ScenarioConfig& c, const BasisIndexer& basis) {
  const CMatrix rho = initial_rho(c, basis);
  CVector psi = CVector::Zero(rho.rows());
  for (Eigen::Index k = 0; k < rho.rows(); ++k) {
    if (rho(k, k) != cplx(0.0)) psi(k) = 1.0;
  }
  return psi;
}

struct RunContext {
  const ScenarioConfig& cfg;
  std::ostream& log;
  std::vector<std::string> outputs;
  json extra = json::object();

  std::filesystem::path file(const std::string& name) {
    outputs.push_back(name);
    return cfg.output / name;
  }
};

std::vector<SampleMetrics> analyze_master(const ScenarioConfig& c, const MasterResult& r) {
  const Analyzer an(c, r.basis);
  std::vector<SampleMetrics> rows;
  for (std::size_t k = 0; k < r.times.size(); ++k) rows.push_back(an(r.times[k], r.rho[k]));
  return rows;
}

void run_spectrum(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const LatticeSpec spec = spec_of(c);
  const RydbergSpectrum s = rydberg_spectrum(spec, c.drive);
  CsvWriter v(ctx.file("spectrum.csv"), {"n", "v_n"});
  for (std::size_t k = 0; k < s.v.size(); ++k) v.cell(static_cast<int>(k)).cell(s.v[k]).end_row();
  CsvWriter a(ctx.file("anharmonicity.csv"), {"n", "delta_v", "two_photon_detuning", "two_photon_rabi",
                                              "two_photon_linewidth", "blockaded"});
  for (std::size_t k = 0; k < s.anharmonicity.size(); ++k) {
    a.cell(static_cast<int>(k)).cell(s.anharmonicity[k]).cell(s.two_photon_detuning[k]).cell(s.two_photon_rabi[k]);
    a.cell(s.two_photon_linewidth[k]).cell(static_cast<int>(s.blockaded[k])).end_row();
  }
  ctx.extra["delta_nn"] = nearest_neighbor_shift(spec);
  ctx.extra["linewidth"] = c.drive.linewidth();
}

void run_effective(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const EffectiveModel m = build_effective_model(spec_of(c), c.drive, c.truncation);
  write_json(ctx.file("effective_model.json"), to_json(m));
  const RMatrix h = hxy_matrix_n1(m);
  CsvWriter w(ctx.file("hxy.csv"), {"i", "j", "h_ij", "h_ij_over_j"});
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    for (Eigen::Index j = 0; j < h.cols(); ++j) {
      w.cell(static_cast<int>(i + 1)).cell(static_cast<int>(j + 1)).cell(h(i, j)).cell(h(i, j) / m.j_scale());
      w.end_row();
    }
  const TruncationReport tr = truncation_error_report(spec_of(c), c.drive);
  ctx.extra["truncation_report"] = {{"max_tail_ratio", tr.max_tail_ratio},
                                    {"tail_sum_ratio", tr.tail_sum_ratio},
                                    {"shift_ratio", tr.shift_ratio},
                                    {"negligible", tr.negligible}};
}

MasterResult master_run(const ScenarioConfig& c, double t_final, const std::vector<double>& samples) {
  const EvolutionProblem p = make_problem(spec_of(c), c.drive, c.tier, c.truncation, t_final, samples);
  return evolve_master(p, initial_rho(c, p.basis));
}

void run_evolve(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const MasterResult r = master_run(c, c.t_final, uniform_samples(c.t_final, c.samples));
  write_timeseries(ctx.file("timeseries.csv"), analyze_master(c, r));
  ctx.extra["ode"] = {{"accepted", r.stats.accepted}, {"rejected", r.stats.rejected}, {"abs_tol", 1e-8}};
}

json ensemble_metadata(const ScenarioConfig& c, const TrajectoryEnsemble& e) {
  long jumps = 0;
  for (long j : e.jump_counts) jumps += j;
  json failures = json::array();
  for (const auto& f : e.failures) failures.push_back({{"trajectory", f.index}, {"message", f.message}});
  return {{"seed", e.seed},       {"n_traj", e.n_traj},   {"tier", to_string(c.tier)},
          {"dt", c.dt},           {"workers", c.workers}, {"mean_jumps", static_cast<double>(jumps) / e.n_traj},
          {"failures", failures}, {"rng", "philox4x32-10"}};
}

std::vector<SampleMetrics> analyze_ensemble(const ScenarioConfig& c, const TrajectoryEnsemble& e) {
  const Analyzer an(c, e.basis);
  std::vector<SampleMetrics> rows;
  for (std::size_t k = 0; k < e.times.size(); ++k) rows.push_back(an(e.times[k], e.mean_rho[k]));
  return rows;
}

void run_trajectory(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const EvolutionProblem p =
      make_problem(spec_of(c), c.drive, c.tier, c.truncation, c.t_final, uniform_samples(c.t_final, c.samples));
  TrajectoryOptions opt;
  opt.dt = c.dt;
  opt.workers = c.workers;
  opt.keep_states = false;
  const TrajectoryEnsemble e = evolve_trajectories(p, initial_psi(c, p.basis), c.n_traj, c.seed, opt);
  write_timeseries(ctx.file("timeseries.csv"), analyze_ensemble(c, e));
  write_json(ctx.file("ensemble.json"), ensemble_metadata(c, e));
}

json steady_json(const ScenarioConfig& c, const SteadyStateResult& ss) {
  const Analyzer an(c, ss.basis);
  const SampleMetrics m = an(0.0, ss.rho);
  const QuantumState red = partial_trace(ss.state(), c.probe_sites);
  const WitnessReport rep = certify(red, an.w_basis());
  json j;
  j["fidelity"] = m.fidelity;
  j["concurrence"] = std::isnan(m.concurrence) ? json(nullptr) : json(m.concurrence);
  j["witness"] = to_json(rep);
  j["smallest_singular_value"] = ss.smallest_singular;
  j["next_singular_value"] = ss.next_singular;
  j["trace_error"] = m.phys.trace_error;
  j["min_eigenvalue"] = m.phys.min_eigenvalue;
  return j;
}

SteadyStateResult steady_run(const ScenarioConfig& c) {
  return steady_state(make_problem(spec_of(c), c.drive, c.tier, c.truncation, 0.0, {}));
}

void run_steady(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const SteadyStateResult ss = steady_run(c);
  write_json(ctx.file("steady.json"), steady_json(c, ss));
  write_json(ctx.file("steady_state.json"), to_json(partial_trace(ss.state(), c.probe_sites)));
}

void write_bound_table(const std::filesystem::path& path, const WitnessReport& rep) {
  CsvWriter w(path, {"k_minus_1", "delta_b", "ambiguity"});
  for (std::size_t s = 0; s < rep.bounds.size(); ++s) {
    const int flag = std::find(rep.ambiguity_flags.begin(), rep.ambiguity_flags.end(), static_cast<int>(s + 1)) !=
                     rep.ambiguity_flags.end();
    w.cell(static_cast<int>(s + 1)).cell(rep.bounds[s]).cell(flag).end_row();
  }
}

void run_witness(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const SteadyStateResult ss = steady_run(c);
  const QuantumState red = partial_trace(ss.state(), c.probe_sites);
  const WProjectorBasis basis(register_depth_for(std::max<int>(2, static_cast<int>(c.probe_sites.size()))));
  const WitnessReport rep = certify(red, basis);
  write_json(ctx.file("witness.json"), to_json(rep));
  write_bound_table(ctx.file("boundary.csv"), rep);
  const VarianceBound vb = variance_bound(red);
  ctx.extra["variance_bound"] = {{"coherence_form", vb.coherence_form},
                                 {"transverse_form", vb.transverse_form},
                                 {"mean_coherence", vb.mean_coherence},
                                 {"holds", vb.holds}};
}

void run_darkscan(RunContext& ctx) {
  const auto& c = ctx.cfg;
  CsvWriter w(ctx.file("darkscan.csv"), {"n", "xi", "n_dark", "dark_energy_over_j", "max_boundary_amplitude",
                                         "family", "pattern_match"});
  for (double xi : c.xi_list) {
    DriveConfig d = DriveConfig::with_reservoir(c.n_sites, 100.0, {0, c.n_sites - 1});
    const LatticeSpec spec = lattice_for_drive(c.n_sites, c.a0, xi, d, c.p);
    std::string fam = "none";
    double energy = std::nan("");
    int match = 0;
    DarkScanResult r;
    try {
      const EffectiveModel m = build_effective_model(spec, d, Truncation::next_nearest);
      r = find_dark_states(hxy_matrix_n1(m) / m.j_scale(), {0, c.n_sites - 1});
      if (!r.dark_states.empty()) {
        energy = r.dark_energies.front();
        if (r.dark_family.front()) {
          fam = to_string(*r.dark_family.front());
          match = 1;
        }
      }
    } catch (const ModelValidityError&) {
      fam = "pole";
    }
    w.cell(c.n_sites).cell(xi).cell(static_cast<int>(r.dark_states.size())).cell(energy);
    w.cell(r.max_boundary_amplitude).cell(fam).cell(match).end_row();
  }
}

void write_scaling(const std::filesystem::path& path, const std::vector<ScalingRow>& rows) {
  CsvWriter w(path, {"n", "xi", "rule", "family", "n_dark", "k", "k_model", "n_a", "delta", "k_m", "pattern_match",
                     "ambiguity_count"});
  for (const auto& r : rows) {
    w.cell(r.n).cell(r.xi).cell(to_string(r.rule)).cell(r.family ? to_string(*r.family) : std::string("none"));
    w.cell(r.n_dark).cell(r.k).cell(r.k_model).cell(r.n_a).cell(r.delta).cell(r.k_m);
    w.cell(static_cast<int>(r.pattern_match)).cell(static_cast<int>(r.ambiguity_flags.size())).end_row();
  }
}

std::vector<ScalingRow> scan_all_rules(const ScenarioConfig& c) {
  std::vector<ScalingRow> rows;
  for (ReservoirRule rule : c.rules) {
    auto part = scaling_scan(c.n_list, c.xi, rule, c.workers);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

void run_scaling(RunContext& ctx) { write_scaling(ctx.file("scaling.csv"), scan_all_rules(ctx.cfg)); }

void run_bloch(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const long steps = static_cast<long>(std::ceil(c.bloch_t_final / c.bloch_dt));
  const int every = static_cast<int>(std::max(1L, steps / 2000));
  const auto samples = integrate_bloch(c.dressing, c.bloch_t_final, c.bloch_dt, every);
  CsvWriter w(ctx.file("bloch.csv"), {"t", "re_sigma_ge", "im_sigma_ge", "re_sigma_gr", "im_sigma_gr", "population"});
  for (const auto& s : samples) {
    w.cell(s.t).cell(s.sigma_ge.real()).cell(s.sigma_ge.imag()).cell(s.sigma_gr.real()).cell(s.sigma_gr.imag());
    w.cell(s.population).end_row();
  }
  const double fitted = fit_decay_rate(samples);
  const double closed = effective_decay_rate(c.dressing);
  write_json(ctx.file("bloch_fit.json"), {{"fitted_rate", fitted},
                                          {"effective_decay_rate", closed},
                                          {"relative_error", std::abs(fitted - closed) / closed}});
}

void run_fig2a(RunContext& ctx) {
  const auto& c = ctx.cfg;
  CsvWriter w(ctx.file("fig2a.csv"), {"xi", "a0", "fidelity", "delta", "y_c", "tier"});
  for (double xi : c.xi_list) {
    for (double a0 : c.a0_list) {
      ScenarioConfig pt = c;
      pt.xi = xi;
      pt.a0 = a0;
      double f = std::nan(""), d = std::nan(""), y = std::nan("");
      try {
        const SteadyStateResult ss = steady_run(pt);
        const SampleMetrics m = Analyzer(pt, ss.basis)(0.0, ss.rho);
        f = m.fidelity;
        d = m.delta;
        y = opt_or_nan(m.y_c);
      } catch (const ModelValidityError& e) {
        ctx.log << "fig2a: xi=" << xi << " a0=" << a0 << " skipped: " << e.what() << '\n';
      }
      w.cell(xi).cell(a0).cell(f).cell(d).cell(y).cell(to_string(c.tier)).end_row();
    }
  }
}

void run_fig2b(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const MasterResult r = master_run(c, c.t_final, uniform_samples(c.t_final, c.samples));
  write_timeseries(ctx.file("fig2b.csv"), analyze_master(c, r));
}

void run_fig3(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const auto samples = uniform_samples(c.t_final, c.samples);
  const EvolutionProblem p = make_problem(spec_of(c), c.drive, c.tier, c.truncation, c.t_final, samples);
  const MasterResult r = evolve_master(p, initial_rho(c, p.basis));
  const auto rows = analyze_master(c, r);
  write_timeseries(ctx.file("fig3_master.csv"), rows);

  TrajectoryOptions opt;
  opt.dt = c.dt;
  opt.workers = c.workers;
  opt.keep_states = false;
  const TrajectoryEnsemble e = evolve_trajectories(p, initial_psi(c, p.basis), c.n_traj, c.seed, opt);
  write_timeseries(ctx.file("fig3_trajectories.csv"), analyze_ensemble(c, e));
  double worst = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) worst = std::max(worst, trace_distance(e.mean_rho[k], r.rho[k]));
  json ens = ensemble_metadata(c, e);
  ens["max_trace_distance_to_master"] = worst;
  write_json(ctx.file("fig3_ensemble.json"), ens);

  const Analyzer an(c, p.basis);
  const WProjectorBasis& wb = an.w_basis();
  std::vector<double> t, d;
  std::vector<std::optional<double>> y;
  for (const auto& m : rows) {
    t.push_back(m.t);
    d.push_back(m.delta);
    y.push_back(m.y_c);
  }
  json cross = json::object();
  for (int s = 1; s < wb.register_size(); ++s) {
    const auto tc = stable_crossing_time(t, d, y, s, wb);
    cross["t" + std::to_string(s + 1)] = tc ? json(*tc) : json(nullptr);
  }
  write_json(ctx.file("fig3_crossings.json"), cross);

  std::vector<std::string> header{"y_c"};
  for (int s = 1; s < wb.register_size(); ++s) header.push_back("delta_b" + std::to_string(s));
  CsvWriter b(ctx.file("fig3_boundaries.csv"), header);
  for (int k = 0; k <= 120; ++k) {
    const double yc = std::pow(10.0, -6.0 + 7.0 * k / 120.0);
    b.cell(yc);
    for (int s = 1; s < wb.register_size(); ++s) b.cell(bound_delta(s, wb, yc));
    b.end_row();
  }
  write_json(ctx.file("fig3_steady.json"), steady_json(c, steady_state(p)));
}

void run_fig4(RunContext& ctx) {
  const auto& c = ctx.cfg;
  const auto rows = scan_all_rules(c);
  write_scaling(ctx.file("fig4.csv"), rows);
  const int n_max = *std::max_element(c.n_list.begin(), c.n_list.end());
  const int n_m = 1 << register_depth_for(std::max(2, n_max));
  CsvWriter w(ctx.file("fig4_bounds.csv"), {"n_m", "k_minus_1", "delta_b", "ambiguity"});
  for (int s = 1; s <= n_m; ++s) {
    const double b = bound_delta_pure(s, n_m);
    const int flag = s < n_m && b < bound_delta_pure(s + 1, n_m);
    w.cell(n_m).cell(s).cell(b).cell(flag).end_row();
  }
  json best = json::array();
  for (const auto& r : rows) {
    if (r.k_m >= 100) best.push_back({{"n", r.n}, {"rule", to_string(r.rule)}, {"k_m", r.k_m}});
  }
  ctx.extra["hectapartite_rows"] = best;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

void run_scenario(const ScenarioConfig& cfg, std::ostream& log) {
  std::filesystem::create_directories(cfg.output);
  const auto start = std::chrono::steady_clock::now();
  RunContext ctx{cfg, log, {}};
  const std::string& s = cfg.scenario;
  if (s == "spectrum") run_spectrum(ctx);
  else if (s == "effective") run_effective(ctx);
  else if (s == "evolve") run_evolve(ctx);
  else if (s == "trajectory") run_trajectory(ctx);
  else if (s == "steady") run_steady(ctx);
  else if (s == "witness") run_witness(ctx);
  else if (s == "darkscan") run_darkscan(ctx);
  else if (s == "scaling") run_scaling(ctx);
  else if (s == "bloch") run_bloch(ctx);
  else if (s == "fig2a") run_fig2a(ctx);
  else if (s == "fig2b") run_fig2b(ctx);
  else if (s == "fig3") run_fig3(ctx);
  else if (s == "fig4") run_fig4(ctx);
  else throw ConfigError("scenario", "unknown scenario '" + s + "'");
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  // The hash covers what determines the numbers, not where they are written.
  json hashed = cfg.normalized;
  hashed.erase("output");
  hashed.erase("workers");
  std::ostringstream hash;
  hash << std::hex << std::setw(16) << std::setfill('0') << fnv1a(hashed.dump());
  json manifest{{"scenario", s},         {"version", kVersion},       {"config_hash", "fnv1a64:" + hash.str()},
                {"config", cfg.normalized}, {"outputs", ctx.outputs}, {"wall_time_s", wall}};
  if (!ctx.extra.empty()) manifest["results"] = ctx.extra;
  write_json(cfg.output / "manifest.json", manifest);
  log << s << ": wrote " << ctx.outputs.size() << " files to " << cfg.output.string() << " in " << wall << " s\n";
}

int run_cli(const std::filesystem::path& config, const RunOverrides& overrides, bool validate_only, std::ostream& out,
            std::ostream& err) {
  try {
    const ScenarioConfig cfg = validate_config_file(config, overrides);
    if (validate_only) {
      out << cfg.normalized.dump(2) << '\n';
      return kExitOk;
    }
    run_scenario(cfg, out);
    return kExitOk;
  } catch (const ConfigValidationError& e) {
    err << e.to_json().dump(2) << '\n';
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << json{{"status", "error"}, {"code", kExitConfig}, {"errors", {{{"field", e.field()}, {"message", e.message()}}}}}
               .dump(2)
        << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << json{{"status", "error"}, {"code", kExitNumerical}, {"message", e.what()}}.dump(2) << '\n';
    return kExitNumerical;
  }
}

}  // namespace ryd
