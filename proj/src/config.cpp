#include "combgate/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "combgate/constants.hpp"
#include "combgate/errors.hpp"

namespace combgate {

using nlohmann::json;

namespace {

// Reads the keys of one section, complaining about anything left over.
class Section {
 public:
  Section(const json& doc, const std::string& name) : name_(name) {
    if (!doc.contains(name)) return;
    node_ = &doc.at(name);
    if (!node_->is_object()) throw ConfigError("config: section '" + name + "' must be an object");
  }

  template <class T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!node_ || !node_->contains(key)) return;
    try {
      out = node_->at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config: " + name_ + "." + key + " has the wrong type");
    }
  }

  void get_number(const std::string& key, double& out) {
    seen_.insert(key);
    if (!node_ || !node_->contains(key)) return;
    const json& v = node_->at(key);
    if (!v.is_number()) throw ConfigError("config: " + name_ + "." + key + " must be a number");
    out = v.get<double>();
    if (!std::isfinite(out)) throw ConfigError("config: " + name_ + "." + key + " is not finite");
  }

  void get_count(const std::string& key, int& out) {
    seen_.insert(key);
    if (!node_ || !node_->contains(key)) return;
    const json& v = node_->at(key);
    if (!v.is_number_integer()) throw ConfigError("config: " + name_ + "." + key + " must be an integer");
    out = v.get<int>();
  }

  const json* raw(const std::string& key) {
    seen_.insert(key);
    if (!node_ || !node_->contains(key)) return nullptr;
    return &node_->at(key);
  }

  void finish() const {
    if (!node_) return;
    for (auto it = node_->begin(); it != node_->end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError("config: unknown key " + name_ + "." + it.key());
  }

 private:
  std::string name_;
  const json* node_ = nullptr;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("config: " + what);
}

ExperimentConfig from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  static const std::set<std::string> sections{"scheme", "comb", "trap", "gate", "budget", "simulation", "run"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!sections.count(it.key())) throw ConfigError("config: unknown section '" + it.key() + "'");

  ExperimentConfig c;
  {
    Section s(doc, "scheme");
    s.get("file", c.scheme.file);
    s.get_number("zeeman_mhz", c.scheme.zeeman_mhz);
    s.get("qubit0", c.scheme.qubit0);
    s.get("qubit1", c.scheme.qubit1);
    s.finish();
  }
  {
    Section s(doc, "comb");
    s.get_number("wavelength_nm", c.comb.wavelength_nm);
    s.get_number("pulse_duration_fs", c.comb.pulse_duration_fs);
    s.get_number("rep_rate_mhz", c.comb.rep_rate_mhz);
    s.get_number("field_rabi_thz", c.comb.field_rabi_thz);
    s.get("polarization", c.comb.polarization);
    if (const json* p2 = s.raw("polarization2")) {
      std::vector<double> u2;
      try {
        u2 = p2->get<std::vector<double>>();
      } catch (const json::exception&) {
        throw ConfigError("config: comb.polarization2 must be a list of numbers");
      }
      if (u2 != c.comb.polarization)
        throw ConfigError("config: the two combs must share one polarization (comb.polarization2 differs)");
    }
    s.get_number("cep_rad", c.comb.cep_rad);
    s.finish();
  }
  {
    Section s(doc, "trap");
    s.get_number("axial_khz", c.trap.axial_khz);
    if (const json* ld = s.raw("lamb_dicke")) {
      if (ld->is_string() && ld->get<std::string>() == "auto")
        c.trap.lamb_dicke.reset();
      else if (ld->is_number())
        c.trap.lamb_dicke = ld->get<double>();
      else
        throw ConfigError("config: trap.lamb_dicke must be a number or \"auto\"");
    }
    s.get("ion_positions_um", c.trap.ion_positions_um);
    s.get("modes", c.trap.modes);
    s.finish();
  }
  {
    Section s(doc, "gate");
    s.get("axis", c.gate.axis);
    s.get_number("angle_rad", c.gate.angle_rad);
    int target = static_cast<int>(c.gate.target);
    s.get_count("target", target);
    require(target >= 0, "gate.target must be nonnegative");
    c.gate.target = static_cast<std::size_t>(target);
    s.get_number("calibrate_phase_per_pair_rad", c.gate.calibrate_phase_per_pair_rad);
    s.get("fractional_calibration", c.gate.fractional_calibration);
    s.finish();
  }
  {
    Section s(doc, "budget");
    s.get_number("pointing_offset_nm", c.budget.pointing_offset_nm);
    s.finish();
  }
  {
    Section s(doc, "simulation");
    s.get_count("fock_cutoff", c.simulation.fock_cutoff);
    s.get_number("rel_tol", c.simulation.rel_tol);
    s.get_number("abs_tol", c.simulation.abs_tol);
    s.get("motion", c.simulation.motion);
    s.get_count("n_pairs", c.simulation.n_pairs);
    s.get_number("offset_nm", c.simulation.offset_nm);
    s.get("decay", c.simulation.decay);
    s.get_number("max_state_mb", c.simulation.max_state_mb);
    s.get_count("checkpoint_every", c.simulation.checkpoint_every);
    s.finish();
  }
  {
    Section s(doc, "run");
    s.get("mode", c.run.mode);
    s.get("output_dir", c.run.output_dir);
    int workers = static_cast<int>(c.run.workers);
    s.get_count("workers", workers);
    require(workers >= 0, "run.workers must be nonnegative");
    c.run.workers = static_cast<unsigned>(workers);
    s.get_number("profile_half_width_um", c.run.profile_half_width_um);
    s.get_count("profile_points", c.run.profile_points);
    s.get_number("sweep_half_width_nm", c.run.sweep_half_width_nm);
    s.get_count("sweep_points", c.run.sweep_points);
    s.finish();
  }
  c.validate();
  return c;
}

}  // namespace

void ExperimentConfig::validate() const {
  require(scheme.zeeman_mhz >= 0.0, "scheme.zeeman_mhz must be nonnegative");
  if (!scheme.file.empty()) {
    std::ifstream f(scheme.file);
    require(static_cast<bool>(f), "scheme.file '" + scheme.file + "' cannot be opened");
  }
  require(comb.wavelength_nm > 0.0, "comb.wavelength_nm must be positive");
  require(comb.pulse_duration_fs > 0.0, "comb.pulse_duration_fs must be positive");
  require(comb.rep_rate_mhz > 0.0, "comb.rep_rate_mhz must be positive");
  require(comb.field_rabi_thz >= 0.0, "comb.field_rabi_thz must be nonnegative");
  require(comb.polarization.size() == 3, "comb.polarization needs three components");
  const double un = std::sqrt(comb.polarization[0] * comb.polarization[0] +
                              comb.polarization[1] * comb.polarization[1] +
                              comb.polarization[2] * comb.polarization[2]);
  require(std::abs(un - 1.0) < 1e-12, "comb.polarization must be a unit vector");
  require(trap.axial_khz > 0.0, "trap.axial_khz must be positive");
  require(!trap.lamb_dicke || *trap.lamb_dicke > 0.0, "trap.lamb_dicke must be positive");
  require(!trap.ion_positions_um.empty(), "trap.ion_positions_um must list at least one ion");
  for (std::size_t i = 1; i < trap.ion_positions_um.size(); ++i)
    require(trap.ion_positions_um[i] > trap.ion_positions_um[i - 1], "trap.ion_positions_um must increase");
  require(trap.modes == "single" || trap.modes == "chain", "trap.modes must be single or chain");
  try {
    parse_axis(gate.axis);
  } catch (const std::exception&) {
    throw ConfigError("config: gate.axis must be X, Y or Z");
  }
  require(gate.angle_rad >= 0.0, "gate.angle_rad must be nonnegative");
  require(gate.target < trap.ion_positions_um.size(), "gate.target is not an ion index");
  require(gate.calibrate_phase_per_pair_rad >= 0.0, "gate.calibrate_phase_per_pair_rad must be nonnegative");
  require(budget.pointing_offset_nm >= 0.0, "budget.pointing_offset_nm must be nonnegative");
  require(simulation.fock_cutoff >= 1, "simulation.fock_cutoff must be at least 1");
  require(simulation.rel_tol > 0.0 && simulation.abs_tol > 0.0, "simulation tolerances must be positive");
  require(simulation.motion == "lamb_dicke" || simulation.motion == "exact",
          "simulation.motion must be lamb_dicke or exact");
  require(simulation.n_pairs >= 0, "simulation.n_pairs must be nonnegative");
  require(simulation.max_state_mb > 0.0, "simulation.max_state_mb must be positive");
  require(simulation.checkpoint_every >= 0, "simulation.checkpoint_every must be nonnegative");
  static const std::set<std::string> modes{"profile", "compile", "budget", "simulate", "sweep"};
  require(modes.count(run.mode) > 0, "run.mode must be one of profile, compile, budget, simulate, sweep");
  require(!run.output_dir.empty(), "run.output_dir must not be empty");
  require(run.profile_half_width_um > 0.0 && run.profile_points >= 2, "profile grid needs a width and two points");
  require(run.sweep_half_width_nm > 0.0 && run.sweep_points >= 2, "sweep grid needs a width and two points");
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception&) {
    value = text;
  }
  json* node = &doc;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) {
    if (part.empty()) throw ConfigError("override '" + assignment + "' has an empty key");
    parts.push_back(part);
  }
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->is_object()) throw ConfigError("override '" + assignment + "' descends into a value");
    node = &(*node)[parts[i]];
    if (node->is_null()) *node = json::object();
  }
  if (!node->is_object()) throw ConfigError("override '" + assignment + "' descends into a value");
  (*node)[parts.back()] = value;
}

ExperimentConfig parse_config(const std::string& text, const std::string& source,
                              const std::vector<std::string>& overrides) {
  json doc;
  const bool blank = text.find_first_not_of(" \t\r\n") == std::string::npos;
  if (blank) {
    doc = json::object();
  } else {
    try {
      doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
      throw ConfigError(source + ": " + e.what());
    }
  }
  for (const auto& o : overrides) apply_override(doc, o);
  try {
    return from_json(doc);
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path, overrides);
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["scheme"] = {{"file", c.scheme.file},
                 {"zeeman_mhz", c.scheme.zeeman_mhz},
                 {"qubit0", c.scheme.qubit0},
                 {"qubit1", c.scheme.qubit1}};
  j["comb"] = {{"wavelength_nm", c.comb.wavelength_nm},
               {"pulse_duration_fs", c.comb.pulse_duration_fs},
               {"rep_rate_mhz", c.comb.rep_rate_mhz},
               {"field_rabi_thz", c.comb.field_rabi_thz},
               {"polarization", c.comb.polarization},
               {"cep_rad", c.comb.cep_rad}};
  j["trap"] = {{"axial_khz", c.trap.axial_khz},
               {"ion_positions_um", c.trap.ion_positions_um},
               {"modes", c.trap.modes}};
  if (c.trap.lamb_dicke)
    j["trap"]["lamb_dicke"] = *c.trap.lamb_dicke;
  else
    j["trap"]["lamb_dicke"] = "auto";
  j["gate"] = {{"axis", c.gate.axis},
               {"angle_rad", c.gate.angle_rad},
               {"target", c.gate.target},
               {"calibrate_phase_per_pair_rad", c.gate.calibrate_phase_per_pair_rad},
               {"fractional_calibration", c.gate.fractional_calibration}};
  j["budget"] = {{"pointing_offset_nm", c.budget.pointing_offset_nm}};
  j["simulation"] = {{"fock_cutoff", c.simulation.fock_cutoff},
                     {"rel_tol", c.simulation.rel_tol},
                     {"abs_tol", c.simulation.abs_tol},
                     {"motion", c.simulation.motion},
                     {"n_pairs", c.simulation.n_pairs},
                     {"offset_nm", c.simulation.offset_nm},
                     {"decay", c.simulation.decay},
                     {"max_state_mb", c.simulation.max_state_mb},
                     {"checkpoint_every", c.simulation.checkpoint_every}};
  j["run"] = {{"mode", c.run.mode},
              {"output_dir", c.run.output_dir},
              {"workers", c.run.workers},
              {"profile_half_width_um", c.run.profile_half_width_um},
              {"profile_points", c.run.profile_points},
              {"sweep_half_width_nm", c.run.sweep_half_width_nm},
              {"sweep_points", c.run.sweep_points}};
  return j;
}

std::string serialize_config(const ExperimentConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : serialize_config(cfg)) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return serialize_config(a) == serialize_config(b);
}

LevelScheme make_scheme(const ExperimentConfig& cfg) {
  const std::string path = cfg.scheme.file.empty() ? bundled_scheme_path() : cfg.scheme.file;
  return load_level_scheme(path, cfg.scheme.zeeman_mhz * 1e6);
}

CombConfig make_comb(const ExperimentConfig& cfg) {
  CombConfig c;
  c.wavelength_m = cfg.comb.wavelength_nm * 1e-9;
  c.tau_s = cfg.comb.pulse_duration_fs * 1e-15;
  c.rep_rate_hz = cfg.comb.rep_rate_mhz * 1e6;
  c.field_rabi = cfg.comb.field_rabi_thz * 1e12;
  c.polarization = Eigen::Vector3d(cfg.comb.polarization[0], cfg.comb.polarization[1], cfg.comb.polarization[2]);
  c.cep_rad = cfg.comb.cep_rad;
  c.validate();
  return c;
}

ChainGeometry make_geometry(const ExperimentConfig& cfg, const LevelScheme& scheme) {
  const double w = constants::two_pi * cfg.trap.axial_khz * 1e3;
  const double kc = make_comb(cfg).k_c();
  const std::size_t n = cfg.trap.ion_positions_um.size();
  ChainGeometry g;
  if (cfg.trap.modes == "chain") {
    if (cfg.trap.lamb_dicke)
      throw ConfigError("config: trap.modes = chain derives the Lamb-Dicke factors; set trap.lamb_dicke to \"auto\"");
    g = harmonic_chain(n, w, scheme.mass_kg(), kc);
  } else {
    const double eta = cfg.trap.lamb_dicke ? *cfg.trap.lamb_dicke : lamb_dicke(w, scheme.mass_kg(), kc);
    for (double x : cfg.trap.ion_positions_um) g.positions.push_back(x * 1e-6);
    g.mode_omega = {w};
    g.eta = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n), 1, eta);
  }
  g.validate();
  return g;
}

QubitLevels make_qubit(const ExperimentConfig& cfg, const LevelScheme& scheme) {
  QubitLevels q{scheme.find(cfg.scheme.qubit0), scheme.find(cfg.scheme.qubit1)};
  if (q.level0 == q.level1) throw ConfigError("config: the two qubit levels coincide");
  return q;
}

SimOptions make_sim_options(const ExperimentConfig& cfg) {
  SimOptions o;
  o.fock_cutoff = cfg.simulation.fock_cutoff;
  o.rel_tol = cfg.simulation.rel_tol;
  o.abs_tol = cfg.simulation.abs_tol;
  o.coupling = cfg.simulation.motion == "exact" ? MotionCoupling::Exact : MotionCoupling::LambDicke;
  o.decay = cfg.simulation.decay;
  o.max_state_bytes = cfg.simulation.max_state_mb * 1e6;
  o.checkpoint_every = cfg.simulation.checkpoint_every;
  return o;
}

}  // namespace combgate
