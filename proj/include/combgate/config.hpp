#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "combgate/comb_field.hpp"
#include "combgate/gate_compiler.hpp"
#include "combgate/level_scheme.hpp"
#include "combgate/lindblad.hpp"

namespace combgate {

/// Everything a run needs. Keys carry their units; omitted keys take the defaults
/// below (Ca-40+, 1000 nm / 20 fs / 100 MHz combs, 600 kHz trap, two ions 10 um apart).
/// The grammar is described in docs/config_format.md.
struct ExperimentConfig {
  struct Scheme {
    std::string file;  // empty: bundled Ca-40+ data
    double zeeman_mhz = kDefaultZeemanHz * 1e-6;
    std::string qubit0 = "S1/2:-1/2";
    std::string qubit1 = "D5/2:-1/2";
  } scheme;

  struct Comb {
    double wavelength_nm = 1000.0;
    double pulse_duration_fs = 20.0;
    double rep_rate_mhz = 100.0;
    double field_rabi_thz = 4.405;
    std::vector<double> polarization{0.0, 0.0, 1.0};
    double cep_rad = 0.0;
  } comb;

  struct Trap {
    double axial_khz = 600.0;
    std::optional<double> lamb_dicke = 0.09;  // nullopt: computed from mass and axial frequency
    std::vector<double> ion_positions_um{0.0, 10.0};
    std::string modes = "single";  // single: one shared mode; chain: Coulomb chain normal modes
  } trap;

  struct Gate {
    std::string axis = "Z";
    double angle_rad = 1.5707963267948966;
    std::size_t target = 0;
    double calibrate_phase_per_pair_rad = 0.0;
    bool fractional_calibration = false;
  } gate;

  struct Budget {
    double pointing_offset_nm = 30.0;
  } budget;

  struct Simulation {
    int fock_cutoff = 5;
    double rel_tol = 1e-10;
    double abs_tol = 1e-13;
    std::string motion = "lamb_dicke";  // lamb_dicke | exact
    int n_pairs = 200;                  // 0: the compiled pulse count
    double offset_nm = 0.0;             // ion displacement from the overlap
    bool decay = true;
    double max_state_mb = 1000.0;
    int checkpoint_every = 50;
  } simulation;

  struct Run {
    std::string mode = "budget";  // profile | compile | budget | simulate | sweep
    std::string output_dir = "out";
    unsigned workers = 0;
    double profile_half_width_um = 3.0;
    int profile_points = 2001;
    double sweep_half_width_nm = 100.0;
    int sweep_points = 21;
  } run;

  /// Throws ConfigError on the first violated constraint.
  void validate() const;
};

/// JSON text, comments allowed. Unknown keys are rejected.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>",
                              const std::vector<std::string>& overrides = {});
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Applies "a.b.c=value"; value is read as JSON when it parses, else as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Canonical text: every key, fixed order, 17 significant digits.
std::string serialize_config(const ExperimentConfig& cfg);
/// 64-bit FNV-1a of the canonical text.
std::uint64_t config_hash(const ExperimentConfig& cfg);

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

// Builders for the library types.
LevelScheme make_scheme(const ExperimentConfig& cfg);
CombConfig make_comb(const ExperimentConfig& cfg);
ChainGeometry make_geometry(const ExperimentConfig& cfg, const LevelScheme& scheme);
QubitLevels make_qubit(const ExperimentConfig& cfg, const LevelScheme& scheme);
SimOptions make_sim_options(const ExperimentConfig& cfg);

}  // namespace combgate
