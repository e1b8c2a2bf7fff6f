#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "combgate/config.hpp"
#include "combgate/error_budget.hpp"
#include "combgate/gate_compiler.hpp"
#include "combgate/lindblad.hpp"
#include "combgate/phase_profile.hpp"

namespace combgate {

/// Library objects built once from a config and shared read-only by every mode.
struct Context {
  explicit Context(const ExperimentConfig& cfg);

  ExperimentConfig config;
  LevelScheme scheme;
  CombConfig comb;
  ChainGeometry geometry;
  QubitLevels qubit;
  ElectronicModel model;
  StarkPhaseModel phases;
};

GatePlan compile_plan(const Context& ctx);
nlohmann::json plan_to_json(const GatePlan& plan);
void write_chain_csv(const std::vector<IonPhase>& report, std::ostream& out);
nlohmann::json budget_to_json(const ErrorBudget& b);

PhaseProfile run_profile(const Context& ctx);

struct SimulationReport {
  double x0 = 0.0;  // ion position, m
  int n_pairs = 0;
  double phase = 0.0;           // Arg <1,0|rho|0,0>
  double phase_analytic = 0.0;  // 2 N dtheta(x0), wrapped into (-pi, pi]
  double phonon_analytic = 0.0;
  Diagnostics diag;
  double min_eigenvalue = 0.0;
  double seconds = 0.0;
};

/// Open-system run for the target ion displaced by `offset` from the overlap,
/// starting from (|0> + |1>)/sqrt2 with every mode in its ground state.
SimulationReport run_simulation(const Context& ctx, const GatePlan& plan, double offset);

/// Independent simulations over the configured offset grid, merged in grid order.
std::vector<SimulationReport> run_sweep(const Context& ctx, const GatePlan& plan);

/// x0_m, phase_rad, phase_analytic_rad, phonon_prob, phonon_prob_analytic, nonqubit_pop, trace_deficit.
void write_sweep_csv(const std::vector<SimulationReport>& rows, std::ostream& out);
nlohmann::json simulation_to_json(const SimulationReport& r, const LevelScheme& scheme);

struct RunSummary {
  std::string mode;
  std::vector<std::string> outputs;  // file names inside the output directory
  double wall_time_s = 0.0;
};

/// Runs cfg.run.mode and writes its files plus manifest.json into cfg.run.output_dir.
RunSummary run_experiment(const ExperimentConfig& cfg);

}  // namespace combgate
