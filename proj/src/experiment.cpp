#include "combgate/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>

#include "combgate/constants.hpp"
#include "combgate/errors.hpp"
#include "combgate/parallel.hpp"

namespace combgate {

using nlohmann::json;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double wrap(double phi) { return std::remainder(phi, constants::two_pi); }

const char* kind_name(GateStep::Kind k) { return k == GateStep::Kind::Train ? "train" : "global"; }

}  // namespace

Context::Context(const ExperimentConfig& cfg)
    : config(cfg),
      scheme(make_scheme(cfg)),
      comb(make_comb(cfg)),
      geometry(make_geometry(cfg, scheme)),
      qubit(make_qubit(cfg, scheme)),
      model(ElectronicModel::from(scheme, comb.polarization)),
      phases(model, comb, qubit) {}

GatePlan compile_plan(const Context& ctx) {
  CompileOptions opt;
  opt.calibrate_phase_per_pair = ctx.config.gate.calibrate_phase_per_pair_rad;
  opt.fractional_calibration = ctx.config.gate.fractional_calibration;
  return compile_rotation(parse_axis(ctx.config.gate.axis), ctx.config.gate.angle_rad,
                          ctx.config.gate.target, ctx.phases, ctx.geometry, opt);
}

json plan_to_json(const GatePlan& p) {
  json steps = json::array();
  for (const auto& s : p.steps) {
    json j{{"kind", kind_name(s.kind)}};
    if (s.kind == GateStep::Kind::Train) {
      j["n_pulses"] = p.n_pulses;
    } else {
      j["axis"] = axis_name(s.axis);
      j["angle_rad"] = s.angle;
    }
    steps.push_back(j);
  }
  return json{{"target", p.target},
              {"axis", axis_name(p.axis)},
              {"theta_rad", p.theta},
              {"delay_fs", p.delay * 1e15},
              {"t1_fs", p.comb.t1_s * 1e15},
              {"t2_fs", p.comb.t2_s * 1e15},
              {"n_pulses", p.n_pulses},
              {"duration_us", p.duration() * 1e6},
              {"dtheta_target_rad", p.dtheta_target},
              {"dtheta_far_rad", p.dtheta_far},
              {"residual_angle_rad", p.residual_angle},
              {"field_scale", p.field_scale},
              {"field_rabi_thz", p.comb.field_rabi * 1e-12},
              {"compensation_rad", p.compensation},
              {"steps", steps},
              {"predicted_residual_rad", p.predicted_residual}};
}

void write_chain_csv(const std::vector<IonPhase>& report, std::ostream& out) {
  out << "ion,x_m,train_angle_rad,net_angle_rad,residual_rad,crosstalk_bound_rad,crosstalk_infidelity\n";
  for (const auto& r : report)
    out << r.ion << ',' << num(r.x) << ',' << num(r.train_angle) << ',' << num(r.net_angle) << ','
        << num(r.residual) << ',' << num(r.crosstalk_bound) << ',' << num(r.crosstalk_infidelity) << '\n';
}

json budget_to_json(const ErrorBudget& b) {
  return json{{"crosstalk", b.crosstalk},
              {"photon_scattering", b.photon_scattering},
              {"zeeman_leakage", b.zeeman_leakage},
              {"fine_structure_leakage", b.fine_structure_leakage},
              {"phonon_excitation", b.phonon_excitation},
              {"total", b.total},
              {"zeeman_from_y", b.zeeman_from_y},
              {"phonon_exact", b.phonon_exact},
              {"fine_structure_exact", b.fine_structure_exact},
              {"fine_structure_k", b.fine_structure_k},
              {"fine_structure_dk", b.fine_structure_dk},
              {"scattering_per_pulse", b.scattering_per_pulse},
              {"notes", b.notes}};
}

PhaseProfile run_profile(const Context& ctx) {
  const double x_tg = ctx.geometry.positions[ctx.config.gate.target];
  CombConfig cfg = ctx.comb;
  cfg.aim_at(x_tg);
  const auto grid = position_grid(x_tg, ctx.config.run.profile_half_width_um * 1e-6, ctx.config.run.profile_points);
  return phase_shift_profile(ctx.model, cfg, ctx.qubit, grid, ctx.phases.quad(), ctx.config.run.workers);
}

SimulationReport run_simulation(const Context& ctx, const GatePlan& plan, double offset) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t ion = plan.target;
  ChainGeometry g = ctx.geometry;
  g.positions[ion] += offset;
  g.validate();

  SimulationReport r;
  r.x0 = g.positions[ion];
  r.n_pairs = ctx.config.simulation.n_pairs > 0 ? ctx.config.simulation.n_pairs : plan.n_pulses;
  if (r.n_pairs == 0) throw ConfigError("simulation: nothing to simulate (zero pulse pairs)");

  TrainSimulator sim(ctx.scheme, plan.comb, g, ion, make_sim_options(ctx.config));
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(ctx.scheme.size()));
  e[static_cast<Eigen::Index>(ctx.qubit.level0)] = e[static_cast<Eigen::Index>(ctx.qubit.level1)] = 1.0 / std::sqrt(2.0);
  const SimState fin = sim.evolve(sim.initial_state(e), r.n_pairs);
  r.phase = extract_phase(fin, ctx.qubit);
  r.diag = diagnostics(fin, ctx.qubit);
  r.min_eigenvalue = fin.min_eigenvalue();

  const StarkPhaseModel ph(ctx.model, plan.comb, ctx.qubit, ctx.phases.quad());
  r.phase_analytic = wrap(2.0 * r.n_pairs * ph.differential(r.x0));
  const double T = plan.comb.period();
  for (int a = 0; a < 2; ++a)
    r.phonon_analytic += 0.5 * phonon_excitation_probability(ph.level_derivative(a, r.x0), g, ion,
                                                             r.n_pairs * T, T, plan.comb.k_c()).exact;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<SimulationReport> run_sweep(const Context& ctx, const GatePlan& plan) {
  const int n = ctx.config.run.sweep_points;
  const double h = ctx.config.run.sweep_half_width_nm * 1e-9;
  return parallel_map(
      static_cast<std::size_t>(n),
      [&](std::size_t i) { return run_simulation(ctx, plan, -h + 2.0 * h * static_cast<double>(i) / (n - 1)); },
      ctx.config.run.workers);
}

void write_sweep_csv(const std::vector<SimulationReport>& rows, std::ostream& out) {
  out << "x0_m,phase_rad,phase_analytic_rad,phonon_prob,phonon_prob_analytic,nonqubit_pop,trace_deficit\n";
  for (const auto& r : rows)
    out << num(r.x0) << ',' << num(r.phase) << ',' << num(r.phase_analytic) << ','
        << num(r.diag.phonon_excitation) << ',' << num(r.phonon_analytic) << ','
        << num(r.diag.nonqubit_population) << ',' << num(r.diag.trace_deficit) << '\n';
}

json simulation_to_json(const SimulationReport& r, const LevelScheme& scheme) {
  json pops = json::object();
  for (std::size_t a = 0; a < scheme.size(); ++a) {
    const auto& lv = scheme.levels()[a];
    pops[lv.label + ":" + lv.mJ.str()] = r.diag.populations[static_cast<Eigen::Index>(a)];
  }
  return json{{"x0_m", r.x0},
              {"n_pairs", r.n_pairs},
              {"phase_rad", r.phase},
              {"phase_analytic_rad", r.phase_analytic},
              {"relative_discrepancy", r.phase / r.phase_analytic - 1.0},
              {"phonon_prob", r.diag.phonon_excitation},
              {"phonon_prob_analytic", r.phonon_analytic},
              {"phonon_number", r.diag.phonon_number},
              {"fock_distribution", r.diag.fock_distribution},
              {"nonqubit_pop", r.diag.nonqubit_population},
              {"trace_deficit", r.diag.trace_deficit},
              {"min_eigenvalue", r.min_eigenvalue},
              {"populations", pops}};
}

RunSummary run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  namespace fs = std::filesystem;
  const fs::path dir(cfg.run.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + cfg.run.output_dir + "': " + ec.message());

  RunSummary sum;
  sum.mode = cfg.run.mode;
  auto emit = [&](const std::string& name, const std::function<void(std::ostream&)>& body) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + (dir / name).string() + "'");
    body(f);
    sum.outputs.push_back(name);
  };

  const Context ctx(cfg);
  const std::string& mode = cfg.run.mode;
  if (mode == "profile") {
    const PhaseProfile p = run_profile(ctx);
    emit("profile.csv", [&](std::ostream& o) { write_profile_csv(p, o); });
  } else {
    const GatePlan plan = compile_plan(ctx);
    emit("plan.json", [&](std::ostream& o) { o << plan_to_json(plan).dump(2) << '\n'; });
    if (mode == "compile") {
      const auto report = chain_phase_report(plan, ctx.phases, ctx.geometry);
      emit("chain.csv", [&](std::ostream& o) { write_chain_csv(report, o); });
    } else if (mode == "budget") {
      BudgetOptions bo;
      bo.pointing_offset = cfg.budget.pointing_offset_nm * 1e-9;
      bo.workers = cfg.run.workers;
      const ErrorBudget b = compute_budget(ctx.scheme, ctx.phases, plan, ctx.geometry, bo);
      emit("budget.txt", [&](std::ostream& o) { write_budget_table(b, o); });
      emit("budget.csv", [&](std::ostream& o) { write_budget_csv(b, o); });
      emit("budget.json", [&](std::ostream& o) { o << budget_to_json(b).dump(2) << '\n'; });
    } else if (mode == "simulate") {
      const SimulationReport r = run_simulation(ctx, plan, cfg.simulation.offset_nm * 1e-9);
      emit("simulation.json", [&](std::ostream& o) { o << simulation_to_json(r, ctx.scheme).dump(2) << '\n'; });
    } else if (mode == "sweep") {
      const auto rows = run_sweep(ctx, plan);
      emit("sweep.csv", [&](std::ostream& o) { write_sweep_csv(rows, o); });
    }
  }

  sum.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  char hash[20];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
  const json manifest{{"mode", mode},
                      {"version", COMBGATE_VERSION},
                      {"config_hash_fnv1a64", hash},
                      {"config", to_json(cfg)},
                      {"outputs", sum.outputs},
                      {"wall_time_s", sum.wall_time_s}};
  std::ofstream mf(dir / "manifest.json", std::ios::binary);
  if (!mf) throw ConfigError("cannot write manifest.json");
  mf << manifest.dump(2) << '\n';
  return sum;
}

}  // namespace combgate
