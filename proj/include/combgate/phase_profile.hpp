#pragma once

#include <cstddef>
#include <functional>
#include <ostream>
#include <vector>

#include "combgate/magnus.hpp"

namespace combgate {

/// The two levels carrying the qubit, |0> and |1>.
struct QubitLevels {
  std::size_t level0 = 0;
  std::size_t level1 = 0;
};

/// AC Stark phase per pulse pair on one level,
///   dtheta_a(x) = 4 \int_0^W dw/2pi |Eenv(w - wc)|^2 [1 + cos(w (t1 - t2 + 2x/c))]
///                 sum_g (e_g - e_a) |(u.d)_ag|^2 / ((e_g - e_a)^2 - w^2),
/// W = wc + 8/tau. Level widths shift the poles to e_g - iG_g/2 and the real part is
/// kept. The "1" term is the value far from the overlap, the cosine term the
/// interference part.
struct StarkPhase {
  double far = 0.0;
  double interference = 0.0;
  double total() const { return far + interference; }
};

StarkPhase stark_phase(const ElectronicModel& m, const CombConfig& cfg, std::size_t alpha,
                       double x, const QuadOptions& opt = {});
double stark_phase_far(const ElectronicModel& m, const CombConfig& cfg, std::size_t alpha,
                       const QuadOptions& opt = {});
/// d dtheta_a / dx, differentiated under the integral.
double stark_phase_derivative(const ElectronicModel& m, const CombConfig& cfg, std::size_t alpha,
                              double x, const QuadOptions& opt = {});

/// Magnitude of the complex interference term, |\int ... exp(i w (t1 - t2 + 2x/c))|:
/// the envelope of the wavelength-scale ripple.
double stark_phase_envelope(const ElectronicModel& m, const CombConfig& cfg, std::size_t alpha,
                            double x, const QuadOptions& opt = {});

/// (dtheta_1 - dtheta_0)/2 at x.
double differential_phase(const ElectronicModel& m, const CombConfig& cfg, const QubitLevels& q,
                          double x, const QuadOptions& opt = {});

/// Stark phases of one qubit under one comb configuration, evaluated on demand.
class StarkPhaseModel {
 public:
  StarkPhaseModel(ElectronicModel model, CombConfig cfg, QubitLevels qubit, QuadOptions opt = {});

  const ElectronicModel& model() const { return model_; }
  const CombConfig& comb() const { return cfg_; }
  const QubitLevels& qubit() const { return qubit_; }
  const QuadOptions& quad() const { return opt_; }

  /// Same model with the combs' overlap moved to x.
  StarkPhaseModel aimed_at(double x) const;
  /// Same model with the peak field multiplied by `factor` (phases scale as factor^2).
  StarkPhaseModel with_field_scale(double factor) const;

  /// which = 0 or 1 picks the qubit level.
  double level_phase(int which, double x) const;
  double level_far(int which) const;
  double level_derivative(int which, double x) const;

  double differential(double x) const;
  double differential_far() const;
  /// Envelope of |differential(x) - differential_far()| over the ripple.
  double differential_envelope(double x) const;

 private:
  std::size_t level(int which) const { return which == 0 ? qubit_.level0 : qubit_.level1; }

  ElectronicModel model_;
  CombConfig cfg_;
  QubitLevels qubit_;
  QuadOptions opt_;
  double far0_, far1_;
};

struct PhaseProfile {
  QubitLevels qubit;
  std::vector<double> x;
  std::vector<double> dtheta0;
  std::vector<double> dtheta1;
  double far0 = 0.0;
  double far1 = 0.0;

  std::size_t size() const { return x.size(); }
  double differential(std::size_t i) const { return 0.5 * (dtheta1[i] - dtheta0[i]); }
  double differential_far() const { return 0.5 * (far1 - far0); }
  /// Linear interpolation of the differential phase; far value outside the grid.
  double differential_at(double xq) const;
};

/// Uniform grid of `points` samples over x_center +- half_width.
std::vector<double> position_grid(double x_center, double half_width, std::size_t points);
std::vector<double> default_position_grid(const CombConfig& cfg);

PhaseProfile phase_shift_profile(const ElectronicModel& m, const CombConfig& cfg,
                                 const QubitLevels& q, const std::vector<double>& grid,
                                 const QuadOptions& opt = {}, unsigned workers = 0);

/// Columns x_m, dtheta0_rad, dtheta1_rad, differential_rad.
void write_profile_csv(const PhaseProfile& p, std::ostream& out);

}  // namespace combgate
