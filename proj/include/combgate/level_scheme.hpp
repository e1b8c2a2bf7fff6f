#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <istream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "combgate/angular.hpp"

namespace combgate {

using cplx = std::complex<double>;

// Conventions: hbar = 1, energies and rates in rad/s, dipoles in e*a0.

/// Fine-structure manifold as read from the level file.
struct Manifold {
  std::string label;       // term symbol, e.g. "P3/2"
  int L = 0;               // orbital momentum from the term letter
  HalfInt J;
  double energy = 0.0;     // rad/s above the ground manifold
  double linewidth = 0.0;  // total radiative width, rad/s
};

/// Zeeman sublevel; one row/column of every operator.
struct Level {
  std::string label;  // manifold term symbol
  std::size_t manifold = 0;
  double energy = 0.0;  // includes the linear Zeeman shift
  HalfInt J;
  HalfInt mJ;
  double linewidth = 0.0;
};

/// Radiative line between two manifolds.
struct TransitionLine {
  std::size_t upper = 0;
  std::size_t lower = 0;
  double rate = 0.0;             // Einstein A, s^-1
  double omega = 0.0;            // rad/s
  double reduced_dipole = 0.0;   // |<lower||d||upper>|, e*a0
};

/// Sublevel-resolved Cartesian dipole element <upper|d_axis|lower>.
struct DipoleCoupling {
  std::size_t upper = 0;
  std::size_t lower = 0;
  std::array<cplx, 3> component{};
};

/// One spontaneous-emission channel: a line and a spherical polarization q.
/// The jump operator is sqrt(rate) * op with op mapping upper sublevels to lower ones.
struct DecayChannel {
  std::size_t line = 0;
  int q = 0;
  double rate = 0.0;
  Eigen::MatrixXcd op;
};

inline constexpr double kDefaultZeemanHz = 2.0e6;

class LevelScheme {
 public:
  LevelScheme(std::string species, double mass_kg, std::vector<Manifold> manifolds,
              std::vector<TransitionLine> lines, double zeeman_hz);

  const std::string& species() const { return species_; }
  double mass_kg() const { return mass_kg_; }
  double zeeman_hz() const { return zeeman_hz_; }
  const std::vector<Manifold>& manifolds() const { return manifolds_; }
  const std::vector<TransitionLine>& lines() const { return lines_; }
  const std::vector<Level>& levels() const { return levels_; }
  const std::vector<DipoleCoupling>& couplings() const { return couplings_; }
  std::size_t size() const { return levels_.size(); }

  const Eigen::VectorXd& energies() const { return energies_; }
  const Eigen::VectorXd& linewidths() const { return linewidths_; }
  /// Cartesian dipole matrix (axis 0,1,2 = x,y,z), Hermitian.
  const Eigen::MatrixXcd& dipole(int axis) const { return dipole_[axis]; }
  /// u.d for a real polarization vector.
  Eigen::MatrixXcd dipole_along(const Eigen::Vector3d& u) const;

  std::size_t manifold_index(const std::string& label) const;
  /// Sublevel index; throws ConfigError if absent.
  std::size_t find(const std::string& manifold_label, HalfInt mJ) const;
  /// Parses "S1/2:-1/2" style references.
  std::size_t find(const std::string& ref) const;

  std::vector<DecayChannel> decay_channels() const;

  /// Copy with a different Zeeman splitting.
  LevelScheme with_zeeman(double zeeman_hz) const;
  /// Copy with every linewidth and line rate set to zero (dipoles unchanged).
  LevelScheme without_decay() const;

 private:
  void build();

  std::string species_;
  double mass_kg_;
  std::vector<Manifold> manifolds_;
  std::vector<TransitionLine> lines_;
  double zeeman_hz_;

  std::vector<Level> levels_;
  std::vector<DipoleCoupling> couplings_;
  Eigen::VectorXd energies_;
  Eigen::VectorXd linewidths_;
  std::array<Eigen::MatrixXcd, 3> dipole_;
};

/// Reduced dipole |<l||d||u>| in e*a0 from an Einstein A coefficient:
/// gamma = omega^3 |<l||d||u>|^2 / (3 pi eps0 hbar c^3 (2 J_u + 1)).
double dipole_from_decay_rate(double gamma, double omega_transition, HalfInt J_upper,
                              HalfInt J_lower);

/// Spherical-component element <J_l m_l| d_q |J_u m_u> in units of the reduced element.
double spherical_dipole_factor(HalfInt J_lower, HalfInt m_lower, int q, HalfInt J_upper,
                               HalfInt m_upper);

LevelScheme parse_level_scheme(std::istream& in, const std::string& source,
                               double zeeman_hz = kDefaultZeemanHz);
LevelScheme load_level_scheme(const std::string& path, double zeeman_hz = kDefaultZeemanHz);

/// Path of the bundled Ca-40 data file.
std::string bundled_scheme_path();

}  // namespace combgate
