#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace combgate {

using ComplexIntegrand = std::function<std::complex<double>(double)>;

struct QuadOptions {
  double rel_tol = 1e-9;  // relative to the L1 norm of the integrand
  double abs_tol = 0.0;
  int max_intervals = 20000;
};

struct QuadResult {
  std::complex<double> value;
  double error = 0.0;  // estimated absolute error
  double l1 = 0.0;     // estimate of \int |f|
  int intervals = 0;
};

/// Globally adaptive 21-point Gauss-Kronrod integration over [points.front(),
/// points.back()] with the interior points as forced breakpoints. The interval with
/// the largest error estimate is bisected until the total estimate satisfies
/// error <= max(abs_tol, rel_tol * l1). Throws NumericsError otherwise, quoting the
/// tolerance actually reached.
QuadResult integrate(const ComplexIntegrand& f, std::vector<double> points,
                     const QuadOptions& opt = {});

/// \int_a^b g(w) / (z - w) dw for a complex pole z. When Re z lies inside the
/// range, g(Re z) is subtracted and the singular part is done in closed form,
/// log(z - a) - log(z - b). For a pole on the axis the sign of the zero imaginary
/// part picks the branch: -0.0 gives +i*pi*g(Re z), +0.0 gives -i*pi*g(Re z).
QuadResult integrate_pole(const ComplexIntegrand& g, std::complex<double> z,
                          std::vector<double> points, const QuadOptions& opt = {});

/// Merge, sort and deduplicate breakpoints, dropping those outside [a, b].
std::vector<double> make_breakpoints(double a, double b, const std::vector<double>& interior);

}  // namespace combgate
