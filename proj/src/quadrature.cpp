#include "combgate/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "combgate/errors.hpp"

namespace combgate {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 21>;

struct Piece {
  double a, b;
  std::complex<double> value;
  double error;
  double l1;
  bool operator<(const Piece& o) const { return error < o.error; }
};

Piece rule(const ComplexIntegrand& f, double a, double b) {
  Piece p{a, b, {}, 0.0, 0.0};
  // max_depth = 0: a single Kronrod/Gauss pair, the adaptivity lives here.
  p.value = GK::integrate(f, a, b, 0, 0.0, &p.error, &p.l1);
  return p;
}

}  // namespace

std::vector<double> make_breakpoints(double a, double b, const std::vector<double>& interior) {
  std::vector<double> pts{a, b};
  for (double x : interior)
    if (std::isfinite(x) && x > a && x < b) pts.push_back(x);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

QuadResult integrate(const ComplexIntegrand& f, std::vector<double> points, const QuadOptions& opt) {
  QuadResult res;
  if (points.size() < 2) return res;
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() < 2) return res;

  std::priority_queue<Piece> heap;
  std::complex<double> total = 0.0;
  double err = 0.0, l1 = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    Piece p = rule(f, points[i], points[i + 1]);
    total += p.value;
    err += p.error;
    l1 += p.l1;
    heap.push(p);
  }
  int count = static_cast<int>(heap.size());
  auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * l1); };
  while (err > target()) {
    if (count >= opt.max_intervals) {
      std::ostringstream os;
      os << "quadrature did not converge on [" << points.front() << ", " << points.back()
         << "]: reached error " << err << " (relative " << (l1 > 0 ? err / l1 : err)
         << ") after " << count << " intervals, requested " << opt.rel_tol;
      throw NumericsError(os.str());
    }
    Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Cannot bisect further in double precision; freeze this piece.
      err -= worst.error;
      worst.error = 0.0;
      heap.push(worst);
      continue;
    }
    Piece left = rule(f, worst.a, mid);
    Piece right = rule(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    l1 += left.l1 + right.l1 - worst.l1;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // Re-sum to avoid drift from incremental updates.
  total = 0.0;
  err = 0.0;
  l1 = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    l1 += heap.top().l1;
    heap.pop();
  }
  res.value = total;
  res.error = err;
  res.l1 = l1;
  res.intervals = count;
  return res;
}

QuadResult integrate_pole(const ComplexIntegrand& g, std::complex<double> z,
                          std::vector<double> points, const QuadOptions& opt) {
  std::sort(points.begin(), points.end());
  const double a = points.front();
  const double b = points.back();
  const double p = z.real();
  if (p > a && p < b) {
    const std::complex<double> gp = g(p);
    auto h = [&](double w) -> std::complex<double> { return (g(w) - gp) / (z - w); };
    points.push_back(p);
    QuadResult r = integrate(h, make_breakpoints(a, b, points), opt);
    r.value += gp * (std::log(z - a) - std::log(z - b));
    return r;
  }
  auto h = [&](double w) -> std::complex<double> { return g(w) / (z - w); };
  return integrate(h, std::move(points), opt);
}

}  // namespace combgate
