#include "combgate/angular.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace combgate {

std::string HalfInt::str() const {
  if (is_integer()) return std::to_string(twice_ / 2);
  return std::to_string(twice_) + "/2";
}

HalfInt HalfInt::parse(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty angular momentum");
  auto slash = text.find('/');
  std::size_t used = 0;
  if (slash != std::string::npos) {
    int num = std::stoi(text.substr(0, slash), &used);
    if (used != slash || text.substr(slash + 1) != "2")
      throw std::invalid_argument("bad half-integer '" + text + "'");
    return from_twice(num);
  }
  double v = std::stod(text, &used);
  if (used != text.size()) throw std::invalid_argument("bad half-integer '" + text + "'");
  double twice = 2.0 * v;
  if (std::abs(twice - std::round(twice)) > 1e-12)
    throw std::invalid_argument("not a half-integer '" + text + "'");
  return from_twice(static_cast<int>(std::lround(twice)));
}

namespace {

constexpr int kMaxFactorial = 64;

const std::array<double, kMaxFactorial + 1>& factorials() {
  static const auto table = [] {
    std::array<double, kMaxFactorial + 1> f{};
    f[0] = 1.0;
    for (int i = 1; i <= kMaxFactorial; ++i) f[i] = f[i - 1] * i;
    return f;
  }();
  return table;
}

// n given as twice the (integer) value.
double fact_twice(int twice_n) {
  if (twice_n < 0 || twice_n % 2 != 0) throw std::logic_error("factorial of non-natural");
  int n = twice_n / 2;
  if (n > kMaxFactorial) throw std::out_of_range("angular momentum too large for factorial table");
  return factorials()[n];
}

bool triangle_ok(int a, int b, int c) {
  return c >= std::abs(a - b) && c <= a + b && (a + b + c) % 2 == 0;
}

}  // namespace

double wigner_3j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3) {
  const int J1 = j1.twice(), J2 = j2.twice(), J3 = j3.twice();
  const int M1 = m1.twice(), M2 = m2.twice(), M3 = m3.twice();
  if (M1 + M2 + M3 != 0) return 0.0;
  if (!triangle_ok(J1, J2, J3)) return 0.0;
  if (std::abs(M1) > J1 || std::abs(M2) > J2 || std::abs(M3) > J3) return 0.0;
  if ((J1 + M1) % 2 || (J2 + M2) % 2 || (J3 + M3) % 2) return 0.0;

  const double delta = fact_twice(J1 + J2 - J3) * fact_twice(J1 - J2 + J3) *
                       fact_twice(-J1 + J2 + J3) / fact_twice(J1 + J2 + J3 + 2);
  const double pref = std::sqrt(delta * fact_twice(J1 + M1) * fact_twice(J1 - M1) *
                                fact_twice(J2 + M2) * fact_twice(J2 - M2) *
                                fact_twice(J3 + M3) * fact_twice(J3 - M3));

  // Summation index k (as twice value) over all terms with non-negative factorials.
  int kmin = std::max({0, J2 - J3 - M1, J1 - J3 + M2});
  int kmax = std::min({J1 + J2 - J3, J1 - M1, J2 + M2});
  double sum = 0.0;
  for (int k = kmin; k <= kmax; k += 2) {
    double denom = fact_twice(k) * fact_twice(J1 + J2 - J3 - k) * fact_twice(J1 - M1 - k) *
                   fact_twice(J2 + M2 - k) * fact_twice(J3 - J2 + M1 + k) *
                   fact_twice(J3 - J1 - M2 + k);
    sum += ((k / 2) % 2 ? -1.0 : 1.0) / denom;
  }
  const int phase_twice = J1 - J2 - M3;  // (-1)^(j1-j2-m3), integer by construction
  const double phase = ((phase_twice / 2) % 2 == 0) ? 1.0 : -1.0;
  return phase * pref * sum;
}

double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M) {
  // <j1 m1 j2 m2|J M> = (-1)^(j1-j2+M) sqrt(2J+1) (j1 j2 J; m1 m2 -M)
  const int phase_twice = j1.twice() - j2.twice() + M.twice();
  const double phase = ((phase_twice / 2) % 2 == 0) ? 1.0 : -1.0;
  return phase * std::sqrt(J.twice() + 1.0) * wigner_3j(j1, j2, J, m1, m2, -M);
}

}  // namespace combgate
