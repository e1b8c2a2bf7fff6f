#pragma once

#include <compare>
#include <string>

namespace combgate {

/// Angular momentum quantum number stored as twice its value so that
/// half-integers are exact.
class HalfInt {
 public:
  constexpr HalfInt() = default;
  static constexpr HalfInt from_twice(int twice) { return HalfInt(twice); }

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }

  constexpr HalfInt operator-() const { return HalfInt(-twice_); }
  constexpr HalfInt operator+(HalfInt o) const { return HalfInt(twice_ + o.twice_); }
  constexpr HalfInt operator-(HalfInt o) const { return HalfInt(twice_ - o.twice_); }
  constexpr auto operator<=>(const HalfInt&) const = default;

  /// "1/2", "-3/2", "2".
  std::string str() const;
  /// Parses "1/2", "-5/2", "1", "0.5". Throws std::invalid_argument.
  static HalfInt parse(const std::string& text);

 private:
  constexpr explicit HalfInt(int twice) : twice_(twice) {}
  int twice_ = 0;
};

/// Wigner 3j symbol (j1 j2 j3; m1 m2 m3) by the Racah closed form. Exact up to
/// rounding for the small momenta used here (j <= 5/2 in the bundled data).
double wigner_3j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3);

/// Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M> (Condon-Shortley phase).
double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M);

}  // namespace combgate
