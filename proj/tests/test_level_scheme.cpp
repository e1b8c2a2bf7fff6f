#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "combgate/constants.hpp"
#include "combgate/errors.hpp"
#include "combgate/level_scheme.hpp"

using namespace combgate;

namespace {

const char* kGood = R"(species Test+
mass_amu 40
LEVELS
S1/2 0 cm-1 1/2 0
P1/2 25000 cm-1 1/2 1.0e8
LINES
P1/2 S1/2 1.0e8
)";

LevelScheme parse(const std::string& text) {
  std::istringstream in(text);
  return parse_level_scheme(in, "<test>", kDefaultZeemanHz);
}

}  // namespace

TEST_CASE("bundled Ca-40+ scheme") {
  const LevelScheme s = load_level_scheme(bundled_scheme_path());
  CHECK(s.size() == 18);
  CHECK(s.manifolds().size() == 5);
  CHECK(s.lines().size() == 5);
  CHECK(s.mass_kg() == doctest::Approx(39.962590863 * constants::amu));
  CHECK(s.energies()[s.find("S1/2:-1/2")] == doctest::Approx(-constants::pi * 2e6));
  // Fine-structure splitting of the D manifold, 1.8287 THz.
  const double split = s.manifolds()[s.manifold_index("D5/2")].energy - s.manifolds()[s.manifold_index("D3/2")].energy;
  CHECK(split / constants::two_pi == doctest::Approx(1.8287e12).epsilon(1e-4));
  CHECK_THROWS_AS(s.find("F7/2:1/2"), ConfigError);
  CHECK_THROWS_AS(s.find("S1/2:3/2"), ConfigError);
  CHECK_THROWS_AS(s.find("S1/2"), ConfigError);
}

TEST_CASE("reduced dipoles from decay rates, hand evaluated") {
  const LevelScheme s = load_level_scheme(bundled_scheme_path());
  // sqrt(3 pi eps0 hbar c^3 (2Ju+1) A / w^3) / (e a0) evaluated by hand with CODATA 2018.
  for (const auto& ln : s.lines()) {
    const std::string u = s.manifolds()[ln.upper].label, l = s.manifolds()[ln.lower].label;
    if (u == "P1/2" && l == "S1/2") CHECK(ln.reduced_dipole == doctest::Approx(2.94012).epsilon(1e-5));
    if (u == "P3/2" && l == "D5/2") CHECK(ln.reduced_dipole == doctest::Approx(3.49172).epsilon(1e-5));
  }
  CHECK(dipole_from_decay_rate(1.40e8, 4.745202729437664e15, HalfInt::from_twice(1), HalfInt::from_twice(1)) ==
        doctest::Approx(2.9401155).epsilon(1e-7));
}

TEST_CASE("sublevel dipoles reproduce every line rate") {
  const LevelScheme s = load_level_scheme(bundled_scheme_path(), 0.0);
  using namespace constants;
  for (const auto& ln : s.lines()) {
    const double w = ln.omega;
    for (std::size_t u = 0; u < s.size(); ++u) {
      if (s.levels()[u].manifold != ln.upper) continue;
      double sum = 0.0;
      for (std::size_t l = 0; l < s.size(); ++l) {
        if (s.levels()[l].manifold != ln.lower) continue;
        for (int ax = 0; ax < 3; ++ax) sum += std::norm(s.dipole(ax)(u, l));
      }
      const double d_si = std::sqrt(sum) * ea0;
      const double rate = w * w * w * d_si * d_si / (3.0 * pi * eps0 * hbar * c * c * c);
      CHECK(rate == doctest::Approx(ln.rate).epsilon(1e-9));
    }
  }
}

TEST_CASE("dipole matrices: Hermitian, parity, pi selection rule") {
  const LevelScheme s = load_level_scheme(bundled_scheme_path());
  for (int ax = 0; ax < 3; ++ax) CHECK((s.dipole(ax) - s.dipole(ax).adjoint()).norm() < 1e-14);
  const Eigen::MatrixXcd dz = s.dipole_along(Eigen::Vector3d(0, 0, 1));
  for (std::size_t a = 0; a < s.size(); ++a)
    for (std::size_t b = 0; b < s.size(); ++b) {
      if (std::abs(dz(a, b)) == 0.0) continue;
      CHECK(s.levels()[a].mJ == s.levels()[b].mJ);
      const int La = s.manifolds()[s.levels()[a].manifold].L, Lb = s.manifolds()[s.levels()[b].manifold].L;
      CHECK((La + Lb) % 2 == 1);
    }
}

TEST_CASE("decay channels: rates and completeness") {
  const LevelScheme s = load_level_scheme(bundled_scheme_path());
  const auto ch = s.decay_channels();
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(18, 18);
  for (const auto& c : ch) {
    CHECK(c.rate >= 0.0);
    sum += c.rate * c.op.adjoint() * c.op;
    // Only along dipole-allowed lines: every nonzero element connects upper to lower.
    for (Eigen::Index a = 0; a < 18; ++a)
      for (Eigen::Index b = 0; b < 18; ++b)
        if (std::abs(c.op(a, b)) > 0) {
          CHECK(s.levels()[a].manifold == s.lines()[c.line].lower);
          CHECK(s.levels()[b].manifold == s.lines()[c.line].upper);
        }
  }
  for (Eigen::Index a = 0; a < 18; ++a) CHECK(sum(a, a).real() == doctest::Approx(s.linewidths()[a]).epsilon(1e-12).scale(1.0));
  CHECK((sum - Eigen::MatrixXcd(sum.diagonal().asDiagonal())).norm() < 1e-6);
  CHECK(s.without_decay().decay_channels().empty());
  CHECK((s.without_decay().dipole(2) - s.dipole(2)).norm() == 0.0);
}

TEST_CASE("level file rejections") {
  CHECK_NOTHROW(parse(kGood));
  // Ground manifold not at zero.
  CHECK_THROWS_AS(parse(R"(species X
mass_amu 40
LEVELS
S1/2 10 cm-1 1/2 0
P1/2 25000 cm-1 1/2 1e8
LINES
P1/2 S1/2 1e8
)"),
                  ConfigError);
  // Same parity.
  CHECK_THROWS_AS(parse(R"(species X
mass_amu 40
LEVELS
S1/2 0 cm-1 1/2 0
D3/2 25000 cm-1 3/2 1e8
LINES
D3/2 S1/2 1e8
)"),
                  ConfigError);
  // |dJ| > 1.
  CHECK_THROWS_AS(parse(R"(species X
mass_amu 40
LEVELS
S1/2 0 cm-1 1/2 0
P5/2 25000 cm-1 5/2 1e8
LINES
P5/2 S1/2 1e8
)"),
                  ConfigError);
  // Branching ratios do not add up to the linewidth.
  CHECK_THROWS_AS(parse(R"(species X
mass_amu 40
LEVELS
S1/2 0 cm-1 1/2 0
P1/2 25000 cm-1 1/2 2e8
LINES
P1/2 S1/2 1e8
)"),
                  ConfigError);
  // J inconsistent with the term symbol, unknown unit, unknown level in a line.
  CHECK_THROWS_AS(parse(std::string(kGood).replace(std::string(kGood).find("P1/2 25000 cm-1 1/2"), 19, "P1/2 25000 cm-1 3/2")), ConfigError);
  CHECK_THROWS_AS(parse(std::string(kGood).replace(std::string(kGood).find("cm-1"), 4, "eV")), ConfigError);
  CHECK_THROWS_AS(parse(std::string(kGood) + "P3/2 S1/2 1e8\n"), ConfigError);
  CHECK_THROWS_AS(load_level_scheme("/nonexistent/file.levels"), ConfigError);
}

TEST_CASE("Zeeman splitting is linear in mJ") {
  const LevelScheme s = load_level_scheme(bundled_scheme_path(), 3e6);
  const double d = s.energies()[s.find("D5/2:5/2")] - s.energies()[s.find("D5/2:3/2")];
  CHECK(d == doctest::Approx(constants::two_pi * 3e6));
  CHECK(s.with_zeeman(0.0).energies()[s.find("D5/2:5/2")] == doctest::Approx(s.manifolds()[s.manifold_index("D5/2")].energy));
}
