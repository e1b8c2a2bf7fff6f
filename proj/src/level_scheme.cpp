#include "combgate/level_scheme.hpp"

#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include "combgate/constants.hpp"
#include "combgate/errors.hpp"

namespace combgate {

namespace {

int orbital_from_letter(char c) {
  switch (c) {
    case 'S': return 0;
    case 'P': return 1;
    case 'D': return 2;
    case 'F': return 3;
    case 'G': return 4;
    default: return -1;
  }
}

double parity_sign(int twice) { return ((twice / 2) % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

double spherical_dipole_factor(HalfInt J_lower, HalfInt m_lower, int q, HalfInt J_upper,
                               HalfInt m_upper) {
  const HalfInt one = HalfInt::from_twice(2);
  const HalfInt hq = HalfInt::from_twice(2 * q);
  const double w = wigner_3j(J_lower, one, J_upper, -m_lower, hq, m_upper);
  if (w == 0.0) return 0.0;
  return parity_sign(J_lower.twice() - m_lower.twice()) * w;
}

double dipole_from_decay_rate(double gamma, double omega_transition, HalfInt J_upper,
                              HalfInt J_lower) {
  using namespace constants;
  if (!(gamma > 0.0) || !(omega_transition > 0.0))
    throw PhysicsError("dipole_from_decay_rate: rate and transition frequency must be positive");
  if (std::abs(J_upper.twice() - J_lower.twice()) > 2)
    throw PhysicsError("dipole_from_decay_rate: |dJ| > 1 is not an E1 line");
  const double d2 = gamma * 3.0 * pi * eps0 * hbar * c * c * c * (J_upper.twice() + 1.0) /
                    (omega_transition * omega_transition * omega_transition);
  return std::sqrt(d2) / ea0;
}

LevelScheme::LevelScheme(std::string species, double mass_kg, std::vector<Manifold> manifolds,
                         std::vector<TransitionLine> lines, double zeeman_hz)
    : species_(std::move(species)),
      mass_kg_(mass_kg),
      manifolds_(std::move(manifolds)),
      lines_(std::move(lines)),
      zeeman_hz_(zeeman_hz) {
  if (manifolds_.empty()) throw ConfigError("level scheme has no levels");
  if (!(mass_kg_ > 0.0)) throw ConfigError("level scheme: ion mass must be positive");
  if (manifolds_.front().energy != 0.0)
    throw ConfigError("level scheme: ground level " + manifolds_.front().label +
                      " must have energy exactly 0");
  for (const auto& m : manifolds_) {
    if (m.J.twice() < 0) throw ConfigError("level " + m.label + ": negative J");
    if (m.linewidth < 0.0) throw ConfigError("level " + m.label + ": negative linewidth");
    if (m.energy < 0.0) throw ConfigError("level " + m.label + ": energy below ground");
  }
  for (const auto& ln : lines_) {
    if (ln.upper >= manifolds_.size() || ln.lower >= manifolds_.size())
      throw ConfigError("line references a missing level");
    const auto& u = manifolds_[ln.upper];
    const auto& l = manifolds_[ln.lower];
    if ((u.L + l.L) % 2 == 0)
      throw ConfigError("line " + u.label + " -> " + l.label +
                        ": parity violation (E1 couples opposite parity only)");
    if (std::abs(u.J.twice() - l.J.twice()) > 2)
      throw ConfigError("line " + u.label + " -> " + l.label + ": |dJ| > 1");
    if (!(u.energy > l.energy))
      throw ConfigError("line " + u.label + " -> " + l.label + ": upper level lies below lower");
    if (ln.rate < 0.0) throw ConfigError("line " + u.label + " -> " + l.label + ": negative rate");
  }
  for (std::size_t i = 0; i < manifolds_.size(); ++i) {
    double sum = 0.0;
    for (const auto& ln : lines_)
      if (ln.upper == i) sum += ln.rate;
    const double g = manifolds_[i].linewidth;
    if (std::abs(sum - g) > 0.01 * g)
      throw ConfigError("level " + manifolds_[i].label + ": branch rates sum to " +
                        std::to_string(sum) + " s^-1 but stored linewidth is " +
                        std::to_string(g) + " s^-1 (tolerance 1%)");
  }
  build();
}

void LevelScheme::build() {
  using namespace constants;
  levels_.clear();
  for (std::size_t i = 0; i < manifolds_.size(); ++i) {
    const auto& m = manifolds_[i];
    for (int tm = -m.J.twice(); tm <= m.J.twice(); tm += 2) {
      Level lv;
      lv.label = m.label;
      lv.manifold = i;
      lv.J = m.J;
      lv.mJ = HalfInt::from_twice(tm);
      lv.energy = m.energy + 0.5 * tm * two_pi * zeeman_hz_;
      lv.linewidth = m.linewidth;
      levels_.push_back(lv);
    }
  }
  const auto n = static_cast<Eigen::Index>(levels_.size());
  energies_.resize(n);
  linewidths_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    energies_[i] = levels_[i].energy;
    linewidths_[i] = levels_[i].linewidth;
  }
  for (auto& d : dipole_) d = Eigen::MatrixXcd::Zero(n, n);
  couplings_.clear();

  const double s2 = std::sqrt(0.5);
  const cplx I(0.0, 1.0);
  for (const auto& ln : lines_) {
    for (Eigen::Index a = 0; a < n; ++a) {
      if (levels_[a].manifold != ln.lower) continue;
      for (Eigen::Index b = 0; b < n; ++b) {
        if (levels_[b].manifold != ln.upper) continue;
        const auto& lo = levels_[a];
        const auto& up = levels_[b];
        // <lo| d_q |up>
        double dq[3];
        for (int q = -1; q <= 1; ++q)
          dq[q + 1] = ln.reduced_dipole * spherical_dipole_factor(lo.J, lo.mJ, q, up.J, up.mJ);
        const cplx dx = s2 * (dq[0] - dq[2]);
        const cplx dy = I * s2 * (dq[0] + dq[2]);
        const cplx dz = dq[1];
        if (dx == 0.0 && dy == 0.0 && dz == 0.0) continue;
        const cplx comp[3] = {dx, dy, dz};
        DipoleCoupling c;
        c.upper = static_cast<std::size_t>(b);
        c.lower = static_cast<std::size_t>(a);
        for (int k = 0; k < 3; ++k) {
          dipole_[k](a, b) = comp[k];
          dipole_[k](b, a) = std::conj(comp[k]);
          c.component[k] = std::conj(comp[k]);
        }
        couplings_.push_back(c);
      }
    }
  }
}

Eigen::MatrixXcd LevelScheme::dipole_along(const Eigen::Vector3d& u) const {
  return u[0] * dipole_[0] + u[1] * dipole_[1] + u[2] * dipole_[2];
}

std::size_t LevelScheme::manifold_index(const std::string& label) const {
  for (std::size_t i = 0; i < manifolds_.size(); ++i)
    if (manifolds_[i].label == label) return i;
  throw ConfigError("unknown level '" + label + "'");
}

std::size_t LevelScheme::find(const std::string& manifold_label, HalfInt mJ) const {
  const auto mi = manifold_index(manifold_label);
  for (std::size_t i = 0; i < levels_.size(); ++i)
    if (levels_[i].manifold == mi && levels_[i].mJ == mJ) return i;
  throw ConfigError("level " + manifold_label + " has no sublevel m=" + mJ.str());
}

std::size_t LevelScheme::find(const std::string& ref) const {
  const auto colon = ref.find(':');
  if (colon == std::string::npos)
    throw ConfigError("sublevel reference '" + ref + "' must look like S1/2:-1/2");
  HalfInt m;
  try {
    m = HalfInt::parse(ref.substr(colon + 1));
  } catch (const std::exception&) {
    throw ConfigError("bad magnetic quantum number in '" + ref + "'");
  }
  return find(ref.substr(0, colon), m);
}

std::vector<DecayChannel> LevelScheme::decay_channels() const {
  std::vector<DecayChannel> out;
  const auto n = static_cast<Eigen::Index>(levels_.size());
  for (std::size_t li = 0; li < lines_.size(); ++li) {
    const auto& ln = lines_[li];
    if (ln.rate <= 0.0) continue;
    const double norm = std::sqrt(manifolds_[ln.upper].J.twice() + 1.0);
    for (int q = -1; q <= 1; ++q) {
      DecayChannel ch;
      ch.line = li;
      ch.q = q;
      ch.rate = ln.rate;
      ch.op = Eigen::MatrixXcd::Zero(n, n);
      bool any = false;
      for (Eigen::Index a = 0; a < n; ++a) {
        if (levels_[a].manifold != ln.lower) continue;
        for (Eigen::Index b = 0; b < n; ++b) {
          if (levels_[b].manifold != ln.upper) continue;
          const double f =
              spherical_dipole_factor(levels_[a].J, levels_[a].mJ, q, levels_[b].J, levels_[b].mJ);
          if (f == 0.0) continue;
          ch.op(a, b) = norm * f;
          any = true;
        }
      }
      if (any) out.push_back(std::move(ch));
    }
  }
  return out;
}

LevelScheme LevelScheme::with_zeeman(double zeeman_hz) const {
  LevelScheme s = *this;
  s.zeeman_hz_ = zeeman_hz;
  s.build();
  return s;
}

LevelScheme LevelScheme::without_decay() const {
  LevelScheme s = *this;
  for (auto& m : s.manifolds_) m.linewidth = 0.0;
  for (auto& l : s.lines_) l.rate = 0.0;
  s.build();
  return s;
}

namespace {

std::string strip_comment(const std::string& line) {
  auto h = line.find('#');
  return h == std::string::npos ? line : line.substr(0, h);
}

double parse_number(const std::string& tok, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || !std::isfinite(v))
    throw ConfigError(where + ": expected a number, got '" + tok + "'");
  return v;
}

double energy_to_omega(double value, const std::string& unit, const std::string& where) {
  using namespace constants;
  if (unit == "cm-1") return value * wavenumber_to_omega;
  if (unit == "THz") return value * 1e12 * two_pi;
  if (unit == "rad/s") return value;
  throw ConfigError(where + ": unknown energy unit tag '" + unit + "' (use cm-1, THz or rad/s)");
}

}  // namespace

LevelScheme parse_level_scheme(std::istream& in, const std::string& source, double zeeman_hz) {
  enum class Section { Header, Levels, Lines } section = Section::Header;
  std::string species;
  double mass_amu = 0.0;
  std::vector<Manifold> manifolds;
  struct RawLine {
    std::string upper, lower;
    double rate;
    std::string where;
  };
  std::vector<RawLine> raw;
  static const std::regex term_re(R"(^\d*([SPDFG])(\d+(?:/2)?)$)");

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = source + ":" + std::to_string(lineno);
    std::istringstream ss(strip_comment(line));
    std::vector<std::string> tok;
    for (std::string t; ss >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    if (tok[0] == "LEVELS" && tok.size() == 1) {
      section = Section::Levels;
      continue;
    }
    if (tok[0] == "LINES" && tok.size() == 1) {
      section = Section::Lines;
      continue;
    }
    switch (section) {
      case Section::Header:
        if (tok.size() != 2) throw ConfigError(where + ": header lines are 'key value'");
        if (tok[0] == "species") species = tok[1];
        else if (tok[0] == "mass_amu") mass_amu = parse_number(tok[1], where);
        else throw ConfigError(where + ": unknown header key '" + tok[0] + "'");
        break;
      case Section::Levels: {
        if (tok.size() != 5)
          throw ConfigError(where + ": level lines are 'label energy unit J linewidth_s-1'");
        std::smatch m;
        if (!std::regex_match(tok[0], m, term_re))
          throw ConfigError(where + ": bad term symbol '" + tok[0] + "'");
        Manifold mf;
        mf.L = orbital_from_letter(m[1].str()[0]);
        try {
          mf.J = HalfInt::parse(tok[3]);
        } catch (const std::exception&) {
          throw ConfigError(where + ": bad J '" + tok[3] + "'");
        }
        if (HalfInt::parse(m[2].str()) != mf.J)
          throw ConfigError(where + ": J column disagrees with term symbol " + tok[0]);
        if (mf.J.is_integer())
          throw ConfigError(where + ": single-valence-electron levels need half-integer J");
        if (std::abs(mf.J.twice() - 2 * mf.L) != 1)
          throw ConfigError(where + ": J incompatible with L for " + tok[0]);
        mf.label = m[1].str() + m[2].str();
        mf.energy = energy_to_omega(parse_number(tok[1], where), tok[2], where);
        mf.linewidth = parse_number(tok[4], where);
        for (const auto& other : manifolds)
          if (other.label == mf.label) throw ConfigError(where + ": duplicate level " + mf.label);
        manifolds.push_back(mf);
        break;
      }
      case Section::Lines:
        if (tok.size() != 3) throw ConfigError(where + ": line entries are 'upper lower rate_s-1'");
        raw.push_back({tok[0], tok[1], parse_number(tok[2], where), where});
        break;
    }
  }
  if (species.empty()) throw ConfigError(source + ": missing 'species' header");
  if (!(mass_amu > 0.0)) throw ConfigError(source + ": missing or nonpositive 'mass_amu'");
  if (manifolds.empty()) throw ConfigError(source + ": no LEVELS entries");

  auto lookup = [&](const std::string& label, const std::string& where) {
    for (std::size_t i = 0; i < manifolds.size(); ++i)
      if (manifolds[i].label == label) return i;
    throw ConfigError(where + ": line references unknown level '" + label + "'");
  };
  std::vector<TransitionLine> lines;
  for (const auto& r : raw) {
    TransitionLine tl;
    tl.upper = lookup(r.upper, r.where);
    tl.lower = lookup(r.lower, r.where);
    tl.rate = r.rate;
    const auto& u = manifolds[tl.upper];
    const auto& l = manifolds[tl.lower];
    if ((u.L + l.L) % 2 == 0)
      throw ConfigError(r.where + ": " + u.label + " -> " + l.label +
                        " violates parity (E1 couples opposite parity only)");
    tl.omega = u.energy - l.energy;
    if (!(tl.omega > 0.0))
      throw ConfigError(r.where + ": upper level " + u.label + " is not above " + l.label);
    if (!(tl.rate > 0.0)) throw ConfigError(r.where + ": line rate must be positive");
    tl.reduced_dipole = dipole_from_decay_rate(tl.rate, tl.omega, u.J, l.J);
    lines.push_back(tl);
  }
  return LevelScheme(species, mass_amu * constants::amu, std::move(manifolds), std::move(lines),
                     zeeman_hz);
}

LevelScheme load_level_scheme(const std::string& path, double zeeman_hz) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open level file '" + path + "'");
  return parse_level_scheme(f, path, zeeman_hz);
}

std::string bundled_scheme_path() { return std::string(COMBGATE_DATA_DIR) + "/ca40.levels"; }

}  // namespace combgate
