// Copyright 2026 The ionabsorb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ionabsorb/atomic_model.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "ionabsorb/error.hpp"

namespace ionabsorb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Order matches the Term enumerators.
const std::array<Level, 5> kLevels{{
    {Term::S1_2, 1, 2.0, kInf},
    {Term::P1_2, 1, 2.0 / 3.0, 7.1e-9},
    {Term::P3_2, 3, 4.0 / 3.0, 6.9e-9},
    {Term::D3_2, 3, 4.0 / 5.0, 1.17},
    {Term::D5_2, 5, 6.0 / 5.0, 1.11},
}};

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

bool even(int n) { return n % 2 == 0; }

}  // namespace

std::string_view term_name(Term term) {
  switch (term) {
    case Term::S1_2:
      return "S1/2";
    case Term::P1_2:
      return "P1/2";
    case Term::P3_2:
      return "P3/2";
    case Term::D3_2:
      return "D3/2";
    case Term::D5_2:
      return "D5/2";
  }
  return "?";
}

const Level& level(Term term) { return kLevels[static_cast<std::size_t>(term)]; }

bool Sublevel::valid() const {
  const int tj = level(term).twice_j;
  return std::abs(twice_m) <= tj && even(tj - twice_m);
}

void MagneticField::validate() const {
  if (!(magnitude_gauss >= 0.0)) throw usage_error("magnetic field magnitude must be >= 0");
  double n2 = axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2];
  if (std::abs(std::sqrt(n2) - 1.0) > 1e-12)
    throw usage_error("magnetic field axis must be a unit vector");
}

double zeeman_shift_mhz(Sublevel sub, const MagneticField& field) {
  return level(sub.term).g_j * sub.m() * kBohrMagnetonMHzPerGauss * field.magnitude_gauss;
}

// Racah's closed form, evaluated in log space to stay finite for large J.
double clebsch_gordan(int j1, int m1, int j2, int m2, int j, int m) {
  if (m1 + m2 != m) return 0.0;
  if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m) > j) return 0.0;
  if (!even(j1 - m1) || !even(j2 - m2) || !even(j - m)) return 0.0;
  if (j < std::abs(j1 - j2) || j > j1 + j2 || !even(j1 + j2 - j)) return 0.0;

  const int a = (j1 + j2 - j) / 2;
  const int b = (j1 - j2 + j) / 2;
  const int c = (-j1 + j2 + j) / 2;
  const int d = (j1 + j2 + j) / 2 + 1;
  double log_pref =
      0.5 * (std::log(j + 1.0) + log_factorial(a) + log_factorial(b) + log_factorial(c) -
             log_factorial(d) + log_factorial((j1 + m1) / 2) + log_factorial((j1 - m1) / 2) +
             log_factorial((j2 + m2) / 2) + log_factorial((j2 - m2) / 2) +
             log_factorial((j + m) / 2) + log_factorial((j - m) / 2));

  const int kmin = std::max({0, (j2 - j - m1) / 2, (j1 - j + m2) / 2});
  const int kmax = std::min({a, (j1 - m1) / 2, (j2 + m2) / 2});
  double sum = 0.0;
  for (int k = kmin; k <= kmax; ++k) {
    double lt = log_factorial(k) + log_factorial(a - k) + log_factorial((j1 - m1) / 2 - k) +
                log_factorial((j2 + m2) / 2 - k) + log_factorial((j - j2 + m1) / 2 + k) +
                log_factorial((j - j1 - m2) / 2 + k);
    double term = std::exp(log_pref - lt);
    sum += (k % 2 == 0) ? term : -term;
  }
  return sum;
}

TransitionTable::TransitionTable(const BranchingRatios& r) : ratios_(r) {
  const double ratios[] = {r.p12_to_s, r.p12_to_d32, r.p32_to_s, r.p32_to_d52, r.p32_to_d32};
  for (double v : ratios)
    if (!(v >= 0.0 && v <= 1.0)) throw usage_error("branching ratios must lie in [0, 1]");
  if (std::abs(r.p12_to_s + r.p12_to_d32 - 1.0) > 1e-9)
    throw usage_error("P1/2 branching ratios must sum to 1");
  if (std::abs(r.p32_to_s + r.p32_to_d52 + r.p32_to_d32 - 1.0) > 1e-9)
    throw usage_error("P3/2 branching ratios must sum to 1");
  if (!(r.strength_ratio_854_850 > 0.0)) throw usage_error("strength ratio must be > 0");

  // Absorption oscillator strengths scale as lambda^2 (g_u/g_l) A_ul; only the
  // 854/850 ratio is load-bearing and it is taken from the configuration.
  auto strength = [](double lambda_nm, Term upper, Term lower, double branch) {
    double gu = level(upper).twice_j + 1.0, gl = level(lower).twice_j + 1.0;
    return lambda_nm * lambda_nm * (gu / gl) * branch / level(upper).lifetime_s;
  };
  const double f850 = strength(849.8, Term::P3_2, Term::D3_2, r.p32_to_d32);
  lines_ = {
      {Term::P1_2, Term::S1_2, 396.8, r.p12_to_s,
       strength(396.8, Term::P1_2, Term::S1_2, r.p12_to_s) / f850},
      {Term::P1_2, Term::D3_2, 866.2, r.p12_to_d32,
       strength(866.2, Term::P1_2, Term::D3_2, r.p12_to_d32) / f850},
      {Term::P3_2, Term::S1_2, 393.4, r.p32_to_s,
       strength(393.4, Term::P3_2, Term::S1_2, r.p32_to_s) / f850},
      {Term::P3_2, Term::D5_2, 854.2, r.p32_to_d52, r.strength_ratio_854_850},
      {Term::P3_2, Term::D3_2, 849.8, r.p32_to_d32, 1.0},
  };

  for (const Line& l : lines_) {
    const int ju = level(l.upper).twice_j, jl = level(l.lower).twice_j;
    for (int mu = -ju; mu <= ju; mu += 2)
      for (int ml = -jl; ml <= jl; ml += 2) {
        const int q2 = mu - ml;
        if (std::abs(q2) > 2) continue;
        double cg = clebsch_gordan(jl, ml, 2, q2, ju, mu);
        couplings_[{l.upper, l.lower, ml, mu}] = cg * cg;
      }
  }
}

const Line& TransitionTable::line(Term upper, Term lower) const {
  for (const Line& l : lines_)
    if (l.upper == upper && l.lower == lower) return l;
  throw usage_error("no tabulated line " + std::string(term_name(lower)) + " <-> " +
                    std::string(term_name(upper)));
}

double TransitionTable::coupling(Sublevel lower, Sublevel upper, int q) const {
  line(upper.term, lower.term);
  if (!lower.valid() || !upper.valid()) return 0.0;
  if (std::abs(q) > 1 || 2 * q != upper.twice_m - lower.twice_m) return 0.0;
  auto it = couplings_.find({upper.term, lower.term, lower.twice_m, upper.twice_m});
  return it == couplings_.end() ? 0.0 : it->second;
}

std::string TransitionTable::report() const {
  std::ostringstream os;
  char buf[160];
  os << "# 40Ca+ level data\n";
  os << "level   J     g_J       lifetime_s\n";
  for (const Level& l : kLevels) {
    std::snprintf(buf, sizeof buf, "%-6s  %d/2   %-8.6f  %.4g\n",
                  std::string(term_name(l.term)).c_str(), l.twice_j, l.g_j, l.lifetime_s);
    os << buf;
  }
  os << "\n# dipole lines\n";
  os << "upper   lower   lambda_nm  branching  rel_strength\n";
  for (const Line& l : lines_) {
    std::snprintf(buf, sizeof buf, "%-6s  %-6s  %-9.1f  %-9.4f  %.4f\n",
                  std::string(term_name(l.upper)).c_str(), std::string(term_name(l.lower)).c_str(),
                  l.wavelength_nm, l.branching, l.relative_strength);
    os << buf;
  }
  os << "\nmuB/h = " << kBohrMagnetonMHzPerGauss << " MHz/G\n";
  return os.str();
}

double lorentzian(double detuning, double fwhm) {
  double x = 2.0 * detuning / fwhm;
  return 1.0 / (1.0 + x * x);
}

double absorption_lineshape(double detuning_mhz, double atom_fwhm_mhz, double photon_fwhm_mhz) {
  if (!(atom_fwhm_mhz > 0.0) || !(photon_fwhm_mhz > 0.0))
    throw usage_error("absorption_lineshape: widths must be > 0");
  return lorentzian(detuning_mhz, atom_fwhm_mhz + photon_fwhm_mhz);
}

}  // namespace ionabsorb
