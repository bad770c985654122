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

#pragma once

#include <array>
#include <compare>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace ionabsorb {

// Fine-structure terms of 40Ca+ used by the experiments.
enum class Term { S1_2, P1_2, P3_2, D3_2, D5_2 };

std::string_view term_name(Term term);

struct Level {
  Term term;
  int twice_j;        // 2J
  double g_j;         // Lande factor
  double lifetime_s;  // infinity for the ground state
  int sublevel_count() const { return twice_j + 1; }
};

/// Static level data. D5/2 carries the measured 1.11 s lifetime.
const Level& level(Term term);

/// Magnetic sublevel; m is stored doubled so half-integers stay exact.
struct Sublevel {
  Term term;
  int twice_m;

  double m() const { return 0.5 * twice_m; }
  bool valid() const;
  auto operator<=>(const Sublevel&) const = default;
};

struct MagneticField {
  double magnitude_gauss = 3.0;
  std::array<double, 3> axis{0.0, 0.0, 1.0};

  /// Throws usage error unless magnitude >= 0 and |axis| == 1 within 1e-12.
  void validate() const;
};

/// Bohr magneton over Planck's constant.
inline constexpr double kBohrMagnetonMHzPerGauss = 1.399624;

/// Linear Zeeman shift g_J * m * (muB/h) * B in MHz.
double zeeman_shift_mhz(Sublevel sub, const MagneticField& field);

/// Clebsch-Gordan coefficient <j1 m1; j2 m2 | j m>, all arguments doubled.
double clebsch_gordan(int twice_j1, int twice_m1, int twice_j2, int twice_m2, int twice_j,
                      int twice_m);

struct BranchingRatios {
  double p12_to_s = 0.936;
  double p12_to_d32 = 0.064;
  double p32_to_s = 0.9344;
  double p32_to_d52 = 0.0590;
  double p32_to_d32 = 0.0066;
  // Oscillator strength of D5/2-P3/2 relative to D3/2-P3/2.
  double strength_ratio_854_850 = 6.0;
};

struct Line {
  Term upper;
  Term lower;
  double wavelength_nm;
  double branching;
  double relative_strength;  // absorption oscillator strength, 850 nm line = 1
};

/// Dipole lines with branching ratios and squared Clebsch-Gordan couplings.
///
/// Couplings are normalised per upper sublevel: for every line and every upper
/// sublevel, the weights over lower sublevels and q sum to one.
class TransitionTable {
 public:
  TransitionTable() : TransitionTable(BranchingRatios{}) {}
  explicit TransitionTable(const BranchingRatios& ratios);

  std::span<const Line> lines() const { return lines_; }
  const Line& line(Term upper, Term lower) const;
  double branching(Term upper, Term lower) const { return line(upper, lower).branching; }
  const BranchingRatios& ratios() const { return ratios_; }

  /// Squared coupling for lower -> upper with photon helicity q = m_upper - m_lower.
  /// Zero for selection-rule violations or unphysical sublevels; throws for an
  /// untabulated pair of terms.
  double coupling(Sublevel lower, Sublevel upper, int q) const;

  /// Human-readable constants table.
  std::string report() const;

 private:
  BranchingRatios ratios_;
  std::vector<Line> lines_;
  // (upper, lower, 2m_lower, 2m_upper) -> weight
  std::map<std::tuple<Term, Term, int, int>, double> couplings_;
};

/// Peak-normalised Lorentzian 1 / (1 + (2 x / fwhm)^2).
double lorentzian(double detuning, double fwhm);

/// Absorption of a photon of spectral width photon_fwhm by a line of width
/// atom_fwhm: a peak-normalised Lorentzian whose width is the sum of both.
double absorption_lineshape(double detuning_mhz, double atom_fwhm_mhz, double photon_fwhm_mhz);

}  // namespace ionabsorb
