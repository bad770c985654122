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

#include <Eigen/Dense>
#include <array>
#include <complex>

namespace ionabsorb {

using Vec3 = std::array<double, 3>;
using Jones = Eigen::Vector2cd;

struct StokesVector {
  double s1;  // H - V
  double s2;  // D - A
  double s3;  // L - R  (L = sigma+ for propagation along the quantization axis)
};

struct HelicityAmplitudes {
  std::complex<double> sigma_plus;
  std::complex<double> pi;
  std::complex<double> sigma_minus;
};

/// Pure transverse polarization of a photon in the {H, V} basis.
///
/// H and V are the transverse unit vectors (y x k, k x (y x k)) for propagation
/// direction k; for k = +z they are +x and +y. The state is normalised on
/// construction.
class PolarizationState {
 public:
  PolarizationState() : PolarizationState(1.0, 0.0) {}
  PolarizationState(std::complex<double> h, std::complex<double> v, Vec3 direction = {0, 0, 1});

  static PolarizationState H() { return {1.0, 0.0}; }
  static PolarizationState V() { return {0.0, 1.0}; }
  static PolarizationState D() { return {1.0, 1.0}; }
  static PolarizationState A() { return {1.0, -1.0}; }
  /// Left circular, sigma+ along +z.
  static PolarizationState L() { return {1.0, std::complex<double>(0.0, 1.0)}; }
  /// Right circular, sigma- along +z.
  static PolarizationState R() { return {1.0, std::complex<double>(0.0, -1.0)}; }

  /// Builds the state with the given helicity amplitudes for propagation along `axis`.
  static PolarizationState from_helicity(std::complex<double> sigma_plus,
                                         std::complex<double> sigma_minus, Vec3 axis = {0, 0, 1});
  static PolarizationState from_stokes(const StokesVector& s, Vec3 direction = {0, 0, 1});
  static PolarizationState from_jones(const Jones& j, Vec3 direction = {0, 0, 1});

  const Jones& jones() const { return jones_; }
  std::complex<double> h() const { return jones_(0); }
  std::complex<double> v() const { return jones_(1); }
  const Vec3& direction() const { return direction_; }

  StokesVector stokes() const;

  /// Spherical components of the field relative to a quantization axis.
  HelicityAmplitudes helicity(const Vec3& quantization_axis) const;

  /// Field as a complex 3-vector in the lab frame.
  Eigen::Vector3cd field_vector() const;

  /// The state after a Jones matrix (same propagation direction).
  PolarizationState transformed(const Eigen::Matrix2cd& m) const;

  Eigen::Matrix2cd projector() const { return jones_ * jones_.adjoint(); }

 private:
  Jones jones_;
  Vec3 direction_;
};

/// |<accepted|photon>|^2.
double absorption_polarization_overlap(const PolarizationState& photon,
                                       const PolarizationState& accepted);

Eigen::Matrix2cd half_wave_plate(double angle_rad);
Eigen::Matrix2cd quarter_wave_plate(double angle_rad);

/// Herald-arm analyzer: optional fixed QWP, then a HWP, then a polarizer
/// transmitting H. Disabled means every polarization is accepted.
struct Analyzer {
  bool enabled = false;
  bool has_qwp = false;
  double qwp_deg = 0.0;
  double hwp_deg = 0.0;

  /// Polarization transmitted with certainty: (HWP * QWP)^dagger |H>.
  PolarizationState accepted_state() const;
  bool operator==(const Analyzer&) const = default;
};

}  // namespace ionabsorb
