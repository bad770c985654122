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

#include "ionabsorb/polarization.hpp"

#include <cmath>
#include <numbers>

#include "ionabsorb/error.hpp"

namespace ionabsorb {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

Eigen::Vector3d to_eigen(const Vec3& v) { return {v[0], v[1], v[2]}; }

Vec3 normalized(const Vec3& v) {
  double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (!(n > 0.0)) throw usage_error("direction vector must be nonzero");
  return {v[0] / n, v[1] / n, v[2] / n};
}

// Transverse frame (e1, e2) for direction k: e1 = y x k, e2 = k x e1, with a
// fallback when k is parallel to y.
std::pair<Eigen::Vector3d, Eigen::Vector3d> transverse_frame(const Vec3& direction) {
  Eigen::Vector3d k = to_eigen(direction);
  Eigen::Vector3d e1 = Eigen::Vector3d::UnitY().cross(k);
  if (e1.norm() < 1e-12) e1 = k.cross(Eigen::Vector3d::UnitX());
  e1.normalize();
  Eigen::Vector3d e2 = k.cross(e1);
  return {e1, e2};
}

}  // namespace

PolarizationState::PolarizationState(cd h, cd v, Vec3 direction)
    : direction_(normalized(direction)) {
  double n = std::sqrt(std::norm(h) + std::norm(v));
  if (!(n > 0.0)) throw usage_error("polarization amplitudes must not both vanish");
  jones_ << h / n, v / n;
}

PolarizationState PolarizationState::from_jones(const Jones& j, Vec3 direction) {
  return PolarizationState(j(0), j(1), direction);
}

PolarizationState PolarizationState::from_helicity(cd sigma_plus, cd sigma_minus, Vec3 axis) {
  const double s = std::numbers::sqrt2 / 2.0;
  return PolarizationState(s * (sigma_plus + sigma_minus), kI * s * (sigma_plus - sigma_minus),
                           axis);
}

PolarizationState PolarizationState::from_stokes(const StokesVector& st, Vec3 direction) {
  double n = std::sqrt(st.s1 * st.s1 + st.s2 * st.s2 + st.s3 * st.s3);
  if (!(n > 0.0)) throw usage_error("Stokes vector must be nonzero");
  double theta = std::acos(std::clamp(st.s1 / n, -1.0, 1.0));
  double phi = std::atan2(st.s3, st.s2);
  return PolarizationState(std::cos(theta / 2), std::sin(theta / 2) * std::exp(kI * phi),
                           direction);
}

StokesVector PolarizationState::stokes() const {
  cd hv = std::conj(h()) * v();
  return {std::norm(h()) - std::norm(v()), 2.0 * hv.real(), 2.0 * hv.imag()};
}

Eigen::Vector3cd PolarizationState::field_vector() const {
  auto [e1, e2] = transverse_frame(direction_);
  return h() * e1.cast<cd>() + v() * e2.cast<cd>();
}

HelicityAmplitudes PolarizationState::helicity(const Vec3& quantization_axis) const {
  auto [u, w] = transverse_frame(normalized(quantization_axis));
  Eigen::Vector3d b = to_eigen(normalized(quantization_axis));
  Eigen::Vector3cd e = field_vector();
  cd eu = u.cast<cd>().dot(e);  // dot() conjugates the first argument; u is real
  cd ew = w.cast<cd>().dot(e);
  const double s = std::numbers::sqrt2 / 2.0;
  return {s * (eu - kI * ew), b.cast<cd>().dot(e), s * (eu + kI * ew)};
}

PolarizationState PolarizationState::transformed(const Eigen::Matrix2cd& m) const {
  return from_jones(m * jones_, direction_);
}

double absorption_polarization_overlap(const PolarizationState& photon,
                                       const PolarizationState& accepted) {
  return std::norm(accepted.jones().dot(photon.jones()));
}

Eigen::Matrix2cd half_wave_plate(double a) {
  Eigen::Matrix2cd m;
  m << std::cos(2 * a), std::sin(2 * a), std::sin(2 * a), -std::cos(2 * a);
  return m;
}

Eigen::Matrix2cd quarter_wave_plate(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix2cd m;
  m << c * c + kI * s * s, (1.0 - kI) * s * c, (1.0 - kI) * s * c, s * s + kI * c * c;
  return std::exp(-kI * std::numbers::pi / 4.0) * m;
}

PolarizationState Analyzer::accepted_state() const {
  const double deg = std::numbers::pi / 180.0;
  Eigen::Matrix2cd w = half_wave_plate(hwp_deg * deg);
  if (has_qwp) w = w * quarter_wave_plate(qwp_deg * deg);
  return PolarizationState::from_jones(w.adjoint() * PolarizationState::H().jones());
}

}  // namespace ionabsorb
