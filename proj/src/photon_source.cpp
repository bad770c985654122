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

#include "ionabsorb/photon_source.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "ionabsorb/atomic_model.hpp"
#include "ionabsorb/error.hpp"

namespace ionabsorb {

namespace {

using cd = std::complex<double>;

Eigen::Vector4cd bell_vector(BellState which) {
  const double s = std::numbers::sqrt2 / 2.0;
  Eigen::Vector4cd v = Eigen::Vector4cd::Zero();
  switch (which) {
    case BellState::psi_plus:
      v(1) = s;
      v(2) = s;
      break;
    case BellState::psi_minus:
      v(1) = s;
      v(2) = -s;
      break;
    case BellState::phi_plus:
      v(0) = s;
      v(3) = s;
      break;
    case BellState::phi_minus:
      v(0) = s;
      v(3) = -s;
      break;
  }
  return v;
}

// (P_herald) acting on the second tensor factor.
Eigen::Matrix4cd herald_projector(const Eigen::Matrix2cd& p) {
  Eigen::Matrix4cd out = Eigen::Matrix4cd::Zero();
  for (int s = 0; s < 2; ++s)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) out(2 * s + a, 2 * s + b) = p(a, b);
  return out;
}

Eigen::Matrix2cd trace_out_herald(const Eigen::Matrix4cd& rho) {
  Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t)
      for (int h = 0; h < 2; ++h) out(s, t) += rho(2 * s + h, 2 * t + h);
  return out;
}

}  // namespace

PairPolarizationState::PairPolarizationState(const Eigen::Matrix4cd& rho) : rho_(rho) {
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw usage_error("pair density matrix is not Hermitian");
  if (std::abs(rho.trace() - cd(1.0)) > 1e-12)
    throw usage_error("pair density matrix must have unit trace");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho);
  if (es.eigenvalues().minCoeff() < -1e-12)
    throw usage_error("pair density matrix is not positive semidefinite");
}

PairPolarizationState PairPolarizationState::product(const PolarizationState& signal,
                                                     const PolarizationState& herald) {
  Eigen::Vector4cd v;
  v << signal.h() * herald.h(), signal.h() * herald.v(), signal.v() * herald.h(),
      signal.v() * herald.v();
  return PairPolarizationState(v * v.adjoint());
}

PairPolarizationState PairPolarizationState::bell(BellState which) {
  Eigen::Vector4cd v = bell_vector(which);
  return PairPolarizationState(v * v.adjoint());
}

PairPolarizationState PairPolarizationState::werner(double p, BellState which) {
  if (!(p >= 0.0 && p <= 1.0)) throw usage_error("Werner parameter must lie in [0, 1]");
  Eigen::Vector4cd v = bell_vector(which);
  Eigen::Matrix4cd rho = p * (v * v.adjoint()) + (1.0 - p) / 4.0 * Eigen::Matrix4cd::Identity();
  return PairPolarizationState(rho);
}

Eigen::Matrix2cd PairPolarizationState::signal_marginal() const { return trace_out_herald(rho_); }

Eigen::Matrix2cd PairPolarizationState::herald_marginal() const {
  Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int s = 0; s < 2; ++s) out(a, b) += rho_(2 * s + a, 2 * s + b);
  return out;
}

PolarizationState PartnerProjection::dominant_state() const {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(partner);
  return PolarizationState::from_jones(es.eigenvectors().col(1));
}

PartnerProjection project_pair(const PairPolarizationState& state,
                               const PolarizationState& herald_outcome) {
  Eigen::Matrix4cd proj = herald_projector(herald_outcome.projector());
  Eigen::Matrix4cd projected = proj * state.density() * proj;
  double p = projected.trace().real();
  if (!(p > 1e-14))
    throw usage_error("herald setting is incompatible with the pair state (zero probability)");
  Eigen::Matrix2cd partner = trace_out_herald(projected) / p;
  return {p, 0.5 * (partner + partner.adjoint())};
}

PartnerProjection project_pair(const PairPolarizationState& state, const Analyzer& analyzer) {
  if (!analyzer.enabled) return {1.0, state.signal_marginal()};
  return project_pair(state, analyzer.accepted_state());
}

void SourceConfig::validate() const {
  if (!(pair_rate >= 0.0)) throw usage_error("source.pair_rate must be >= 0");
  if (!(raw_bandwidth_ghz > 0.0)) throw usage_error("source.raw_bandwidth must be > 0");
  if (!(filter_fwhm_mhz > 0.0)) throw usage_error("source.filter_fwhm must be > 0");
  if (!(herald_efficiency >= 0.0 && herald_efficiency <= 1.0))
    throw usage_error("source.herald_efficiency must lie in [0, 1]");
  if (!std::isfinite(filter_detuning_mhz) || !std::isfinite(pump_offset_mhz))
    throw usage_error("source detunings must be finite");
}

PairPolarizationState SourceConfig::effective_pair_state() const {
  if (splitter == Splitter::pbs)
    return PairPolarizationState::product(signal_polarization, PolarizationState::H());
  return pair_state;
}

double filter_transmission(double detuning_mhz, double fwhm_mhz) {
  if (!(fwhm_mhz > 0.0)) throw usage_error("filter width must be > 0");
  return lorentzian(detuning_mhz, fwhm_mhz);
}

double idler_density(const SourceConfig& cfg, double idler_detuning_mhz) {
  const double fwhm = cfg.raw_bandwidth_ghz * 1e3;
  const double half = 0.5 * fwhm;
  const double x = idler_detuning_mhz + cfg.pump_offset_mhz;
  if (std::abs(x) > kRawSpectrumTruncation * fwhm) return 0.0;
  const double mass = 2.0 / std::numbers::pi * std::atan(2.0 * kRawSpectrumTruncation);
  return half / std::numbers::pi / (x * x + half * half) / mass;
}

double filter_pass_fraction(const SourceConfig& cfg) {
  // Substitute x = d + (G/2) tan(t): the narrow filter factor becomes cos^2(t)
  // and cancels the Jacobian, leaving a smooth integrand in t.
  const double g = 0.5 * cfg.filter_fwhm_mhz;
  const double d = cfg.filter_detuning_mhz;
  const double lim = kRawSpectrumTruncation * cfg.raw_bandwidth_ghz * 1e3;
  const double lo = -lim - cfg.pump_offset_mhz, hi = lim - cfg.pump_offset_mhz;
  auto f = [&](double t) { return g * idler_density(cfg, d + g * std::tan(t)); };
  return integrate(f, std::atan((lo - d) / g), std::atan((hi - d) / g), 1e-15);
}

std::vector<PairEvent> generate_pairs(const SourceConfig& cfg, double duration_s, RngStream& rng) {
  cfg.validate();
  if (!(duration_s > 0.0)) throw usage_error("generate_pairs: duration must be > 0");
  std::vector<PairEvent> out;
  if (cfg.pair_rate == 0.0) return out;

  const PairPolarizationState pair = cfg.effective_pair_state();
  const Eigen::Matrix2cd marginal = pair.signal_marginal();
  std::optional<PartnerProjection> heralded;
  double p_proj = 0.0;
  try {
    heralded = project_pair(pair, cfg.herald_analyzer);
    p_proj = heralded->probability;
  } catch (const Error&) {
    // analyzer blocks every pair: no heralds at all
  }

  const double fwhm = cfg.raw_bandwidth_ghz * 1e3;
  const double center = -cfg.pump_offset_mhz;
  double t = 0.0;
  while (true) {
    t += rng.exponential(cfg.pair_rate);
    if (t >= duration_s) break;
    double idler;
    do {
      idler = rng.cauchy(center, 0.5 * fwhm);
    } while (std::abs(idler - center) > kRawSpectrumTruncation * fwhm);

    PairEvent ev;
    ev.time_s = t;
    ev.idler_detuning_mhz = idler;
    ev.signal_detuning_mhz = -2.0 * cfg.pump_offset_mhz - idler;
    const double h0 = filter_transmission(idler - cfg.filter_detuning_mhz, cfg.filter_fwhm_mhz) *
                      cfg.herald_efficiency;
    const double p_herald = h0 * p_proj;
    ev.herald_detected = rng.bernoulli(p_herald);
    if (ev.herald_detected) {
      ev.signal_state = heralded->partner;
      ev.conditional_signal_polarization = heralded->dominant_state();
    } else if (heralded) {
      ev.signal_state = (marginal - p_herald * heralded->partner) / (1.0 - p_herald);
    } else {
      ev.signal_state = marginal;
    }
    out.push_back(std::move(ev));
  }
  return out;
}

}  // namespace ionabsorb
