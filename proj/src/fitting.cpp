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

#include "ionabsorb/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include "ionabsorb/error.hpp"

namespace ionabsorb {

namespace {

// Canonical order so results do not depend on input order.
std::vector<DataPoint> sorted_points(std::span<const DataPoint> in) {
  std::vector<DataPoint> p(in.begin(), in.end());
  for (const DataPoint& d : p)
    if (!(d.sigma > 0.0) || !std::isfinite(d.x) || !std::isfinite(d.y))
      throw usage_error("fit points need finite coordinates and sigma > 0");
  std::sort(p.begin(), p.end(), [](const DataPoint& a, const DataPoint& b) {
    return std::tie(a.x, a.y, a.sigma) < std::tie(b.x, b.y, b.sigma);
  });
  return p;
}

FitParameter param(std::string name, double value, double variance) {
  return {std::move(name), value, std::sqrt(std::max(variance, 0.0))};
}

struct Lorentz {
  // amplitude, center, fwhm, offset
  static double eval(const Eigen::Vector4d& q, double x) {
    double u = 2.0 * (x - q(1)) / q(2);
    return q(3) + q(0) / (1.0 + u * u);
  }
  static Eigen::Vector4d grad(const Eigen::Vector4d& q, double x) {
    double u = 2.0 * (x - q(1)) / q(2);
    double d = 1.0 / (1.0 + u * u);
    Eigen::Vector4d g;
    g(0) = d;
    g(1) = q(0) * d * d * 2.0 * u * 2.0 / q(2);
    g(2) = q(0) * d * d * 2.0 * u * u / q(2);
    g(3) = 1.0;
    return g;
  }
};

}  // namespace

const FitParameter& FitResult::parameter(std::string_view name) const {
  for (const auto& p : parameters)
    if (p.name == name) return p;
  throw usage_error("fit has no parameter '" + std::string(name) + "'");
}

FitResult fit_exponential(std::span<const double> samples) {
  if (samples.size() < 2) throw numeric_error("exponential fit needs at least 2 samples");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  double sum = 0.0;
  for (double v : s) {
    if (!(v >= 0.0)) throw usage_error("exponential samples must be >= 0");
    sum += v;
  }
  const double n = static_cast<double>(s.size());
  const double tau = sum / n;
  if (!(tau > 0.0)) throw numeric_error("exponential fit: all samples are zero");
  double ks = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double F = 1.0 - std::exp(-s[i] / tau);
    ks = std::max({ks, std::abs(F - i / n), std::abs((i + 1) / n - F)});
  }
  FitResult r{FitModel::exponential,
              {param("tau", tau, tau * tau / n)},
              ks,
              1,
              Eigen::MatrixXd::Constant(1, 1, tau * tau / n)};
  return r;
}

FitResult fit_lorentzian(std::span<const DataPoint> points) {
  if (points.size() < 5) throw usage_error("Lorentzian fit needs at least 5 points");
  const std::vector<DataPoint> p = sorted_points(points);
  const std::size_t n = p.size();

  // Initial guess: argmax center (first on ties), min offset, second-moment width.
  std::size_t imax = 0;
  double ymin = p[0].y;
  for (std::size_t i = 1; i < n; ++i) {
    if (p[i].y > p[imax].y) imax = i;
    ymin = std::min(ymin, p[i].y);
  }
  double wsum = 0.0, mean = 0.0;
  for (const auto& d : p) {
    wsum += d.y - ymin;
    mean += (d.y - ymin) * d.x;
  }
  const double span = p.back().x - p.front().x;
  double width = 0.5 * span;
  if (wsum > 0.0) {
    mean /= wsum;
    double var = 0.0;
    for (const auto& d : p) var += (d.y - ymin) * (d.x - mean) * (d.x - mean);
    width = std::clamp(2.0 * std::sqrt(var / wsum), span / (4.0 * n), span);
  }
  Eigen::Vector4d q(p[imax].y - ymin, p[imax].x, width, ymin);
  if (!(q(2) > 0.0)) throw numeric_error("Lorentzian fit: points do not span an x range");

  auto chi2_of = [&](const Eigen::Vector4d& v) {
    double c = 0.0;
    for (const auto& d : p) {
      double r = (d.y - Lorentz::eval(v, d.x)) / d.sigma;
      c += r * r;
    }
    return c;
  };

  double chi2 = chi2_of(q);
  double lambda = 1e-3;
  int it = 0;
  bool converged = false;
  Eigen::Matrix4d JtJ;
  for (; it < 200 && !converged; ++it) {
    JtJ.setZero();
    Eigen::Vector4d Jtr = Eigen::Vector4d::Zero();
    for (const auto& d : p) {
      Eigen::Vector4d g = Lorentz::grad(q, d.x) / d.sigma;
      JtJ += g * g.transpose();
      Jtr += g * (d.y - Lorentz::eval(q, d.x)) / d.sigma;
    }
    bool improved = false;
    while (lambda < 1e12) {
      Eigen::Matrix4d A = JtJ;
      A.diagonal() += lambda * JtJ.diagonal().cwiseMax(1e-300);
      Eigen::Vector4d step = A.ldlt().solve(Jtr);
      Eigen::Vector4d trial = q + step;
      double c = std::isfinite(step.sum()) ? chi2_of(trial) : INFINITY;
      if (c <= chi2) {
        double rel_step = (step.cwiseAbs().array() / (q.cwiseAbs().array() + 1e-12)).maxCoeff();
        converged = chi2 - c <= 1e-12 * chi2 + 1e-300 || rel_step < 1e-12;
        q = trial;
        chi2 = c;
        lambda = std::max(lambda * 0.3, 1e-12);
        improved = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) converged = true;  // no downhill step at machine precision
  }
  if (!converged) throw numeric_error("Lorentzian fit did not converge in 200 iterations");

  q(2) = std::abs(q(2));
  JtJ.setZero();
  for (const auto& d : p) {
    Eigen::Vector4d g = Lorentz::grad(q, d.x) / d.sigma;
    JtJ += g * g.transpose();
  }
  Eigen::FullPivLU<Eigen::Matrix4d> lu(JtJ);
  if (!lu.isInvertible()) throw numeric_error("Lorentzian fit: singular Fisher information");
  Eigen::Matrix4d cov = lu.inverse();
  FitResult r{FitModel::lorentzian,
              {param("amplitude", q(0), cov(0, 0)), param("center", q(1), cov(1, 1)),
               param("fwhm", q(2), cov(2, 2)), param("offset", q(3), cov(3, 3))},
              std::sqrt(chi2),
              it,
              cov};
  return r;
}

FitResult fit_sinusoid_fixed_period(std::span<const DataPoint> points, double period) {
  if (!(period > 0.0)) throw usage_error("sinusoid period must be > 0");
  if (points.size() < 4) throw usage_error("sinusoid fit needs at least 4 points");
  const std::vector<DataPoint> p = sorted_points(points);
  if (p.back().x - p.front().x < period * (1.0 - 1e-9))
    throw usage_error("sinusoid fit points must span at least one period");
  const std::size_t n = p.size();
  const double k = 2.0 * std::numbers::pi / period;
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double w = 1.0 / p[i].sigma;
    A(i, 0) = w * std::sin(k * p[i].x);
    A(i, 1) = w * std::cos(k * p[i].x);
    A(i, 2) = w;
    y(i) = w * p[i].y;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (!(sv(2) > 1e-12 * sv(0))) throw numeric_error("sinusoid fit: degenerate design matrix");
  Eigen::Vector3d c = svd.solve(y);
  Eigen::Matrix3d cov = (A.transpose() * A).inverse();
  const double a = c(0), b = c(1), off = c(2);
  const double amp = std::hypot(a, b);
  // Gradients of amplitude, phase and visibility with respect to (a, b, offset).
  Eigen::Vector3d g_amp = amp > 0 ? Eigen::Vector3d(a / amp, b / amp, 0) : Eigen::Vector3d::Zero();
  Eigen::Vector3d g_phase =
      amp > 0 ? Eigen::Vector3d(-b / (amp * amp), a / (amp * amp), 0) : Eigen::Vector3d::Zero();
  Eigen::Vector3d g_vis = g_amp / off;
  g_vis(2) = -amp / (off * off);
  double chi2 = (A * c - y).squaredNorm();
  FitResult r{
      FitModel::sinusoid_fixed_period,
      {param("amplitude", amp, g_amp.dot(cov * g_amp)),
       param("phase", std::atan2(b, a), g_phase.dot(cov * g_phase)),
       param("offset", off, cov(2, 2)), param("visibility", amp / off, g_vis.dot(cov * g_vis))},
      std::sqrt(chi2),
      1,
      cov};
  return r;
}

FitResult fit_line(std::span<const DataPoint> points) {
  if (points.size() < 3) throw usage_error("line fit needs at least 3 points");
  const std::vector<DataPoint> p = sorted_points(points);
  const std::size_t n = p.size();
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd y(n);
  double wsum = 0.0, ymean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double w = 1.0 / p[i].sigma;
    A(i, 0) = w;
    A(i, 1) = w * p[i].x;
    y(i) = w * p[i].y;
    wsum += w * w;
    ymean += w * w * p[i].y;
  }
  ymean /= wsum;
  Eigen::Matrix2d N = A.transpose() * A;
  Eigen::FullPivLU<Eigen::Matrix2d> lu(N);
  if (!lu.isInvertible()) throw numeric_error("line fit: x values are degenerate");
  Eigen::Vector2d c = lu.solve(A.transpose() * y);
  Eigen::Matrix2d cov = lu.inverse();
  double ss_res = (A * c - y).squaredNorm();
  double ss_tot = 0.0;
  for (const auto& d : p) ss_tot += (d.y - ymean) * (d.y - ymean) / (d.sigma * d.sigma);
  double r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  FitResult r{FitModel::line,
              {param("intercept", c(0), cov(0, 0)),
               param("slope", c(1), cov(1, 1)),
               {"r_squared", r2, 0.0}},
              std::sqrt(ss_res),
              1,
              cov};
  return r;
}

}  // namespace ionabsorb
