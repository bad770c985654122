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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ionabsorb {

enum class FitModel { exponential, lorentzian, sinusoid_fixed_period, line };

struct FitParameter {
  std::string name;
  double value;
  double error;  // 1 sigma
};

struct FitResult {
  FitModel model;
  std::vector<FitParameter> parameters;
  double residual_norm = 0.0;  // weighted, sqrt(chi^2); KS distance for the exponential
  int iterations = 0;
  Eigen::MatrixXd covariance;

  const FitParameter& parameter(std::string_view name) const;
  double value(std::string_view name) const { return parameter(name).value; }
  double error(std::string_view name) const { return parameter(name).error; }
};

struct DataPoint {
  double x;
  double y;
  double sigma;
  bool operator==(const DataPoint&) const = default;
};

/// Exponential MLE: tau = sample mean, error tau / sqrt(n).
FitResult fit_exponential(std::span<const double> samples);

/// offset + amplitude / (1 + (2 (x - center) / fwhm)^2), weighted
/// Levenberg-Marquardt, at most 200 iterations.
FitResult fit_lorentzian(std::span<const DataPoint> points);

/// offset + a sin(2 pi x / period) + b cos(2 pi x / period) by linear least
/// squares. Reports amplitude, phase (rad), offset and visibility.
FitResult fit_sinusoid_fixed_period(std::span<const DataPoint> points, double period);

/// intercept + slope x, plus the coefficient of determination as "r_squared".
FitResult fit_line(std::span<const DataPoint> points);

}  // namespace ionabsorb
