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

#include "ionabsorb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ionabsorb/error.hpp"

namespace ionabsorb {

namespace {

double log_pmf(std::uint64_t k, double mean) {
  if (mean <= 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return k * std::log(mean) - mean - std::lgamma(k + 1.0);
}

// Maps ticks to bin indices; exact integer division when t_b is a whole number
// of ticks.
class Binner {
 public:
  Binner(double tick_s, double t_b) : tick_s_(tick_s), t_b_(t_b) {
    double bt = t_b / tick_s;
    if (bt >= 1.0 && std::abs(bt - std::round(bt)) <= 1e-9 * bt)
      whole_ = static_cast<std::uint64_t>(std::llround(bt));
  }
  std::uint64_t bin(std::uint64_t tick) const {
    if (whole_) return tick / whole_;
    return static_cast<std::uint64_t>(std::floor(tick * tick_s_ / t_b_));
  }

 private:
  double tick_s_;
  double t_b_;
  std::uint64_t whole_ = 0;
};

std::size_t bin_total(double duration_s, double t_b) {
  if (!(duration_s >= 0.0)) throw usage_error("trace duration must be >= 0");
  double n = std::ceil(duration_s / t_b - 1e-9);
  return n > 0 ? static_cast<std::size_t>(n) : 0;
}

FluorescenceTrace make_trace(std::span<const std::uint64_t> ticks, double tick_s, double t_b,
                             double duration_s) {
  if (!(t_b > 0.0)) throw usage_error("bin size must be > 0");
  FluorescenceTrace tr;
  tr.bin_s = t_b;
  tr.counts.assign(bin_total(duration_s, t_b), 0);
  Binner b(tick_s, t_b);
  for (std::uint64_t t : ticks) {
    std::uint64_t i = b.bin(t);
    if (i < tr.counts.size()) ++tr.counts[i];
  }
  return tr;
}

std::vector<JumpEvent> crossings(const FluorescenceTrace& tr, std::span<const std::uint64_t> ticks,
                                 double tick_s, double n_th, std::size_t N,
                                 JumpDirection direction) {
  if (N < 2) throw usage_error("moving-average window must be >= 2 bins");
  std::vector<JumpEvent> out;
  const auto& c = tr.counts;
  if (c.size() < N + 1) return out;
  const double level = n_th * static_cast<double>(N);
  const Binner binner(tick_s, tr.bin_s);

  std::uint64_t sum = 0;
  for (std::size_t j = 0; j < N; ++j) sum += c[j];
  bool above = sum > level;
  for (std::size_t i = N; i < c.size(); ++i) {
    sum += c[i];
    sum -= c[i - N];
    bool now = above;
    if (sum > level) now = true;
    if (sum < level) now = false;
    if (now == above) continue;
    above = now;
    JumpDirection d = now ? JumpDirection::dark_to_bright : JumpDirection::bright_to_dark;
    if (d != direction) continue;
    JumpEvent ev{d, i, (i - N) * tr.bin_s, (i + 1) * tr.bin_s, {}, std::nullopt};
    auto lo = std::partition_point(ticks.begin(), ticks.end(),
                                   [&](std::uint64_t t) { return binner.bin(t) < i - N; });
    auto hi =
        std::partition_point(lo, ticks.end(), [&](std::uint64_t t) { return binner.bin(t) <= i; });
    ev.ticks.assign(lo, hi);
    out.push_back(std::move(ev));
  }
  return out;
}

bool extract_into(JumpEvent& ev, double tick_s, double tau_th) {
  if (ev.ticks.empty()) return false;
  std::vector<double> t(ev.ticks.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = ev.ticks[i] * tick_s;
  try {
    std::size_t k =
        extract_transition_photon(t, tau_th, ev.direction, ev.window_begin_s, ev.window_end_s);
    ev.transition_tick = ev.ticks[k];
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

std::vector<std::uint64_t> FluorescenceTrace::histogram() const {
  std::vector<std::uint64_t> h;
  for (std::uint32_t c : counts) {
    if (c >= h.size()) h.resize(c + 1, 0);
    ++h[c];
  }
  return h;
}

FluorescenceTrace bin_counts(const TimeTagStream& stream, std::uint8_t channel, double t_b,
                             double duration_s) {
  return make_trace(stream.channel_ticks(channel), stream.tick_seconds(), t_b, duration_s);
}

double poisson_lower_tail(std::uint64_t n, double mean) {
  if (n == 0) return 0.0;
  if (mean <= 0.0) return 1.0;
  if (static_cast<double>(n) > mean) return 1.0 - poisson_upper_tail(n, mean);
  double s = 0.0;
  for (std::uint64_t k = n; k-- > 0;) {
    double term = std::exp(log_pmf(k, mean));
    s += term;
    if (term < 1e-18 * s) break;
  }
  return std::min(s, 1.0);
}

double poisson_upper_tail(std::uint64_t n, double mean) {
  if (n == 0) return 1.0;
  if (mean <= 0.0) return 0.0;
  if (static_cast<double>(n) <= mean) return 1.0 - poisson_lower_tail(n, mean);
  double s = 0.0;
  for (std::uint64_t k = n;; ++k) {
    double term = std::exp(log_pmf(k, mean));
    s += term;
    if (term <= 1e-18 * s) break;
  }
  return std::min(s, 1.0);
}

double misclassification(std::uint64_t n, double mean_bright, double mean_dark) {
  return poisson_upper_tail(n, mean_dark) + poisson_lower_tail(n, mean_bright);
}

std::uint64_t optimal_count_threshold(double mean_bright, double mean_dark) {
  if (!(mean_dark >= 0.0) || !std::isfinite(mean_bright))
    throw usage_error("state means must be finite and >= 0");
  if (!(mean_bright > mean_dark))
    throw numeric_error("bright mean must exceed dark mean for a count threshold");
  const auto first = static_cast<std::uint64_t>(std::floor(mean_dark)) + 1;
  const auto last = static_cast<std::uint64_t>(std::floor(mean_bright));
  if (first > last) throw numeric_error("no integer threshold between the state means");
  std::uint64_t best = first;
  double best_f = misclassification(first, mean_bright, mean_dark);
  for (std::uint64_t n = first + 1; n <= last; ++n) {
    double f = misclassification(n, mean_bright, mean_dark);
    if (f < best_f) {
      best_f = f;
      best = n;
    }
  }
  return best;
}

StateMeans estimate_state_means(std::span<const std::uint64_t> histogram) {
  std::size_t lo = histogram.size(), hi = 0;
  for (std::size_t k = 0; k < histogram.size(); ++k)
    if (histogram[k] > 0) {
      lo = std::min(lo, k);
      hi = k;
    }
  if (lo > hi) throw numeric_error("empty count histogram");
  const double range = static_cast<double>(hi - lo);
  return estimate_state_means(histogram, lo + 0.25 * range, lo + 0.75 * range);
}

StateMeans estimate_state_means(std::span<const std::uint64_t> histogram, double init_low,
                                double init_high) {
  double n = 0.0, total = 0.0;
  std::size_t distinct = 0;
  for (std::size_t k = 0; k < histogram.size(); ++k) {
    n += histogram[k];
    total += static_cast<double>(k) * histogram[k];
    distinct += histogram[k] > 0;
  }
  if (distinct < 2) throw numeric_error("count histogram shows a single state");

  double lam[2] = {std::max(init_low, 1e-6), std::max(init_high, 1e-6)};
  double w[2] = {0.5, 0.5};
  double ll = -std::numeric_limits<double>::infinity();
  int it = 0;
  bool converged = false;
  for (; it < 500; ++it) {
    double N[2] = {0, 0}, S[2] = {0, 0}, new_ll = 0.0;
    for (std::size_t k = 0; k < histogram.size(); ++k) {
      if (histogram[k] == 0) continue;
      double l0 = std::log(w[0]) + log_pmf(k, lam[0]);
      double l1 = std::log(w[1]) + log_pmf(k, lam[1]);
      double m = std::max(l0, l1);
      double lse = m + std::log(std::exp(l0 - m) + std::exp(l1 - m));
      double r0 = std::exp(l0 - lse);
      double h = static_cast<double>(histogram[k]);
      N[0] += h * r0;
      N[1] += h * (1.0 - r0);
      S[0] += h * r0 * k;
      S[1] += h * (1.0 - r0) * k;
      new_ll += h * lse;
    }
    if (!(N[0] > 0.0 && N[1] > 0.0)) throw numeric_error("EM collapsed onto a single component");
    double change = 0.0;
    for (int c = 0; c < 2; ++c) {
      double l = S[c] / N[c];
      change = std::max(change, std::abs(l - lam[c]) / std::max(lam[c], 1e-12));
      lam[c] = std::max(l, 1e-300);
      w[c] = N[c] / n;
    }
    bool flat = std::abs(new_ll - ll) <= 1e-13 * std::abs(new_ll);
    ll = new_ll;
    if (change < 1e-10 || (flat && change < 1e-7)) {
      converged = true;
      ++it;
      break;
    }
  }
  if (!converged) throw numeric_error("EM did not converge in 500 iterations");

  double mean = total / n, ll1 = 0.0;
  for (std::size_t k = 0; k < histogram.size(); ++k)
    if (histogram[k] > 0) ll1 += histogram[k] * log_pmf(k, mean);
  if (ll - ll1 < std::log(n)) throw numeric_error("count histogram shows a single state");

  int b = lam[0] >= lam[1] ? 0 : 1;
  return {lam[b], lam[1 - b], w[b], it};
}

std::vector<JumpEvent> detect_jumps(const TimeTagStream& stream, std::uint8_t channel, double n_th,
                                    double t_b, std::size_t N, JumpDirection direction,
                                    double duration_s) {
  const std::vector<std::uint64_t> ticks = stream.channel_ticks(channel);
  FluorescenceTrace tr = make_trace(ticks, stream.tick_seconds(), t_b, duration_s);
  return crossings(tr, ticks, stream.tick_seconds(), n_th, N, direction);
}

double optimal_delay_threshold(double r_on, double r_off) {
  if (!(r_on > 0.0 && r_off > 0.0)) throw numeric_error("delay threshold needs positive rates");
  return std::log1p(r_on / r_off) / r_on;
}

double detection_probability(double tau, double r_on, double r_off) {
  return std::exp(-r_off * tau) * -std::expm1(-r_on * tau);
}

std::size_t extract_transition_photon(std::span<const double> times, double tau_th,
                                      JumpDirection direction, std::optional<double> window_begin,
                                      std::optional<double> window_end) {
  const std::size_t n = times.size();
  if (n == 0) throw usage_error("transition window is empty");
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  auto gap_prev = [&](std::size_t i) {
    if (i > 0) return times[i] - times[i - 1];
    return window_begin ? times[0] - *window_begin : nan;
  };
  auto gap_next = [&](std::size_t i) {
    if (i + 1 < n) return times[i + 1] - times[i];
    return window_end ? *window_end - times[i] : nan;
  };
  if (direction == JumpDirection::dark_to_bright) {
    for (std::size_t i = 0; i < n; ++i)
      if (gap_prev(i) > tau_th && tau_th > gap_next(i)) return i;
  } else {
    for (std::size_t i = n; i-- > 0;)
      if (gap_next(i) > tau_th && tau_th > gap_prev(i)) return i;
  }
  throw numeric_error("ambiguous jump window: no gap crosses the delay threshold");
}

std::vector<double> dark_period_durations(std::span<const double> to_dark,
                                          std::span<const double> to_bright) {
  std::vector<double> out;
  std::optional<double> pending;
  std::size_t i = 0, j = 0;
  while (i < to_dark.size() || j < to_bright.size()) {
    if (j == to_bright.size() || (i < to_dark.size() && to_dark[i] <= to_bright[j])) {
      pending = to_dark[i++];
    } else {
      if (pending) out.push_back(to_bright[j] - *pending);
      pending.reset();
      ++j;
    }
  }
  return out;
}

double derived_absorption_rate(double tau_on, double tau_off) {
  if (!(tau_on > 0.0 && tau_on <= tau_off))
    throw numeric_error("derived absorption rate needs 0 < tau_on <= tau_off");
  return 1.0 / tau_on - 1.0 / tau_off;
}

RateEstimate derived_absorption_rate(const FitResult& on, const FitResult& off) {
  const FitParameter& a = on.parameter("tau");
  const FitParameter& b = off.parameter("tau");
  if (!(a.value > 0.0 && b.value > 0.0)) throw numeric_error("lifetimes must be positive");
  double v = 1.0 / a.value - 1.0 / b.value;
  double e = std::hypot(a.error / (a.value * a.value), b.error / (b.value * b.value));
  return {v, e};
}

std::vector<std::uint64_t> JumpAnalysis::first_photon_ticks() const {
  std::vector<std::uint64_t> out;
  for (const auto& ev : to_bright)
    if (ev.transition_tick) out.push_back(*ev.transition_tick);
  return out;
}

JumpAnalysis analyze_jumps(const TimeTagStream& stream, double duration_s,
                           const JumpAnalysisConfig& cfg) {
  if (!(duration_s > 0.0)) throw usage_error("jump analysis needs a positive duration");
  const double tick_s = stream.tick_seconds();
  const std::vector<std::uint64_t> ticks = stream.channel_ticks(cfg.channel);
  const FluorescenceTrace tr = make_trace(ticks, tick_s, cfg.bin_s, duration_s);

  JumpAnalysis ja;
  const std::vector<std::uint64_t> hist = tr.histogram();
  ja.means = estimate_state_means(hist);
  ja.count_threshold =
      cfg.count_threshold.value_or(optimal_count_threshold(ja.means.bright, ja.means.dark));
  ja.r_on = ja.means.bright / cfg.bin_s;
  ja.r_off = std::max(ja.means.dark / cfg.bin_s, 1.0 / duration_s);
  ja.tau_th = optimal_delay_threshold(ja.r_on, ja.r_off);

  const double n_th = static_cast<double>(ja.count_threshold);
  ja.to_bright = crossings(tr, ticks, tick_s, n_th, cfg.window_bins, JumpDirection::dark_to_bright);
  ja.to_dark = crossings(tr, ticks, tick_s, n_th, cfg.window_bins, JumpDirection::bright_to_dark);

  std::vector<double> up, down;
  for (auto& ev : ja.to_bright) {
    if (extract_into(ev, tick_s, ja.tau_th))
      up.push_back(*ev.transition_tick * tick_s);
    else
      ++ja.ambiguous;
  }
  for (auto& ev : ja.to_dark) {
    if (extract_into(ev, tick_s, ja.tau_th))
      down.push_back(*ev.transition_tick * tick_s);
    else
      ++ja.ambiguous;
  }
  ja.dark_durations = dark_period_durations(down, up);
  if (ja.dark_durations.size() >= 2) ja.dark_fit = fit_exponential(ja.dark_durations);
  return ja;
}

std::vector<std::uint64_t> gated_first_photons(const TimeTagStream& stream, double window_s,
                                               double tau_th, std::uint8_t fluorescence,
                                               std::uint8_t marker) {
  if (!(window_s > 0.0 && tau_th > 0.0)) throw usage_error("gate and threshold must be > 0");
  const double tick_s = stream.tick_seconds();
  const std::vector<std::uint64_t> fl = stream.channel_ticks(fluorescence);
  const std::uint64_t width = stream.to_ticks(window_s);
  std::vector<std::uint64_t> out;
  std::vector<double> t;
  for (std::uint64_t m : stream.channel_ticks(marker)) {
    auto lo = std::lower_bound(fl.begin(), fl.end(), m);
    auto hi = std::lower_bound(lo, fl.end(), m + width);
    if (lo == hi) continue;
    t.clear();
    for (auto it = lo; it != hi; ++it) t.push_back(*it * tick_s);
    try {
      std::size_t k =
          extract_transition_photon(t, tau_th, JumpDirection::dark_to_bright,
                                    -std::numeric_limits<double>::infinity(), (m + width) * tick_s);
      out.push_back(*(lo + k));
    } catch (const Error&) {
    }
  }
  return out;
}

}  // namespace ionabsorb
