// Least-squares damped-cosine fit,
//   y(t) = offset + amp * exp(-decay t) * cos(2 pi f t + phase),
// via Gauss-Newton with Levenberg damping and a zero-crossing frequency
// seed. Used to extract oscillation frequencies from simulated series.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "xxzsim/common.hpp"

namespace xxzsim {

struct FitResult {
  double frequency_mhz = 0.0;
  double frequency_sigma = 0.0;
  double amplitude = 0.0;
  double decay_per_us = 0.0;
  double phase_rad = 0.0;
  double offset = 0.0;
  double residual_rms = 0.0;
  bool degenerate = false;  // no resolvable oscillation
  bool converged = false;
};

namespace detail {

inline double model_eval(const std::array<double, 5>& p, double t) {
  // p = {offset, amp, decay, freq, phase}
  return p[0] + p[1] * std::exp(-p[2] * t) * std::cos(kTwoPi * p[3] * t + p[4]);
}

}  // namespace detail

inline FitResult fit_frequency(const std::vector<double>& times_us,
                               const std::vector<double>& values) {
  if (times_us.size() != values.size() || times_us.size() < 8)
    throw ConfigError("frequency fit needs at least 8 samples");
  const int n = static_cast<int>(times_us.size());
  FitResult out;

  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / n;
  double lo = values[0], hi = values[0];
  for (const double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double amp0 = 0.5 * (hi - lo);
  const double span = times_us.back() - times_us.front();
  if (span <= 0.0) throw ConfigError("time grid must be increasing");

  // frequency seed from zero crossings of the centered series
  int crossings = 0;
  for (int i = 1; i < n; ++i) {
    const double a = values[i - 1] - mean, b = values[i] - mean;
    if ((a < 0 && b >= 0) || (a > 0 && b <= 0)) ++crossings;
  }
  if (amp0 < 1e-12 || crossings < 3) {
    out.degenerate = true;
    out.offset = mean;
    double ss = 0.0;
    for (const double v : values) ss += (v - mean) * (v - mean);
    out.residual_rms = std::sqrt(ss / n);
    return out;
  }
  const double f0 = 0.5 * crossings / span;

  // try a few phase seeds, keep the best converged fit
  std::array<double, 5> best{};
  double best_sse = 1e300;
  bool any = false;
  for (const double phase0 : {0.0, M_PI / 2, M_PI, 3 * M_PI / 2}) {
    std::array<double, 5> p = {mean, amp0, 0.0, f0, phase0};
    double lambda = 1e-3;
    double sse = 0.0;
    for (int i = 0; i < n; ++i) {
      const double r = values[i] - detail::model_eval(p, times_us[i]);
      sse += r * r;
    }
    for (int iter = 0; iter < 200; ++iter) {
      Eigen::MatrixXd jac(n, 5);
      Eigen::VectorXd res(n);
      for (int i = 0; i < n; ++i) {
        const double t = times_us[i];
        const double e = std::exp(-p[2] * t);
        const double arg = kTwoPi * p[3] * t + p[4];
        const double c = std::cos(arg), s = std::sin(arg);
        res[i] = values[i] - (p[0] + p[1] * e * c);
        jac(i, 0) = 1.0;
        jac(i, 1) = e * c;
        jac(i, 2) = -t * p[1] * e * c;
        jac(i, 3) = -kTwoPi * t * p[1] * e * s;
        jac(i, 4) = -p[1] * e * s;
      }
      Eigen::MatrixXd jtj = jac.transpose() * jac;
      jtj.diagonal() *= (1.0 + lambda);
      const Eigen::VectorXd step = jtj.ldlt().solve(jac.transpose() * res);
      std::array<double, 5> q = p;
      for (int k = 0; k < 5; ++k) q[k] += step[k];
      double new_sse = 0.0;
      for (int i = 0; i < n; ++i) {
        const double r = values[i] - detail::model_eval(q, times_us[i]);
        new_sse += r * r;
      }
      if (new_sse < sse) {
        const bool done = (sse - new_sse) < 1e-14 * (1.0 + sse);
        p = q;
        sse = new_sse;
        lambda = std::max(lambda * 0.3, 1e-12);
        if (done) break;
      } else {
        lambda *= 10.0;
        if (lambda > 1e8) break;
      }
    }
    if (sse < best_sse) {
      best_sse = sse;
      best = p;
      any = true;
    }
  }

  if (!any) {
    out.degenerate = true;
    return out;
  }
  out.offset = best[0];
  out.amplitude = std::abs(best[1]);
  out.decay_per_us = best[2];
  out.frequency_mhz = std::abs(best[3]);
  out.phase_rad = best[4];
  out.residual_rms = std::sqrt(best_sse / n);
  out.converged = true;

  // asymptotic frequency uncertainty from the jacobian at the optimum
  Eigen::MatrixXd jac(n, 5);
  for (int i = 0; i < n; ++i) {
    const double t = times_us[i];
    const double e = std::exp(-best[2] * t);
    const double arg = kTwoPi * best[3] * t + best[4];
    jac(i, 0) = 1.0;
    jac(i, 1) = e * std::cos(arg);
    jac(i, 2) = -t * best[1] * e * std::cos(arg);
    jac(i, 3) = -kTwoPi * t * best[1] * e * std::sin(arg);
    jac(i, 4) = -best[1] * e * std::sin(arg);
  }
  const Eigen::MatrixXd jtj = jac.transpose() * jac;
  const double resvar = best_sse / std::max(1, n - 5);
  const Eigen::MatrixXd cov = jtj.ldlt().solve(
      Eigen::MatrixXd::Identity(5, 5) * resvar);
  if (cov(3, 3) > 0.0 && std::isfinite(cov(3, 3)))
    out.frequency_sigma = std::sqrt(cov(3, 3));
  return out;
}

}  // namespace xxzsim
