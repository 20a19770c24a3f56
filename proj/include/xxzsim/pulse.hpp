// Microwave pulses and the four-pulse Floquet cycle.
//
// A cycle drives rotations (X, -Y, Y, -X), i.e. phases (0, -pi/2, pi/2, pi),
// with free-evolution delays arranged so that the cycle average of the
// driven Hamiltonian reproduces the XYZ weights
//   (tau1+tau2) xx, (tau1+tau3) yy, (tau2+tau3) zz,  t_c = 2(tau1+tau2+tau3).
// The pulse train inside one cycle is
//   [X] tau2 [-Y] 2*tau3 [Y] tau2 [-X] 2*tau1 (cycle end),
// with delays measured peak-to-peak for finite pulses. This ordering is
// fixed by the requirement that the delta-pulse toggling-frame average
// equals the XYZ Hamiltonian exactly (see average_of_sequence tests).
#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xxzsim/common.hpp"
#include "xxzsim/rng.hpp"

namespace xxzsim {

enum class Envelope { Delta, Gaussian };

// Rotation-axis tilt (Monte-Carlo microwave imperfection): the effective
// axis is sqrt(1-n1^2-n2^2)*nominal + n1*(in-plane orthogonal) + n2*z.
struct AxisTilt {
  double n1 = 0.0;
  double n2 = 0.0;
};

struct Pulse {
  double phase_rad = 0.0;          // axis in the equatorial plane
  double area_rad = M_PI / 2.0;    // Bloch rotation angle
  Envelope envelope = Envelope::Delta;
  double width_1e2_us = 0.0;       // full 1/e^2 width (Gaussian only)
  AxisTilt tilt;

  // Gaussian profile half-width: Omega(t) = peak * exp(-2 t^2 / w^2).
  double gaussian_w() const { return 0.5 * width_1e2_us; }

  // Truncation window, 2x the 1/e^2 full width, centered on the peak.
  double window_us() const {
    return envelope == Envelope::Delta ? 0.0 : 2.0 * width_1e2_us;
  }

  // Peak Rabi frequency (MHz), calibrated so the integral over the
  // truncation window gives exactly the nominal area.
  double peak_rabi_mhz() const {
    if (envelope == Envelope::Delta) return 0.0;
    const double w = gaussian_w();
    // int_{-W/2}^{W/2} exp(-2 t^2/w^2) dt with W = 4w
    const double integral =
        w / std::sqrt(2.0) * std::sqrt(M_PI) * std::erf(2.0 * std::sqrt(2.0));
    return (area_rad / kTwoPi) / integral;
  }

  // Mean Rabi frequency (MHz): pulse area divided by the truncation window.
  double mean_rabi_mhz() const {
    if (envelope == Envelope::Delta) return 0.0;
    return (area_rad / kTwoPi) / window_us();
  }

  // Rabi envelope at offset tau from the pulse center, MHz.
  double rabi_at(double tau_us) const {
    if (envelope == Envelope::Delta) return 0.0;
    if (std::abs(tau_us) > 0.5 * window_us()) return 0.0;
    const double w = gaussian_w();
    return peak_rabi_mhz() * std::exp(-2.0 * tau_us * tau_us / (w * w));
  }

  // Rotation angle (rad) accumulated between offsets [a, b] from the
  // pulse center: 2*pi * integral of Omega(t) dt.
  double angle_between(double a_us, double b_us) const {
    if (envelope == Envelope::Delta) return area_rad;
    const double hw = 0.5 * window_us();
    a_us = std::max(a_us, -hw);
    b_us = std::min(b_us, hw);
    if (b_us <= a_us) return 0.0;
    const double w = gaussian_w();
    const double s = std::sqrt(2.0) / w;
    const double integral = w / std::sqrt(2.0) * std::sqrt(M_PI) / 2.0 *
                            (std::erf(s * b_us) - std::erf(s * a_us));
    return kTwoPi * peak_rabi_mhz() * integral;
  }

  // Unit rotation axis, including the tilt.
  Vec3 axis() const {
    const double planar = std::sqrt(
        std::max(0.0, 1.0 - tilt.n1 * tilt.n1 - tilt.n2 * tilt.n2));
    const Vec3 nominal(std::cos(phase_rad), std::sin(phase_rad), 0.0);
    const Vec3 orth(-std::sin(phase_rad), std::cos(phase_rad), 0.0);
    return planar * nominal + tilt.n1 * orth + tilt.n2 * Vec3(0, 0, 1);
  }
};

inline Pulse delta_pulse(double phase_rad, double area_rad = M_PI / 2.0) {
  Pulse p;
  p.phase_rad = phase_rad;
  p.area_rad = area_rad;
  p.envelope = Envelope::Delta;
  return p;
}

inline Pulse gaussian_pulse(double phase_rad, double width_1e2_us,
                            double area_rad = M_PI / 2.0) {
  if (width_1e2_us <= 0.0) throw ConfigError("gaussian width must be positive");
  Pulse p;
  p.phase_rad = phase_rad;
  p.area_rad = area_rad;
  p.envelope = Envelope::Gaussian;
  p.width_1e2_us = width_1e2_us;
  return p;
}

// Width that realizes a requested mean Rabi frequency at fixed area.
inline double width_for_mean_rabi(double mean_rabi_mhz,
                                  double area_rad = M_PI / 2.0) {
  if (mean_rabi_mhz <= 0.0) throw ConfigError("mean Rabi must be positive");
  // mean = (area/2pi) / (2 * width)
  return (area_rad / kTwoPi) / (2.0 * mean_rabi_mhz);
}

// One Floquet cycle: pulses with the free-evolution gap preceding each,
// plus a trailing gap closing the cycle.
struct PulseSequence {
  struct Element {
    double gap_before_us = 0.0;  // free evolution before this pulse window
    Pulse pulse;
  };

  std::vector<Element> elements;
  double trailing_gap_us = 0.0;
  double cycle_us = 0.0;  // t_c
  bool delta2_mode = false;
  double tau1_us = 0.0, tau2_us = 0.0, tau3_us = 0.0;

  double total_window_us() const {
    double w = 0.0;
    for (const auto& e : elements) w += e.pulse.window_us();
    return w;
  }

  double total_gap_us() const {
    double g = trailing_gap_us;
    for (const auto& e : elements) g += e.gap_before_us;
    return g;
  }
};

struct Delays {
  double tau1_us = 0.0;
  double tau2_us = 0.0;
  double tau3_us = 0.0;
};

// Solves tau2 = tau3, delta = 2 tau2/(tau1+tau2), t_c = 2(tau1+tau2+tau3).
inline Delays anisotropy_to_delays(double delta, double tc_us) {
  if (delta < 0.0 || delta > 2.0)
    throw ConfigError("anisotropy must lie in [0, 2], got " + std::to_string(delta));
  if (tc_us <= 0.0) throw ConfigError("cycle duration must be positive");
  Delays d;
  d.tau2_us = delta * tc_us / (2.0 * (2.0 + delta));
  d.tau3_us = d.tau2_us;
  d.tau1_us = (2.0 - delta) * tc_us / (2.0 * (2.0 + delta));
  return d;
}

struct CycleParams {
  Envelope envelope = Envelope::Delta;
  double width_1e2_us = 0.0;  // required for Gaussian
};

// Builds the canonical (X, -Y, Y, -X) cycle for a given anisotropy.
// delta == 2 sets delta2_mode: the trailing gap vanishes, so consecutive
// cycles place -X and X back to back; the multi-cycle compiler then drops
// those interior pairs, keeping only the global first X and final -X.
inline PulseSequence build_cycle(double delta, double tc_us,
                                 const CycleParams& params = {}) {
  const Delays d = anisotropy_to_delays(delta, tc_us);
  PulseSequence seq;
  seq.cycle_us = tc_us;
  seq.tau1_us = d.tau1_us;
  seq.tau2_us = d.tau2_us;
  seq.tau3_us = d.tau3_us;
  seq.delta2_mode = (d.tau1_us == 0.0);

  auto make = [&](double phase) {
    return params.envelope == Envelope::Delta
               ? delta_pulse(phase)
               : gaussian_pulse(phase, params.width_1e2_us);
  };

  if (delta == 0.0) {
    // tau2 = tau3 = 0: the four pulses coincide and compose to the
    // identity; the cycle degenerates to free evolution.
    seq.trailing_gap_us = tc_us;
    return seq;
  }

  const double window = make(0.0).window_us();
  // peak-to-peak separations (X, -Y, Y, -X, next X)
  const double seps[4] = {d.tau2_us, 2.0 * d.tau3_us, d.tau2_us,
                          2.0 * d.tau1_us};
  if (params.envelope == Envelope::Gaussian) {
    double min_sep = std::min({seps[0], seps[1], seq.delta2_mode ? seps[0] : seps[3]});
    if (min_sep < window) {
      const double min_tc = tc_us * window / min_sep;
      throw ConfigError(
          "pulse windows overlap free-evolution gaps; need t_c >= " +
          std::to_string(min_tc) + " us for this width (got " +
          std::to_string(tc_us) + ")");
    }
  }

  const double phases[4] = {0.0, -M_PI / 2.0, M_PI / 2.0, M_PI};
  for (int k = 0; k < 4; ++k) {
    PulseSequence::Element e;
    e.pulse = make(phases[k]);
    e.gap_before_us = (k == 0) ? 0.0 : seps[k - 1] - window;
    seq.elements.push_back(e);
  }
  seq.trailing_gap_us = seps[3] - window;
  if (seq.delta2_mode && params.envelope == Envelope::Gaussian)
    seq.trailing_gap_us = 0.0;  // resolved by the multi-cycle compiler
  return seq;
}

// Draws an axis tilt with n1, n2 ~ Normal(0, dtheta); pairs with
// n1^2 + n2^2 >= 1 are redrawn (negligible rate for dtheta << 1).
inline AxisTilt draw_tilt(Rng& rng, double dtheta) {
  AxisTilt t;
  if (dtheta <= 0.0) return t;
  do {
    t.n1 = dtheta * rng.normal();
    t.n2 = dtheta * rng.normal();
  } while (t.n1 * t.n1 + t.n2 * t.n2 >= 1.0);
  return t;
}

// Fresh tilt per pulse; deterministic under the seed.
inline PulseSequence perturb_axes(const PulseSequence& seq, double dtheta,
                                  std::uint64_t seed) {
  if (dtheta < 0.0) throw ConfigError("axis tilt spread must be >= 0");
  PulseSequence out = seq;
  if (dtheta == 0.0) return out;
  Rng rng(seed);
  for (auto& e : out.elements) e.pulse.tilt = draw_tilt(rng, dtheta);
  return out;
}

// Ordered dump of one cycle: pulse windows and gaps with start times.
inline nlohmann::json sequence_to_json(const PulseSequence& seq) {
  nlohmann::json items = nlohmann::json::array();
  double t = 0.0;
  auto push_gap = [&](double dur) {
    if (dur <= 0.0) return;
    items.push_back({{"t_start_us", t}, {"kind", "gap"}, {"duration_us", dur}});
    t += dur;
  };
  for (const auto& e : seq.elements) {
    push_gap(e.gap_before_us);
    items.push_back({{"t_start_us", t},
                     {"kind", "pulse"},
                     {"phi_rad", e.pulse.phase_rad},
                     {"area_rad", e.pulse.area_rad},
                     {"omega_peak_MHz", e.pulse.peak_rabi_mhz()},
                     {"width_ns", e.pulse.width_1e2_us * 1e3}});
    t += e.pulse.window_us();
  }
  push_gap(seq.trailing_gap_us);
  nlohmann::json j;
  j["tc_us"] = seq.cycle_us;
  j["delta2_mode"] = seq.delta2_mode;
  j["timeline"] = std::move(items);
  return j;
}

}  // namespace xxzsim
