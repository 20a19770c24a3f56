// Dense spin-1/2 operators on the 2^N computational basis.
//
// Basis: index bit i (little-endian) = 1 for atom i in |up>,
// sigma_z|up> = +|up>. In the (down, up) component ordering the Pauli
// matrices used here are
//   sigma_x = [[0,1],[1,0]],  sigma_y = [[0,i],[-i,0]],  sigma_z = [[-1,0],[0,1]].
// They satisfy sigma_a sigma_b = i eps_abc sigma_c; the sign of sigma_y is
// fixed so that the pi/2-about-x preparation pulse rotates |down...down>
// into the +1 eigenstate of the total y-magnetization.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "xxzsim/common.hpp"
#include "xxzsim/couplings.hpp"
#include "xxzsim/pulse.hpp"

namespace xxzsim {

inline constexpr int kMaxDenseAtoms = 14;

struct OperatorMatrix {
  MatrixXc mat;
  int n_atoms = 0;

  Eigen::Index dim() const { return mat.rows(); }
};

namespace pauli {

inline Eigen::Matrix2cd x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

inline Eigen::Matrix2cd y() {
  Eigen::Matrix2cd m;
  m << Complex(0, 0), Complex(0, 1), Complex(0, -1), Complex(0, 0);
  return m;
}

inline Eigen::Matrix2cd z() {
  Eigen::Matrix2cd m;
  m << -1, 0, 0, 1;
  return m;
}

inline Eigen::Matrix2cd id() { return Eigen::Matrix2cd::Identity(); }

// n.sigma for a unit axis n.
inline Eigen::Matrix2cd along(const Vec3& n) {
  return n.x() * x() + n.y() * y() + n.z() * z();
}

// Single-qubit rotation exp(-i angle/2 n.sigma).
inline Eigen::Matrix2cd rotation(const Vec3& axis, double angle_rad) {
  const double c = std::cos(0.5 * angle_rad);
  const double s = std::sin(0.5 * angle_rad);
  return c * id() - Complex(0, 1) * s * along(axis);
}

}  // namespace pauli

inline void check_dense_cap(int n_atoms, int cap = kMaxDenseAtoms) {
  if (n_atoms < 1) throw ConfigError("need at least one atom");
  if (n_atoms > cap)
    throw ConfigError("dense operator construction limited to " +
                      std::to_string(cap) + " atoms, got " +
                      std::to_string(n_atoms));
}

// Embeds a single-qubit operator on atom i.
inline OperatorMatrix op_on_atom(int n_atoms, int atom,
                                 const Eigen::Matrix2cd& u) {
  check_dense_cap(n_atoms);
  const std::size_t dim = dim_for(n_atoms);
  const std::size_t mask = std::size_t{1} << atom;
  OperatorMatrix out{MatrixXc::Zero(dim, dim), n_atoms};
  for (std::size_t s = 0; s < dim; ++s) {
    const int b = (s & mask) ? 1 : 0;
    out.mat(s & ~mask, s) += u(0, b);
    out.mat(s | mask, s) += u(1, b);
  }
  return out;
}

// Sum over atoms of a single-qubit operator (e.g. total magnetization).
inline OperatorMatrix total_op(int n_atoms, const Eigen::Matrix2cd& u) {
  check_dense_cap(n_atoms);
  const std::size_t dim = dim_for(n_atoms);
  OperatorMatrix out{MatrixXc::Zero(dim, dim), n_atoms};
  for (int a = 0; a < n_atoms; ++a) {
    const std::size_t mask = std::size_t{1} << a;
    for (std::size_t s = 0; s < dim; ++s) {
      const int b = (s & mask) ? 1 : 0;
      out.mat(s & ~mask, s) += u(0, b);
      out.mat(s | mask, s) += u(1, b);
    }
  }
  return out;
}

// Global rotation exp(-i angle/2 sum_i n.sigma_i) as a dense unitary.
inline OperatorMatrix global_rotation(int n_atoms, const Vec3& axis,
                                      double angle_rad) {
  check_dense_cap(n_atoms);
  const Eigen::Matrix2cd u = pauli::rotation(axis, angle_rad);
  const std::size_t dim = dim_for(n_atoms);
  OperatorMatrix out{MatrixXc::Zero(dim, dim), n_atoms};
  // product over atoms of the same 2x2: element = prod_i u(b'_i, b_i)
  for (std::size_t sp = 0; sp < dim; ++sp) {
    for (std::size_t s = 0; s < dim; ++s) {
      Complex v = 1.0;
      for (int a = 0; a < n_atoms; ++a) {
        v *= u((sp >> a) & 1, (s >> a) & 1);
        if (v == Complex(0, 0)) break;
      }
      out.mat(sp, s) = v;
    }
  }
  return out;
}

// Generic two-body builder:
//   H = sum_{i<j} [wx_ij sx sx + wy_ij sy sy + wz_ij sz sz].
// Matrix elements: opposite bits on (i,j) -> flip-flop with wx+wy;
// equal bits -> double flip with wx-wy; sz sz contributes to the diagonal.
inline OperatorMatrix build_two_body(const Eigen::MatrixXd& wx,
                                     const Eigen::MatrixXd& wy,
                                     const Eigen::MatrixXd& wz,
                                     int dense_cap = kMaxDenseAtoms) {
  const int n = static_cast<int>(wx.rows());
  check_dense_cap(n, dense_cap);
  const std::size_t dim = dim_for(n);
  OperatorMatrix out{MatrixXc::Zero(dim, dim), n};
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const std::size_t mi = std::size_t{1} << i;
      const std::size_t mj = std::size_t{1} << j;
      const double flipflop = wx(i, j) + wy(i, j);
      const double doubleflip = wx(i, j) - wy(i, j);
      const double zz = wz(i, j);
      for (std::size_t s = 0; s < dim; ++s) {
        const bool bi = s & mi;
        const bool bj = s & mj;
        if (zz != 0.0)
          out.mat(s, s) += zz * (bi == bj ? 1.0 : -1.0);
        if (bi != bj) {
          if (flipflop != 0.0) out.mat(s ^ (mi | mj), s) += flipflop;
        } else {
          if (doubleflip != 0.0) out.mat(s ^ (mi | mj), s) += doubleflip;
        }
      }
    }
  }
  return out;
}

// H_XX = 1/2 sum_{i!=j} J_ij (sx_i sx_j + sy_i sy_j), energies in MHz.
inline OperatorMatrix build_xx(const CouplingMatrix& jm,
                               int dense_cap = kMaxDenseAtoms) {
  jm.validate();
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(jm.size(), jm.size());
  return build_two_body(jm.values, jm.values, zero, dense_cap);
}

inline double jx_factor(double delta) { return 2.0 / (2.0 + delta); }
inline double jz_factor(double delta) { return 2.0 * delta / (2.0 + delta); }

// XXZ with per-pair J^x = 2 J/(2+delta), J^z = 2 J delta/(2+delta).
inline OperatorMatrix build_xxz(const CouplingMatrix& jm, double delta,
                                int dense_cap = kMaxDenseAtoms) {
  if (delta < 0.0 || delta > 2.0)
    throw ConfigError("anisotropy must lie in [0, 2], got " + std::to_string(delta));
  jm.validate();
  const Eigen::MatrixXd jx = jx_factor(delta) * jm.values;
  const Eigen::MatrixXd jz = jz_factor(delta) * jm.values;
  return build_two_body(jx, jx, jz, dense_cap);
}

// Cycle-averaged XYZ Hamiltonian:
//   H = 1/2 sum_{i!=j} (2 J_ij/t_c) [(tau1+tau2) xx + (tau1+tau3) yy
//                                    + (tau2+tau3) zz].
inline OperatorMatrix build_xyz(const CouplingMatrix& jm, double tau1_us,
                                double tau2_us, double tau3_us, double tc_us,
                                int dense_cap = kMaxDenseAtoms) {
  if (tau1_us < 0.0 || tau2_us < 0.0 || tau3_us < 0.0)
    throw ConfigError("delays must be non-negative");
  const double sum = 2.0 * (tau1_us + tau2_us + tau3_us);
  if (sum <= 0.0) throw ConfigError("delays must not all vanish");
  if (std::abs(sum - tc_us) > 1e-9 * std::max(sum, tc_us))
    throw ConfigError("t_c must equal 2(tau1+tau2+tau3)");
  jm.validate();
  const Eigen::MatrixXd base = (2.0 / tc_us) * jm.values;
  const Eigen::MatrixXd wx = (tau1_us + tau2_us) * base;
  const Eigen::MatrixXd wy = (tau1_us + tau3_us) * base;
  const Eigen::MatrixXd wz = (tau2_us + tau3_us) * base;
  return build_two_body(wx, wy, wz, dense_cap);
}

// Instantaneous driven Hamiltonian H(t) = H_XX + Omega(t)/2 sum_i n.sigma_i
// with Omega and the axis read from the cycle at time t (one cycle;
// periodic extension is the caller's job).
inline OperatorMatrix driven_hamiltonian(const CouplingMatrix& jm,
                                         const PulseSequence& seq,
                                         double t_us,
                                         int dense_cap = kMaxDenseAtoms) {
  OperatorMatrix h = build_xx(jm, dense_cap);
  double cursor = 0.0;
  for (const auto& e : seq.elements) {
    cursor += e.gap_before_us;
    const double window = e.pulse.window_us();
    if (t_us >= cursor && t_us <= cursor + window) {
      const double omega = e.pulse.rabi_at(t_us - cursor - 0.5 * window);
      if (omega > 0.0) {
        const OperatorMatrix drive = total_op(h.n_atoms, pauli::along(e.pulse.axis()));
        h.mat += 0.5 * omega * drive.mat;
      }
      return h;
    }
    cursor += window;
  }
  return h;
}

// Toggling-frame time average of the driven Hamiltonian over one cycle of
// instantaneous pulses: each gap contributes its duration times H_XX
// conjugated by the pulses already applied.
inline OperatorMatrix average_of_sequence(const PulseSequence& seq,
                                          const CouplingMatrix& jm,
                                          int dense_cap = kMaxDenseAtoms) {
  for (const auto& e : seq.elements) {
    if (e.pulse.envelope != Envelope::Delta)
      throw ConfigError("average_of_sequence needs instantaneous pulses");
    if (std::abs(e.pulse.area_rad - M_PI / 2.0) > 1e-12)
      throw ConfigError("average_of_sequence assumes pi/2 pulse areas");
  }
  if (seq.cycle_us <= 0.0) throw ConfigError("cycle duration must be positive");
  const OperatorMatrix hxx = build_xx(jm, dense_cap);
  const int n = hxx.n_atoms;
  MatrixXc acc = MatrixXc::Identity(hxx.dim(), hxx.dim());
  MatrixXc avg = MatrixXc::Zero(hxx.dim(), hxx.dim());
  auto add_gap = [&](double dur) {
    if (dur > 0.0) avg += dur * (acc.adjoint() * hxx.mat * acc);
  };
  for (const auto& e : seq.elements) {
    add_gap(e.gap_before_us);
    acc = global_rotation(n, e.pulse.axis(), e.pulse.area_rad).mat * acc;
  }
  add_gap(seq.trailing_gap_us);
  return {avg / seq.cycle_us, n};
}

inline double hermiticity_error(const OperatorMatrix& h) {
  return (h.mat - h.mat.adjoint()).cwiseAbs().maxCoeff();
}

inline double commutator_norm(const OperatorMatrix& a, const OperatorMatrix& b) {
  return (a.mat * b.mat - b.mat * a.mat).cwiseAbs().maxCoeff();
}

// Sparse triplet dump (row, col, re, im) for cross-implementation diffing.
inline nlohmann::json operator_to_json(const OperatorMatrix& h,
                                       double tol = 1e-14) {
  nlohmann::json j;
  j["n_atoms"] = h.n_atoms;
  j["dim"] = h.dim();
  auto entries = nlohmann::json::array();
  for (Eigen::Index c = 0; c < h.mat.cols(); ++c)
    for (Eigen::Index r = 0; r < h.mat.rows(); ++r) {
      const Complex v = h.mat(r, c);
      if (std::abs(v) > tol)
        entries.push_back({r, c, v.real(), v.imag()});
    }
  j["entries"] = std::move(entries);
  return j;
}

}  // namespace xxzsim
