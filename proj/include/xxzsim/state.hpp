// State-vector helpers: product states, in-place single-qubit gates and
// local expectation values.
#pragma once

#include <cmath>
#include <vector>

#include "xxzsim/common.hpp"
#include "xxzsim/operators.hpp"

namespace xxzsim {

// Basis state for an up/down pattern (bit i = 1 means atom i up).
inline VectorXc basis_state(int n_atoms, std::size_t pattern) {
  const std::size_t dim = dim_for(n_atoms);
  if (pattern >= dim) throw ConfigError("basis pattern out of range");
  VectorXc psi = VectorXc::Zero(dim);
  psi[pattern] = 1.0;
  return psi;
}

inline VectorXc all_down_state(int n_atoms) { return basis_state(n_atoms, 0); }

// Product state from per-atom (down, up) amplitude pairs.
inline VectorXc product_state(const std::vector<Eigen::Vector2cd>& single) {
  const int n = static_cast<int>(single.size());
  const std::size_t dim = dim_for(n);
  VectorXc psi(dim);
  for (std::size_t s = 0; s < dim; ++s) {
    Complex v = 1.0;
    for (int a = 0; a < n; ++a) v *= single[a]((s >> a) & 1);
    psi[s] = v;
  }
  return psi;
}

// Applies a 2x2 gate to one atom, in place.
inline void apply_single_qubit(VectorXc& psi, int n_atoms, int atom,
                               const Eigen::Matrix2cd& u) {
  const std::size_t dim = dim_for(n_atoms);
  const std::size_t mask = std::size_t{1} << atom;
  for (std::size_t s = 0; s < dim; ++s) {
    if (s & mask) continue;
    const Complex a0 = psi[s];
    const Complex a1 = psi[s | mask];
    psi[s] = u(0, 0) * a0 + u(0, 1) * a1;
    psi[s | mask] = u(1, 0) * a0 + u(1, 1) * a1;
  }
}

// Applies the same 2x2 gate to every atom (global rotation).
inline void apply_global_gate(VectorXc& psi, int n_atoms,
                              const Eigen::Matrix2cd& u) {
  for (int a = 0; a < n_atoms; ++a) apply_single_qubit(psi, n_atoms, a, u);
}

inline double sigma_z_site(const VectorXc& psi, int n_atoms, int atom) {
  const std::size_t mask = std::size_t{1} << atom;
  double acc = 0.0;
  for (Eigen::Index s = 0; s < psi.size(); ++s) {
    const double p = std::norm(psi[s]);
    acc += (s & mask) ? p : -p;
  }
  return acc;
}

inline double sigma_zz_pair(const VectorXc& psi, int n_atoms, int i, int j) {
  const std::size_t mi = std::size_t{1} << i;
  const std::size_t mj = std::size_t{1} << j;
  double acc = 0.0;
  for (Eigen::Index s = 0; s < psi.size(); ++s) {
    const double p = std::norm(psi[s]);
    acc += ((bool(s & mi) == bool(s & mj)) ? p : -p);
  }
  return acc;
}

inline double sigma_y_site(const VectorXc& psi, int n_atoms, int atom) {
  // <sigma_y> with sigma_y = [[0, i], [-i, 0]] in (down, up) ordering
  const std::size_t mask = std::size_t{1} << atom;
  Complex acc = 0.0;
  for (Eigen::Index s = 0; s < psi.size(); ++s) {
    if (s & mask) continue;
    // phi = sigma_y psi: phi[down] = i psi[up], phi[up] = -i psi[down]
    acc += std::conj(psi[s]) * Complex(0, 1) * psi[s | mask];
    acc += std::conj(psi[s | mask]) * Complex(0, -1) * psi[s];
  }
  return acc.real();
}

inline double sigma_x_site(const VectorXc& psi, int n_atoms, int atom) {
  const std::size_t mask = std::size_t{1} << atom;
  Complex acc = 0.0;
  for (Eigen::Index s = 0; s < psi.size(); ++s) {
    if (s & mask) continue;
    acc += std::conj(psi[s]) * psi[s | mask];
    acc += std::conj(psi[s | mask]) * psi[s];
  }
  return acc.real();
}

inline double total_sigma_y(const VectorXc& psi, int n_atoms) {
  double acc = 0.0;
  for (int a = 0; a < n_atoms; ++a) acc += sigma_y_site(psi, n_atoms, a);
  return acc;
}

inline double total_sigma_z(const VectorXc& psi, int n_atoms) {
  double acc = 0.0;
  for (int a = 0; a < n_atoms; ++a) acc += sigma_z_site(psi, n_atoms, a);
  return acc;
}

inline void check_normalized(const VectorXc& psi, double tol = 1e-9) {
  const double err = std::abs(psi.norm() - 1.0);
  if (err > tol)
    throw NumericError("state norm drift " + std::to_string(err) +
                       " exceeds tolerance");
}

}  // namespace xxzsim
