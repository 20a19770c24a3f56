// Dipole-dipole coupling matrix J_ij = C3 (1 - 3 cos^2 theta_ij) / (2 r_ij^3)
// with theta_ij the angle between the interatomic vector and the
// quantization axis. Entries are in MHz (linear frequency).
#pragma once

#include <cmath>

#include "xxzsim/common.hpp"
#include "xxzsim/geometry.hpp"

namespace xxzsim {

struct CouplingMatrix {
  Eigen::MatrixXd values;  // MHz, symmetric, zero diagonal

  int size() const { return static_cast<int>(values.rows()); }

  void validate() const {
    if (values.rows() != values.cols()) throw ConfigError("coupling matrix not square");
    for (int i = 0; i < values.rows(); ++i) {
      if (values(i, i) != 0.0) throw ConfigError("coupling matrix diagonal must be zero");
      for (int j = i + 1; j < values.cols(); ++j)
        if (std::abs(values(i, j) - values(j, i)) > 1e-12)
          throw ConfigError("coupling matrix must be symmetric");
    }
  }
};

inline CouplingMatrix couplings(const Geometry& g, double c3_mhz_um3) {
  if (!std::isfinite(c3_mhz_um3)) throw ConfigError("C3 must be finite");
  g.validate();
  const int n = g.size();
  CouplingMatrix jm;
  jm.values = Eigen::MatrixXd::Zero(n, n);
  const Vec3 axis = g.quantization_axis;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Vec3 d = g.positions[j] - g.positions[i];
      const double r = d.norm();
      const double cos_theta = d.dot(axis) / r;
      const double value =
          c3_mhz_um3 * (1.0 - 3.0 * cos_theta * cos_theta) / (2.0 * r * r * r);
      jm.values(i, j) = value;
      jm.values(j, i) = value;
    }
  }
  return jm;
}

// Uniform coupling matrix; handy for dimensionless tests.
inline CouplingMatrix uniform_couplings(int n, double j_mhz) {
  CouplingMatrix jm;
  jm.values = Eigen::MatrixXd::Constant(n, n, j_mhz);
  jm.values.diagonal().setZero();
  return jm;
}

// Nearest-neighbor-only chain couplings (tests).
inline CouplingMatrix chain_couplings(int n, double j_mhz) {
  CouplingMatrix jm;
  jm.values = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    jm.values(i, i + 1) = j_mhz;
    jm.values(i + 1, i) = j_mhz;
  }
  return jm;
}

// Per-atom mean of pairwise coupling magnitudes,
// J_m = (1/N) sum_{i != j} |J_ij|.
inline double mean_coupling(const CouplingMatrix& jm) {
  const int n = jm.size();
  if (n < 2) throw ConfigError("mean_coupling needs at least two atoms");
  return jm.values.cwiseAbs().sum() / n;
}

}  // namespace xxzsim
