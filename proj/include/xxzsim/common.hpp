// Shared aliases, unit conventions and error types.
//
// Unit conventions used throughout the library:
//   lengths in micrometers, couplings and Rabi frequencies in MHz (linear
//   frequency), times in microseconds. An energy E (MHz) advances the
//   dynamical phase by 2*pi*E*t (t in us), i.e. U(t) = exp(-i 2pi H t).
//
// Basis convention: for N atoms, computational basis index n has bit i
// (little-endian, bit 0 = atom 0) equal to 1 for atom i in |up> and 0 for
// |down>; sigma_z|up> = +|up>.
#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace xxzsim {

using Complex = std::complex<double>;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;
using Vec3 = Eigen::Vector3d;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Raised on invalid configuration or precondition violations (CLI exit 2).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Raised when a numerical contract is violated at run time, e.g. norm
// drift or a non-convergent integrator (CLI exit 3).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::size_t dim_for(int n_atoms) {
  if (n_atoms < 1 || n_atoms > 30)
    throw ConfigError("atom count out of range: " + std::to_string(n_atoms));
  return std::size_t{1} << n_atoms;
}

}  // namespace xxzsim
