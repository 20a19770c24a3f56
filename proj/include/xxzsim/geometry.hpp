// Atom-array geometries: chains, rings, rectangular 2D arrays and custom
// position sets, plus shot-to-shot position jitter.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "xxzsim/common.hpp"
#include "xxzsim/rng.hpp"

namespace xxzsim {

enum class Boundary { OBC_chain, PBC_ring, Square2D, Custom };

inline std::string to_string(Boundary b) {
  switch (b) {
    case Boundary::OBC_chain: return "obc_chain";
    case Boundary::PBC_ring: return "pbc_ring";
    case Boundary::Square2D: return "square2d";
    case Boundary::Custom: return "custom";
  }
  return "custom";
}

inline Boundary boundary_from_string(const std::string& s) {
  if (s == "obc_chain") return Boundary::OBC_chain;
  if (s == "pbc_ring") return Boundary::PBC_ring;
  if (s == "square2d") return Boundary::Square2D;
  if (s == "custom") return Boundary::Custom;
  throw ConfigError("unknown boundary kind: " + s);
}

struct Geometry {
  std::vector<Vec3> positions;  // um
  Boundary boundary = Boundary::Custom;
  Vec3 quantization_axis = Vec3(0, 0, 1);  // unit vector

  int size() const { return static_cast<int>(positions.size()); }

  void validate() const {
    if (positions.empty()) throw ConfigError("geometry has no atoms");
    const double axis_norm = quantization_axis.norm();
    if (std::abs(axis_norm - 1.0) > 1e-9)
      throw ConfigError("quantization axis must have unit norm");
    for (std::size_t i = 0; i < positions.size(); ++i)
      for (std::size_t j = i + 1; j < positions.size(); ++j)
        if ((positions[i] - positions[j]).norm() <= 1e-9)
          throw ConfigError("coincident atoms at indices " + std::to_string(i) +
                            "," + std::to_string(j));
  }
};

inline Vec3 normalized_axis(const Vec3& axis) {
  const double n = axis.norm();
  if (n <= 0.0) throw ConfigError("quantization axis must be nonzero");
  return axis / n;
}

// Straight chain along x with spacing a.
inline Geometry make_chain(int n, double spacing_um, const Vec3& axis) {
  if (n < 1) throw ConfigError("chain needs at least one atom");
  if (spacing_um <= 0.0) throw ConfigError("spacing must be positive");
  Geometry g;
  g.boundary = Boundary::OBC_chain;
  g.quantization_axis = normalized_axis(axis);
  g.positions.reserve(n);
  for (int i = 0; i < n; ++i)
    g.positions.emplace_back(i * spacing_um, 0.0, 0.0);
  g.validate();
  return g;
}

// Ring in the xy plane. The radius a/(2 sin(pi/N)) makes the
// nearest-neighbor chord distance equal to the requested spacing.
inline Geometry make_ring(int n, double spacing_um, const Vec3& axis) {
  if (n < 2) throw ConfigError("ring needs at least two atoms");
  if (spacing_um <= 0.0) throw ConfigError("spacing must be positive");
  Geometry g;
  g.boundary = Boundary::PBC_ring;
  g.quantization_axis = normalized_axis(axis);
  const double radius = spacing_um / (2.0 * std::sin(M_PI / n));
  g.positions.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double phi = kTwoPi * i / n;
    g.positions.emplace_back(radius * std::cos(phi), radius * std::sin(phi), 0.0);
  }
  g.validate();
  return g;
}

// rows x cols rectangular array in the xy plane.
inline Geometry make_square(int rows, int cols, double spacing_um, const Vec3& axis) {
  if (rows < 1 || cols < 1) throw ConfigError("array shape must be positive");
  if (spacing_um <= 0.0) throw ConfigError("spacing must be positive");
  Geometry g;
  g.boundary = Boundary::Square2D;
  g.quantization_axis = normalized_axis(axis);
  g.positions.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      g.positions.emplace_back(r * spacing_um, c * spacing_um, 0.0);
  g.validate();
  return g;
}

inline Geometry make_custom(std::vector<Vec3> positions, const Vec3& axis) {
  Geometry g;
  g.boundary = Boundary::Custom;
  g.quantization_axis = normalized_axis(axis);
  g.positions = std::move(positions);
  g.validate();
  return g;
}

// Independently perturbs every coordinate by a zero-mean normal deviate of
// standard deviation sigma. Deterministic under a fixed seed.
inline Geometry jitter(const Geometry& g, double sigma_um, std::uint64_t seed) {
  if (sigma_um < 0.0) throw ConfigError("jitter sigma must be >= 0");
  if (sigma_um == 0.0) return g;
  Geometry out = g;
  Rng rng(seed);
  for (auto& p : out.positions)
    for (int c = 0; c < 3; ++c) p[c] += sigma_um * rng.normal();
  return out;
}

inline nlohmann::json geometry_to_json(const Geometry& g) {
  nlohmann::json j;
  j["boundary"] = to_string(g.boundary);
  j["axis"] = {g.quantization_axis.x(), g.quantization_axis.y(),
               g.quantization_axis.z()};
  auto positions = nlohmann::json::array();
  for (const auto& p : g.positions)
    positions.push_back({p.x(), p.y(), p.z()});
  j["positions"] = std::move(positions);
  return j;
}

inline Geometry geometry_from_json(const nlohmann::json& j) {
  Geometry g;
  g.boundary = boundary_from_string(j.at("boundary").get<std::string>());
  const auto axis = j.at("axis");
  if (axis.size() != 3) throw ConfigError("axis must have 3 components");
  g.quantization_axis =
      normalized_axis(Vec3(axis[0].get<double>(), axis[1].get<double>(),
                           axis[2].get<double>()));
  for (const auto& p : j.at("positions")) {
    if (p.size() != 3) throw ConfigError("positions must be 3d coordinates");
    g.positions.emplace_back(p[0].get<double>(), p[1].get<double>(),
                             p[2].get<double>());
  }
  g.validate();
  return g;
}

}  // namespace xxzsim
