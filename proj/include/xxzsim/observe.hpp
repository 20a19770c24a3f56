// Observables over states and shot records: magnetizations, spin-flip
// counts, domain-wall occurrence probabilities, magnetization-front
// position and the normalized time.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <vector>

#include "xxzsim/common.hpp"
#include "xxzsim/measure.hpp"
#include "xxzsim/state.hpp"

namespace xxzsim {

// --------------------------- magnetization ---------------------------

inline std::vector<double> sigma_z_profile(const VectorXc& psi, int n_atoms) {
  std::vector<double> out(n_atoms);
  for (int a = 0; a < n_atoms; ++a) out[a] = sigma_z_site(psi, n_atoms, a);
  return out;
}

struct SiteStats {
  std::vector<double> mean;
  std::vector<double> sem;
};

inline SiteStats sigma_z_profile(const std::vector<ShotRecord>& shots,
                                 int n_atoms) {
  if (shots.empty()) throw ConfigError("no shots");
  SiteStats st;
  st.mean.assign(n_atoms, 0.0);
  st.sem.assign(n_atoms, 0.0);
  for (const auto& s : shots)
    for (int a = 0; a < n_atoms; ++a)
      st.mean[a] += ((s.bits >> a) & 1) ? 1.0 : -1.0;
  const double n = static_cast<double>(shots.size());
  for (int a = 0; a < n_atoms; ++a) st.mean[a] /= n;
  for (const auto& s : shots)
    for (int a = 0; a < n_atoms; ++a) {
      const double v = ((s.bits >> a) & 1) ? 1.0 : -1.0;
      st.sem[a] += (v - st.mean[a]) * (v - st.mean[a]);
    }
  for (int a = 0; a < n_atoms; ++a)
    st.sem[a] = n > 1 ? std::sqrt(st.sem[a] / (n * (n - 1))) : 0.0;
  return st;
}

// Total y magnetization per atom (the measured convention: the global
// basis rotation maps y onto z before readout).
inline double per_atom_sigma_y(const VectorXc& psi, int n_atoms) {
  return total_sigma_y(psi, n_atoms) / n_atoms;
}

// ------------------------------ n_flip -------------------------------

inline int bond_count(int n_atoms, bool periodic) {
  return periodic ? n_atoms : n_atoms - 1;
}

// N_flip = 1/2 sum_bonds (1 - <sz_i sz_{i+1}>)
inline double n_flip(const VectorXc& psi, int n_atoms, bool periodic) {
  if (n_atoms < 2) throw ConfigError("n_flip needs at least two atoms");
  double acc = 0.0;
  for (int b = 0; b < bond_count(n_atoms, periodic); ++b)
    acc += 1.0 - sigma_zz_pair(psi, n_atoms, b, (b + 1) % n_atoms);
  return 0.5 * acc;
}

inline double n_flip(std::uint64_t bits, int n_atoms, bool periodic) {
  if (n_atoms < 2) throw ConfigError("n_flip needs at least two atoms");
  int flips = 0;
  for (int b = 0; b < bond_count(n_atoms, periodic); ++b) {
    const bool bi = (bits >> b) & 1;
    const bool bj = (bits >> ((b + 1) % n_atoms)) & 1;
    if (bi != bj) ++flips;
  }
  return static_cast<double>(flips);
}

struct MeanSem {
  double mean = 0.0;
  double sem = 0.0;
};

inline MeanSem n_flip(const std::vector<ShotRecord>& shots, int n_atoms,
                      bool periodic) {
  if (shots.empty()) throw ConfigError("no shots");
  double sum = 0.0, sum2 = 0.0;
  for (const auto& s : shots) {
    const double v = n_flip(s.bits, n_atoms, periodic);
    sum += v;
    sum2 += v * v;
  }
  const double n = static_cast<double>(shots.size());
  MeanSem out;
  out.mean = sum / n;
  out.sem = n > 1 ? std::sqrt(std::max(0.0, sum2 / n - out.mean * out.mean) /
                              (n - 1))
                  : 0.0;
  return out;
}

// ------------------------- domain-wall census ------------------------

struct DomainWallSpec {
  int n_atoms = 0;
  bool periodic = true;
  int block_start = 0;  // initial block of up atoms
  int block_len = 5;
  std::set<int> accepted_sizes = {4, 5, 6};
  double center_tolerance_sites = 1.0;

  void validate() const {
    if (n_atoms < 2) throw ConfigError("domain wall spec needs >= 2 atoms");
    if (accepted_sizes.empty()) throw ConfigError("accepted sizes must be non-empty");
    if (block_len < 1 || block_len >= n_atoms)
      throw ConfigError("initial block must be a proper subset of the chain");
    if (block_start < 0 || (!periodic && block_start + block_len > n_atoms))
      throw ConfigError("initial block out of range");
  }

  double initial_center() const { return block_start + 0.5 * (block_len - 1); }
};

enum class DwClass { None, Ini, Other };

namespace detail {

// Single maximal run of set bits under the boundary. Returns (start, len)
// or nullopt when the up sites do not form exactly one contiguous block.
inline std::optional<std::pair<int, int>> single_block(std::uint64_t bits,
                                                       int n, bool periodic) {
  const std::uint64_t full = (n == 64) ? ~std::uint64_t{0}
                                       : ((std::uint64_t{1} << n) - 1);
  bits &= full;
  if (bits == 0 || bits == full) return std::nullopt;
  // count rising edges around the boundary
  int edges = 0, start = -1;
  for (int i = 0; i < n; ++i) {
    const bool cur = (bits >> i) & 1;
    const bool prev = (bits >> ((i + n - 1) % n)) & 1;
    if (cur && !prev) {
      ++edges;
      start = i;
    }
  }
  if (periodic) {
    if (edges != 1) return std::nullopt;
  } else {
    // open chain: the wrap edge at site 0 counts only when site 0 is set
    // and site n-1 is not part of the same block
    int open_edges = 0;
    start = -1;
    for (int i = 0; i < n; ++i) {
      const bool cur = (bits >> i) & 1;
      const bool prev = i > 0 && ((bits >> (i - 1)) & 1);
      if (cur && !prev) {
        ++open_edges;
        start = i;
      }
    }
    if (open_edges != 1) return std::nullopt;
  }
  const int len = __builtin_popcountll(bits);
  // verify contiguity by re-synthesizing the block
  std::uint64_t synth = 0;
  for (int k = 0; k < len; ++k)
    synth |= std::uint64_t{1} << ((start + k) % n);
  if (!periodic && start + len > n) return std::nullopt;
  if (synth != bits) return std::nullopt;
  return std::make_pair(start, len);
}

inline double circular_distance(double a, double b, int n, bool periodic) {
  double d = std::abs(a - b);
  if (periodic) d = std::min(d, n - d);
  return d;
}

}  // namespace detail

inline DwClass classify_domain_wall(std::uint64_t bits,
                                    const DomainWallSpec& spec) {
  spec.validate();
  const auto block = detail::single_block(bits, spec.n_atoms, spec.periodic);
  if (!block) return DwClass::None;
  if (!spec.accepted_sizes.count(block->second)) return DwClass::None;
  const double center = block->first + 0.5 * (block->second - 1);
  const double dist = detail::circular_distance(center, spec.initial_center(),
                                                spec.n_atoms, spec.periodic);
  return dist <= spec.center_tolerance_sites + 1e-9 ? DwClass::Ini
                                                    : DwClass::Other;
}

struct DwProbabilities {
  double p_ini = 0.0;
  double p_other = 0.0;
};

inline DwProbabilities domain_wall_probabilities(
    const std::vector<ShotRecord>& shots, const DomainWallSpec& spec) {
  if (shots.empty()) throw ConfigError("no shots");
  DwProbabilities out;
  for (const auto& s : shots) {
    switch (classify_domain_wall(s.bits, spec)) {
      case DwClass::Ini: out.p_ini += 1.0; break;
      case DwClass::Other: out.p_other += 1.0; break;
      case DwClass::None: break;
    }
  }
  out.p_ini /= shots.size();
  out.p_other /= shots.size();
  return out;
}

// Exact (sampling-free) census over a measured-bitstring distribution.
inline DwProbabilities domain_wall_probabilities(
    const std::vector<double>& measured_probs, const DomainWallSpec& spec) {
  DwProbabilities out;
  for (std::size_t s = 0; s < measured_probs.size(); ++s) {
    switch (classify_domain_wall(s, spec)) {
      case DwClass::Ini: out.p_ini += measured_probs[s]; break;
      case DwClass::Other: out.p_other += measured_probs[s]; break;
      case DwClass::None: break;
    }
  }
  return out;
}

// ------------------------- magnetization front -----------------------

struct FrontEstimate {
  double xi_sites = 0.0;
  bool flagged = false;  // no localizable front (fully melted / uniform)
};

// Outermost site whose |<sz_i> - initial| exceeds the threshold, measured
// from the initial wall edge, in sites. The profile is scanned outward
// from each wall; if the deviation at a region's far end exceeds the
// threshold the front has left the chain and the estimate is flagged.
inline FrontEstimate profile_width(const std::vector<double>& profile,
                                   const std::vector<double>& initial,
                                   const DomainWallSpec& spec,
                                   double threshold = 0.15) {
  spec.validate();
  if (profile.size() != initial.size() ||
      static_cast<int>(profile.size()) != spec.n_atoms)
    throw ConfigError("profile size mismatch");
  const int n = spec.n_atoms;
  auto dev = [&](int i) { return std::abs(profile[i] - initial[i]); };

  // wall edges as bond positions (site + 0.5)
  std::vector<double> walls;
  const int bstart = spec.block_start, blen = spec.block_len;
  if (spec.periodic) {
    walls.push_back(std::fmod(bstart + n - 0.5, n));
    walls.push_back(std::fmod(bstart + blen - 0.5, n));
  } else {
    if (bstart > 0) walls.push_back(bstart - 0.5);
    if (bstart + blen < n) walls.push_back(bstart + blen - 0.5);
  }
  if (walls.empty()) throw ConfigError("initial pattern has no wall");

  FrontEstimate out;
  bool any_inside = false;
  double xi = 0.0;
  for (int i = 0; i < n; ++i) {
    if (dev(i) <= threshold) continue;
    double nearest = 1e300;
    for (const double w : walls)
      nearest = std::min(nearest,
                         detail::circular_distance(i, w, n, spec.periodic));
    xi = std::max(xi, nearest);
    any_inside = true;
  }
  // flagged when every site has melted past the threshold
  int unmelted = 0;
  for (int i = 0; i < n; ++i)
    if (dev(i) <= threshold) ++unmelted;
  if (unmelted == 0) {
    out.flagged = true;
    out.xi_sites = xi;
    return out;
  }
  out.xi_sites = any_inside ? xi : 0.0;
  return out;
}

// --------------------------- normalized time -------------------------

// t' = t * J_x(delta) / (J * 1us) with J_x = 2J/(2+delta); the coupling
// magnitude cancels and the anisotropy rescales the clock.
inline double normalized_time(double t_us, double delta, double j_mhz) {
  if (j_mhz <= 0.0) throw ConfigError("coupling must be positive");
  if (delta < 0.0 || delta > 2.0) throw ConfigError("anisotropy out of range");
  return t_us * 2.0 / (2.0 + delta);
}

inline double time_for_normalized(double t_prime, double delta) {
  return t_prime * (2.0 + delta) / 2.0;
}

}  // namespace xxzsim
