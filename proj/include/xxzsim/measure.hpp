// State preparation with per-atom infidelity and readout with SPAM
// errors: classical flip channels on the intended pattern and on the
// detected bits.
//
// Readout model: bit 1 means "read as up". A true up is read as down with
// probability p_false_positive; a true down is read as up with
// probability p_false_negative.
#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "xxzsim/common.hpp"
#include "xxzsim/operators.hpp"
#include "xxzsim/parallel.hpp"
#include "xxzsim/rng.hpp"
#include "xxzsim/state.hpp"

namespace xxzsim {

struct SpamModel {
  double p_false_positive = 0.05;   // true up read as down
  double p_false_negative = 0.035;  // true down read as up

  void validate() const {
    if (p_false_positive < 0 || p_false_positive > 1 || p_false_negative < 0 ||
        p_false_negative > 1)
      throw ConfigError("SPAM probabilities must lie in [0, 1]");
  }

  // Affine action on sigma_z expectations: measured = a * true + b.
  double affine_scale() const { return 1.0 - p_false_positive - p_false_negative; }
  double affine_offset() const { return p_false_negative - p_false_positive; }
};

inline SpamModel no_spam() { return SpamModel{0.0, 0.0}; }

enum class PrepTarget { AllDown, AllPlusY, Pattern };

struct PreparationSpec {
  PrepTarget target = PrepTarget::AllDown;
  int n_atoms = 0;
  std::uint64_t pattern = 0;  // up-atoms bitmask for Pattern targets
  double p_prep = 0.0;        // per-atom flip probability of the intended bit

  void validate() const {
    if (n_atoms < 1) throw ConfigError("preparation needs at least one atom");
    if (p_prep < 0.0 || p_prep > 1.0)
      throw ConfigError("preparation error must lie in [0, 1]");
    if (pattern >= dim_for(n_atoms))
      throw ConfigError("preparation pattern out of range");
  }
};

inline std::uint64_t domain_wall_pattern(int n_atoms, int block_start,
                                         int block_len) {
  if (block_start < 0 || block_len < 1 || block_start + block_len > n_atoms)
    throw ConfigError("domain wall block out of range");
  std::uint64_t p = 0;
  for (int i = 0; i < block_len; ++i)
    p |= std::uint64_t{1} << (block_start + i);
  return p;
}

inline PreparationSpec prepare_domain_wall(int n_atoms, int block_start,
                                           int block_len, double p_prep = 0.0) {
  PreparationSpec spec;
  spec.target = PrepTarget::Pattern;
  spec.n_atoms = n_atoms;
  spec.pattern = domain_wall_pattern(n_atoms, block_start, block_len);
  spec.p_prep = p_prep;
  spec.validate();
  return spec;
}

// Intended basis pattern with per-atom flips applied (one shot).
inline std::uint64_t sample_prepared_pattern(const PreparationSpec& spec,
                                             Rng& rng) {
  spec.validate();
  std::uint64_t base =
      spec.target == PrepTarget::Pattern ? spec.pattern : std::uint64_t{0};
  if (spec.p_prep > 0.0)
    for (int a = 0; a < spec.n_atoms; ++a)
      if (rng.bernoulli(spec.p_prep)) base ^= std::uint64_t{1} << a;
  return base;
}

// The global pi/2 rotation about x used to prepare and read out along y.
inline Eigen::Matrix2cd y_basis_rotation() {
  return pauli::rotation(Vec3(1, 0, 0), M_PI / 2);
}

// Full state-vector preparation for one shot.
inline VectorXc prepare_state(const PreparationSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  const std::uint64_t pattern = sample_prepared_pattern(spec, rng);
  VectorXc psi = basis_state(spec.n_atoms, pattern);
  if (spec.target == PrepTarget::AllPlusY)
    apply_global_gate(psi, spec.n_atoms, y_basis_rotation());
  return psi;
}

// Product-state preparation (per-atom amplitudes) for cluster methods.
inline std::vector<Eigen::Vector2cd> prepare_product(const PreparationSpec& spec,
                                                     std::uint64_t seed) {
  Rng rng(seed);
  const std::uint64_t pattern = sample_prepared_pattern(spec, rng);
  std::vector<Eigen::Vector2cd> single(spec.n_atoms);
  for (int a = 0; a < spec.n_atoms; ++a) {
    Eigen::Vector2cd v = (pattern >> a) & 1 ? Eigen::Vector2cd(0, 1)
                                            : Eigen::Vector2cd(1, 0);
    if (spec.target == PrepTarget::AllPlusY) v = y_basis_rotation() * v;
    single[a] = v;
  }
  return single;
}

struct ShotRecord {
  std::uint64_t bits = 0;  // bit 1 = read as up
  int shot_id = 0;
};

// Born-rule sampling followed by independent per-atom readout flips.
// Deterministic under (seed); shot s draws from its own derived stream,
// so results do not depend on worker count or chunking.
inline std::vector<ShotRecord> sample_bitstrings(const VectorXc& psi,
                                                 int n_atoms, int n_shots,
                                                 const SpamModel& spam,
                                                 std::uint64_t seed) {
  spam.validate();
  check_normalized(psi);
  if (n_shots < 0) throw ConfigError("shot count must be >= 0");
  std::vector<ShotRecord> shots(n_shots);
  if (n_shots == 0) return shots;
  std::vector<double> cdf(psi.size());
  double acc = 0.0;
  for (Eigen::Index s = 0; s < psi.size(); ++s) {
    acc += std::norm(psi[s]);
    cdf[s] = acc;
  }
  for (int s = 0; s < n_shots; ++s) {
    Rng rng(derive_seed(seed, "readout", s));
    const double u = rng.uniform() * acc;
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    std::uint64_t bits = static_cast<std::uint64_t>(it - cdf.begin());
    for (int a = 0; a < n_atoms; ++a) {
      const bool up = (bits >> a) & 1;
      const double flip = up ? spam.p_false_positive : spam.p_false_negative;
      if (flip > 0.0 && rng.bernoulli(flip)) bits ^= std::uint64_t{1} << a;
    }
    shots[s] = ShotRecord{bits, s};
  }
  return shots;
}

// Applies the readout flip channel to a basis-state probability vector,
// giving the exact distribution of measured bitstrings (no sampling
// noise).
inline std::vector<double> apply_readout_channel(const VectorXc& psi,
                                                 int n_atoms,
                                                 const SpamModel& spam) {
  spam.validate();
  std::vector<double> p(psi.size());
  for (Eigen::Index s = 0; s < psi.size(); ++s) p[s] = std::norm(psi[s]);
  const double pfp = spam.p_false_positive, pfn = spam.p_false_negative;
  if (pfp == 0.0 && pfn == 0.0) return p;
  std::vector<double> q(p.size());
  for (int a = 0; a < n_atoms; ++a) {
    const std::size_t mask = std::size_t{1} << a;
    for (std::size_t s = 0; s < p.size(); ++s) {
      if (s & mask) continue;
      const double down = p[s], up = p[s | mask];
      q[s] = down * (1 - pfn) + up * pfp;
      q[s | mask] = down * pfn + up * (1 - pfp);
    }
    std::swap(p, q);
  }
  return p;
}

// ---------------------------------------------------------------------
// Analytic SPAM-adjusted expectations (deterministic curve comparison).
// ---------------------------------------------------------------------

inline double spam_adjusted_sigma_z(double true_value, const SpamModel& spam) {
  return spam.affine_scale() * true_value + spam.affine_offset();
}

inline double spam_adjusted_sigma_z_site(const VectorXc& psi, int n_atoms,
                                         int atom, const SpamModel& spam) {
  return spam_adjusted_sigma_z(sigma_z_site(psi, n_atoms, atom), spam);
}

// Independent per-atom channels turn sigma_z sigma_z into
// a^2 zz + a b (z_i + z_j) + b^2.
inline double spam_adjusted_sigma_zz(const VectorXc& psi, int n_atoms, int i,
                                     int j, const SpamModel& spam) {
  const double a = spam.affine_scale(), b = spam.affine_offset();
  return a * a * sigma_zz_pair(psi, n_atoms, i, j) +
         a * b * (sigma_z_site(psi, n_atoms, i) + sigma_z_site(psi, n_atoms, j)) +
         b * b;
}

// <sigma_y> is measured by the global basis-change rotation followed by
// z readout, so SPAM acts in the detection basis.
inline double spam_adjusted_sigma_y_site(const VectorXc& psi, int n_atoms,
                                         int atom, const SpamModel& spam) {
  VectorXc rotated = psi;
  apply_global_gate(rotated, n_atoms, y_basis_rotation());
  return spam_adjusted_sigma_z(sigma_z_site(rotated, n_atoms, atom), spam);
}

inline double spam_adjusted_total_sigma_y(const VectorXc& psi, int n_atoms,
                                          const SpamModel& spam) {
  VectorXc rotated = psi;
  apply_global_gate(rotated, n_atoms, y_basis_rotation());
  double acc = 0.0;
  for (int a = 0; a < n_atoms; ++a)
    acc += spam_adjusted_sigma_z(sigma_z_site(rotated, n_atoms, a), spam);
  return acc;
}

// Probability of reading out an exact bit pattern under the SPAM channel.
inline double spam_adjusted_pattern_probability(const VectorXc& psi,
                                                int n_atoms,
                                                std::uint64_t pattern,
                                                const SpamModel& spam) {
  const auto p = apply_readout_channel(psi, n_atoms, spam);
  if (pattern >= p.size()) throw ConfigError("pattern out of range");
  return p[pattern];
}

// Plain-text shots export: header plus one bitstring per line, character
// k is atom k ('1' = read as up).
inline void write_shots(std::ostream& os, const std::vector<ShotRecord>& shots,
                        int n_atoms, std::uint64_t seed, const SpamModel& spam) {
  os << "# n_atoms=" << n_atoms << " seed=" << seed
     << " p_false_positive=" << spam.p_false_positive
     << " p_false_negative=" << spam.p_false_negative << "\n";
  for (const auto& s : shots) {
    std::string line(n_atoms, '0');
    for (int a = 0; a < n_atoms; ++a)
      if ((s.bits >> a) & 1) line[a] = '1';
    os << line << "\n";
  }
}

}  // namespace xxzsim
