// Moving-average cluster expansion: each atom's local observables are
// computed from the exact dynamics of the cluster formed by the atom and
// its strongest-coupled partners.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "xxzsim/couplings.hpp"
#include "xxzsim/parallel.hpp"
#include "xxzsim/propagate.hpp"
#include "xxzsim/pulse.hpp"
#include "xxzsim/state.hpp"

namespace xxzsim {

struct MaceConfig {
  int cluster_size = 12;
  int workers = 0;  // 0 = hardware concurrency
};

// Cluster of `center` plus its (size-1) strongest-|J| partners, ascending
// atom order; ties break by atom index.
inline std::vector<int> mace_cluster(const CouplingMatrix& jm, int center,
                                     int cluster_size) {
  const int n = jm.size();
  if (cluster_size < 2)
    throw ConfigError("cluster size must be at least 2");
  cluster_size = std::min(cluster_size, n);
  std::vector<int> others;
  others.reserve(n - 1);
  for (int i = 0; i < n; ++i)
    if (i != center) others.push_back(i);
  std::stable_sort(others.begin(), others.end(), [&](int a, int b) {
    return std::abs(jm.values(center, a)) > std::abs(jm.values(center, b));
  });
  std::vector<int> cluster(others.begin(), others.begin() + cluster_size - 1);
  cluster.push_back(center);
  std::sort(cluster.begin(), cluster.end());
  return cluster;
}

inline CouplingMatrix sub_couplings(const CouplingMatrix& jm,
                                    const std::vector<int>& atoms) {
  const int m = static_cast<int>(atoms.size());
  CouplingMatrix sub;
  sub.values = Eigen::MatrixXd::Zero(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      if (a != b) sub.values(a, b) = jm.values(atoms[a], atoms[b]);
  return sub;
}

// Per-site results on a time grid: value(site, time_index).
struct MaceSeries {
  std::vector<double> times_us;
  Eigen::MatrixXd sigma_y;  // N x T, empty unless requested
  Eigen::MatrixXd sigma_z;  // N x T, empty unless requested
};

struct MaceObservables {
  bool sigma_y = false;
  bool sigma_z = false;
};

namespace detail {

inline VectorXc cluster_product_state(
    const std::vector<Eigen::Vector2cd>& single, const std::vector<int>& atoms) {
  std::vector<Eigen::Vector2cd> sub;
  sub.reserve(atoms.size());
  for (int a : atoms) sub.push_back(single[a]);
  return product_state(sub);
}

}  // namespace detail

// Exact static XXZ evolution within each cluster; atom i's observables
// are read from the cluster centered on i.
inline MaceSeries mace_evolve_xxz(const CouplingMatrix& jm, double delta,
                                  const std::vector<Eigen::Vector2cd>& initial,
                                  const std::vector<double>& times_us,
                                  const MaceObservables& obs,
                                  const MaceConfig& cfg = {}) {
  const int n = jm.size();
  if (static_cast<int>(initial.size()) != n)
    throw ConfigError("initial product state size mismatch");
  const int t_count = static_cast<int>(times_us.size());
  MaceSeries out;
  out.times_us = times_us;
  if (obs.sigma_y) out.sigma_y = Eigen::MatrixXd::Zero(n, t_count);
  if (obs.sigma_z) out.sigma_z = Eigen::MatrixXd::Zero(n, t_count);

  parallel_for(
      n,
      [&](std::size_t center) {
        const auto atoms = mace_cluster(jm, static_cast<int>(center),
                                        cfg.cluster_size);
        const int m = static_cast<int>(atoms.size());
        const int local = static_cast<int>(
            std::find(atoms.begin(), atoms.end(), static_cast<int>(center)) -
            atoms.begin());
        const auto prop = SectorPropagator::xxz(sub_couplings(jm, atoms), delta);
        VectorXc psi = detail::cluster_product_state(initial, atoms);
        double prev = 0.0;
        for (int k = 0; k < t_count; ++k) {
          prop.apply(psi, times_us[k] - prev);
          prev = times_us[k];
          if (obs.sigma_y)
            out.sigma_y(center, k) = sigma_y_site(psi, m, local);
          if (obs.sigma_z)
            out.sigma_z(center, k) = sigma_z_site(psi, m, local);
        }
      },
      cfg.workers);
  return out;
}

// Number of pulse instances the driven evolver applies over n_cycles
// (tilt draws consume them in order).
inline int driven_pulse_count(const PulseSequence& seq, int n_cycles) {
  if (seq.elements.empty()) return 0;
  if (seq.delta2_mode) return n_cycles == 0 ? 0 : 2 + 2 * n_cycles;
  return 4 * n_cycles;
}

// Draws the tilt stream shared by every cluster of one shot (the
// microwave field is global, so all atoms see the same tilted axes).
inline std::vector<AxisTilt> draw_tilt_stream(const PulseSequence& seq,
                                              int n_cycles, double dtheta,
                                              std::uint64_t seed) {
  std::vector<AxisTilt> tilts(driven_pulse_count(seq, n_cycles));
  Rng rng(seed);
  for (auto& t : tilts) t = draw_tilt(rng, dtheta);
  return tilts;
}

// Driven evolution within each cluster, observables sampled at cycle ends.
// The same pulse sequence and tilt stream act on every cluster.
inline MaceSeries mace_evolve_driven(const CouplingMatrix& jm,
                                     const PulseSequence& seq, int n_cycles,
                                     const std::vector<Eigen::Vector2cd>& initial,
                                     const MaceObservables& obs,
                                     const std::vector<AxisTilt>& tilts,
                                     const DrivenOptions& dopt,
                                     const MaceConfig& cfg = {}) {
  const int n = jm.size();
  if (static_cast<int>(initial.size()) != n)
    throw ConfigError("initial product state size mismatch");
  MaceSeries out;
  out.times_us.resize(n_cycles);
  for (int c = 0; c < n_cycles; ++c) out.times_us[c] = (c + 1) * seq.cycle_us;
  if (obs.sigma_y) out.sigma_y = Eigen::MatrixXd::Zero(n, n_cycles);
  if (obs.sigma_z) out.sigma_z = Eigen::MatrixXd::Zero(n, n_cycles);

  parallel_for(
      n,
      [&](std::size_t center) {
        const auto atoms = mace_cluster(jm, static_cast<int>(center),
                                        cfg.cluster_size);
        const int m = static_cast<int>(atoms.size());
        const int local = static_cast<int>(
            std::find(atoms.begin(), atoms.end(), static_cast<int>(center)) -
            atoms.begin());
        DrivenOptions opt = dopt;
        opt.preset_tilts = &tilts;
        DrivenEvolver evolver(sub_couplings(jm, atoms), seq, opt);
        VectorXc psi = detail::cluster_product_state(initial, atoms);
        evolver.run(psi, n_cycles, true,
                    [&](int cycle, const VectorXc& state) {
                      if (obs.sigma_y)
                        out.sigma_y(center, cycle) = sigma_y_site(state, m, local);
                      if (obs.sigma_z)
                        out.sigma_z(center, cycle) = sigma_z_site(state, m, local);
                    });
      },
      cfg.workers);
  return out;
}

}  // namespace xxzsim
