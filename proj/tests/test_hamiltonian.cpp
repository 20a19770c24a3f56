#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "xxzsim/couplings.hpp"
#include "xxzsim/operators.hpp"
#include "xxzsim/pulse.hpp"

using namespace xxzsim;

namespace {

// Independent oracle: build N-atom operators by naive Kronecker products,
// with atom 0 on the least significant bit.
MatrixXc kron_chain(const std::vector<Eigen::Matrix2cd>& per_atom) {
  MatrixXc acc = MatrixXc::Ones(1, 1);
  for (const auto& u : per_atom) {
    MatrixXc next(acc.rows() * 2, acc.cols() * 2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        next.block(a * acc.rows(), b * acc.cols(), acc.rows(), acc.cols()) =
            u(a, b) * acc;
    acc = std::move(next);
  }
  return acc;
}

MatrixXc pair_op(int n, int i, int j, const Eigen::Matrix2cd& ui,
                 const Eigen::Matrix2cd& uj) {
  std::vector<Eigen::Matrix2cd> ops(n, pauli::id());
  ops[i] = ui;
  ops[j] = uj;
  return kron_chain(ops);
}

MatrixXc site_op(int n, int i, const Eigen::Matrix2cd& u) {
  std::vector<Eigen::Matrix2cd> ops(n, pauli::id());
  ops[i] = u;
  return kron_chain(ops);
}

// 1/2 sum_{i != j} [jx sx sx + jy sy sy + jz sz sz] built the slow way.
MatrixXc brute_force_xyz(const Eigen::MatrixXd& j, double fx, double fy,
                         double fz) {
  const int n = static_cast<int>(j.rows());
  const std::size_t dim = std::size_t{1} << n;
  MatrixXc h = MatrixXc::Zero(dim, dim);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      if (i == k) continue;
      h += 0.5 * j(i, k) *
           (fx * pair_op(n, i, k, pauli::x(), pauli::x()) +
            fy * pair_op(n, i, k, pauli::y(), pauli::y()) +
            fz * pair_op(n, i, k, pauli::z(), pauli::z()));
    }
  return h;
}

MatrixXc total_z(int n) {
  const std::size_t dim = std::size_t{1} << n;
  MatrixXc m = MatrixXc::Zero(dim, dim);
  for (int i = 0; i < n; ++i) m += site_op(n, i, pauli::z());
  return m;
}

double max_abs(const MatrixXc& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("pauli matrices form a right-handed triple") {
  const auto x = pauli::x(), y = pauli::y(), z = pauli::z();
  CHECK(max_abs(x * y - Complex(0, 1) * z) < 1e-15);
  CHECK(max_abs(y * z - Complex(0, 1) * x) < 1e-15);
  CHECK(max_abs(z * x - Complex(0, 1) * y) < 1e-15);
  // sigma_z|up> = +|up> with up on bit value 1
  CHECK(z(1, 1) == Complex(1, 0));
}

TEST_CASE("build_xx: two atoms exchange with element 2J") {
  const auto h = build_xx(uniform_couplings(2, 1.0));
  // |up,down> = index 1, |down,up> = index 2
  CHECK(h.mat(1, 2) == Complex(2.0, 0));
  CHECK(h.mat(2, 1) == Complex(2.0, 0));
  CHECK(h.mat(0, 0) == Complex(0, 0));
  CHECK(h.mat(3, 3) == Complex(0, 0));
  CHECK(h.mat(0, 3) == Complex(0, 0));
}

TEST_CASE("build_xx matches brute-force construction") {
  Eigen::MatrixXd j(4, 4);
  j << 0, 0.3, -0.1, 0.05, 0.3, 0, 0.7, -0.2, -0.1, 0.7, 0, 0.4, 0.05, -0.2,
      0.4, 0;
  CouplingMatrix jm{j};
  const auto h = build_xx(jm);
  CHECK(max_abs(h.mat - brute_force_xyz(j, 1, 1, 0)) < 1e-13);
}

TEST_CASE("build_xx: zero couplings give the zero operator") {
  const auto h = build_xx(uniform_couplings(3, 0.0));
  CHECK(max_abs(h.mat) == 0.0);
}

TEST_CASE("xx and xxz conserve the excitation number") {
  const auto jm = chain_couplings(3, 0.8);
  const auto hxx = build_xx(jm);
  const auto hxxz = build_xxz(jm, 1.3);
  const MatrixXc z = total_z(3);
  CHECK(max_abs(hxx.mat * z - z * hxx.mat) < 1e-13);
  CHECK(max_abs(hxxz.mat * z - z * hxxz.mat) < 1e-13);
}

TEST_CASE("build_xxz coupling scalings") {
  const auto jm = uniform_couplings(2, 1.0);
  SECTION("delta 0 reduces to xx") {
    const auto a = build_xxz(jm, 0.0);
    const auto b = build_xx(jm);
    CHECK(max_abs(a.mat - b.mat) < 1e-14);
  }
  SECTION("delta 1: Jx = Jz = 2J/3") {
    const auto h = build_xxz(jm, 1.0);
    CHECK(h.mat(1, 2).real() == Catch::Approx(2.0 * 2.0 / 3.0));
    CHECK(h.mat(0, 0).real() == Catch::Approx(2.0 / 3.0));
  }
  SECTION("delta 2: Jx = J/2, Jz = J") {
    const auto h = build_xxz(jm, 2.0);
    CHECK(h.mat(1, 2).real() == Catch::Approx(1.0));
    CHECK(h.mat(0, 0).real() == Catch::Approx(1.0));
  }
  SECTION("delta outside [0,2] rejected") {
    CHECK_THROWS_AS(build_xxz(jm, -0.1), ConfigError);
    CHECK_THROWS_AS(build_xxz(jm, 2.1), ConfigError);
  }
}

TEST_CASE("two-atom xxz spectrum") {
  const double jx = 0.31, jz = 0.17;
  // H = jx (sx sx + sy sy) + jz sz sz for a single pair
  Eigen::MatrixXd wx(2, 2), wz(2, 2);
  wx << 0, jx, jx, 0;
  wz << 0, jz, jz, 0;
  const auto h = build_two_body(wx, wx, wz);
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(h.mat);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + 4);
  std::sort(ev.begin(), ev.end());
  std::vector<double> expected = {-jz - 2 * jx, -jz + 2 * jx, jz, jz};
  std::sort(expected.begin(), expected.end());
  for (int i = 0; i < 4; ++i) CHECK(ev[i] == Catch::Approx(expected[i]).margin(1e-12));
}

TEST_CASE("build_xyz") {
  const auto jm = chain_couplings(3, 0.5);
  SECTION("equal delays give the isotropic point") {
    const double tau = 0.05;
    const auto h = build_xyz(jm, tau, tau, tau, 6 * tau);
    const auto ref = build_xxz(jm, 1.0);
    CHECK(max_abs(h.mat - ref.mat) < 1e-13);
  }
  SECTION("tau2 = tau3 = 0 is pure xx") {
    const auto h = build_xyz(jm, 0.15, 0.0, 0.0, 0.3);
    const auto ref = build_xx(jm);
    CHECK(max_abs(h.mat - ref.mat) < 1e-13);
  }
  SECTION("tau1 = 0, tau2 = tau3 matches delta = 2") {
    const auto h = build_xyz(jm, 0.0, 0.075, 0.075, 0.3);
    const auto ref = build_xxz(jm, 2.0);
    CHECK(max_abs(h.mat - ref.mat) < 1e-13);
  }
  SECTION("inconsistent cycle duration rejected") {
    CHECK_THROWS_AS(build_xyz(jm, 0.1, 0.1, 0.1, 0.3), ConfigError);
    CHECK_THROWS_AS(build_xyz(jm, 0.0, 0.0, 0.0, 0.0), ConfigError);
  }
  SECTION("generic weights match brute force") {
    const double t1 = 0.02, t2 = 0.07, t3 = 0.04, tc = 2 * (t1 + t2 + t3);
    const auto h = build_xyz(jm, t1, t2, t3, tc);
    const auto ref = brute_force_xyz(jm.values * (2.0 / tc), t1 + t2, t1 + t3,
                                     t2 + t3);
    CHECK(max_abs(h.mat - ref) < 1e-13);
  }
}

TEST_CASE("hermiticity of constructed operators") {
  Eigen::MatrixXd j(3, 3);
  j << 0, 0.3, -0.1, 0.3, 0, 0.7, -0.1, 0.7, 0;
  CouplingMatrix jm{j};
  CHECK(hermiticity_error(build_xx(jm)) < 1e-12);
  CHECK(hermiticity_error(build_xxz(jm, 1.7)) < 1e-12);
  CHECK(hermiticity_error(build_xyz(jm, 0.01, 0.02, 0.03, 0.12)) < 1e-12);
}

TEST_CASE("su(2) symmetry at the isotropic point") {
  const auto jm = chain_couplings(3, 0.4);
  const auto h = build_xxz(jm, 1.0);
  for (const auto& s : {pauli::x(), pauli::y(), pauli::z()}) {
    const auto tot = total_op(3, s);
    CHECK(commutator_norm(h, tot) < 1e-12);
  }
}

TEST_CASE("dense construction cap") {
  CHECK_THROWS_AS(build_xx(uniform_couplings(15, 0.1)), ConfigError);
}

TEST_CASE("driven hamiltonian") {
  const auto jm = uniform_couplings(2, 0.93);
  CycleParams params;
  params.envelope = Envelope::Gaussian;
  params.width_1e2_us = 0.0168;
  const auto seq = build_cycle(1.0, 0.3, params);
  const auto hxx = build_xx(jm);

  SECTION("inside a gap the drive vanishes") {
    // pulse windows: [0,.0336], [.0501,.0835], [.15,.1836], [.2,.2336]
    for (const double t : {0.04, 0.12, 0.19, 0.27}) {
      const auto h = driven_hamiltonian(jm, seq, t);
      CHECK(max_abs(h.mat - hxx.mat) < 1e-13);
    }
  }
  SECTION("at the first pulse peak the drive is Omega_peak/2 sum sx") {
    const double t_peak = 0.5 * seq.elements[0].pulse.window_us();
    const auto h = driven_hamiltonian(jm, seq, t_peak);
    const double peak = seq.elements[0].pulse.peak_rabi_mhz();
    const MatrixXc expect =
        hxx.mat + 0.5 * peak * total_op(2, pauli::x()).mat;
    CHECK(max_abs(h.mat - expect) < 1e-12);
  }
  SECTION("pulse rotation angle integrates to pi/2") {
    // trapezoid quadrature of 2 pi Omega(t) across the window
    const auto& p = seq.elements[0].pulse;
    const double hw = 0.5 * p.window_us();
    const int steps = 20000;
    double acc = 0.0;
    for (int k = 0; k < steps; ++k) {
      const double a = -hw + 2 * hw * k / steps;
      const double b = -hw + 2 * hw * (k + 1) / steps;
      acc += 0.5 * (p.rabi_at(a) + p.rabi_at(b)) * (b - a);
    }
    CHECK(kTwoPi * acc == Catch::Approx(M_PI / 2).epsilon(1e-6));
  }
}

TEST_CASE("average of sequence reproduces the xyz hamiltonian") {
  // the arbiter for the gap ordering inside the cycle
  const auto jm = chain_couplings(4, 0.27);
  for (const double delta : {0.3, 1.0, 1.7, 2.0}) {
    const double tc = 0.3;
    const auto d = anisotropy_to_delays(delta, tc);
    const auto seq = build_cycle(delta, tc);
    const auto avg = average_of_sequence(seq, jm);
    const auto ref = build_xyz(jm, d.tau1_us, d.tau2_us, d.tau3_us, tc);
    CHECK(max_abs(avg.mat - ref.mat) < 1e-10);
  }
}

TEST_CASE("average of sequence: single toggled frame") {
  // one X pulse at the start, then a single gap: the average is the
  // xx interaction conjugated once
  const auto jm = uniform_couplings(2, 1.0);
  PulseSequence seq;
  seq.cycle_us = 0.2;
  seq.elements.push_back({0.0, delta_pulse(0.0)});
  seq.trailing_gap_us = 0.2;
  const auto avg = average_of_sequence(seq, jm);
  const auto hxx = build_xx(jm);
  const auto rot = global_rotation(2, Vec3(1, 0, 0), M_PI / 2);
  const MatrixXc expect = rot.mat.adjoint() * hxx.mat * rot.mat;
  CHECK(max_abs(avg.mat - expect) < 1e-12);
}

TEST_CASE("average of sequence commutes with total spin at equal delays") {
  const auto jm = chain_couplings(3, 0.4);
  const auto seq = build_cycle(1.0, 0.3);
  const auto avg = average_of_sequence(seq, jm);
  for (const auto& s : {pauli::x(), pauli::y(), pauli::z()})
    CHECK(commutator_norm(avg, total_op(3, s)) < 1e-10);
}

TEST_CASE("average of sequence rejects non-pi/2 areas and finite pulses") {
  const auto jm = uniform_couplings(2, 1.0);
  PulseSequence seq;
  seq.cycle_us = 0.2;
  seq.elements.push_back({0.0, delta_pulse(0.0, M_PI)});
  seq.trailing_gap_us = 0.2;
  CHECK_THROWS_AS(average_of_sequence(seq, jm), ConfigError);

  CycleParams params;
  params.envelope = Envelope::Gaussian;
  params.width_1e2_us = 0.0168;
  const auto gauss = build_cycle(1.0, 0.3, params);
  CHECK_THROWS_AS(average_of_sequence(gauss, jm), ConfigError);
}

TEST_CASE("operator json dump") {
  const auto h = build_xx(uniform_couplings(2, 1.0));
  const auto j = operator_to_json(h);
  CHECK(j["dim"] == 4);
  CHECK(j["entries"].size() == 2);  // the two flip-flop elements
}
