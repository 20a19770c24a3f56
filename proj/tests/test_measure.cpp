#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "xxzsim/measure.hpp"
#include "xxzsim/state.hpp"

using namespace xxzsim;

TEST_CASE("ideal domain wall preparation") {
  const auto spec = prepare_domain_wall(10, 0, 5);
  const auto psi = prepare_state(spec, 7);
  // |uuuuudddddd> = bits 0..4 set
  CHECK(std::norm(psi[0b0000011111]) == Catch::Approx(1.0));
  for (int a = 0; a < 5; ++a) CHECK(sigma_z_site(psi, 10, a) == Catch::Approx(1.0));
  for (int a = 5; a < 10; ++a) CHECK(sigma_z_site(psi, 10, a) == Catch::Approx(-1.0));
}

TEST_CASE("preparation error flips the intended bits classically") {
  PreparationSpec spec = prepare_domain_wall(10, 0, 5, 0.05);
  double flipped = 0.0;
  const int shots = 20000;
  for (int s = 0; s < shots; ++s) {
    Rng rng(derive_seed(11, "prep", s));
    const auto pattern = sample_prepared_pattern(spec, rng);
    flipped += __builtin_popcountll(pattern ^ spec.pattern);
  }
  // binomial mean 10 * 0.05 = 0.5 wrong atoms per shot
  CHECK(flipped / shots == Catch::Approx(0.5).epsilon(0.05));
}

TEST_CASE("plus-y preparation matches the two-atom superposition") {
  PreparationSpec spec;
  spec.target = PrepTarget::AllPlusY;
  spec.n_atoms = 2;
  const auto psi = prepare_state(spec, 1);
  // (|dd> - |uu> - i sqrt(2)|+>)/2, i.e. the pi/2-about-x rotation of
  // |dd>; components (dd, ud, du, uu) = (1, -i, -i, -1)/2
  CHECK(std::abs(psi[0] - Complex(0.5, 0)) < 1e-12);
  CHECK(std::abs(psi[1] - Complex(0, -0.5)) < 1e-12);
  CHECK(std::abs(psi[2] - Complex(0, -0.5)) < 1e-12);
  CHECK(std::abs(psi[3] - Complex(-0.5, 0)) < 1e-12);
  CHECK(total_sigma_y(psi, 2) == Catch::Approx(2.0));
  // equal to the reference state up to a global phase
  VectorXc ref(4);
  ref << Complex(-0.5, 0), Complex(0, 0.5), Complex(0, 0.5), Complex(0.5, 0);
  CHECK(std::abs(std::abs(Complex(ref.dot(psi))) - 1.0) < 1e-12);
}

TEST_CASE("born sampling without readout errors") {
  const auto psi = basis_state(4, 0b1010);
  const auto shots = sample_bitstrings(psi, 4, 50, no_spam(), 3);
  REQUIRE(shots.size() == 50);
  for (const auto& s : shots) CHECK(s.bits == 0b1010);
}

TEST_CASE("bell-state sampling follows the born rule") {
  VectorXc psi = VectorXc::Zero(4);
  psi[0b01] = 1.0 / std::sqrt(2.0);
  psi[0b10] = 1.0 / std::sqrt(2.0);
  const int n_shots = 40000;
  const auto shots = sample_bitstrings(psi, 2, n_shots, no_spam(), 17);
  int c01 = 0, c10 = 0;
  for (const auto& s : shots) {
    if (s.bits == 0b01) ++c01;
    if (s.bits == 0b10) ++c10;
  }
  CHECK(c01 + c10 == n_shots);
  CHECK(static_cast<double>(c01) / n_shots == Catch::Approx(0.5).margin(0.01));
}

TEST_CASE("readout flips produce the expected up-count on all-down") {
  const auto psi = all_down_state(10);
  SpamModel spam;  // defaults 0.05 / 0.035
  const int n_shots = 10000;
  const auto shots = sample_bitstrings(psi, 10, n_shots, spam, 5);
  double ups = 0.0;
  for (const auto& s : shots) ups += __builtin_popcountll(s.bits);
  CHECK(ups / n_shots == Catch::Approx(0.35).margin(0.02));
}

TEST_CASE("sampling is deterministic and order-independent") {
  PreparationSpec spec;
  spec.target = PrepTarget::AllPlusY;
  spec.n_atoms = 5;
  const auto psi = prepare_state(spec, 2);
  const auto a = sample_bitstrings(psi, 5, 200, SpamModel{}, 99);
  const auto b = sample_bitstrings(psi, 5, 200, SpamModel{}, 99);
  for (int s = 0; s < 200; ++s) {
    CHECK(a[s].bits == b[s].bits);
    CHECK(a[s].shot_id == s);
  }
}

TEST_CASE("spam-adjusted expectations") {
  SpamModel spam;
  SECTION("no spam returns the raw expectation") {
    const auto psi = basis_state(1, 1);
    CHECK(spam_adjusted_sigma_z_site(psi, 1, 0, no_spam()) == Catch::Approx(1.0));
  }
  SECTION("single atom up reads 0.9") {
    const auto psi = basis_state(1, 1);
    CHECK(spam_adjusted_sigma_z_site(psi, 1, 0, spam) == Catch::Approx(0.9));
  }
  SECTION("maximally mixed atom reads the channel offset") {
    // equal-weight superposition has <sz> = 0
    VectorXc psi(2);
    psi << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    CHECK(spam_adjusted_sigma_z_site(psi, 1, 0, spam) ==
          Catch::Approx(-0.015).margin(1e-12));
  }
  SECTION("affine law holds for intermediate values") {
    VectorXc psi(2);
    psi << std::sqrt(0.3), std::sqrt(0.7);
    const double raw = sigma_z_site(psi, 1, 0);
    CHECK(spam_adjusted_sigma_z_site(psi, 1, 0, spam) ==
          Catch::Approx(spam.affine_scale() * raw + spam.affine_offset()));
  }
}

TEST_CASE("sample estimates converge to the adjusted expectation") {
  PreparationSpec spec;
  spec.target = PrepTarget::AllPlusY;
  spec.n_atoms = 3;
  auto psi = prepare_state(spec, 4);
  SpamModel spam;
  const double expected = spam_adjusted_sigma_z_site(psi, 3, 1, spam);
  const int n_shots = 20000;
  const auto shots = sample_bitstrings(psi, 3, n_shots, spam, 21);
  double mean = 0.0;
  for (const auto& s : shots) mean += ((s.bits >> 1) & 1) ? 1.0 : -1.0;
  mean /= n_shots;
  CHECK(mean == Catch::Approx(expected).margin(4.0 / std::sqrt(n_shots)));
}

TEST_CASE("readout channel on the probability vector matches the affine law") {
  PreparationSpec spec;
  spec.target = PrepTarget::AllPlusY;
  spec.n_atoms = 4;
  const auto psi = prepare_state(spec, 8);
  SpamModel spam;
  const auto probs = apply_readout_channel(psi, 4, spam);
  double total = 0.0;
  for (const double p : probs) total += p;
  CHECK(total == Catch::Approx(1.0).margin(1e-12));
  for (int a = 0; a < 4; ++a) {
    double z = 0.0;
    for (std::size_t s = 0; s < probs.size(); ++s)
      z += probs[s] * (((s >> a) & 1) ? 1.0 : -1.0);
    CHECK(z == Catch::Approx(spam_adjusted_sigma_z_site(psi, 4, a, spam))
                   .margin(1e-12));
  }
}

TEST_CASE("spam-adjusted zz pair") {
  const auto psi = basis_state(2, 0b01);
  SpamModel spam;
  const double a = spam.affine_scale(), b = spam.affine_offset();
  // true zz = -1, z0 = +1, z1 = -1
  CHECK(spam_adjusted_sigma_zz(psi, 2, 0, 1, spam) ==
        Catch::Approx(-a * a + b * b).margin(1e-12));
}

TEST_CASE("shots export format") {
  const auto psi = basis_state(3, 0b101);
  const auto shots = sample_bitstrings(psi, 3, 2, no_spam(), 1);
  std::ostringstream os;
  write_shots(os, shots, 3, 1, no_spam());
  const std::string text = os.str();
  CHECK(text.find("# n_atoms=3 seed=1") == 0);
  CHECK(text.find("\n101\n") != std::string::npos);
}

TEST_CASE("empty shot request returns an empty list") {
  const auto psi = basis_state(2, 0);
  CHECK(sample_bitstrings(psi, 2, 0, no_spam(), 1).empty());
}
