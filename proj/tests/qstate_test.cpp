#include "ltqkd/qstate.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "ltqkd/errors.hpp"

using namespace ltqkd;

TEST(qstate, ideal_z_states) {
  BlochQubit s0 = flawed_z_state(0, 0.0);
  EXPECT_EQ(s0.amp0(), 1.0);
  EXPECT_EQ(s0.amp1(), 0.0);
  BlochVector v0 = s0.bloch();
  EXPECT_EQ(v0.x, 0.0);
  EXPECT_EQ(v0.z, 1.0);

  BlochVector v1 = flawed_z_state(1, 0.0).bloch();
  EXPECT_NEAR(v1.x, 0.0, 1e-15);
  EXPECT_EQ(v1.y, 0.0);
  EXPECT_NEAR(v1.z, -1.0, 1e-15);
}

TEST(qstate, overlap_of_flawed_pair_is_sin_theta) {
  double theta = std::asin(0.1);
  BlochQubit a = flawed_z_state(0, theta);
  BlochQubit b = flawed_z_state(1, theta);
  // Independent dot product of the amplitude vectors.
  double dot = a.amp0() * b.amp0() + a.amp1() * b.amp1();
  EXPECT_NEAR(dot, 0.1, 1e-15);
  EXPECT_NEAR(overlap(a, b), 0.1, 1e-15);
  EXPECT_NEAR(overlap(flawed_z_state(0, std::asin(0.3)), flawed_z_state(1, std::asin(0.3))), 0.3, 1e-15);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-std::numbers::pi / 2, std::numbers::pi / 2);
  for (int k = 0; k < 1000; ++k) {
    double t = u(rng);
    EXPECT_NEAR(overlap(flawed_z_state(0, t), flawed_z_state(1, t)), std::sin(t), 1e-12);
  }
}

TEST(qstate, overlap_trivial_cases) {
  BlochQubit z0(1.0, 0.0);
  BlochQubit z1(0.0, 1.0);
  EXPECT_EQ(overlap(z0, z0), 1.0);
  EXPECT_EQ(overlap(z0, z1), 0.0);
}

TEST(qstate, normalization_is_enforced) {
  EXPECT_THROW(BlochQubit(1.0, 0.1), std::invalid_argument);
  EXPECT_NO_THROW(BlochQubit(std::sqrt(0.5), std::sqrt(0.5)));
  BlochQubit n = BlochQubit::normalized(3.0, 4.0);
  EXPECT_NEAR(n.amp0(), 0.6, 1e-15);
  EXPECT_THROW(BlochQubit::normalized(0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(flawed_z_state(2, 0.0), std::invalid_argument);
}

TEST(qstate, flawed_x_state_default_is_plus) {
  BlochVector v = flawed_x_state(std::numbers::pi / 2).bloch();
  EXPECT_NEAR(v.x, 1.0, 1e-15);
  EXPECT_NEAR(v.z, 0.0, 1e-15);
}

TEST(qstate, virtual_states_ideal) {
  VirtualXStates v = virtual_x_states(flawed_z_state(0, 0.0), flawed_z_state(1, 0.0));
  EXPECT_NEAR(v.plus.bloch().x, 1.0, 1e-15);
  EXPECT_NEAR(v.minus.bloch().x, -1.0, 1e-15);
  EXPECT_EQ(v.p0x_virt, 0.5);
}

TEST(qstate, virtual_states_flawed) {
  double theta = std::asin(0.1);
  VirtualXStates v = virtual_x_states(flawed_z_state(0, theta), flawed_z_state(1, theta));
  EXPECT_NEAR(v.p0x_virt, 0.55, 1e-15);
  BlochVector b = v.plus.bloch();
  EXPECT_NEAR(b.x, 1.0, 1e-15);
  EXPECT_EQ(b.y, 0.0);
  EXPECT_NEAR(b.z, 0.0, 1e-15);
}

TEST(qstate, virtual_states_are_orthogonal) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int k = 0; k < 1000; ++k) {
    double t = u(rng);
    VirtualXStates v = virtual_x_states(flawed_z_state(0, t), flawed_z_state(1, t));
    EXPECT_NEAR(overlap(v.plus, v.minus), 0.0, 1e-12);
  }
  // Generic non-symmetric pairs too.
  for (int k = 0; k < 1000; ++k) {
    BlochQubit a = BlochQubit::normalized(u(rng), u(rng));
    BlochQubit b = BlochQubit::normalized(u(rng), u(rng));
    if (std::abs(std::abs(overlap(a, b)) - 1.0) < 1e-6) continue;
    VirtualXStates v = virtual_x_states(a, b);
    EXPECT_NEAR(overlap(v.plus, v.minus), 0.0, 1e-12);
  }
}

TEST(qstate, virtual_states_degenerate) {
  BlochQubit a = flawed_z_state(0, 0.3);
  EXPECT_THROW(virtual_x_states(a, a), DegenerateStates);
  BlochQubit neg(-a.amp0(), -a.amp1());
  EXPECT_THROW(virtual_x_states(a, neg), DegenerateStates);
}

TEST(qstate, pauli_decomposition_examples) {
  PauliVector z = pauli_decomposition(BlochQubit(1.0, 0.0));
  EXPECT_EQ(z.w_id, 1.0);
  EXPECT_EQ(z.w_x, 0.0);
  EXPECT_EQ(z.w_y, 0.0);
  EXPECT_EQ(z.w_z, 1.0);
  PauliVector x = pauli_decomposition(flawed_x_state(std::numbers::pi / 2));
  EXPECT_NEAR(x.w_x, 1.0, 1e-15);
  EXPECT_NEAR(x.w_z, 0.0, 1e-15);
  double t = 0.37;
  PauliVector f = pauli_decomposition(flawed_z_state(0, t));
  EXPECT_NEAR(f.w_x, std::sin(t), 1e-15);
  EXPECT_NEAR(f.w_z, std::cos(t), 1e-15);
}

TEST(qstate, pauli_reconstruction) {
  // 1/2 (W_id I + W_x X + W_z Z) against the outer product, entrywise.
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
  for (int k = 0; k < 1000; ++k) {
    BlochQubit s = flawed_z_state(k % 2, u(rng));
    PauliVector w = pauli_decomposition(s);
    double r00 = (w.w_id + w.w_z) / 2;
    double r11 = (w.w_id - w.w_z) / 2;
    double r01 = w.w_x / 2;
    EXPECT_NEAR(r00, s.amp0() * s.amp0(), 1e-12);
    EXPECT_NEAR(r11, s.amp1() * s.amp1(), 1e-12);
    EXPECT_NEAR(r01, s.amp0() * s.amp1(), 1e-12);
    EXPECT_EQ(w.w_y, 0.0);
  }
}

TEST(qstate, protocol_probs) {
  ProtocolProbs p(2.0 / 3.0, 2.0 / 3.0);
  EXPECT_NEAR(p.p_xa() + p.p_za(), 1.0, 1e-15);
  EXPECT_NEAR(p.p3(), (2.0 / 3.0) * (1.0 / 3.0) / 2.0, 1e-15);
  EXPECT_EQ(p.p3(), p.p4());
  EXPECT_NEAR(p.p5(), 1.0 / 9.0, 1e-15);
  for (Signal i : kSignals) EXPECT_NEAR(p.alice(i), 1.0 / 3.0, 1e-15);
  EXPECT_THROW(ProtocolProbs(1.1, 0.5), std::invalid_argument);
  EXPECT_THROW(ProtocolProbs(0.5, -0.1), std::invalid_argument);
}

TEST(qstate, symmetrize_frame) {
  SignalStates raw{BlochQubit::normalized(1.0, 0.2), BlochQubit::normalized(0.4, 1.0), flawed_x_state(1.2)};
  EXPECT_FALSE(raw.is_symmetric());
  SignalStates sym = raw.symmetrized();
  EXPECT_TRUE(sym.is_symmetric(1e-12));
  EXPECT_NEAR(sym.c01(), raw.c01(), 1e-14);
  EXPECT_NEAR(overlap(sym.phi0z, sym.phi0x), overlap(raw.phi0z, raw.phi0x), 1e-14);
  EXPECT_TRUE(SignalStates::from_theta(0.4).is_symmetric(1e-14));
}

TEST(qstate, detector_swap_keeps_frame_convention) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.4, 1.4);
  for (int k = 0; k < 200; ++k) {
    SignalStates s = SignalStates::from_theta(u(rng), u(rng) + 0.2);
    SignalStates w = s.detector_swapped();
    EXPECT_TRUE(w.is_symmetric(1e-12));
    EXPECT_NEAR(w.c01(), -s.c01(), 1e-14);
    SignalStates back = w.detector_swapped();
    // Two swaps are the identity up to the sign of each state.
    EXPECT_NEAR(std::abs(overlap(back.phi0z, s.phi0z)), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(overlap(back.phi1z, s.phi1z)), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(overlap(back.phi0x, s.phi0x)), 1.0, 1e-14);
  }
}
