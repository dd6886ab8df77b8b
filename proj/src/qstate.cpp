#include "ltqkd/qstate.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ltqkd/errors.hpp"

namespace ltqkd {

BlochQubit::BlochQubit(double amp0, double amp1) : amp0_(amp0), amp1_(amp1) {
  double n = amp0 * amp0 + amp1 * amp1;
  if (!(std::abs(n - 1.0) <= 1e-12)) {
    throw std::invalid_argument("BlochQubit amplitudes not normalized: |a|^2 = " + std::to_string(n));
  }
}

BlochQubit BlochQubit::normalized(double amp0, double amp1) {
  double n = std::hypot(amp0, amp1);
  if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("cannot normalize a zero or non-finite vector");
  amp0 /= n;
  amp1 /= n;
  // One more pass absorbs the rounding of the first division.
  n = std::hypot(amp0, amp1);
  return BlochQubit(amp0 / n, amp1 / n);
}

BlochVector BlochQubit::bloch() const {
  return {2.0 * amp0_ * amp1_, 0.0, amp0_ * amp0_ - amp1_ * amp1_};
}

BlochQubit flawed_z_state(int bit, double theta) {
  if (bit != 0 && bit != 1) throw std::invalid_argument("flawed_z_state: bit must be 0 or 1");
  double half = (theta - bit * std::numbers::pi) / 2.0;
  double sign = bit == 0 ? 1.0 : -1.0;
  return BlochQubit::normalized(std::cos(half), sign * std::sin(half));
}

BlochQubit flawed_x_state(double xi) { return BlochQubit::normalized(std::cos(xi / 2.0), std::sin(xi / 2.0)); }

double overlap(const BlochQubit& s1, const BlochQubit& s2) {
  return s1.amp0() * s2.amp0() + s1.amp1() * s2.amp1();
}

VirtualXStates virtual_x_states(const BlochQubit& phi0z, const BlochQubit& phi1z) {
  double s0 = phi0z.amp0() + phi1z.amp0();
  double s1 = phi0z.amp1() + phi1z.amp1();
  double d0 = phi0z.amp0() - phi1z.amp0();
  double d1 = phi0z.amp1() - phi1z.amp1();
  if (std::hypot(d0, d1) < 1e-9 || std::hypot(s0, s1) < 1e-9) {
    throw DegenerateStates("Z states are linearly dependent");
  }
  return {BlochQubit::normalized(s0, s1), BlochQubit::normalized(d0, d1), (1.0 + overlap(phi0z, phi1z)) / 2.0};
}

PauliVector pauli_decomposition(const BlochQubit& s) {
  BlochVector v = s.bloch();
  return {1.0, v.x, 0.0, v.z};
}

const char* signal_name(Signal i) {
  switch (i) {
    case Signal::Z0:
      return "0Z";
    case Signal::Z1:
      return "1Z";
    case Signal::X0:
      return "0X";
  }
  return "?";
}

const BlochQubit& SignalStates::operator[](Signal i) const {
  switch (i) {
    case Signal::Z0:
      return phi0z;
    case Signal::Z1:
      return phi1z;
    case Signal::X0:
      break;
  }
  return phi0x;
}

SignalStates SignalStates::from_theta(double theta, double xi) {
  return {flawed_z_state(0, theta), flawed_z_state(1, theta), flawed_x_state(xi)};
}

bool SignalStates::is_symmetric(double tol) const {
  BlochVector v = virtual_x_states(phi0z, phi1z).plus.bloch();
  return std::abs(v.x - 1.0) <= tol && std::abs(v.z) <= tol;
}

namespace {

BlochQubit rotate(const BlochQubit& q, double c, double s) {
  return BlochQubit::normalized(c * q.amp0() - s * q.amp1(), s * q.amp0() + c * q.amp1());
}

}  // namespace

SignalStates SignalStates::symmetrized() const {
  BlochQubit plus = virtual_x_states(phi0z, phi1z).plus;
  // Real rotation taking the normalized sum to (1, 1)/sqrt2.
  double target = std::numbers::pi / 4.0;
  double angle = target - std::atan2(plus.amp1(), plus.amp0());
  double c = std::cos(angle);
  double s = std::sin(angle);
  return {rotate(phi0z, c, s), rotate(phi1z, c, s), rotate(phi0x, c, s)};
}

SignalStates SignalStates::detector_swapped() const {
  auto zx = [](const BlochQubit& q, double sign) { return BlochQubit::normalized(sign * q.amp1(), -sign * q.amp0()); };
  return {zx(phi1z, 1.0), zx(phi0z, -1.0), zx(phi0x, 1.0)};
}

ProtocolProbs::ProtocolProbs(double p_za, double p_zb) : p_za_(p_za), p_zb_(p_zb) {
  if (!(p_za >= 0.0 && p_za <= 1.0)) throw std::invalid_argument("p_za must lie in [0, 1]");
  if (!(p_zb >= 0.0 && p_zb <= 1.0)) throw std::invalid_argument("p_zb must lie in [0, 1]");
}

double ProtocolProbs::p_c(Signal i) const { return i == Signal::X0 ? p5() : p3(); }

double ProtocolProbs::alice(Signal i) const { return i == Signal::X0 ? p_xa() : p_za_ / 2.0; }

}  // namespace ltqkd
