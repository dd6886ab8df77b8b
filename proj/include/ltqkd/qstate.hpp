#pragma once

#include <array>

namespace ltqkd {

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Pure qubit state a0|0_Z> + a1|1_Z> with real amplitudes, so it always lies
// in the XZ plane of the Bloch sphere.
class BlochQubit {
 public:
  // Throws std::invalid_argument unless a0^2 + a1^2 = 1 within 1e-12.
  BlochQubit(double amp0, double amp1);
  // Rescales (a0, a1) to unit norm; throws on the zero vector.
  static BlochQubit normalized(double amp0, double amp1);

  double amp0() const { return amp0_; }
  double amp1() const { return amp1_; }
  BlochVector bloch() const;

  bool operator==(const BlochQubit&) const = default;

 private:
  double amp0_;
  double amp1_;
};

// Coefficients of |phi><phi| = 1/2 sum_w W_w sigma_w over (I, X, Y, Z).
struct PauliVector {
  double w_id = 0.0;
  double w_x = 0.0;
  double w_y = 0.0;
  double w_z = 0.0;
};

BlochQubit flawed_z_state(int bit, double theta);
// cos(xi/2)|0_Z> + sin(xi/2)|1_Z>; xi = pi/2 is |0_X>.
BlochQubit flawed_x_state(double xi);

double overlap(const BlochQubit& s1, const BlochQubit& s2);

struct VirtualXStates {
  BlochQubit plus;
  BlochQubit minus;
  double p0x_virt;
};

VirtualXStates virtual_x_states(const BlochQubit& phi0z, const BlochQubit& phi1z);

PauliVector pauli_decomposition(const BlochQubit& s);

// Alice's three signals, indexed by the c labels 0_Z, 1_Z, 0_X.
enum class Signal { Z0 = 0, Z1 = 1, X0 = 2 };
inline constexpr std::array<Signal, 3> kSignals{Signal::Z0, Signal::Z1, Signal::X0};
const char* signal_name(Signal i);

struct SignalStates {
  BlochQubit phi0z;
  BlochQubit phi1z;
  BlochQubit phi0x;

  const BlochQubit& operator[](Signal i) const;
  double c01() const { return overlap(phi0z, phi1z); }

  // Flawed Z pair at angle theta, X state at Bloch angle xi.
  static SignalStates from_theta(double theta, double xi = 1.5707963267948966);

  // True when the virtual 0_X state equals |0_X> within tol, i.e. the Z pair
  // is symmetric about the X axis of Bob's measurement frame.
  bool is_symmetric(double tol = 1e-9) const;

  // Rotates all three states (about Y) so the Z pair becomes symmetric.
  // Overlaps are preserved; Bob's bases are not touched, so the caller must
  // supply statistics measured in the rotated frame.
  SignalStates symmetrized() const;

  // States seen after swapping the detector labels D0 <-> D1. The swap
  // exchanges Bob's outcome labels in both bases, which is the frame map
  // (a0, a1) -> (a1, -a0) together with exchanging the roles of 0_Z and 1_Z.
  SignalStates detector_swapped() const;
};

class ProtocolProbs {
 public:
  // Throws std::invalid_argument unless both lie in [0, 1].
  ProtocolProbs(double p_za, double p_zb);

  double p_za() const { return p_za_; }
  double p_xa() const { return 1.0 - p_za_; }
  double p_zb() const { return p_zb_; }
  double p_xb() const { return 1.0 - p_zb_; }
  // Joint probabilities of Alice sending c and Bob measuring X.
  double p3() const { return p_za_ * p_xb() / 2.0; }
  double p4() const { return p3(); }
  double p5() const { return p_xa() * p_xb(); }
  double p_c(Signal i) const;
  // Probability that Alice emits signal i.
  double alice(Signal i) const;

 private:
  double p_za_;
  double p_zb_;
};

}  // namespace ltqkd
