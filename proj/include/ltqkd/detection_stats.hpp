#pragma once

#include <array>

#include "ltqkd/qstate.hpp"

namespace ltqkd {

enum class Basis { X = 0, Z = 1 };

// Joint probabilities p_{s_beta, i} of Alice sending i and Bob obtaining
// outcome s in basis beta.
class DetectionStats {
 public:
  double& at(int s, Basis beta, Signal i) { return p_[idx(s, beta, i)]; }
  double at(int s, Basis beta, Signal i) const { return p_[idx(s, beta, i)]; }

  // Statistics under the detector relabeling D0 <-> D1, expressed against
  // SignalStates::detector_swapped().
  DetectionStats detector_swapped() const;

  bool operator==(const DetectionStats&) const = default;

 private:
  static int idx(int s, Basis beta, Signal i) {
    return s * 6 + static_cast<int>(beta) * 3 + static_cast<int>(i);
  }
  std::array<double, 12> p_{};
};

}  // namespace ltqkd
