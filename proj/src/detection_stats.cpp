#include "ltqkd/detection_stats.hpp"

namespace ltqkd {

DetectionStats DetectionStats::detector_swapped() const {
  DetectionStats out;
  for (int s = 0; s < 2; ++s) {
    for (Basis beta : {Basis::X, Basis::Z}) {
      out.at(s, beta, Signal::Z0) = at(1 - s, beta, Signal::Z1);
      out.at(s, beta, Signal::Z1) = at(1 - s, beta, Signal::Z0);
      out.at(s, beta, Signal::X0) = at(1 - s, beta, Signal::X0);
    }
  }
  return out;
}

}  // namespace ltqkd
