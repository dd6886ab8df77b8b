#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "ltqkd/detection_stats.hpp"
#include "ltqkd/detector.hpp"
#include "ltqkd/qstate.hpp"
#include "ltqkd/security.hpp"

namespace ltqkd {

double channel_transmittance(double alpha_db_per_km, double length_km);

enum class EveMode { min_eig_d1, explicit_state };

struct ChannelConfig {
  double alpha = 0.2;    // dB/km
  double length = 0.0;   // km
  double p_dark = 1e-6;
  EveMode eve_mode = EveMode::min_eig_d1;
  Vector eve_state;      // used when eve_mode == explicit_state

  // Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

std::pair<double, double> eve_attack_efficiencies(const EfficiencyOperator& f0, const EfficiencyOperator& f1,
                                                  const ChannelConfig& cfg);

DetectionStats detection_probabilities(const SignalStates& states, double eta0, double eta1,
                                       const ChannelConfig& cfg, const ProtocolProbs& probs);

struct SweepRange {
  double l_min = 0.0;
  double l_max = 0.0;
  double l_step = 1.0;

  std::vector<double> points() const;
};

struct SweepInputs {
  EfficiencyOperator d0;
  EfficiencyOperator d1;
  SignalStates states;
  ProtocolProbs probs;
  ChannelConfig channel;  // length is overwritten per point
  double f_ec = 1.16;
};

struct SweepPoint {
  double l_km = 0.0;
  double eta_ch = 0.0;
  SecurityReport analytical;
  SecurityReport sdp;
};

SweepPoint evaluate_point(const SweepInputs& in, double l_km);
std::vector<SweepPoint> sweep(const SweepRange& range, const SweepInputs& in);

}  // namespace ltqkd
