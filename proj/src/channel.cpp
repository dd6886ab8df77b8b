#include "ltqkd/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace ltqkd {

double channel_transmittance(double alpha_db_per_km, double length_km) {
  if (!(alpha_db_per_km >= 0.0) || !(length_km >= 0.0)) {
    throw std::invalid_argument("attenuation and length must be nonnegative");
  }
  return std::pow(10.0, -alpha_db_per_km * length_km / 10.0);
}

void ChannelConfig::validate() const {
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha_db_per_km must be nonnegative");
  if (!(length >= 0.0)) throw std::invalid_argument("channel length must be nonnegative");
  if (!(p_dark >= 0.0 && p_dark < 1.0)) throw std::invalid_argument("p_dark must lie in [0, 1)");
  if (eve_mode == EveMode::explicit_state && !(eve_state.size() > 0 && eve_state.norm() > 0.0)) {
    throw std::invalid_argument("explicit eve_mode needs a nonzero T-mode state");
  }
}

std::pair<double, double> eve_attack_efficiencies(const EfficiencyOperator& f0, const EfficiencyOperator& f1,
                                                  const ChannelConfig& cfg) {
  Vector sigma = cfg.eve_mode == EveMode::min_eig_d1 ? min_eigen_state(f1).state : cfg.eve_state.normalized();
  return {efficiency_for(f0, sigma), efficiency_for(f1, sigma)};
}

namespace {

double bob_amplitude(int s, Basis beta, const BlochQubit& phi) {
  if (beta == Basis::Z) return s == 0 ? phi.amp0() : phi.amp1();
  double sign = s == 0 ? 1.0 : -1.0;
  return (phi.amp0() + sign * phi.amp1()) / std::sqrt(2.0);
}

}  // namespace

DetectionStats detection_probabilities(const SignalStates& states, double eta0, double eta1,
                                       const ChannelConfig& cfg, const ProtocolProbs& probs) {
  cfg.validate();
  double eta_ch = channel_transmittance(cfg.alpha, cfg.length);
  double pd = cfg.p_dark;
  const double eta[2] = {eta0, eta1};
  DetectionStats out;
  for (Signal i : kSignals) {
    for (Basis beta : {Basis::X, Basis::Z}) {
      double pb = beta == Basis::Z ? probs.p_zb() : probs.p_xb();
      for (int s = 0; s < 2; ++s) {
        double amp = bob_amplitude(s, beta, states[i]);
        double click = eta_ch * amp * amp * eta[s];
        out.at(s, beta, i) = pb * probs.alice(i) * (click * (1.0 - pd / 2.0) + pd * (1.0 - click) * (1.0 - pd / 2.0));
      }
    }
  }
  return out;
}

std::vector<double> SweepRange::points() const {
  if (!(l_step > 0.0)) throw std::invalid_argument("l_step_km must be positive");
  if (!(l_min >= 0.0)) throw std::invalid_argument("l_min_km must be nonnegative");
  std::vector<double> out;
  if (l_min > l_max) return out;
  auto n = static_cast<long>(std::floor((l_max - l_min) / l_step + 1e-9)) + 1;
  out.reserve(static_cast<size_t>(n));
  for (long k = 0; k < n; ++k) out.push_back(l_min + static_cast<double>(k) * l_step);
  return out;
}

SweepPoint evaluate_point(const SweepInputs& in, double l_km) {
  ChannelConfig cfg = in.channel;
  cfg.length = l_km;
  auto [eta0, eta1] = eve_attack_efficiencies(in.d0, in.d1, cfg);
  PipelineInputs p{in.d0, in.d1, in.states, in.probs, detection_probabilities(in.states, eta0, eta1, cfg, in.probs),
                   in.f_ec};
  SweepPoint pt;
  pt.l_km = l_km;
  pt.eta_ch = channel_transmittance(cfg.alpha, l_km);
  pt.analytical = optimize_labeling(p, LambdaSource::analytical);
  pt.sdp = optimize_labeling(p, LambdaSource::sdp);
  return pt;
}

std::vector<SweepPoint> sweep(const SweepRange& range, const SweepInputs& in) {
  SweepInputs local = in;
  local.d0 = ensure_factorized(in.d0);
  local.d1 = ensure_factorized(in.d1);
  std::vector<SweepPoint> out;
  for (double l : range.points()) out.push_back(evaluate_point(local, l));
  return out;
}

}  // namespace ltqkd
