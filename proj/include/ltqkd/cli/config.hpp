#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "ltqkd/channel.hpp"
#include "ltqkd/detector.hpp"
#include "ltqkd/linalg.hpp"
#include "ltqkd/qstate.hpp"

namespace ltqkd::cli {

// Malformed or inconsistent user input; maps to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DetectorSource {
  enum class Kind { eta_by_pol, counts, fit_file, gram };
  Kind kind = Kind::eta_by_pol;
  std::map<Polarization, double> eta_by_pol;
  std::filesystem::path path;  // counts CSV or fit JSON
  double r_dark_hz = 0.0;
  Matrix gram;
};

struct RunConfig {
  DetectorSource d0;
  DetectorSource d1;
  std::optional<double> theta;
  std::optional<double> c01z;
  double phi0x_angle = 1.5707963267948966;
  double p_za = 2.0 / 3.0;
  double p_zb = 2.0 / 3.0;
  double alpha_db_per_km = 0.2;
  double p_dark = 1e-6;
  double f_ec = 1.16;
  double l_min_km = 0.0;
  double l_max_km = 200.0;
  double l_step_km = 5.0;
  EveMode eve_mode = EveMode::min_eig_d1;
  Vector eve_state;
  std::uint64_t seed = 1;
  int proofcheck_trials = 1000;
  std::optional<std::filesystem::path> stats_override_path;

  double theta_value() const;
  SignalStates signal_states() const;
  ProtocolProbs protocol_probs() const;
  ChannelConfig channel_config() const;
  SweepRange sweep_range() const { return {l_min_km, l_max_km, l_step_km}; }
};

// Relative paths inside the config resolve against base_dir.
RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace ltqkd::cli
