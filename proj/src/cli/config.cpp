#include "ltqkd/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ltqkd::cli {

using nlohmann::json;

namespace {

double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) throw InputError("config field '" + field + "' must be a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) throw InputError("config field '" + field + "' must be finite");
  return v;
}

double require_range(const json& root, const std::string& field, double lo, double hi, double fallback) {
  if (!root.contains(field)) return fallback;
  double v = get_number(root.at(field), field);
  if (!(v >= lo && v <= hi)) {
    std::ostringstream os;
    os << "config field '" << field << "' = " << v << " is outside [" << lo << ", " << hi << "]";
    throw InputError(os.str());
  }
  return v;
}

cplx parse_complex(const json& j, const std::string& field) {
  if (j.is_number()) return {get_number(j, field), 0.0};
  if (j.is_array() && j.size() == 2) return {get_number(j[0], field), get_number(j[1], field)};
  throw InputError("config field '" + field + "' entries must be a number or a [re, im] pair");
}

Matrix parse_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw InputError("config field '" + field + "' must be a square matrix");
  auto n = static_cast<Eigen::Index>(j.size());
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const json& row = j[static_cast<size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw InputError("config field '" + field + "' must be a square matrix");
    }
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = parse_complex(row[static_cast<size_t>(c)], field);
  }
  return m;
}

Vector parse_vector(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw InputError("config field '" + field + "' must be a nonempty array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = parse_complex(j[i], field);
  if (!(v.norm() > 0.0)) throw InputError("config field '" + field + "' must be a nonzero vector");
  return v.normalized();
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) throw InputError("unknown config field '" + where + key + "'");
  }
}

DetectorSource parse_detector(const json& j, const std::string& name, const std::filesystem::path& base) {
  const std::string prefix = "detectors." + name;
  if (!j.is_object()) throw InputError("config field '" + prefix + "' must be an object");
  reject_unknown(j, {"eta", "counts", "r_dark_hz", "fit", "gram"}, prefix + ".");
  int kinds = static_cast<int>(j.contains("eta")) + static_cast<int>(j.contains("counts")) +
              static_cast<int>(j.contains("fit")) + static_cast<int>(j.contains("gram"));
  if (kinds != 1) {
    throw InputError("config field '" + prefix + "' needs exactly one of 'eta', 'counts', 'fit', 'gram'");
  }
  DetectorSource d;
  if (j.contains("eta")) {
    d.kind = DetectorSource::Kind::eta_by_pol;
    const json& e = j.at("eta");
    if (!e.is_object()) throw InputError("config field '" + prefix + ".eta' must be an object keyed H, V, D, L");
    reject_unknown(e, {"H", "V", "D", "L"}, prefix + ".eta.");
    for (Polarization p : kPolarizations) {
      std::string key = polarization_name(p);
      std::string field = prefix + ".eta." + key;
      if (!e.contains(key)) throw InputError("config field '" + field + "' is missing");
      double v = get_number(e.at(key), field);
      if (!(v >= 0.0 && v <= 1.0)) throw InputError("config field '" + field + "' must lie in [0, 1]");
      d.eta_by_pol[p] = v;
    }
  } else if (j.contains("counts")) {
    d.kind = DetectorSource::Kind::counts;
    if (!j.at("counts").is_string()) throw InputError("config field '" + prefix + ".counts' must be a path");
    d.path = base / j.at("counts").get<std::string>();
    if (!j.contains("r_dark_hz")) throw InputError("config field '" + prefix + ".r_dark_hz' is missing");
    d.r_dark_hz = get_number(j.at("r_dark_hz"), prefix + ".r_dark_hz");
    if (!(d.r_dark_hz >= 0.0)) throw InputError("config field '" + prefix + ".r_dark_hz' must be nonnegative");
  } else if (j.contains("fit")) {
    d.kind = DetectorSource::Kind::fit_file;
    if (!j.at("fit").is_string()) throw InputError("config field '" + prefix + ".fit' must be a path");
    d.path = base / j.at("fit").get<std::string>();
  } else {
    d.kind = DetectorSource::Kind::gram;
    d.gram = parse_matrix(j.at("gram"), prefix + ".gram");
  }
  if (d.kind != DetectorSource::Kind::counts && j.contains("r_dark_hz")) {
    throw InputError("config field '" + prefix + ".r_dark_hz' only applies to 'counts' detectors");
  }
  return d;
}

}  // namespace

double RunConfig::theta_value() const { return theta ? *theta : std::asin(*c01z); }

SignalStates RunConfig::signal_states() const { return SignalStates::from_theta(theta_value(), phi0x_angle); }

ProtocolProbs RunConfig::protocol_probs() const { return ProtocolProbs(p_za, p_zb); }

ChannelConfig RunConfig::channel_config() const {
  ChannelConfig c;
  c.alpha = alpha_db_per_km;
  c.length = l_min_km;
  c.p_dark = p_dark;
  c.eve_mode = eve_mode;
  c.eve_state = eve_state;
  return c;
}

RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw InputError("config must be a JSON object");
  reject_unknown(root,
                 {"detectors", "theta", "c01z", "phi0x_angle", "p_za", "p_zb", "alpha_db_per_km", "p_dark", "f_ec",
                  "l_min_km", "l_max_km", "l_step_km", "eve_mode", "eve_state", "seed", "proofcheck_trials",
                  "stats_override_path"},
                 "");

  RunConfig cfg;
  if (!root.contains("detectors")) throw InputError("config field 'detectors' is missing");
  const json& dets = root.at("detectors");
  if (!dets.is_object()) throw InputError("config field 'detectors' must be an object with d0 and d1");
  reject_unknown(dets, {"d0", "d1"}, "detectors.");
  for (const char* name : {"d0", "d1"}) {
    if (!dets.contains(name)) throw InputError(std::string("config field 'detectors.") + name + "' is missing");
  }
  cfg.d0 = parse_detector(dets.at("d0"), "d0", base_dir);
  cfg.d1 = parse_detector(dets.at("d1"), "d1", base_dir);

  bool has_theta = root.contains("theta");
  bool has_c01z = root.contains("c01z");
  if (has_theta == has_c01z) throw InputError("config needs exactly one of fields 'theta' and 'c01z'");
  const double pi = std::numbers::pi;
  if (has_theta) {
    double t = get_number(root.at("theta"), "theta");
    if (!(t > -pi / 2.0 && t < pi / 2.0)) throw InputError("config field 'theta' must lie in (-pi/2, pi/2)");
    cfg.theta = t;
  } else {
    double c = get_number(root.at("c01z"), "c01z");
    if (!(c > -1.0 && c < 1.0)) throw InputError("config field 'c01z' must lie in (-1, 1)");
    cfg.c01z = c;
  }
  cfg.phi0x_angle = require_range(root, "phi0x_angle", -pi, pi, cfg.phi0x_angle);
  cfg.p_za = require_range(root, "p_za", 0.0, 1.0, cfg.p_za);
  cfg.p_zb = require_range(root, "p_zb", 0.0, 1.0, cfg.p_zb);
  cfg.alpha_db_per_km = require_range(root, "alpha_db_per_km", 0.0, 1e3, cfg.alpha_db_per_km);
  cfg.p_dark = require_range(root, "p_dark", 0.0, 1.0, cfg.p_dark);
  if (cfg.p_dark >= 1.0) throw InputError("config field 'p_dark' must be below 1");
  cfg.f_ec = require_range(root, "f_ec", 1.0, 10.0, cfg.f_ec);
  cfg.l_min_km = require_range(root, "l_min_km", 0.0, 1e5, cfg.l_min_km);
  cfg.l_max_km = require_range(root, "l_max_km", 0.0, 1e5, cfg.l_max_km);
  cfg.l_step_km = require_range(root, "l_step_km", 0.0, 1e5, cfg.l_step_km);
  if (!(cfg.l_step_km > 0.0)) throw InputError("config field 'l_step_km' must be positive");
  if (cfg.l_min_km > cfg.l_max_km) throw InputError("config field 'l_min_km' exceeds 'l_max_km'");

  if (root.contains("eve_mode")) {
    const json& m = root.at("eve_mode");
    if (!m.is_string()) throw InputError("config field 'eve_mode' must be \"min_eig_d1\" or \"explicit\"");
    std::string mode = m.get<std::string>();
    if (mode == "min_eig_d1") {
      cfg.eve_mode = EveMode::min_eig_d1;
    } else if (mode == "explicit") {
      cfg.eve_mode = EveMode::explicit_state;
    } else {
      throw InputError("config field 'eve_mode' must be \"min_eig_d1\" or \"explicit\"");
    }
  }
  if (root.contains("eve_state")) {
    if (cfg.eve_mode != EveMode::explicit_state) {
      throw InputError("config field 'eve_state' requires eve_mode \"explicit\"");
    }
    cfg.eve_state = parse_vector(root.at("eve_state"), "eve_state");
  } else if (cfg.eve_mode == EveMode::explicit_state) {
    throw InputError("config field 'eve_state' is missing for eve_mode \"explicit\"");
  }

  if (root.contains("seed")) {
    const json& s = root.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      throw InputError("config field 'seed' must be a nonnegative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  if (root.contains("proofcheck_trials")) {
    const json& t = root.at("proofcheck_trials");
    if (!t.is_number_integer() || t.get<long long>() < 1 || t.get<long long>() > 10000000) {
      throw InputError("config field 'proofcheck_trials' must be an integer in [1, 1e7]");
    }
    cfg.proofcheck_trials = t.get<int>();
  }
  if (root.contains("stats_override_path")) {
    if (!root.at("stats_override_path").is_string()) {
      throw InputError("config field 'stats_override_path' must be a path");
    }
    cfg.stats_override_path = base_dir / root.at("stats_override_path").get<std::string>();
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

}  // namespace ltqkd::cli
