#include "ltqkd/cli/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include <json.hpp>

#include "ltqkd/cli/config.hpp"

namespace ltqkd::cli {

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw InputError("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw InputError("cannot move output into place at " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::string trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(trim(f));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// Calls row(fields, line_number) for each data line after a required header.
template <typename F>
void for_each_row(const std::string& text, const std::string& source, const std::string& header, F row) {
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  while (std::getline(ss, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (!saw_header) {
      if (t != header) throw InputError(source + ":" + std::to_string(line_no) + ": expected header '" + header + "'");
      saw_header = true;
      continue;
    }
    row(split_fields(t), line_no);
  }
  if (!saw_header) throw InputError(source + ": missing header '" + header + "'");
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

std::vector<CountRateSample> parse_counts_csv(const std::string& text, const std::string& source_name) {
  std::vector<CountRateSample> out;
  for_each_row(text, source_name, "polarization,r_in_hz,r_det_hz", [&](const auto& f, int line_no) {
    std::string where = source_name + ":" + std::to_string(line_no) + ": ";
    if (f.size() != 3) throw InputError(where + "expected 3 fields, got " + std::to_string(f.size()));
    if (f[0].empty()) throw InputError(where + "missing polarization");
    auto pol = parse_polarization(f[0]);
    if (!pol) throw InputError(where + "polarization must be one of H, V, D, L, got '" + f[0] + "'");
    CountRateSample s{*pol, 0.0, 0.0};
    if (!parse_double(f[1], s.r_in) || !(s.r_in > 0.0)) throw InputError(where + "r_in_hz must be a positive number");
    if (!parse_double(f[2], s.r_det) || !(s.r_det > 0.0)) {
      throw InputError(where + "r_det_hz must be a positive number");
    }
    if (s.r_det > s.r_in) throw InputError(where + "r_det_hz exceeds r_in_hz");
    out.push_back(s);
  });
  return out;
}

std::string format_fit_json(const std::string& detector, const DetectorFit& fit) {
  nlohmann::ordered_json j;
  j["detector"] = detector;
  j["r_dark_hz"] = fit.r_dark;
  j["tau_d_s"] = fit.tau_d();
  j["tau_d_spread_s"] = fit.tau_spread();
  for (const auto& [p, f] : fit.by_pol) {
    std::string key = polarization_name(p);
    j["eta"][key] = f.eta;
    j["tau_d_by_pol_s"][key] = f.tau_d;
    j["residual_norm"][key] = f.residual_norm;
    j["iterations"][key] = f.iterations;
  }
  return j.dump(2) + "\n";
}

std::map<Polarization, double> parse_fit_json(const std::string& text, const std::string& source_name) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(source_name + ": not valid JSON: " + e.what());
  }
  if (!j.is_object() || !j.contains("eta") || !j.at("eta").is_object()) {
    throw InputError(source_name + ": missing 'eta' object");
  }
  std::map<Polarization, double> out;
  for (Polarization p : kPolarizations) {
    std::string key = polarization_name(p);
    const auto& e = j.at("eta");
    if (!e.contains(key) || !e.at(key).is_number()) {
      throw InputError(source_name + ": missing efficiency for polarization " + key);
    }
    out[p] = e.at(key).get<double>();
  }
  return out;
}

std::string format_grams_csv(const EfficiencyOperator& d0, const EfficiencyOperator& d1) {
  std::string out = "detector,row,col,re,im\n";
  const std::pair<const char*, const EfficiencyOperator*> dets[] = {{"d0", &d0}, {"d1", &d1}};
  for (const auto& [name, op] : dets) {
    for (int r = 0; r < op->dim(); ++r) {
      for (int c = 0; c < op->dim(); ++c) {
        cplx v = op->gram()(r, c);
        // Print -0.000000 as 0.000000.
        double re = std::abs(v.real()) < 5e-7 ? 0.0 : v.real();
        double im = std::abs(v.imag()) < 5e-7 ? 0.0 : v.imag();
        out += std::string(name) + "," + std::to_string(r) + "," + std::to_string(c) + "," + fmt("%.6f", re) + "," +
               fmt("%.6f", im) + "\n";
      }
    }
  }
  return out;
}

std::string format_stats_csv(const DetectionStats& stats) {
  std::string out = "s,basis,state,p\n";
  for (int s = 0; s < 2; ++s) {
    for (Basis b : {Basis::X, Basis::Z}) {
      for (Signal i : kSignals) {
        out += std::to_string(s) + "," + (b == Basis::X ? "X" : "Z") + "," + signal_name(i) + "," +
               fmt("%.17g", stats.at(s, b, i)) + "\n";
      }
    }
  }
  return out;
}

DetectionStats parse_stats_csv(const std::string& text, const std::string& source_name) {
  DetectionStats stats;
  std::array<bool, 12> seen{};
  for_each_row(text, source_name, "s,basis,state,p", [&](const auto& f, int line_no) {
    std::string where = source_name + ":" + std::to_string(line_no) + ": ";
    if (f.size() != 4) throw InputError(where + "expected 4 fields, got " + std::to_string(f.size()));
    int s = f[0] == "0" ? 0 : f[0] == "1" ? 1 : -1;
    if (s < 0) throw InputError(where + "s must be 0 or 1");
    if (f[1] != "X" && f[1] != "Z") throw InputError(where + "basis must be X or Z");
    Basis b = f[1] == "X" ? Basis::X : Basis::Z;
    int idx = -1;
    for (Signal i : kSignals) {
      if (f[2] == signal_name(i)) idx = static_cast<int>(i);
    }
    if (idx < 0) throw InputError(where + "state must be 0Z, 1Z or 0X");
    double p = 0.0;
    if (!parse_double(f[3], p) || !(p >= 0.0 && p <= 1.0)) throw InputError(where + "p must be a probability");
    int key = s * 6 + static_cast<int>(b) * 3 + idx;
    if (seen[key]) throw InputError(where + "duplicate entry");
    seen[key] = true;
    stats.at(s, b, static_cast<Signal>(idx)) = p;
  });
  for (bool s : seen) {
    if (!s) throw InputError(source_name + ": all twelve (s, basis, state) entries are required");
  }
  return stats;
}

std::string format_keyrate_csv(const std::vector<SweepPoint>& points) {
  std::string out = std::string(kKeyrateHeader) + "\n";
  for (const SweepPoint& p : points) {
    const SecurityReport& a = p.analytical;
    const double cols[] = {p.l_km, p.eta_ch, a.p_z_sift, a.e_b, a.e_p_u, a.r_x_virt_l, a.skr, p.sdp.skr};
    for (size_t i = 0; i < std::size(cols); ++i) {
      if (i) out += ",";
      out += fmt("%.12g", cols[i]);
    }
    out += "\n";
  }
  return out;
}

}  // namespace ltqkd::cli
