#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ltqkd/channel.hpp"
#include "ltqkd/detection_stats.hpp"
#include "ltqkd/detector.hpp"

namespace ltqkd::cli {

// Writes via a sibling temp file and rename so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

// Count-rate CSV with header polarization,r_in_hz,r_det_hz.
std::vector<CountRateSample> parse_counts_csv(const std::string& text, const std::string& source_name);

std::string format_fit_json(const std::string& detector, const DetectorFit& fit);
// Efficiencies per polarization from a fit JSON document.
std::map<Polarization, double> parse_fit_json(const std::string& text, const std::string& source_name);

// detector,row,col,re,im with six decimals.
std::string format_grams_csv(const EfficiencyOperator& d0, const EfficiencyOperator& d1);

// s,basis,state,p with all twelve entries; values round-trip exactly.
std::string format_stats_csv(const DetectionStats& stats);
DetectionStats parse_stats_csv(const std::string& text, const std::string& source_name);

inline constexpr const char* kKeyrateHeader = "l_km,eta_ch,p_sift,e_b,ep_u,r_virt_l,skr_ab,skr_sdp";
std::string format_keyrate_csv(const std::vector<SweepPoint>& points);

// Log-scale rate-vs-distance plot of both Lambda sources.
std::string render_rate_svg(const std::vector<SweepPoint>& points, const std::string& title);

}  // namespace ltqkd::cli
