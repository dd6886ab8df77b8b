#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "ltqkd/channel.hpp"
#include "ltqkd/cli/commands.hpp"
#include "ltqkd/cli/config.hpp"
#include "ltqkd/cli/io.hpp"
#include "test_util.hpp"

using namespace ltqkd;
using namespace ltqkd::cli;
namespace fs = std::filesystem;

namespace {

const char* kReferenceDetectors = R"("detectors": {
    "d0": {"eta": {"H": 0.2233, "V": 0.2399, "D": 0.2378, "L": 0.2369}},
    "d1": {"eta": {"H": 0.2250, "V": 0.2420, "D": 0.2401, "L": 0.2386}}})";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("ltqkd_cli_" + std::string(info->name()) + "_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }
  std::string slurp(const fs::path& p) { return read_file(p); }

  struct Run {
    int code;
    std::string out;
    std::string err;
  };
  template <typename F>
  Run run(F cmd, const CommandOptions& opt) {
    std::ostringstream out, err;
    int code = cmd(opt, out, err);
    return {code, out.str(), err.str()};
  }
  CommandOptions options(const fs::path& config, const std::string& out = "") {
    CommandOptions o;
    o.config = config;
    if (!out.empty()) o.out = dir_ / out;
    return o;
  }

  fs::path dir_;
};

std::string config_error(const std::string& text) {
  try {
    parse_config(text, ".");
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

std::string counts_csv(const double (&eta)[4], double tau, double r_dark) {
  std::ostringstream os;
  os << "polarization,r_in_hz,r_det_hz\n";
  os.precision(17);
  for (int p = 0; p < 4; ++p) {
    for (int k = 0; k <= 10; ++k) {
      double r_in = 1e4 * std::pow(10.0, k * 0.3);
      os << polarization_name(kPolarizations[p]) << "," << r_in << ","
         << detected_rate_model(r_in, eta[p], tau, r_dark) << "\n";
    }
  }
  return os.str();
}

}  // namespace

TEST_F(CliTest, config_errors_name_fields) {
  const std::string dets = kReferenceDetectors;
  const std::pair<std::string, std::string> cases[] = {
      {"{" + dets + "}", "exactly one of fields 'theta' and 'c01z'"},
      {"{" + dets + ", \"theta\": 0.1, \"c01z\": 0.1}", "exactly one of fields 'theta' and 'c01z'"},
      {"{\"c01z\": 0.1}", "'detectors' is missing"},
      {"{" + dets + ", \"c01z\": 1.5}", "'c01z'"},
      {"{" + dets + ", \"theta\": 2.0}", "'theta'"},
      {"{" + dets + ", \"c01z\": 0.1, \"p_za\": 1.5}", "'p_za'"},
      {"{" + dets + ", \"c01z\": 0.1, \"p_zb\": -0.5}", "'p_zb'"},
      {"{" + dets + ", \"c01z\": 0.1, \"p_dark\": 1.0}", "'p_dark'"},
      {"{" + dets + ", \"c01z\": 0.1, \"alpha_db_per_km\": -1}", "'alpha_db_per_km'"},
      {"{" + dets + ", \"c01z\": 0.1, \"f_ec\": 0.5}", "'f_ec'"},
      {"{" + dets + ", \"c01z\": 0.1, \"l_step_km\": 0}", "'l_step_km'"},
      {"{" + dets + ", \"c01z\": 0.1, \"l_min_km\": 50, \"l_max_km\": 10}", "'l_min_km'"},
      {"{" + dets + ", \"c01z\": 0.1, \"eve_mode\": \"loud\"}", "'eve_mode'"},
      {"{" + dets + ", \"c01z\": 0.1, \"eve_mode\": \"explicit\"}", "'eve_state' is missing"},
      {"{" + dets + ", \"c01z\": 0.1, \"eve_state\": [1, 0]}", "'eve_state' requires"},
      {"{" + dets + ", \"c01z\": 0.1, \"colour\": 1}", "'colour'"},
      {"{\"detectors\": {\"d0\": {\"eta\": {\"H\": 0.2}}, \"d1\": {\"gram\": [[0.2, 0], [0, 0.2]]}}, \"c01z\": 0}",
       "'detectors.d0.eta.V' is missing"},
      {"{\"detectors\": {\"d0\": {\"gram\": [[0.2, 0], [0, 0.2]]}}, \"c01z\": 0}", "'detectors.d1' is missing"},
      {"{\"detectors\": {\"d0\": {\"gram\": [[0.2, 0]]}, \"d1\": {\"gram\": [[0.2, 0], [0, 0.2]]}}, \"c01z\": 0}",
       "'detectors.d0.gram'"},
      {"{\"detectors\": {\"d0\": {\"counts\": \"a.csv\"}, \"d1\": {\"gram\": [[0.2, 0], [0, 0.2]]}}, \"c01z\": 0}",
       "'detectors.d0.r_dark_hz' is missing"},
      {"not json", "not valid JSON"},
  };
  std::set<std::string> messages;
  for (const auto& [text, expect] : cases) {
    std::string msg = config_error(text);
    EXPECT_NE(msg.find(expect), std::string::npos) << "config: " << text << "\nmessage: " << msg;
    messages.insert(msg);
  }
  // Distinct violations give distinct messages (the first two share a rule).
  EXPECT_EQ(messages.size(), std::size(cases) - 1);
}

TEST_F(CliTest, config_defaults) {
  RunConfig c = parse_config("{" + std::string(kReferenceDetectors) + ", \"c01z\": 0.1}", ".");
  EXPECT_NEAR(c.signal_states().c01(), 0.1, 1e-15);
  EXPECT_EQ(c.f_ec, 1.16);
  EXPECT_EQ(c.p_dark, 1e-6);
  EXPECT_EQ(c.sweep_range().points().size(), 41u);
  EXPECT_EQ(c.eve_mode, EveMode::min_eig_d1);
}

TEST_F(CliTest, fit_detectors_writes_both_files) {
  const double e0[4] = {0.2233, 0.2399, 0.2378, 0.2369};
  const double e1[4] = {0.2250, 0.2420, 0.2401, 0.2386};
  write("c0.csv", counts_csv(e0, 20.18e-6, 930));
  write("c1.csv", counts_csv(e1, 20.20e-6, 630));
  fs::path cfg = write("cfg.json", R"({"detectors": {"d0": {"counts": "c0.csv", "r_dark_hz": 930},
      "d1": {"counts": "c1.csv", "r_dark_hz": 630}}, "c01z": 0.1})");
  Run r = run(cmd_fit_detectors, options(cfg, "fits"));
  ASSERT_EQ(r.code, 0) << r.err;
  auto f0 = parse_fit_json(slurp(dir_ / "fits" / "d0_fit.json"), "d0");
  auto f1 = parse_fit_json(slurp(dir_ / "fits" / "d1_fit.json"), "d1");
  for (int p = 0; p < 4; ++p) {
    EXPECT_NEAR(f0.at(kPolarizations[p]) / e0[p], 1.0, 1e-3);
    EXPECT_NEAR(f1.at(kPolarizations[p]) / e1[p], 1.0, 1e-3);
  }

  // Fit files feed the other commands.
  fs::path cfg2 = write("cfg2.json", R"({"detectors": {"d0": {"fit": "fits/d0_fit.json"},
      "d1": {"fit": "fits/d1_fit.json"}}, "c01z": 0.1})");
  Run t = run(cmd_tomography, options(cfg2, "grams.csv"));
  EXPECT_EQ(t.code, 0) << t.err;
}

TEST_F(CliTest, fit_detectors_reports_bad_row) {
  write("c0.csv", "polarization,r_in_hz,r_det_hz\nH,1e4,2000\n,1e5,18000\n");
  write("c1.csv", "polarization,r_in_hz,r_det_hz\nH,1e4,2000\n");
  fs::path cfg = write("cfg.json", R"({"detectors": {"d0": {"counts": "c0.csv", "r_dark_hz": 0},
      "d1": {"counts": "c1.csv", "r_dark_hz": 0}}, "c01z": 0.1})");
  Run r = run(cmd_fit_detectors, options(cfg, "fits"));
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("c0.csv:3: missing polarization"), std::string::npos) << r.err;
}

TEST_F(CliTest, fit_detectors_missing_polarization) {
  const double e[4] = {0.2, 0.2, 0.2, 0.2};
  std::string text = counts_csv(e, 2e-5, 0);
  text = text.substr(0, text.find("\nL,") + 1);
  write("c0.csv", text);
  fs::path cfg = write("cfg.json", R"({"detectors": {"d0": {"counts": "c0.csv", "r_dark_hz": 0},
      "d1": {"counts": "c0.csv", "r_dark_hz": 0}}, "c01z": 0.1})");
  Run r = run(cmd_fit_detectors, options(cfg, "fits"));
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("polarization L"), std::string::npos) << r.err;
}

TEST_F(CliTest, tomography_outputs) {
  fs::path cfg = write("cfg.json", "{" + std::string(kReferenceDetectors) + ", \"c01z\": 0.1}");
  Run r = run(cmd_tomography, options(cfg, "grams.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  std::string csv = slurp(dir_ / "grams.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "detector,row,col,re,im");
  EXPECT_NE(csv.find("d0,0,1,0.006200,-0.005300"), std::string::npos) << csv;
  EXPECT_NE(csv.find("d1,1,1,0.242000,0.000000"), std::string::npos) << csv;

  fs::path iso = write("iso.json", R"({"detectors": {"d0": {"eta": {"H": 0.3, "V": 0.3, "D": 0.3, "L": 0.3}},
      "d1": {"eta": {"H": 0.3, "V": 0.3, "D": 0.3, "L": 0.3}}}, "c01z": 0})");
  ASSERT_EQ(run(cmd_tomography, options(iso, "iso.csv")).code, 0);
  EXPECT_NE(slurp(dir_ / "iso.csv").find("d0,0,1,0.000000,0.000000"), std::string::npos);

  fs::path bad = write("bad.json", R"({"detectors": {"d0": {"eta": {"H": 0, "V": 0, "D": 1, "L": 0}},
      "d1": {"eta": {"H": 0.3, "V": 0.3, "D": 0.3, "L": 0.3}}}, "c01z": 0})");
  Run b = run(cmd_tomography, options(bad, "bad.csv"));
  EXPECT_EQ(b.code, kExitCompute);
  EXPECT_FALSE(fs::exists(dir_ / "bad.csv"));
}

TEST_F(CliTest, keyrate_csv_and_svg) {
  fs::path cfg = write("cfg.json", "{" + std::string(kReferenceDetectors) + ", \"c01z\": 0.1, \"l_max_km\": 100, \"l_step_km\": 10}");
  CommandOptions opt = options(cfg, "rate.csv");
  opt.svg = dir_ / "rate.svg";
  Run r = run(cmd_keyrate, opt);
  ASSERT_EQ(r.code, 0) << r.err;
  std::string csv = slurp(dir_ / "rate.csv");
  std::istringstream lines(csv);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "l_km,eta_ch,p_sift,e_b,ep_u,r_virt_l,skr_ab,skr_sdp");
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 11);
  std::string svg = slurp(dir_ / "rate.svg");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);

  // Byte-stable across runs.
  opt.out = dir_ / "rate2.csv";
  ASSERT_EQ(run(cmd_keyrate, opt).code, 0);
  EXPECT_EQ(slurp(dir_ / "rate2.csv"), csv);
}

TEST_F(CliTest, keyrate_single_row) {
  fs::path cfg = write("cfg.json",
                       "{" + std::string(kReferenceDetectors) + ", \"c01z\": 0.1, \"l_min_km\": 40, \"l_max_km\": 40}");
  ASSERT_EQ(run(cmd_keyrate, options(cfg, "rate.csv")).code, 0);
  std::string csv = slurp(dir_ / "rate.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
  EXPECT_EQ(csv.substr(csv.find('\n') + 1, 3), "40,");
}

TEST_F(CliTest, keyrate_stats_override_round_trip) {
  RunConfig base = parse_config("{" + std::string(kReferenceDetectors) + ", \"c01z\": 0.3}", ".");
  EfficiencyOperator d0 = tomography(0.2233, 0.2399, 0.2378, 0.2369);
  EfficiencyOperator d1 = tomography(0.2250, 0.2420, 0.2401, 0.2386);
  ChannelConfig ch = base.channel_config();
  ch.length = 60.0;
  auto [e0, e1] = eve_attack_efficiencies(d0, d1, ch);
  DetectionStats stats = detection_probabilities(base.signal_states(), e0, e1, ch, base.protocol_probs());
  write("stats.csv", format_stats_csv(stats));
  EXPECT_EQ(parse_stats_csv(format_stats_csv(stats), "stats"), stats);

  fs::path sim = write("sim.json", "{" + std::string(kReferenceDetectors) +
                                       ", \"c01z\": 0.3, \"l_min_km\": 60, \"l_max_km\": 60}");
  fs::path ovr = write("ovr.json", "{" + std::string(kReferenceDetectors) +
                                       ", \"c01z\": 0.3, \"l_min_km\": 60, \"stats_override_path\": \"stats.csv\"}");
  ASSERT_EQ(run(cmd_keyrate, options(sim, "sim.csv")).code, 0);
  Run r = run(cmd_keyrate, options(ovr, "ovr.csv"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir_ / "ovr.csv"), slurp(dir_ / "sim.csv"));
}

TEST_F(CliTest, keyrate_singular_detector) {
  fs::path cfg = write("cfg.json", R"({"detectors": {"d0": {"gram": [[0.25, 0.25], [0.25, 0.25]]},
      "d1": {"gram": [[0.25, 0], [0, 0.25]]}}, "c01z": 0.1})");
  Run r = run(cmd_keyrate, options(cfg, "rate.csv"));
  EXPECT_EQ(r.code, kExitCompute);
  EXPECT_NE(r.err.find("error"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "rate.csv"));
}

TEST_F(CliTest, keyrate_requires_out) {
  fs::path cfg = write("cfg.json", "{" + std::string(kReferenceDetectors) + ", \"c01z\": 0.1}");
  EXPECT_EQ(run(cmd_keyrate, options(cfg)).code, kExitInput);
  EXPECT_EQ(run(cmd_keyrate, options(dir_ / "absent.json", "x.csv")).code, kExitInput);
}

TEST_F(CliTest, proofcheck_pass_and_injected_failure) {
  fs::path cfg = write("cfg.json", "{" + std::string(kReferenceDetectors) + ", \"c01z\": 0.1, \"proofcheck_trials\": 200}");
  Run ok = run(cmd_proofcheck, options(cfg, "table.txt"));
  EXPECT_EQ(ok.code, 0) << ok.out;
  EXPECT_NE(ok.out.find("all checks passed"), std::string::npos);
  EXPECT_EQ(slurp(dir_ / "table.txt"), ok.out);

  CommandOptions bad = options(cfg);
  bad.inject_lambda_scale = 1.5;
  Run fail = run(cmd_proofcheck, bad);
  EXPECT_EQ(fail.code, kExitCompute);
  EXPECT_NE(fail.out.find("FAIL"), std::string::npos);

  fs::path same = write("same.json", R"({"detectors": {"d0": {"eta": {"H": 0.25, "V": 0.25, "D": 0.25, "L": 0.25}},
      "d1": {"eta": {"H": 0.25, "V": 0.25, "D": 0.25, "L": 0.25}}}, "c01z": 0, "proofcheck_trials": 100})");
  EXPECT_EQ(run(cmd_proofcheck, options(same)).code, 0);
}

TEST_F(CliTest, binary_exit_codes) {
  fs::path cfg = write("cfg.json", "{" + std::string(kReferenceDetectors) + ", \"c01z\": 0.1, \"proofcheck_trials\": 50}");
  auto status = [](const std::string& args) {
    std::string cmd = std::string(LTQKD_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status("proofcheck --config " + cfg.string()), 0);
  EXPECT_EQ(status("proofcheck --config " + cfg.string() + " --inject-lambda-scale 1.5"), 3);
  EXPECT_EQ(status("keyrate --config " + cfg.string()), 2);
  EXPECT_EQ(status("keyrate --config " + (dir_ / "nope.json").string() + " --out x.csv"), 2);
  EXPECT_EQ(status("frobnicate"), 2);
  EXPECT_EQ(status("tomography --config " + cfg.string() + " --out " + (dir_ / "g.csv").string()), 0);
}
