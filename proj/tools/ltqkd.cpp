#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ltqkd/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace ltqkd::cli;
  CLI::App app{"Secret key rates for the loss-tolerant protocol with flawed states and mismatched detectors"};
  app.require_subcommand(1);

  CommandOptions opt;
  std::string config;
  std::string out;
  std::string svg;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub, bool out_required) {
    sub->add_option("--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    auto* o = sub->add_option("--out", out, "output path");
    if (out_required) o->required();
    sub->add_option("--seed", seed, "random seed (overrides the config)");
  };

  CLI::App* fit = app.add_subcommand("fit-detectors", "fit efficiency and dead time from count-rate data");
  add_common(fit, true);
  CLI::App* tomo = app.add_subcommand("tomography", "efficiency operators from per-polarization efficiencies");
  add_common(tomo, true);
  CLI::App* key = app.add_subcommand("keyrate", "secret key rate versus distance");
  add_common(key, true);
  key->add_option("--svg", svg, "also write a log-scale plot");
  CLI::App* proof = app.add_subcommand("proofcheck", "brute-force check of the proof's operator inequalities");
  add_common(proof, false);
  // Negative-control hook for tests; not listed in --help.
  proof->add_option("--inject-lambda-scale", opt.inject_lambda_scale)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  opt.config = config;
  if (!out.empty()) opt.out = out;
  if (!svg.empty()) opt.svg = svg;
  for (CLI::App* sub : {fit, tomo, key, proof}) {
    if (sub->parsed() && sub->count("--seed")) opt.seed = seed;
  }

  if (fit->parsed()) return cmd_fit_detectors(opt, std::cout, std::cerr);
  if (tomo->parsed()) return cmd_tomography(opt, std::cout, std::cerr);
  if (key->parsed()) return cmd_keyrate(opt, std::cout, std::cerr);
  return cmd_proofcheck(opt, std::cout, std::cerr);
}
