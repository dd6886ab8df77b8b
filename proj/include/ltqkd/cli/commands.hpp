#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

namespace ltqkd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitCompute = 3;

struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> svg;
  std::optional<std::uint64_t> seed;
  // Test hook: multiplies lambda_s^- before the proofcheck.
  double inject_lambda_scale = 1.0;
};

int cmd_fit_detectors(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_tomography(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_keyrate(const CommandOptions& opt, std::ostream& out, std::ostream& err);
int cmd_proofcheck(const CommandOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace ltqkd::cli
