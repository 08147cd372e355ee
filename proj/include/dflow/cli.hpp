#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace dflow::cli {

/// Process exit codes.
enum ExitCode : int { kSuccess = 0, kNumericalFailure = 1, kInputError = 2 };

struct RunConfig {
  std::string command;
  std::optional<std::size_t> truncation;  // default: the input's own truncation
  double dt = 1e-3;
  double t_end = 1.0;
  double sigma = 0.5;
  std::uint64_t seed = 20240611;
  std::filesystem::path input;
  std::filesystem::path out = ".";
  std::optional<double> tolerance;
  std::string filter;
};

/// Runs `dflow <command> [flags]`; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dflow::cli
