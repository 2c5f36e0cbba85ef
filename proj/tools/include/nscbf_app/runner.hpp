#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nscbf_app/scenario.hpp"

namespace nscbf::app {

enum class Command { kSimulate, kVerify, kSweep };

inline constexpr int kExitPass = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

struct RunOptions {
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<double>> alphas;
  std::optional<double> dt;
  std::optional<double> horizon;
  int threads = 0;  // 0: hardware concurrency
};

/// Applies the command-line overrides and revalidates the scenario.
Scenario with_overrides(Scenario s, const RunOptions& options);

/// Runs one command and writes its outputs under options.out_dir.
/// Returns kExitPass, kExitFailure (a monitor or probe failed) or
/// kExitConfig. A one-line JSON summary goes to `log`.
int run(Command command, const Scenario& scenario, const RunOptions& options, std::ostream& log);

/// Shortest round-trip decimal form; "inf", "-inf", "nan" for non-finite.
std::string format_double(double value);

}  // namespace nscbf::app
