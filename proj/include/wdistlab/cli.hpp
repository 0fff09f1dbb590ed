#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wdistlab/adversarial.hpp"

namespace wdistlab {

/// Training flags given on the command line; unset fields keep the
/// driver's value.
struct TrainingOverrides {
  std::optional<double> learning_rate;
  std::optional<double> clip;
  std::optional<std::size_t> batch_size;
  std::optional<std::size_t> n_critic;
  std::optional<std::size_t> iters;
  std::optional<OptimizerKind> optimizer;
  std::optional<std::size_t> critic_warmup;

  bool empty() const;
  void apply(TrainingConfig& cfg) const;
};

struct CliConfig {
  std::string subcommand;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  TrainingOverrides overrides;
  bool plots = true;

  // experiment knobs
  std::optional<std::size_t> n_seeds;
  std::string target = "lines";     // loss-correlation
  std::size_t checkpoints = 40;     // loss-correlation
  std::size_t pairs = 100;          // ebgan-check
  std::size_t n_atoms = 512;        // parallel-lines

  // distances
  std::string p_path;
  std::string q_path;
  std::string metric;
  double bandwidth = 1.0;
  std::string plan_path;

  /// Algorithm defaults with the overrides and seed applied.
  TrainingConfig training() const;
};

/// Parse failure. `exit_code` is 0 only for --help output.
class CliError : public std::runtime_error {
 public:
  CliError(const std::string& msg, int exit_code) : std::runtime_error(msg), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;           // run finished but an invariant broke
inline constexpr int kExitUnknownFlag = 2;
inline constexpr int kExitBadNumber = 3;
inline constexpr int kExitBadValue = 4;
inline constexpr int kExitOutDir = 5;
inline constexpr int kExitRuntime = 6;

/// Throws CliError on unknown flags, malformed numbers, invalid values or an
/// unwritable out-dir; each has its own message prefix and exit code.
CliConfig parse_cli(int argc, const char* const* argv);
CliConfig parse_cli(const std::vector<std::string>& args);  // args exclude the program name

/// Runs one subcommand; returns the process exit code.
int run_cli(const CliConfig& cfg, std::ostream& out, std::ostream& err);

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wdistlab
