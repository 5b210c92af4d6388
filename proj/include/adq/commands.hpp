#pragma once

#include <iosfwd>
#include <string>

#include "adq/bounds.hpp"
#include "adq/config.hpp"

namespace adq {

// Stable exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

int exit_code_for(ErrorKind kind) noexcept;

struct RunOptions {
  std::string out_dir;  // overrides the config's out when nonempty
  bool plots = false;
};

// Each command writes its CSVs (atomically) under the output directory,
// reports to `log`, and returns an exit code. Errors propagate as adq::Error;
// run_guarded maps them to exit codes.
int cmd_probe(const ExperimentConfig& config, const RunOptions& run, std::ostream& log);
int cmd_pack(const ExperimentConfig& config, const RunOptions& run, std::ostream& log);
int cmd_optimize(const ExperimentConfig& config, const RunOptions& run, std::ostream& log);
int cmd_sweep(const ExperimentConfig& config, const RunOptions& run, std::ostream& log);
int cmd_structural(const ExperimentConfig& config, const RunOptions& run, std::ostream& log);
int cmd_oracle(const ExperimentConfig& config, const RunOptions& run, std::ostream& log);

struct BoundsParams {
  unsigned q = 1;
  std::string C1 = "1", C2 = "2", m = "2", s0 = "1", r = "2";
  ZetaVariant variant = ZetaVariant::Recursive;
  std::string out_dir;  // CSV written here when nonempty
};

int cmd_bounds(const BoundsParams& params, std::ostream& out);

// Runs fn, printing any adq::Error to err and returning its exit code.
template <class F>
int run_guarded(F&& fn, std::ostream& err);

}  // namespace adq

#include <ostream>

template <class F>
int adq::run_guarded(F&& fn, std::ostream& err) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
