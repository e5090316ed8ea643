#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "config.hpp"

namespace fph::cli {

/// Command-line overrides applied on top of the config file.
struct Options {
  std::string command;
  std::optional<std::string> config_path;
  std::optional<std::string> output;
  std::optional<std::string> format;
  std::optional<double> e_max;
  std::optional<std::string> mode;
  std::optional<double> regulator;
  std::optional<double> ell;
  /// Test fixture: build Fock spaces without fermionic signs.
  bool corrupt_signs = false;
};

enum ExitCode : int { Success = 0, VerificationFailed = 1, InvalidInput = 2 };

/// Loads the config, applies overrides, runs the command and writes to
/// `out` (or to the configured output file). Errors go to `err`.
int run(const Options& options, std::ostream& out, std::ostream& err);

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& cfg, bool corrupt_signs, std::ostream& out, std::ostream& err);
int cmd_spectrum(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_correlate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_scan(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Worker count: hardware concurrency capped by the THREADS environment
/// variable.
unsigned thread_count();

/// Runs body(i) for i in [0, n) on up to thread_count() threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fph::cli
