#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fph/insertions.hpp"
#include "fph/model.hpp"

namespace fph::cli {

struct Range {
  double min = 0.0;
  double max = 0.0;
  int points = 1;

  std::vector<double> values() const;
};

/// x (and optionally t) of one insertion swept over a uniform grid.
struct Sweep {
  std::size_t index = 0;
  Range x{0.1, 1.0, 10};
  std::optional<Range> t;
};

struct CorrelatorConfig {
  CorrelatorSpec spec;
  std::string mode = "continuum";
  Sweep sweep;
};

/// Coupling grid for `scan`; each axis is either given directly (lambda, g)
/// or through its dimensionless form (gamma1, gamma2).
struct ScanConfig {
  Range first{0.0, 0.0, 1};
  bool first_is_gamma = false;
  Range second{0.0, 0.0, 1};
  bool second_is_gamma = false;
};

struct RunConfig {
  ModelParams model;
  int K = 2;
  std::optional<double> e_max;
  CorrelatorConfig correlator;
  ScanConfig scan;
  /// csv or json; unset means the command default (json for solve and
  /// verify, csv otherwise).
  std::optional<std::string> format;
  std::optional<std::string> output;
};

/// Parses a YAML document; throws Error{ConfigError} on malformed input. The
/// model is not validated here so that `scan` can report unstable points.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace fph::cli
