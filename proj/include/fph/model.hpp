#pragma once

#include <optional>
#include <vector>

namespace fph {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double euler_gamma = 0.57721566490153286061;

enum class Flavor { F = 0, P = 1 };

/// Physical inputs of the fermion-phonon model with hbar = 1. Velocities and
/// couplings share units; a and L are lengths.
struct ModelParams {
  double vF = 1.0;
  double vP = 0.5;
  double lambda = 0.0;
  double g = 0.0;
  double a = 0.01;
  double L = 100.0;
  std::optional<double> omega0;

  /// Phonon zero-mode frequency, one boson-mode spacing 2*pi*vP/L when unset.
  double zero_mode_frequency() const;
};

struct DerivedCouplings {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double W = 0.0;
};

/// Mode bookkeeping for a box of length L. Fermion momenta are stored as odd
/// integers k2 with k = (2*pi/L) * k2 / 2, boson momenta as integers m with
/// p = (2*pi/L) * m.
struct MomentumGrid {
  double L = 0.0;
  int K = 0;
  double a = 0.0;
  long long Na = 0;

  double spacing() const;
  double fermion_momentum(int k2) const;
  double boson_momentum(int m) const;
  bool has_fermion_mode(int k2) const;
  bool has_boson_mode(int m) const;
  std::vector<int> fermion_modes() const;
  std::vector<int> boson_modes() const;
  /// Largest positive boson momentum inside the interaction range, Na * 2*pi/L.
  double cutoff_momentum() const;
};

/// Throws Error{BadGeometry} or Error{UnstableCouplings}; returns the input
/// untouched otherwise.
ModelParams validate_params(const ModelParams& raw);

DerivedCouplings derived_couplings(const ModelParams& params);

MomentumGrid momentum_grid(double L, int K, double a);

/// Number of positive boson modes with p <= pi/a, ties included.
long long cutoff_mode_count(double L, double a);

}  // namespace fph
