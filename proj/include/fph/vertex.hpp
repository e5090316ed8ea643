#pragma once
// Normal-ordering calculus for regularized fermion fields written as vertex
// operators of the four boson channels (r, X).
//
// A channel coefficient alpha(p) enters a vertex operator through
// exp(sum_p (2*pi/L) alpha(p) J(-p)) split into creation and annihilation
// parts. Moving annihilators of one factor past creators of the next produces
// the scalar exp(-c) with
//   c = sum_{p>0} (2*pi/L) p alpha1(-s p) alpha2(s p)
// for a channel of chirality s. Zero modes and Klein factors are tracked
// separately and only combined in vacuum_expectation.

#include <array>
#include <complex>
#include <map>
#include <optional>
#include <vector>

#include "fph/bogoliubov.hpp"
#include "fph/insertions.hpp"

namespace fph {

using Complex = std::complex<double>;

/// Mode coefficients of one channel. A field insertion uses the parametric
/// form amp(p) * exp(-i p y - eps |p| / 2) / (i p), with y = x - s * v(p) * t
/// and amp, v piecewise at the interaction cutoff; hand-built factors may
/// instead list explicit coefficients by integer mode m (p = 2*pi*m/L).
struct ChannelCoefficients {
  int s = 1;
  Flavor X = Flavor::F;
  double amp_low = 0.0;
  double amp_high = 0.0;
  double v_low = 0.0;
  double v_high = 0.0;
  std::optional<std::map<long long, Complex>> explicit_modes;

  bool vanishes() const;
};

struct VertexFactor {
  double L = 0.0;
  long long Na = 0;
  double x = 0.0;
  double t = 0.0;
  double eps = 0.0;
  /// Klein exponents per chirality, index 0 for +, 1 for -.
  std::array<int, 2> winding{0, 0};
  /// Charge shift produced by the Klein word of this factor.
  std::array<int, 2> charge_shift{0, 0};
  /// c in the symmetrized zero-mode factor exp(i c.Q / 2) R exp(i c.Q / 2).
  std::array<double, 2> zero_mode{0.0, 0.0};
  std::vector<ChannelCoefficients> channels;
  Complex prefactor{1.0, 0.0};

  /// alpha_{s,X}(p) at p = 2*pi*m/L; zero for channels the factor lacks.
  Complex coefficient(int s, Flavor X, long long m) const;
};

/// Controls the truncation of the mode sums.
struct SumPolicy {
  /// Target bound on the dropped part of each logarithmic mode sum.
  double tolerance = 1e-15;
  /// Hard cap on the number of modes summed per channel.
  long long max_modes = 200'000'000;
};

/// The regularized field psi~ (q = -1) or its adjoint (q = +1) of chirality r
/// at (x, t), including the per-field normalization Z_{a,eps} / sqrt(L).
VertexFactor field_vertex(int r, int q, double x, double t, double eps, const BogoliubovSolution& sol);

struct Contraction {
  Complex value{1.0, 0.0};
  Complex log_value{0.0, 0.0};
  /// Bound on |log_value error| from the dropped modes.
  double log_tail_bound = 0.0;
};

/// Oscillator contraction constant of v1 (left) with v2 (right), summed over
/// channels.
Contraction pair_contraction(const VertexFactor& v1, const VertexFactor& v2, const SumPolicy& policy = {});

struct NormalOrderedProduct {
  std::vector<VertexFactor> factors;
  Complex prefactor{1.0, 0.0};
  /// (chirality, exponent) in product order.
  std::vector<std::pair<int, int>> klein_word;
  double log_tail_bound = 0.0;
};

NormalOrderedProduct normal_order_product(const std::vector<VertexFactor>& factors, const SumPolicy& policy = {});

/// Sign from bringing a word of Klein factors into the order R_+ ... R_- ...,
/// done one adjacent transposition at a time; 0 if the charges do not cancel.
int klein_reorder_sign(const std::vector<std::pair<int, int>>& word);

/// Vacuum expectation of a normal-ordered product.
Complex vacuum_expectation(const NormalOrderedProduct& product);

struct ZRenorm {
  double Z = 1.0;
  double asymptote = 1.0;
};

ZRenorm z_renorm(const ModelParams& params, const BogoliubovSolution& sol, double eps);

struct FiniteResult {
  Complex value{0.0, 0.0};
  /// Bound on |value error| caused by truncating the mode sums.
  double tail_bound = 0.0;
};

/// Finite-(L, a, eps) correlator of the interacting model. All insertions use
/// eps = spec.regulator; L and a come from the solution's parameters.
FiniteResult finite_correlator(const CorrelatorSpec& spec, const BogoliubovSolution& sol,
                               const SumPolicy& policy = {});

/// finite_correlator with each field multiplied by Z_{a,eps}^{-1} (2 pi ell / L)^{sigma_F^2 + sigma_P^2}.
FiniteResult renormalized_correlator(const CorrelatorSpec& spec, const BogoliubovSolution& sol,
                                     const SumPolicy& policy = {});

}  // namespace fph
