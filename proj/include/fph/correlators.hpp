#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "fph/bogoliubov.hpp"
#include "fph/insertions.hpp"

namespace fph {

using Complex = std::complex<double>;

/// (chirality, q) pairs of a correlation function, leftmost first.
using KleinWord = std::vector<std::pair<int, int>>;

KleinWord klein_word(const CorrelatorSpec& spec);

/// Vacuum expectation of the Klein factors of a word: 0 unless the charges
/// of both chiralities cancel, otherwise (-1)^{#(i<j : r_i = -, r_j = +)}.
int klein_sign(const KleinWord& word);

struct SumRules {
  int same = 0;
  int cross = 0;
};

/// Pair sums of q_n q_m over equal and opposite chiralities; throws
/// SelectionViolated for words whose Klein expectation vanishes.
SumRules sum_rules(const KleinWord& word);

/// exp(exponent * Log(i ell / (r x - v t + i regulator))) with the principal
/// logarithm.
Complex regulated_power(double ell, int r, double x, double t, double v, double exponent, double regulator);

/// Free equal-time correlator in a box of length L; spec.regulator plays the
/// role of i0+.
Complex free_finite_L(const CorrelatorSpec& spec, double L);

/// <psi_r(x, t) psi_r^dagger(0, 0)> of the continuum theory.
Complex two_point(int r, double x, double t, const BogoliubovSolution& sol, double ell, double regulator);

Complex npoint_continuum(const CorrelatorSpec& spec, const BogoliubovSolution& sol);

enum class OrderKind { CDW, SC };

Complex order_correlator(OrderKind kind, double x, double t, const BogoliubovSolution& sol, double ell,
                         double regulator);

struct ExponentTable {
  double rho[2] = {0, 0};
  double sigma[2] = {0, 0};
  double delta_cdw = 0;
  double delta_sc = 0;
  double fermion_dimension = 0;

  /// c_{r,X; r_n, r_m}: the exponent weight of channel (r, X) for a pair of
  /// insertions with chiralities r_n and r_m.
  double c(int r, Flavor X, int r_n, int r_m) const;
};

ExponentTable exponents(const BogoliubovSolution& sol);

/// |prod_{n<m} sin(U_n - U_m) sin(V_m - V_n) / prod_{n,m} sin(U_n - V_m)
///  - det[1 / sin(U_n - V_m)]| for M <= 8.
double cauchy_residual(const std::vector<double>& U, const std::vector<double>& V);

}  // namespace fph
