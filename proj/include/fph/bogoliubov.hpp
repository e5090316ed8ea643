#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "fph/errors.hpp"
#include "fph/model.hpp"

namespace fph {

/// True when |p| lies inside the interaction range, boundary included.
bool within_cutoff(double p, double a);

template <typename Scalar>
struct BlockMatrices {
  using Matrix = Eigen::Matrix<Scalar, 2, 2>;
  Scalar p = 0;
  Matrix A;
  Matrix B;
  Matrix C;
};

/// Kinetic and potential blocks of the quadratic boson Hamiltonian at one
/// momentum; rows and columns are ordered (F, P).
template <typename Scalar = double>
BlockMatrices<Scalar> block_matrices(const ModelParams& params, Scalar p) {
  using std::sqrt;
  if (p == Scalar(0)) throw Error(ErrorKind::ZeroMode, "block matrices need p != 0");
  const DerivedCouplings d = derived_couplings(params);
  const bool on = within_cutoff(static_cast<double>(p), params.a);
  const Scalar g1 = on ? Scalar(d.gamma1) : Scalar(0);
  const Scalar g2 = on ? Scalar(d.gamma2) : Scalar(0);
  const Scalar vF = params.vF;
  const Scalar vP = params.vP;

  BlockMatrices<Scalar> out;
  out.p = p;
  out.A << Scalar(1) - g1, Scalar(0), Scalar(0), Scalar(1);
  out.B << vF * vF * (Scalar(1) + g1), vF * vP * g2, vF * vP * g2, vP * vP;
  out.B *= p * p;
  const Eigen::DiagonalMatrix<Scalar, 2> root(sqrt(out.A(0, 0)), Scalar(1));
  out.C = root * out.B * root;
  return out;
}

template <typename Scalar>
struct NumericDiagonalization {
  using Matrix = Eigen::Matrix<Scalar, 2, 2>;
  Scalar omega_F = 0;
  Scalar omega_P = 0;
  Matrix U;
  Matrix M_Pi;
  Matrix M_Phi;
  Matrix curlyC;
  Matrix curlyS;
};

/// Eigen-decomposition of C(p). Columns of U are ordered (F, P) with
/// omega_F >= omega_P and oriented so that their phonon entry is
/// non-negative (their fermion entry when the phonon entry vanishes).
template <typename Scalar = double>
NumericDiagonalization<Scalar> diagonalize_numeric(const ModelParams& params, Scalar p) {
  using std::abs;
  using std::sqrt;
  using Matrix = Eigen::Matrix<Scalar, 2, 2>;
  const BlockMatrices<Scalar> blocks = block_matrices<Scalar>(params, p);
  if (within_cutoff(static_cast<double>(p), params.a) &&
      derived_couplings(params).W < 1e-8 * params.vF * params.vF) {
    throw Error(ErrorKind::DegenerateBranches, "W below 1e-8 v_f^2: the two branches cannot be told apart");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(blocks.C);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::DegenerateBranches, "eigen-solver failed");

  NumericDiagonalization<Scalar> out;
  // Eigen sorts eigenvalues ascending; the F branch is the larger one.
  out.U.col(0) = solver.eigenvectors().col(1);
  out.U.col(1) = solver.eigenvectors().col(0);
  for (int c = 0; c < 2; ++c) {
    const Scalar pivot = out.U(1, c) != Scalar(0) ? out.U(1, c) : out.U(0, c);
    if (pivot < Scalar(0)) out.U.col(c) *= Scalar(-1);
  }
  out.omega_F = sqrt(solver.eigenvalues()(1));
  out.omega_P = sqrt(solver.eigenvalues()(0));

  const Eigen::DiagonalMatrix<Scalar, 2> root(sqrt(blocks.A(0, 0)), Scalar(1));
  const Eigen::DiagonalMatrix<Scalar, 2> inv_root(Scalar(1) / sqrt(blocks.A(0, 0)), Scalar(1));
  out.M_Phi = root * out.U;
  out.M_Pi = inv_root * out.U;

  const Scalar v[2] = {Scalar(params.vF), Scalar(params.vP)};
  const Scalar vt[2] = {out.omega_F / abs(p), out.omega_P / abs(p)};
  for (int X = 0; X < 2; ++X) {
    for (int Y = 0; Y < 2; ++Y) {
      const Scalar phi = sqrt(v[X] / vt[Y]) * out.M_Phi(X, Y);
      const Scalar pi_part = sqrt(vt[Y] / v[X]) * out.M_Pi(X, Y);
      out.curlyC(X, Y) = (phi + pi_part) / Scalar(2);
      out.curlyS(X, Y) = (phi - pi_part) / Scalar(2);
    }
  }
  return out;
}

struct BogoliubovSolution {
  ModelParams params;
  DerivedCouplings couplings;
  double vtilde_F = 0;
  double vtilde_P = 0;
  double rho_F = 0;
  double rho_P = 0;
  double sigma_F = 0;
  double sigma_P = 0;
  double E0 = 0;

  double vtilde(Flavor X) const { return X == Flavor::F ? vtilde_F : vtilde_P; }
  double rho(Flavor X) const { return X == Flavor::F ? rho_F : rho_P; }
  double sigma(Flavor X) const { return X == Flavor::F ? sigma_F : sigma_P; }
  double bare_velocity(Flavor X) const { return X == Flavor::F ? params.vF : params.vP; }
  /// Mode-dependent values: outside the interaction range the fermion channel
  /// is unmixed and the velocities are the bare ones.
  double rho_at(Flavor X, double p) const;
  double sigma_at(Flavor X, double p) const;
  double vtilde_at(Flavor X, double p) const;
};

BogoliubovSolution solve_closed_form(const ModelParams& params);

/// Exact finite sum of the zero-point shifts over 0 < |p| <= pi/a.
double ground_state_energy(const ModelParams& params, const BogoliubovSolution& solution);

struct SpectrumEntry {
  int q_plus = 0;
  int q_minus = 0;
  int phonon_zero_mode = 0;
  /// (flavor, m) -> occupation for boson momentum p = 2*pi*m/L, m != 0.
  std::map<std::pair<Flavor, int>, int> occupations;
  double energy = 0;
  /// Number of entries sharing this energy (relative tolerance 1e-12).
  int degeneracy = 1;
};

/// All label tuples with energy - E0 <= e_max, ascending in energy and then
/// in labels.
std::vector<SpectrumEntry> spectrum(const ModelParams& params, const BogoliubovSolution& solution, double e_max,
                                    const MomentumGrid& grid);

}  // namespace fph
