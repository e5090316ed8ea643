#pragma once
// Exact Fock-space laboratory for the two-chirality free fermion.
//
// All amplitudes are rationals. Momenta are measured in units of the mode
// spacing u = 2*pi/L: fermion momenta are odd integers k2 with k = u*k2/2,
// boson momenta are integers m with p = u*m. An operator records the power of
// u it carries (`unit_power2`, in half-integer steps), so that for instance
// psi_hat = sqrt(L/2pi) * c is stored as the matrix of c with unit_power2 = -1.
// Every identity checked here is homogeneous in u, which is what makes exact
// arithmetic possible at any L.
//
// States live in an ambient space of 64 modes per chirality; operator actions
// on state vectors are exact there. A FockSpace selects the 2^(4K) states
// supported on the |k| <= K - 1/2 window and turns actions into truncated
// matrices whose rows and columns carry completeness flags.

#include <boost/rational.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fph/model.hpp"

namespace fph {

using Rational = boost::rational<long long>;

Rational abs(const Rational& x);
std::string to_string(const Rational& x);

/// Occupation pattern; occ[0] holds chirality +, occ[1] chirality -. Bit b
/// stands for k2 = 2*(b - 32) + 1.
struct FockState {
  std::uint64_t occ[2] = {0, 0};

  bool occupied(int r, int k2) const;
  int charge(int r) const;
  /// Energy sum |k| n(k) in units of 2*pi/L.
  Rational energy() const;
  std::string describe() const;

  friend bool operator<(const FockState& x, const FockState& y) {
    return x.occ[0] != y.occ[0] ? x.occ[0] < y.occ[0] : x.occ[1] < y.occ[1];
  }
  friend bool operator==(const FockState& x, const FockState& y) {
    return x.occ[0] == y.occ[0] && x.occ[1] == y.occ[1];
  }
};

/// Sparse vector over occupation states; zero coefficients are never stored.
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(const FockState& s, Rational c = 1);

  void add(const FockState& s, const Rational& c);
  StateVector& operator+=(const StateVector& other);
  StateVector& operator-=(const StateVector& other);
  StateVector& operator*=(const Rational& c);
  friend StateVector operator+(StateVector x, const StateVector& y) { return x += y; }
  friend StateVector operator-(StateVector x, const StateVector& y) { return x -= y; }
  friend StateVector operator*(const Rational& c, StateVector x) { return x *= c; }
  friend bool operator==(const StateVector& x, const StateVector& y) { return x.terms_ == y.terms_; }

  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  Rational coefficient(const FockState& s) const;
  Rational dot(const StateVector& other) const;
  /// Largest |coefficient| together with the state where it occurs.
  std::pair<Rational, FockState> max_abs() const;

  auto begin() const { return terms_.begin(); }
  auto end() const { return terms_.end(); }

 private:
  std::map<FockState, Rational> terms_;
};

/// Sign bookkeeping used when creation and annihilation operators act. The
/// `Ignored` variant exists only as a negative control for the test suite.
enum class SignConvention { Ordered, Ignored };

/// Linear map on state vectors with exact action.
using Action = std::function<StateVector(const StateVector&)>;

class FockSpace {
 public:
  FockSpace(MomentumGrid grid, SignConvention signs);

  const MomentumGrid& grid() const { return grid_; }
  int K() const { return grid_.K; }
  SignConvention signs() const { return signs_; }
  std::size_t dimension() const { return basis_.size(); }
  const FockState& state(std::size_t index) const { return basis_[index]; }
  const Rational& energy(std::size_t index) const { return energies_[index]; }
  bool contains(const FockState& s) const;
  std::size_t index_of(const FockState& s) const;
  /// Default interior window (K - 1) in units of 2*pi/L.
  Rational interior_window() const { return Rational(grid_.K - 1); }
  std::vector<std::size_t> states_up_to(const Rational& energy) const;

 private:
  MomentumGrid grid_;
  SignConvention signs_;
  std::vector<FockState> basis_;
  std::vector<Rational> energies_;
  std::uint64_t window_mask_ = 0;
};

FockSpace build_space(const MomentumGrid& grid, SignConvention signs = SignConvention::Ordered);

// ---------------------------------------------------------------------------
// Exact actions on the ambient space.

StateVector apply_ladder(const FockSpace& space, int r, int k2, bool dagger, const StateVector& v);
/// psi_hat_r(k) in units of sqrt(L/2pi).
StateVector apply_field(const FockSpace& space, int r, int k2, bool dagger, const StateVector& v);
/// Normal-ordered density J_r(p) with optional cutoff |k + p/2| <= cutoff (units of 2*pi/L).
StateVector apply_density(const FockSpace& space, int r, int m, const StateVector& v,
                          std::optional<Rational> cutoff = std::nullopt);
/// Free Hamiltonian sum |k| c^dag c over |k| <= cutoff, in units of 2*pi/L.
StateVector apply_free_hamiltonian(const StateVector& v, std::optional<Rational> cutoff = std::nullopt);
/// Klein factor R_r raised to an integer power (negative powers use R_r^{-1}).
StateVector apply_klein(const FockSpace& space, int r, int power, const StateVector& v);

// ---------------------------------------------------------------------------
// Truncated matrices.

struct SparseOperator {
  const FockSpace* space = nullptr;
  std::map<std::pair<std::size_t, std::size_t>, Rational> entries;  // (row, col)
  std::vector<bool> complete_column;
  std::vector<bool> complete_row;
  int unit_power2 = 0;

  Rational entry(std::size_t row, std::size_t col) const;
  /// Largest energy E such that every row and column with energy <= E is
  /// complete; -1 when even the vacuum is affected by the truncation.
  Rational validity_window() const;
  SparseOperator adjoint() const;
  /// Entries restricted to rows and columns with energy <= window.
  std::map<std::pair<std::size_t, std::size_t>, Rational> restricted(const Rational& window) const;
};

SparseOperator operator*(const SparseOperator& A, const SparseOperator& B);
SparseOperator operator+(const SparseOperator& A, const SparseOperator& B);
SparseOperator operator-(const SparseOperator& A, const SparseOperator& B);
SparseOperator operator*(const Rational& c, const SparseOperator& A);
SparseOperator commutator(const SparseOperator& A, const SparseOperator& B);
SparseOperator anticommutator(const SparseOperator& A, const SparseOperator& B);
SparseOperator identity_operator(const FockSpace& space, int unit_power2 = 0);

/// Builds the truncated matrix of an exact action; `adjoint_action` decides
/// which rows are complete.
SparseOperator matrix_of(const FockSpace& space, const Action& action, const Action& adjoint_action,
                         int unit_power2);

SparseOperator ladder_op(const FockSpace& space, int r, int k2);
SparseOperator field_op(const FockSpace& space, int r, int k2);
SparseOperator density_op(const FockSpace& space, int r, int m, std::optional<Rational> cutoff = std::nullopt);
SparseOperator free_hamiltonian(const FockSpace& space, std::optional<Rational> cutoff = std::nullopt);
SparseOperator klein_factor(const FockSpace& space, int r);
SparseOperator klein_factor_inverse(const FockSpace& space, int r);

/// b(p) = phase * i * sqrt(norm_squared) * J_{sign p}(p) with phase = -1 for
/// p > 0 and +1 for p < 0; the irrational square root stays symbolic.
struct BosonLadder {
  int m = 0;
  int phase = 0;
  Rational norm_squared;
  SparseOperator density;
};

BosonLadder boson_ladder(const FockSpace& space, int m);
/// Max |[b(m1), b(m2)^dag] - delta| over interior states, exact.
Rational boson_commutator_residual(const FockSpace& space, int m1, int m2, const Rational& window);

// ---------------------------------------------------------------------------
// Identity suite.

enum class Identity { CAR, SCHWINGER, J_PSI, H0_J, J_R, H0_R, RR_ANTI, KRONIG };

const std::vector<Identity>& all_identities();
std::string to_string(Identity id);
Identity parse_identity(const std::string& name);

struct IdentityReport {
  Identity identity = Identity::CAR;
  Rational residual;
  Rational window;
  std::size_t states_checked = 0;
  std::size_t instances = 0;
  /// Set when the residual is nonzero: the instance, the input basis state and
  /// the output state where the largest deviation occurs.
  std::optional<std::string> offender;
  bool pass() const { return residual == Rational(0); }
};

IdentityReport identity_residual(const FockSpace& space, Identity id,
                                 std::optional<Rational> cutoff = std::nullopt,
                                 std::optional<Rational> window = std::nullopt);

// ---------------------------------------------------------------------------
// Boson-fermion correspondence.

/// Energy (units 2*pi/L) -> (number of fermion states, number of boson labels).
std::map<Rational, std::pair<long long, long long>> degeneracy_counts(const FockSpace& space,
                                                                      const Rational& e_max);

/// Unnormalized boson state prod_p J(-p)^{n(p)} R_+^{q+} R_-^{-q-} Omega and the
/// rational factor whose square root normalizes it (the phases of b^dag have
/// modulus one and are dropped).
struct BosonState {
  StateVector vector;
  Rational norm_factor_squared;
};

BosonState boson_state(const FockSpace& space, int q_plus, int q_minus, const std::map<int, int>& occupations);

/// V_hat_r(k) applied to a basis state through the restricted sums over boson
/// occupation vectors, in units of sqrt(L/2pi).
StateVector reconstructed_field(const FockSpace& space, int r, int k2, std::size_t basis_index);

struct JacobiReport {
  double lhs = 0;
  double rhs = 0;
  double residual = 0;
  double tail_bound = 0;
  bool pass() const { return residual <= tail_bound + 1e-12; }
};

/// Compares (prod_{n<=order}(1+z^{2n-1}))^2 with
/// (sum_{|q|<=order} z^{q^2}) * prod_{n<=order}(1-z^{2n})^{-1}.
JacobiReport jacobi_check(double z, int order);

}  // namespace fph
