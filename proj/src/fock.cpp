#include "fph/fock.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "fph/errors.hpp"

namespace fph {

namespace {

constexpr int kAmbientOffset = 32;
constexpr std::size_t kMaxDimension = std::size_t{1} << 24;

int chirality_slot(int r) { return r > 0 ? 0 : 1; }

void check_chirality(int r) {
  if (r != 1 && r != -1) throw Error(ErrorKind::BadArgument, "chirality must be +1 or -1");
}

// Ambient bit of an odd k2, or -1 when outside the 64 ambient modes.
int ambient_bit(int k2) {
  const int j = (k2 - 1) / 2;  // exact for odd k2
  const int b = j + kAmbientOffset;
  return (b >= 0 && b < 64) ? b : -1;
}

int sign_of(int x) { return (x > 0) - (x < 0); }

struct Applied {
  FockState state;
  int sign = 0;  // 0 means the operator annihilated the state
};

Applied apply_one(SignConvention signs, int r, int k2, bool dagger, const FockState& s) {
  const int slot = chirality_slot(r);
  const int b = ambient_bit(k2);
  if (b < 0) {
    if (!dagger) return {};  // modes outside the ambient range are never occupied
    throw Error(ErrorKind::ModeOutOfWindow, "mode k2=" + std::to_string(k2) + " leaves the ambient range");
  }
  const bool occ = (s.occ[slot] >> b) & 1u;
  if (occ == dagger) return {};
  int passed = std::popcount(b == 63 ? std::uint64_t{0} : s.occ[slot] >> (b + 1));
  if (slot == 1) passed += std::popcount(s.occ[0]);
  Applied out;
  out.state = s;
  out.state.occ[slot] ^= (std::uint64_t{1} << b);
  out.sign = (signs == SignConvention::Ignored || passed % 2 == 0) ? 1 : -1;
  return out;
}

// Operator string applied right to left: ops[0] acts last.
struct LadderOp {
  int r;
  int k2;
  bool dagger;
};

Applied apply_string(SignConvention signs, const std::vector<LadderOp>& ops, const FockState& s) {
  Applied cur{s, 1};
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
    Applied next = apply_one(signs, it->r, it->k2, it->dagger, cur.state);
    if (next.sign == 0) return {};
    cur.state = next.state;
    cur.sign *= next.sign;
  }
  return cur;
}

template <class F>
StateVector map_states(const StateVector& v, F&& per_state) {
  StateVector out;
  for (const auto& [s, c] : v) per_state(s, c, out);
  return out;
}

// Occupied modes of a state in the ordering of the ordered product: chirality
// + first, momenta descending.
std::vector<std::pair<int, int>> ordered_modes(const FockState& s) {
  std::vector<std::pair<int, int>> modes;
  for (int slot = 0; slot < 2; ++slot) {
    for (int b = 63; b >= 0; --b) {
      if ((s.occ[slot] >> b) & 1u) modes.emplace_back(slot == 0 ? 1 : -1, 2 * (b - kAmbientOffset) + 1);
    }
  }
  return modes;
}

std::string k2_string(int k2) { return std::to_string(k2) + "/2"; }

}  // namespace

Rational abs(const Rational& x) { return x < Rational(0) ? -x : x; }

std::string to_string(const Rational& x) {
  if (x.denominator() == 1) return std::to_string(x.numerator());
  return std::to_string(x.numerator()) + "/" + std::to_string(x.denominator());
}

// ---------------------------------------------------------------------------

bool FockState::occupied(int r, int k2) const {
  const int b = ambient_bit(k2);
  return b >= 0 && ((occ[chirality_slot(r)] >> b) & 1u);
}

int FockState::charge(int r) const {
  int q = 0;
  const std::uint64_t bits = occ[chirality_slot(r)];
  for (int b = 0; b < 64; ++b) {
    if ((bits >> b) & 1u) q += sign_of(r * (2 * (b - kAmbientOffset) + 1));
  }
  return q;
}

Rational FockState::energy() const {
  long long twice = 0;
  for (int slot = 0; slot < 2; ++slot) {
    for (int b = 0; b < 64; ++b) {
      if ((occ[slot] >> b) & 1u) twice += std::abs(2 * (b - kAmbientOffset) + 1);
    }
  }
  return Rational(twice, 2);
}

std::string FockState::describe() const {
  std::ostringstream os;
  for (int slot = 0; slot < 2; ++slot) {
    os << (slot == 0 ? "+[" : " -[");
    bool first = true;
    for (int b = 63; b >= 0; --b) {
      if ((occ[slot] >> b) & 1u) {
        os << (first ? "" : ",") << k2_string(2 * (b - kAmbientOffset) + 1);
        first = false;
      }
    }
    os << "]";
  }
  return os.str();
}

// ---------------------------------------------------------------------------

StateVector::StateVector(const FockState& s, Rational c) { add(s, c); }

void StateVector::add(const FockState& s, const Rational& c) {
  if (c == Rational(0)) return;
  auto [it, inserted] = terms_.emplace(s, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Rational(0)) terms_.erase(it);
  }
}

StateVector& StateVector::operator+=(const StateVector& other) {
  for (const auto& [s, c] : other.terms_) add(s, c);
  return *this;
}

StateVector& StateVector::operator-=(const StateVector& other) {
  for (const auto& [s, c] : other.terms_) add(s, -c);
  return *this;
}

StateVector& StateVector::operator*=(const Rational& c) {
  if (c == Rational(0)) {
    terms_.clear();
    return *this;
  }
  for (auto& [s, v] : terms_) v *= c;
  return *this;
}

Rational StateVector::coefficient(const FockState& s) const {
  auto it = terms_.find(s);
  return it == terms_.end() ? Rational(0) : it->second;
}

Rational StateVector::dot(const StateVector& other) const {
  Rational acc = 0;
  for (const auto& [s, c] : terms_) acc += c * other.coefficient(s);
  return acc;
}

std::pair<Rational, FockState> StateVector::max_abs() const {
  std::pair<Rational, FockState> best{Rational(0), FockState{}};
  for (const auto& [s, c] : terms_) {
    if (abs(c) > best.first) best = {abs(c), s};
  }
  return best;
}

// ---------------------------------------------------------------------------

FockSpace::FockSpace(MomentumGrid grid, SignConvention signs) : grid_(grid), signs_(signs) {
  const int K = grid_.K;
  if (K < 1 || K > 6) {
    throw Error(ErrorKind::TruncationTooLarge, "K must lie in [1, 6] (dimension 2^(4K) <= 2^24)");
  }
  const std::size_t dim = std::size_t{1} << (4 * K);
  if (dim > kMaxDimension) throw Error(ErrorKind::TruncationTooLarge, "dimension exceeds 2^24");
  const int lo = kAmbientOffset - K;  // ambient bit of k2 = -(2K - 1)
  window_mask_ = ((std::uint64_t{1} << (2 * K)) - 1) << lo;
  basis_.reserve(dim);
  energies_.reserve(dim);
  for (std::size_t index = 0; index < dim; ++index) {
    FockState s;
    s.occ[0] = (static_cast<std::uint64_t>(index) & ((std::uint64_t{1} << (2 * K)) - 1)) << lo;
    s.occ[1] = ((static_cast<std::uint64_t>(index) >> (2 * K)) & ((std::uint64_t{1} << (2 * K)) - 1)) << lo;
    basis_.push_back(s);
    energies_.push_back(s.energy());
  }
}

bool FockSpace::contains(const FockState& s) const {
  return (s.occ[0] & ~window_mask_) == 0 && (s.occ[1] & ~window_mask_) == 0;
}

std::size_t FockSpace::index_of(const FockState& s) const {
  if (!contains(s)) throw Error(ErrorKind::ModeOutOfWindow, "state " + s.describe() + " is outside the window");
  const int K = grid_.K;
  const int lo = kAmbientOffset - K;
  return static_cast<std::size_t>((s.occ[0] >> lo) | ((s.occ[1] >> lo) << (2 * K)));
}

std::vector<std::size_t> FockSpace::states_up_to(const Rational& energy) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    if (energies_[i] <= energy) out.push_back(i);
  }
  return out;
}

FockSpace build_space(const MomentumGrid& grid, SignConvention signs) { return FockSpace(grid, signs); }

// ---------------------------------------------------------------------------

StateVector apply_ladder(const FockSpace& space, int r, int k2, bool dagger, const StateVector& v) {
  check_chirality(r);
  return map_states(v, [&](const FockState& s, const Rational& c, StateVector& out) {
    Applied a = apply_one(space.signs(), r, k2, dagger, s);
    if (a.sign != 0) out.add(a.state, c * a.sign);
  });
}

StateVector apply_field(const FockSpace& space, int r, int k2, bool dagger, const StateVector& v) {
  // psi_hat_r(k) is c_r(k) for rk > 0 and c_r(k)^dag for rk < 0.
  const bool creates = (r * k2 > 0) ? dagger : !dagger;
  return apply_ladder(space, r, k2, creates, v);
}

StateVector apply_density(const FockSpace& space, int r, int m, const StateVector& v,
                          std::optional<Rational> cutoff) {
  check_chirality(r);
  const int shift = 2 * m;  // k2 offset of k + p
  return map_states(v, [&](const FockState& s, const Rational& c, StateVector& out) {
    std::set<int> candidates;
    const std::uint64_t bits = s.occ[chirality_slot(r)];
    for (int b = 0; b < 64; ++b) {
      if ((bits >> b) & 1u) {
        const int o2 = 2 * (b - kAmbientOffset) + 1;
        candidates.insert(o2);
        candidates.insert(o2 - shift);
      }
    }
    for (int k2 = -2 * std::abs(m) + 1; k2 < 2 * std::abs(m); k2 += 2) candidates.insert(k2);
    for (int k2 : candidates) {
      const int q2 = k2 + shift;
      if (cutoff && Rational(std::abs(k2 + m), 2) > *cutoff) continue;
      const bool first_positive = r * k2 > 0;
      const bool second_positive = r * q2 > 0;
      std::vector<LadderOp> ops;
      int sign = 1;
      if (first_positive && second_positive) {
        ops = {{r, k2, true}, {r, q2, false}};
      } else if (first_positive) {
        ops = {{r, k2, true}, {r, q2, true}};
      } else if (second_positive) {
        ops = {{r, k2, false}, {r, q2, false}};
      } else {
        ops = {{r, q2, true}, {r, k2, false}};
        sign = -1;
      }
      Applied a = apply_string(space.signs(), ops, s);
      if (a.sign != 0) out.add(a.state, c * (a.sign * sign));
    }
  });
}

StateVector apply_free_hamiltonian(const StateVector& v, std::optional<Rational> cutoff) {
  return map_states(v, [&](const FockState& s, const Rational& c, StateVector& out) {
    Rational e = 0;
    for (int slot = 0; slot < 2; ++slot) {
      for (int b = 0; b < 64; ++b) {
        if (!((s.occ[slot] >> b) & 1u)) continue;
        const Rational k = Rational(std::abs(2 * (b - kAmbientOffset) + 1), 2);
        if (!cutoff || k <= *cutoff) e += k;
      }
    }
    out.add(s, c * e);
  });
}

namespace {

// One application of R_r (forward) or R_r^{-1}: conjugate each creation
// operator of the ordered product and act on R_r^{+-1} Omega.
StateVector apply_klein_once(const FockSpace& space, int r, bool forward, const StateVector& v) {
  const int edge = forward ? -1 : 1;  // k2 of the mode that turns into an annihilator
  const int step = forward ? 2 : -2;
  return map_states(v, [&](const FockState& s, const Rational& c, StateVector& out) {
    std::vector<LadderOp> ops;
    int sign = 1;
    for (const auto& [rr, k2] : ordered_modes(s)) {
      if (rr != r) {
        ops.push_back({rr, k2, true});
        sign = -sign;
      } else if (k2 == edge) {
        ops.push_back({r, -edge, false});
      } else {
        ops.push_back({r, k2 + step, true});
      }
    }
    ops.push_back({r, forward ? 1 : -1, true});  // R_r Omega = c_r(pi/L)^dag Omega
    Applied a = apply_string(space.signs(), ops, FockState{});
    if (a.sign != 0) out.add(a.state, c * (a.sign * sign));
  });
}

}  // namespace

StateVector apply_klein(const FockSpace& space, int r, int power, const StateVector& v) {
  check_chirality(r);
  StateVector cur = v;
  for (int i = 0; i < std::abs(power); ++i) cur = apply_klein_once(space, r, power > 0, cur);
  return cur;
}

// ---------------------------------------------------------------------------

Rational SparseOperator::entry(std::size_t row, std::size_t col) const {
  auto it = entries.find({row, col});
  return it == entries.end() ? Rational(0) : it->second;
}

Rational SparseOperator::validity_window() const {
  // Find the lowest energy carrying an incomplete row or column.
  std::optional<Rational> lowest_bad;
  for (std::size_t i = 0; i < space->dimension(); ++i) {
    if (!complete_column[i] || !complete_row[i]) {
      if (!lowest_bad || space->energy(i) < *lowest_bad) lowest_bad = space->energy(i);
    }
  }
  Rational best = -1;
  for (std::size_t i = 0; i < space->dimension(); ++i) {
    const Rational& e = space->energy(i);
    if ((!lowest_bad || e < *lowest_bad) && e > best) best = e;
  }
  return best;
}

SparseOperator SparseOperator::adjoint() const {
  SparseOperator out;
  out.space = space;
  out.unit_power2 = unit_power2;
  out.complete_column = complete_row;
  out.complete_row = complete_column;
  for (const auto& [rc, v] : entries) out.entries.emplace(std::make_pair(rc.second, rc.first), v);
  return out;
}

std::map<std::pair<std::size_t, std::size_t>, Rational> SparseOperator::restricted(const Rational& window) const {
  std::map<std::pair<std::size_t, std::size_t>, Rational> out;
  for (const auto& [rc, v] : entries) {
    if (space->energy(rc.first) <= window && space->energy(rc.second) <= window) out.emplace(rc, v);
  }
  return out;
}

namespace {

void require_same_space(const SparseOperator& A, const SparseOperator& B) {
  if (A.space != B.space) throw Error(ErrorKind::BadArgument, "operators act on different spaces");
}

SparseOperator combine(const SparseOperator& A, const SparseOperator& B, int sign) {
  require_same_space(A, B);
  if (A.unit_power2 != B.unit_power2) throw Error(ErrorKind::BadArgument, "adding operators with different units");
  SparseOperator out = A;
  for (const auto& [rc, v] : B.entries) {
    Rational& slot = out.entries[rc];
    slot += sign * v;
    if (slot == Rational(0)) out.entries.erase(rc);
  }
  for (std::size_t i = 0; i < out.complete_column.size(); ++i) {
    out.complete_column[i] = A.complete_column[i] && B.complete_column[i];
    out.complete_row[i] = A.complete_row[i] && B.complete_row[i];
  }
  return out;
}

}  // namespace

SparseOperator operator*(const SparseOperator& A, const SparseOperator& B) {
  require_same_space(A, B);
  const std::size_t dim = A.space->dimension();
  std::vector<std::vector<std::pair<std::size_t, Rational>>> a_cols(dim), b_cols(dim), a_rows(dim);
  for (const auto& [rc, v] : A.entries) {
    a_cols[rc.second].emplace_back(rc.first, v);
    a_rows[rc.first].emplace_back(rc.second, v);
  }
  std::vector<std::vector<std::size_t>> b_rows(dim);
  for (const auto& [rc, v] : B.entries) {
    b_cols[rc.second].emplace_back(rc.first, v);
    b_rows[rc.first].push_back(rc.second);
  }
  SparseOperator out;
  out.space = A.space;
  out.unit_power2 = A.unit_power2 + B.unit_power2;
  out.complete_column.assign(dim, false);
  out.complete_row.assign(dim, false);
  for (std::size_t j = 0; j < dim; ++j) {
    bool complete = B.complete_column[j];
    for (const auto& [mid, bv] : b_cols[j]) {
      complete = complete && A.complete_column[mid];
      for (const auto& [row, av] : a_cols[mid]) {
        Rational& slot = out.entries[{row, j}];
        slot += av * bv;
      }
    }
    out.complete_column[j] = complete;
  }
  for (std::size_t i = 0; i < dim; ++i) {
    bool complete = A.complete_row[i];
    for (const auto& [mid, av] : a_rows[i]) complete = complete && B.complete_row[mid];
    out.complete_row[i] = complete;
  }
  std::erase_if(out.entries, [](const auto& kv) { return kv.second == Rational(0); });
  return out;
}

SparseOperator operator+(const SparseOperator& A, const SparseOperator& B) { return combine(A, B, 1); }
SparseOperator operator-(const SparseOperator& A, const SparseOperator& B) { return combine(A, B, -1); }

SparseOperator operator*(const Rational& c, const SparseOperator& A) {
  SparseOperator out = A;
  if (c == Rational(0)) {
    out.entries.clear();
    return out;
  }
  for (auto& [rc, v] : out.entries) v *= c;
  return out;
}

SparseOperator commutator(const SparseOperator& A, const SparseOperator& B) { return A * B - B * A; }
SparseOperator anticommutator(const SparseOperator& A, const SparseOperator& B) { return A * B + B * A; }

SparseOperator identity_operator(const FockSpace& space, int unit_power2) {
  SparseOperator out;
  out.space = &space;
  out.unit_power2 = unit_power2;
  out.complete_column.assign(space.dimension(), true);
  out.complete_row.assign(space.dimension(), true);
  for (std::size_t i = 0; i < space.dimension(); ++i) out.entries.emplace(std::make_pair(i, i), Rational(1));
  return out;
}

SparseOperator matrix_of(const FockSpace& space, const Action& action, const Action& adjoint_action,
                         int unit_power2) {
  SparseOperator out;
  out.space = &space;
  out.unit_power2 = unit_power2;
  const std::size_t dim = space.dimension();
  out.complete_column.assign(dim, true);
  out.complete_row.assign(dim, true);
  for (std::size_t j = 0; j < dim; ++j) {
    const StateVector image = action(StateVector(space.state(j)));
    for (const auto& [s, c] : image) {
      if (space.contains(s)) {
        out.entries.emplace(std::make_pair(space.index_of(s), j), c);
      } else {
        out.complete_column[j] = false;
      }
    }
    for (const auto& [s, c] : adjoint_action(StateVector(space.state(j)))) {
      if (!space.contains(s)) out.complete_row[j] = false;
    }
  }
  return out;
}

namespace {

void require_fermion_mode(const FockSpace& space, int k2) {
  if (!space.grid().has_fermion_mode(k2)) {
    throw Error(ErrorKind::ModeOutOfWindow, "fermion mode k2=" + std::to_string(k2) + " is not in the grid");
  }
}

void require_boson_mode(const FockSpace& space, int m) {
  if (!space.grid().has_boson_mode(m)) {
    throw Error(ErrorKind::ModeOutOfWindow, "boson mode m=" + std::to_string(m) + " is not in the grid");
  }
}

}  // namespace

SparseOperator ladder_op(const FockSpace& space, int r, int k2) {
  require_fermion_mode(space, k2);
  return matrix_of(
      space, [&](const StateVector& v) { return apply_ladder(space, r, k2, false, v); },
      [&](const StateVector& v) { return apply_ladder(space, r, k2, true, v); }, 0);
}

SparseOperator field_op(const FockSpace& space, int r, int k2) {
  require_fermion_mode(space, k2);
  return matrix_of(
      space, [&](const StateVector& v) { return apply_field(space, r, k2, false, v); },
      [&](const StateVector& v) { return apply_field(space, r, k2, true, v); }, -1);
}

SparseOperator density_op(const FockSpace& space, int r, int m, std::optional<Rational> cutoff) {
  require_boson_mode(space, m);
  return matrix_of(
      space, [&](const StateVector& v) { return apply_density(space, r, m, v, cutoff); },
      [&](const StateVector& v) { return apply_density(space, r, -m, v, cutoff); }, 0);
}

SparseOperator free_hamiltonian(const FockSpace& space, std::optional<Rational> cutoff) {
  auto h = [&](const StateVector& v) { return apply_free_hamiltonian(v, cutoff); };
  return matrix_of(space, h, h, 2);
}

SparseOperator klein_factor(const FockSpace& space, int r) {
  return matrix_of(
      space, [&](const StateVector& v) { return apply_klein(space, r, 1, v); },
      [&](const StateVector& v) { return apply_klein(space, r, -1, v); }, 0);
}

SparseOperator klein_factor_inverse(const FockSpace& space, int r) { return klein_factor(space, r).adjoint(); }

BosonLadder boson_ladder(const FockSpace& space, int m) {
  if (m == 0) throw Error(ErrorKind::ZeroMode, "boson ladder needs p != 0");
  BosonLadder b;
  b.m = m;
  b.phase = m > 0 ? -1 : 1;
  b.norm_squared = Rational(1, std::abs(m));
  b.density = density_op(space, m > 0 ? 1 : -1, m);
  return b;
}

Rational boson_commutator_residual(const FockSpace& space, int m1, int m2, const Rational& window) {
  if (m1 == 0 || m2 == 0) throw Error(ErrorKind::ZeroMode, "boson ladder needs p != 0");
  const int r1 = m1 > 0 ? 1 : -1;
  const int r2 = m2 > 0 ? 1 : -1;
  // [b1, b2^dag] = phase1 * phase2 * sqrt(n1 n2) * [J_{r1}(m1), J_{r2}(-m2)] since
  // i * conj(i) = 1. The scalar is rational whenever the commutator can be nonzero.
  Rational worst = 0;
  for (std::size_t j : space.states_up_to(window)) {
    const StateVector eta(space.state(j));
    StateVector comm = apply_density(space, r1, m1, apply_density(space, r2, -m2, eta)) -
                       apply_density(space, r2, -m2, apply_density(space, r1, m1, eta));
    if (m1 == m2) {
      comm *= Rational(1, std::abs(m1));
      comm -= eta;
    } else if (!comm.empty()) {
      return Rational(1);  // any nonzero density commutator already violates the relation
    }
    worst = std::max(worst, comm.max_abs().first);
  }
  return worst;
}

// ---------------------------------------------------------------------------

const std::vector<Identity>& all_identities() {
  static const std::vector<Identity> ids = {Identity::CAR, Identity::SCHWINGER, Identity::J_PSI,
                                            Identity::H0_J, Identity::J_R, Identity::H0_R,
                                            Identity::RR_ANTI, Identity::KRONIG};
  return ids;
}

std::string to_string(Identity id) {
  switch (id) {
    case Identity::CAR: return "CAR";
    case Identity::SCHWINGER: return "SCHWINGER";
    case Identity::J_PSI: return "J_PSI";
    case Identity::H0_J: return "H0_J";
    case Identity::J_R: return "J_R";
    case Identity::H0_R: return "H0_R";
    case Identity::RR_ANTI: return "RR_ANTI";
    case Identity::KRONIG: return "KRONIG";
  }
  return "?";
}

Identity parse_identity(const std::string& name) {
  for (Identity id : all_identities()) {
    if (to_string(id) == name) return id;
  }
  throw Error(ErrorKind::UnknownIdentity, "unknown identity '" + name + "'");
}

namespace {

struct Instance {
  std::string label;
  std::function<StateVector(const StateVector&)> residual;  // lhs - rhs applied to a state
};

std::string chir(int r) { return r > 0 ? "+" : "-"; }

std::vector<Instance> instances_for(const FockSpace& space, Identity id, std::optional<Rational> cutoff,
                                    const Rational& window) {
  const auto& grid = space.grid();
  const auto ks = grid.fermion_modes();
  const auto ms = grid.boson_modes();
  const int rs[] = {1, -1};
  auto J = [&space, cutoff](int r, int m) {
    return [&space, cutoff, r, m](const StateVector& v) { return apply_density(space, r, m, v, cutoff); };
  };
  auto H = [cutoff](const StateVector& v) { return apply_free_hamiltonian(v, cutoff); };
  auto R = [&space](int r, int power) {
    return [&space, r, power](const StateVector& v) { return apply_klein(space, r, power, v); };
  };
  auto psi = [&space](int r, int k2, bool dagger) {
    return [&space, r, k2, dagger](const StateVector& v) { return apply_field(space, r, k2, dagger, v); };
  };

  std::vector<Instance> out;
  switch (id) {
    case Identity::CAR:
      for (int r1 : rs)
        for (int k1 : ks)
          for (int r2 : rs)
            for (int k2 : ks) {
              auto a = psi(r1, k1, false);
              auto b = psi(r2, k2, true);
              auto c = psi(r2, k2, false);
              const bool same = (r1 == r2 && k1 == k2);
              out.push_back({"{psi_" + chir(r1) + "(" + k2_string(k1) + "), psi^dag_" + chir(r2) + "(" +
                                 k2_string(k2) + ")}",
                             [=](const StateVector& v) {
                               StateVector res = a(b(v)) + b(a(v));
                               if (same) res -= v;
                               return res;
                             }});
              out.push_back({"{psi_" + chir(r1) + "(" + k2_string(k1) + "), psi_" + chir(r2) + "(" +
                                 k2_string(k2) + ")}",
                             [=](const StateVector& v) { return a(c(v)) + c(a(v)); }});
            }
      break;
    case Identity::SCHWINGER:
      for (int r1 : rs)
        for (int m1 : ms)
          for (int r2 : rs)
            for (int m2 : ms) {
              auto A = J(r1, m1);
              auto B = J(r2, m2);
              const Rational anomaly = (r1 == r2 && m1 == -m2) ? Rational(r1 * m1) : Rational(0);
              out.push_back({"[J_" + chir(r1) + "(" + std::to_string(m1) + "), J_" + chir(r2) + "(" +
                                 std::to_string(m2) + ")]",
                             [=](const StateVector& v) { return A(B(v)) - B(A(v)) - anomaly * v; }});
            }
      break;
    case Identity::J_PSI:
      for (int r1 : rs)
        for (int m : ms)
          for (int r2 : rs)
            for (int k2 : ks) {
              auto A = J(r1, m);
              auto B = psi(r2, k2, true);
              auto shifted = psi(r1, k2 - 2 * m, true);
              const bool same = r1 == r2;
              out.push_back({"[J_" + chir(r1) + "(" + std::to_string(m) + "), psi^dag_" + chir(r2) + "(" +
                                 k2_string(k2) + ")]",
                             [=](const StateVector& v) {
                               StateVector res = A(B(v)) - B(A(v));
                               if (same) res -= shifted(v);
                               return res;
                             }});
            }
      break;
    case Identity::H0_J:
      for (int r : rs)
        for (int m : ms) {
          auto A = J(r, m);
          out.push_back({"[H0, J_" + chir(r) + "(" + std::to_string(m) + ")]", [=](const StateVector& v) {
                           return H(A(v)) - A(H(v)) + Rational(r * m) * A(v);
                         }});
        }
      break;
    case Identity::J_R:
      for (int r1 : rs)
        for (int m : ms)
          for (int r2 : rs)
            for (int power : {1, -1}) {
              auto A = J(r1, m);
              auto B = R(r2, power);
              const Rational rhs = (r1 == r2 && m == 0) ? Rational(r1 * power) : Rational(0);
              out.push_back({"[J_" + chir(r1) + "(" + std::to_string(m) + "), R_" + chir(r2) + "^" +
                                 std::to_string(power) + "]",
                             [=](const StateVector& v) { return A(B(v)) - B(A(v)) - rhs * B(v); }});
            }
      break;
    case Identity::H0_R:
      for (int r : rs) {
        auto B = R(r, 1);
        auto Q = J(r, 0);
        out.push_back({"[H0, R_" + chir(r) + "]", [=](const StateVector& v) {
                         return H(B(v)) - B(H(v)) - Rational(r, 2) * (Q(B(v)) + B(Q(v)));
                       }});
      }
      break;
    case Identity::RR_ANTI:
      for (int p1 : {1, -1})
        for (int p2 : {1, -1}) {
          auto A = R(1, p1);
          auto B = R(-1, p2);
          out.push_back({"{R_+^" + std::to_string(p1) + ", R_-^" + std::to_string(p2) + "}",
                         [=](const StateVector& v) { return A(B(v)) + B(A(v)); }});
        }
      break;
    case Identity::KRONIG: {
      // J_r(rp) lowers the energy by p, so modes beyond the window energy drop out.
      const long long top = std::max<long long>(grid.K, (window.numerator() + window.denominator() - 1) /
                                                            window.denominator() + 1);
      out.push_back({"H0 - boson form", [=, &space](const StateVector& v) {
                       StateVector res = H(v);
                       for (int r : rs) {
                         StateVector q = apply_density(space, r, 0, v, cutoff);
                         res -= Rational(1, 2) * apply_density(space, r, 0, q, cutoff);
                         for (long long m = 1; m <= top; ++m) {
                           const int mm = static_cast<int>(m);
                           res -= apply_density(space, r, -r * mm, apply_density(space, r, r * mm, v, cutoff), cutoff);
                         }
                       }
                       return res;
                     }});
      break;
    }
  }
  return out;
}

}  // namespace

IdentityReport identity_residual(const FockSpace& space, Identity id, std::optional<Rational> cutoff,
                                 std::optional<Rational> window) {
  IdentityReport report;
  report.identity = id;
  report.window = window.value_or(space.interior_window());
  const auto states = space.states_up_to(report.window);
  const auto instances = instances_for(space, id, cutoff, report.window);
  report.states_checked = states.size();
  report.instances = instances.size();
  report.residual = 0;
  for (const auto& inst : instances) {
    for (std::size_t j : states) {
      const auto [value, where] = inst.residual(StateVector(space.state(j))).max_abs();
      if (value > report.residual) {
        report.residual = value;
        report.offender = inst.label + " on column " + std::to_string(j) + " " + space.state(j).describe() +
                          ", row " + where.describe();
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

std::map<Rational, std::pair<long long, long long>> degeneracy_counts(const FockSpace& space,
                                                                      const Rational& e_max) {
  if (e_max > Rational(space.K())) {
    throw Error(ErrorKind::BadArgument, "E_max exceeds the truncation threshold K*2pi/L");
  }
  // Energies in units of pi/L are integers: n = 2E.
  const Rational twice = 2 * e_max;
  const long long n_max = twice.numerator() / twice.denominator();
  std::map<Rational, std::pair<long long, long long>> out;
  for (long long n = 0; n <= n_max; ++n) out[Rational(n, 2)] = {0, 0};
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    if (space.energy(i) <= e_max) out[space.energy(i)].first += 1;
  }
  // Boson side: charges contribute q+^2 + q-^2, each boson of momentum +-m
  // contributes 2m; multisets of nonzero momenta are two-colored partitions.
  std::vector<long long> two_colored(static_cast<std::size_t>(n_max / 2 + 1), 0);
  two_colored[0] = 1;
  for (int colour = 0; colour < 2; ++colour) {
    for (std::size_t part = 1; part < two_colored.size(); ++part) {
      for (std::size_t total = part; total < two_colored.size(); ++total) two_colored[total] += two_colored[total - part];
    }
  }
  for (long long qp = -n_max; qp <= n_max; ++qp) {
    for (long long qm = -n_max; qm <= n_max; ++qm) {
      const long long base = qp * qp + qm * qm;
      for (long long n = base; n <= n_max; n += 2) {
        out[Rational(n, 2)].second += two_colored[static_cast<std::size_t>((n - base) / 2)];
      }
    }
  }
  return out;
}

namespace {

long long factorial(int n) {
  long long f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void partitions_rec(int remaining, int max_part, std::vector<int>& current, std::vector<std::vector<int>>& out) {
  if (remaining == 0) {
    out.push_back(current);
    return;
  }
  for (int part = std::min(remaining, max_part); part >= 1; --part) {
    current.push_back(part);
    partitions_rec(remaining - part, part, current, out);
    current.pop_back();
  }
}

std::vector<std::vector<int>> partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  partitions_rec(n, n, current, out);
  return out;
}

// prod over parts of (sign / m) J_r(direction * r * m), divided by the
// multiplicity factorials.
StateVector apply_boson_word(const FockSpace& space, int r, int direction, int sign,
                             const std::vector<int>& parts, StateVector v) {
  std::map<int, int> mult;
  for (int m : parts) {
    v = apply_density(space, r, direction * r * m, v);
    v *= Rational(sign, m);
    if (v.empty()) return v;
    ++mult[m];
  }
  long long denom = 1;
  for (const auto& [m, n] : mult) denom *= factorial(n);
  v *= Rational(1, denom);
  return v;
}

}  // namespace

BosonState boson_state(const FockSpace& space, int q_plus, int q_minus, const std::map<int, int>& occupations) {
  BosonState out;
  StateVector v(FockState{});
  v = apply_klein(space, -1, -q_minus, v);
  v = apply_klein(space, 1, q_plus, v);
  Rational norm = 1;
  for (const auto& [m, count] : occupations) {
    if (m == 0) throw Error(ErrorKind::ZeroMode, "boson occupations need p != 0");
    const int r = m > 0 ? 1 : -1;
    for (int i = 0; i < count; ++i) v = apply_density(space, r, -m, v);
    norm *= Rational(1, factorial(count));
    for (int i = 0; i < count; ++i) norm *= Rational(1, std::abs(m));
  }
  out.vector = v;
  out.norm_factor_squared = norm;
  return out;
}

StateVector reconstructed_field(const FockSpace& space, int r, int k2, std::size_t basis_index) {
  check_chirality(r);
  if (!space.grid().has_fermion_mode(k2)) {
    throw Error(ErrorKind::ModeOutOfWindow, "fermion mode k2=" + std::to_string(k2) + " is not in the grid");
  }
  const FockState& eta = space.state(basis_index);
  const int q = eta.charge(r);
  // Momentum balance: k = r (q_r - 1/2) - r (P+ - P-) in units of 2pi/L.
  const int twice_delta = 2 * q - 1 - r * k2;
  const int delta = twice_delta / 2;
  const StateVector shifted = apply_klein(space, r, -r, StateVector(eta));
  const FockState mu = shifted.begin()->first;
  const Rational e_mu = mu.energy();
  const int p_minus_max = static_cast<int>(e_mu.numerator() / e_mu.denominator());
  StateVector result;
  for (int p_minus = 0; p_minus <= p_minus_max; ++p_minus) {
    const int p_plus = p_minus + delta;
    if (p_plus < 0) continue;
    for (const auto& lower : partitions(p_minus)) {
      const StateVector lowered = apply_boson_word(space, r, 1, 1, lower, shifted);
      if (lowered.empty()) continue;
      for (const auto& upper : partitions(p_plus)) result += apply_boson_word(space, r, -1, -1, upper, lowered);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------

JacobiReport jacobi_check(double z, int order) {
  if (!(z > 0.0 && z < 1.0)) throw Error(ErrorKind::BadArgument, "jacobi_check needs z in (0, 1)");
  if (order < 1) throw Error(ErrorKind::BadArgument, "jacobi_check needs order >= 1");
  double odd = 1.0;
  double even = 1.0;
  for (int n = 1; n <= order; ++n) {
    odd *= 1.0 + std::pow(z, 2 * n - 1);
    even *= 1.0 - std::pow(z, 2 * n);
  }
  double theta = 1.0;
  for (int q = 1; q <= order; ++q) theta += 2.0 * std::pow(z, static_cast<double>(q) * q);
  JacobiReport report;
  report.lhs = odd * odd;
  report.rhs = theta / even;
  report.residual = std::abs(report.lhs - report.rhs);
  // Distance of each truncated side from its limit: the omitted product
  // factors are bounded through log(1+x) <= x, the omitted theta terms by a
  // geometric series.
  const double zz = z * z;
  const double odd_log_tail = 2.0 * std::pow(z, 2 * order + 1) / (1.0 - zz);
  const double even_log_tail = std::pow(z, 2 * order + 2) / ((1.0 - zz) * (1.0 - zz));
  const double theta_tail = 2.0 * std::pow(z, static_cast<double>(order + 1) * (order + 1)) / (1.0 - z);
  report.tail_bound = report.lhs * std::expm1(odd_log_tail) + report.rhs * std::expm1(even_log_tail) +
                      theta_tail / even * std::exp(even_log_tail);
  // Rounding in the 3*order floating-point products and sums.
  report.tail_bound += 8.0 * order * std::numeric_limits<double>::epsilon() * std::max(report.lhs, report.rhs);
  return report;
}

}  // namespace fph
