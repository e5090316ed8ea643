#include "doctest.h"

#include <boost/multiprecision/cpp_dec_float.hpp>


#include "fph/errors.hpp"
#include "fph/fock.hpp"

using namespace fph;

namespace {

const FockSpace& space_k(int K) {
  static const FockSpace k1 = build_space(momentum_grid(2.0 * pi, 1, pi));
  static const FockSpace k2 = build_space(momentum_grid(2.0 * pi, 2, pi / 2.0));
  static const FockSpace k3 = build_space(momentum_grid(2.0 * pi, 3, pi / 2.0));
  return K == 1 ? k1 : (K == 2 ? k2 : k3);
}

StateVector vacuum() { return StateVector(FockState{}); }

StateVector create(const FockSpace& s, int r, int k2, const StateVector& v) { return apply_ladder(s, r, k2, true, v); }

Rational R(long long n, long long d = 1) { return Rational(n, d); }

}  // namespace

TEST_CASE("basis dimensions and vacuum") {
  CHECK(space_k(1).dimension() == 16);
  CHECK(space_k(2).dimension() == 256);
  const FockState& omega = space_k(2).state(0);
  CHECK(omega == FockState{});
  CHECK(omega.energy() == R(0));
  CHECK(omega.charge(1) == 0);
  CHECK(omega.charge(-1) == 0);
  CHECK_THROWS_AS(build_space(momentum_grid(2.0 * pi, 7, 0.1)), Error);
}

TEST_CASE("charges and energies of occupation states") {
  const FockSpace& s = space_k(2);
  // One right mover above the sea and one left-mover hole.
  StateVector v = create(s, 1, 3, vacuum());
  v = apply_ladder(s, -1, 1, true, v);
  const FockState st = v.begin()->first;
  CHECK(st.charge(1) == 1);
  CHECK(st.charge(-1) == -1);
  CHECK(st.energy() == R(2));
}

TEST_CASE("ladder operators") {
  const FockSpace& s = space_k(2);
  for (int r : {1, -1}) {
    for (int k2 : s.grid().fermion_modes()) {
      CHECK(apply_ladder(s, r, k2, false, vacuum()).empty());
      const SparseOperator c = ladder_op(s, r, k2);
      const SparseOperator anti = anticommutator(c, c.adjoint());
      CHECK(anti.entries == identity_operator(s).entries);
    }
  }
  const StateVector ab = create(s, 1, 1, create(s, 1, 3, vacuum()));
  const StateVector ba = create(s, 1, 3, create(s, 1, 1, vacuum()));
  CHECK(ab == R(-1) * ba);
  CHECK_THROWS_AS(ladder_op(s, 1, 5), Error);
}

TEST_CASE("number operators are diagonal with occupation eigenvalues") {
  const FockSpace& s = space_k(1);
  const SparseOperator c = ladder_op(s, -1, -1);
  const SparseOperator n = c.adjoint() * c;
  for (const auto& [rc, v] : n.entries) {
    CHECK(rc.first == rc.second);
    CHECK(v == R(1));
    CHECK(s.state(rc.first).occupied(-1, -1));
  }
}

TEST_CASE("field operators") {
  const FockSpace& s = space_k(2);
  CHECK(apply_field(s, 1, 1, false, vacuum()).empty());
  CHECK(apply_field(s, 1, 3, false, vacuum()).empty());
  CHECK(apply_field(s, 1, -1, true, vacuum()).empty());
  CHECK(apply_field(s, -1, 1, true, vacuum()).empty());
  const SparseOperator psi = field_op(s, 1, -3);
  CHECK(psi.unit_power2 == -1);
  const SparseOperator anti = anticommutator(psi, psi.adjoint());
  // L / 2pi = u^{-2} times the identity.
  CHECK(anti.unit_power2 == -2);
  CHECK(anti.entries == identity_operator(s).entries);
  // At L = 2pi the field is the ladder operator entrywise.
  CHECK(field_op(s, 1, 1).entries == ladder_op(s, 1, 1).entries);
}

TEST_CASE("densities") {
  const FockSpace& s = space_k(2);
  for (int r : {1, -1}) {
    for (int m = 1; m <= 2; ++m) CHECK(apply_density(s, r, r * m, vacuum()).empty());
    CHECK(apply_density(s, r, 0, vacuum()).empty());
    const SparseOperator q = density_op(s, r, 0);
    for (const auto& [rc, v] : q.entries) {
      CHECK(rc.first == rc.second);
      CHECK(v == R(s.state(rc.first).charge(r)));
    }
    for (int m : {1, 2}) {
      const SparseOperator j = density_op(s, r, m);
      const SparseOperator jm = density_op(s, r, -m);
      const Rational w = std::min(j.validity_window(), jm.validity_window());
      CHECK(w >= R(0));
      CHECK(j.adjoint().restricted(w) == jm.restricted(w));
    }
  }
}

TEST_CASE("Schwinger term eigenvalue on the vacuum") {
  const FockSpace& s = space_k(2);
  for (int m : {1, 2}) {
    const StateVector lhs = apply_density(s, 1, m, apply_density(s, 1, -m, vacuum())) -
                            apply_density(s, 1, -m, apply_density(s, 1, m, vacuum()));
    CHECK(lhs == R(m) * vacuum());
  }
}

TEST_CASE("free Hamiltonian") {
  const FockSpace& s = space_k(2);
  CHECK(apply_free_hamiltonian(vacuum()).empty());
  const StateVector one = create(s, 1, 1, vacuum());
  CHECK(apply_free_hamiltonian(one) == R(1, 2) * one);
  const SparseOperator h = free_hamiltonian(s);
  CHECK(h.unit_power2 == 2);
  for (std::size_t i = 0; i < s.dimension(); ++i) CHECK(h.entry(i, i) == s.energy(i));
  // [H0, psi^dag_r(k)] = r k psi^dag_r(k) on interior states.
  for (int r : {1, -1}) {
    for (int k2 : s.grid().fermion_modes()) {
      const SparseOperator pd = field_op(s, r, k2).adjoint();
      SparseOperator rk = Rational(r * k2, 2) * pd;
      rk.unit_power2 += 2;
      const SparseOperator lhs = commutator(h, pd) - rk;
      CHECK(lhs.restricted(s.interior_window()).empty());
    }
  }
}

TEST_CASE("Klein factors") {
  const FockSpace& s = space_k(3);
  for (int r : {1, -1}) {
    CHECK(apply_klein(s, r, 1, vacuum()) == create(s, r, 1, vacuum()));
    CHECK(apply_klein(s, r, -1, vacuum()) == create(s, r, -1, vacuum()));
  }
  const StateVector pm = apply_klein(s, 1, 1, apply_klein(s, -1, 1, vacuum()));
  const StateVector mp = apply_klein(s, -1, 1, apply_klein(s, 1, 1, vacuum()));
  CHECK(pm == R(-1) * mp);

  // Unitarity on the interior window.
  for (int r : {1, -1}) {
    for (std::size_t j : s.states_up_to(s.interior_window())) {
      const StateVector eta(s.state(j));
      CHECK(apply_klein(s, r, -1, apply_klein(s, r, 1, eta)) == eta);
      CHECK(apply_klein(s, r, 1, apply_klein(s, r, -1, eta)) == eta);
    }
    const SparseOperator R_r = klein_factor(s, r);
    const SparseOperator Rinv = klein_factor_inverse(s, r);
    const Rational w = std::min(R_r.validity_window(), Rinv.validity_window());
    CHECK(w >= R(1));
    CHECK((Rinv * R_r - identity_operator(s)).restricted(w - 1).empty());
  }
}

TEST_CASE("H0 eigenvalues of charged ground states") {
  const FockSpace& s = space_k(3);
  for (int qp = -3; qp <= 3; ++qp) {
    for (int qm = -3; qm <= 3; ++qm) {
      const StateVector v = apply_klein(s, 1, qp, apply_klein(s, -1, -qm, vacuum()));
      CHECK(apply_free_hamiltonian(v) == Rational(qp * qp + qm * qm, 2) * v);
      CHECK(v.begin()->first.charge(1) == qp);
      CHECK(v.begin()->first.charge(-1) == qm);
    }
  }
}

TEST_CASE("[H0, R_r] = r (pi/L) {Q_r, R_r} on interior states") {
  const FockSpace& s = space_k(3);
  for (int r : {1, -1}) {
    const SparseOperator h = free_hamiltonian(s);
    const SparseOperator Rr = klein_factor(s, r);
    const SparseOperator Q = density_op(s, r, 0);
    const SparseOperator lhs = commutator(h, Rr);
    SparseOperator rhs = Rational(r, 2) * anticommutator(Q, Rr);
    rhs.unit_power2 = lhs.unit_power2;
    const Rational w = Rr.validity_window() - 1;
    CHECK((lhs - rhs).restricted(w).empty());
  }
}

TEST_CASE("operator matrices do not depend on the truncation inside the window") {
  const FockSpace& small = space_k(2);
  const FockSpace& large = space_k(3);
  const Rational window = small.interior_window();
  auto compare = [&](const SparseOperator& a, const SparseOperator& b) {
    std::map<std::pair<FockState, FockState>, Rational> ea;
    std::map<std::pair<FockState, FockState>, Rational> eb;
    for (const auto& [rc, v] : a.restricted(window)) ea[{small.state(rc.first), small.state(rc.second)}] = v;
    for (const auto& [rc, v] : b.restricted(window)) eb[{large.state(rc.first), large.state(rc.second)}] = v;
    CHECK(ea == eb);
  };
  for (int r : {1, -1}) {
    for (int m = -2; m <= 2; ++m) compare(density_op(small, r, m), density_op(large, r, m));
    compare(klein_factor(small, r), klein_factor(large, r));
  }
  compare(free_hamiltonian(small), free_hamiltonian(large));
}

TEST_CASE("boson ladder operators") {
  const FockSpace& s = space_k(2);
  const BosonLadder b = boson_ladder(s, 1);
  CHECK(b.phase == -1);
  CHECK(b.norm_squared == R(1));
  CHECK(boson_ladder(s, -2).phase == 1);
  CHECK(apply_density(s, 1, 1, vacuum()).empty());
  // <b^dag Omega, b^dag Omega> = |m|^{-1} <J(-m) Omega, J(-m) Omega> = 1.
  const StateVector one = apply_density(s, 1, -1, vacuum());
  CHECK(one.dot(one) * b.norm_squared == R(1));
  for (int m1 : {-2, -1, 1, 2}) {
    for (int m2 : {-2, -1, 1, 2}) CHECK(boson_commutator_residual(s, m1, m2, s.interior_window()) == R(0));
  }
  CHECK_THROWS_AS(boson_ladder(s, 0), Error);
}

TEST_CASE("boson states are orthonormal") {
  const FockSpace& s = space_k(3);
  std::vector<BosonState> states;
  for (int qp = -1; qp <= 1; ++qp) {
    for (int qm = -1; qm <= 1; ++qm) {
      states.push_back(boson_state(s, qp, qm, {}));
      states.push_back(boson_state(s, qp, qm, {{1, 1}}));
      states.push_back(boson_state(s, qp, qm, {{-1, 2}}));
      states.push_back(boson_state(s, qp, qm, {{2, 1}, {-1, 1}}));
    }
  }
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = 0; j < states.size(); ++j) {
      const Rational overlap = states[i].vector.dot(states[j].vector);
      if (i == j) {
        CHECK(overlap * states[i].norm_factor_squared == R(1));
      } else {
        CHECK(overlap == R(0));
      }
    }
  }
}

TEST_CASE("identity suite is exact") {
  for (int K : {1, 2, 3}) {
    for (Identity id : all_identities()) {
      const IdentityReport rep = identity_residual(space_k(K), id);
      INFO("K=" << K << " " << to_string(id) << " " << rep.offender.value_or(""));
      CHECK(rep.pass());
      CHECK(rep.window == R(K - 1));
      CHECK(rep.states_checked >= 1);
    }
  }
}

TEST_CASE("identity names") {
  for (Identity id : all_identities()) CHECK(parse_identity(to_string(id)) == id);
  try {
    parse_identity("NOPE");
    FAIL("expected UnknownIdentity");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownIdentity);
  }
}

TEST_CASE("dropping fermionic signs breaks the anticommutation relations") {
  const FockSpace bad = build_space(momentum_grid(2.0 * pi, 2, pi / 2.0), SignConvention::Ignored);
  const IdentityReport rep = identity_residual(bad, Identity::CAR);
  CHECK_FALSE(rep.pass());
  REQUIRE(rep.offender.has_value());
  CHECK(rep.offender->find("psi") != std::string::npos);
}

namespace {

// Fermion side: every particle/hole pattern on the 4K modes, counted by the
// total |k2|. Boson side: charges times two-colored partitions.
long long brute_fermion(int K, long long twice_e) {
  long long count = 0;
  const int modes = 4 * K;
  for (long long mask = 0; mask < (1LL << modes); ++mask) {
    long long total = 0;
    for (int b = 0; b < modes; ++b) {
      if ((mask >> b) & 1) total += std::abs(2 * (b % (2 * K) - K) + 1);
    }
    if (total == twice_e) ++count;
  }
  return count;
}

long long p2(int n) {
  // Direct coefficient extraction from prod (1 - x^k)^{-2}.
  std::vector<long long> c(n + 1, 0);
  c[0] = 1;
  for (int k = 1; k <= n; ++k) {
    for (int color = 0; color < 2; ++color) {
      for (int i = k; i <= n; ++i) c[i] += c[i - k];
    }
  }
  return c[n];
}

long long brute_boson(long long twice_e) {
  long long count = 0;
  for (int qp = -5; qp <= 5; ++qp) {
    for (int qm = -5; qm <= 5; ++qm) {
      const long long rest = twice_e - qp * qp - qm * qm;
      if (rest < 0 || rest % 2 != 0) continue;
      count += p2(static_cast<int>(rest / 2));
    }
  }
  return count;
}

}  // namespace

TEST_CASE("boson and fermion degeneracies agree") {
  const auto counts = degeneracy_counts(space_k(3), R(2));
  REQUIRE(counts.size() == 5);
  CHECK(counts.at(R(0)) == std::make_pair(1LL, 1LL));
  CHECK(counts.at(R(1, 2)) == std::make_pair(4LL, 4LL));
  for (const auto& [e, c] : counts) {
    const long long twice = (2 * e).numerator();
    CHECK(c.first == brute_fermion(3, twice));
    CHECK(c.second == brute_boson(twice));
    CHECK(c.first == c.second);
  }
  CHECK_THROWS_AS(degeneracy_counts(space_k(2), R(3)), Error);
}

TEST_CASE("field reconstruction from densities and Klein factors") {
  const FockSpace& s = space_k(2);
  for (int r : {1, -1}) {
    for (int k2 : s.grid().fermion_modes()) {
      if (r * k2 > 0) CHECK(reconstructed_field(s, r, k2, 0).empty());
    }
  }
  CHECK(reconstructed_field(s, 1, -1, 0) == apply_klein(s, 1, -1, vacuum()));
  for (int r : {1, -1}) {
    for (int k2 : s.grid().fermion_modes()) {
      for (std::size_t j : s.states_up_to(s.interior_window())) {
        const StateVector direct = apply_field(s, r, k2, false, StateVector(s.state(j)));
        CHECK(reconstructed_field(s, r, k2, j) == direct);
      }
    }
  }
}

TEST_CASE("Jacobi triple product special case") {
  using Big = boost::multiprecision::cpp_dec_float_50;
  auto limit = [](double zd) {
    // Far beyond double precision at order 2000.
    const Big z(zd);
    Big odd = 1;
    Big even = 1;
    Big theta = 1;
    for (int n = 1; n <= 2000; ++n) {
      odd *= 1 + boost::multiprecision::pow(z, 2 * n - 1);
      even *= 1 - boost::multiprecision::pow(z, 2 * n);
    }
    for (int q = 1; q <= 60; ++q) theta += 2 * boost::multiprecision::pow(z, q * q);
    return std::make_pair(static_cast<double>(odd * odd), static_cast<double>(theta / even));
  };
  const JacobiReport half = jacobi_check(0.5, 60);
  CHECK(half.residual < 1e-12);
  CHECK(half.pass());
  const auto [lhs, rhs] = limit(0.5);
  CHECK(std::abs(half.lhs - lhs) <= half.tail_bound + 1e-12);
  CHECK(std::abs(lhs - rhs) < 1e-12 * lhs);

  const JacobiReport slow = jacobi_check(0.9, 400);
  CHECK(slow.pass());
  const JacobiReport tiny = jacobi_check(1e-6, 1);
  CHECK(tiny.lhs == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(tiny.rhs == doctest::Approx(1.0).epsilon(1e-5));
  CHECK_THROWS_AS(jacobi_check(1.0, 10), Error);
  CHECK_THROWS_AS(jacobi_check(0.0, 10), Error);
}
