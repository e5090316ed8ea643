#include "doctest.h"

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "fph/correlators.hpp"

using namespace fph;

namespace {

BogoliubovSolution solve(double g1, double g2, double vP = 0.5) {
  ModelParams p;
  p.vF = 1.0;
  p.vP = vP;
  p.lambda = g1 * 2.0 * pi;
  p.g = g2 * vP * std::sqrt(pi);
  return solve_closed_form(p);
}

Complex principal_power(Complex base, double exponent) { return std::exp(exponent * std::log(base)); }

double rel(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("Klein signs") {
  CHECK(klein_sign({{1, -1}, {1, 1}}) == 1);
  CHECK(klein_sign({{1, -1}, {-1, 1}}) == 0);
  CHECK(klein_sign({{1, 1}}) == 0);
  CHECK(klein_sign({}) == 1);
  CHECK(klein_sign({{-1, 1}, {1, 1}, {-1, -1}, {1, -1}}) == -1);
  CHECK(klein_sign({{1, -1}, {-1, 1}, {-1, -1}, {1, 1}}) == 1);

  CorrelatorSpec spec;
  spec.insertions = {{1, -1, 0, 0}, {-1, 1, 0, 0}};
  const KleinWord w = klein_word(spec);
  REQUIRE(w.size() == 2);
  CHECK(w[1] == std::make_pair(-1, 1));
}

TEST_CASE("pair sums") {
  const SumRules two = sum_rules({{1, -1}, {1, 1}});
  CHECK(two.same == -1);
  CHECK(two.cross == 0);
  const SumRules four = sum_rules({{1, -1}, {-1, 1}, {-1, -1}, {1, 1}});
  // same-chirality pairs (1,4) and (2,3); the remaining four are cross pairs.
  CHECK(four.same == -2);
  CHECK(four.cross == 0);
  try {
    sum_rules({{1, 1}, {1, 1}});
    FAIL("expected SelectionViolated");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SelectionViolated);
  }
}

TEST_CASE("regulated powers") {
  CHECK(regulated_power(2.0, 1, 1.0, 0.0, 1.0, 0.0, 1e-3) == Complex(1.0, 0.0));
  const Complex one = regulated_power(2.0, 1, 1.5, 0.5, 1.0, 1.0, 0.1);
  CHECK(std::abs(one - Complex(0.0, 2.0) / Complex(1.0, 0.1)) < 1e-15);
  // i / (-1 + i0) = -i lies at argument -pi/2 on the principal branch.
  const Complex half = regulated_power(1.0, -1, 1.0, 0.0, 1.0, 0.5, 1e-14);
  CHECK(std::abs(half - std::polar(1.0, -pi / 4.0)) < 1e-12);
}

TEST_CASE("free box correlator") {
  CorrelatorSpec spec;
  spec.regulator = 1e-9;
  spec.insertions = {{1, -1, 0.7, 0.0}, {1, 1, -0.2, 0.0}};
  const double L = 1e7;
  const Complex box = free_finite_L(spec, L);
  const Complex line = Complex(0.0, 1.0) / (2.0 * pi * Complex(0.9, 1e-9));
  CHECK(rel(box, line) < 1e-10);

  spec.insertions = {{1, -1, 0.7, 0.0}, {-1, 1, -0.2, 0.0}};
  CHECK(free_finite_L(spec, 10.0) == Complex(0.0, 0.0));
  spec.insertions = {{1, -1, 0.7, 0.1}, {1, 1, -0.2, 0.0}};
  CHECK_THROWS_AS(free_finite_L(spec, 10.0), Error);
}

TEST_CASE("two-point function") {
  const BogoliubovSolution free = solve(0.0, 0.0);
  const double eps = 1e-10;
  for (int r : {1, -1}) {
    const Complex g = two_point(r, 0.8, 0.3, free, 1.0, eps);
    CHECK(rel(g, Complex(0.0, 1.0) / (2.0 * pi * Complex(r * 0.8 - 0.3, eps))) < 1e-12);
  }
  const BogoliubovSolution s = solve(0.3, 0.4);
  for (int r : {1, -1}) {
    for (double x : {-2.0, 0.5, 3.0}) {
      const double t = 0.7;
      CHECK(rel(std::conj(two_point(r, x, t, s, 1.3, 1e-12)), two_point(r, -x, -t, s, 1.3, 1e-12)) < 1e-12);
      CorrelatorSpec spec;
      spec.ell = 1.3;
      spec.regulator = 1e-12;
      spec.insertions = {{r, -1, x, t}, {r, 1, 0.0, 0.0}};
      CHECK(rel(npoint_continuum(spec, s), two_point(r, x, t, s, 1.3, 1e-12)) < 1e-12);
    }
  }
}

TEST_CASE("four-point function factor by factor") {
  const BogoliubovSolution s = solve(0.35, -0.5);
  const double ell = 0.8;
  const double reg = 1e-12;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    double x[5];
    double t[5];
    for (int i = 1; i <= 4; ++i) {
      x[i] = u(rng);
      t[i] = u(rng);
    }
    CorrelatorSpec spec;
    spec.ell = ell;
    spec.regulator = reg;
    spec.insertions = {{1, -1, x[1], t[1]}, {-1, 1, x[2], t[2]}, {-1, -1, x[3], t[3]}, {1, 1, x[4], t[4]}};
    const Complex value = npoint_continuum(spec, s);

    auto z = [&](int r, int n, int m, Flavor X) { return Complex(r * (x[n] - x[m]) - s.vtilde(X) * (t[n] - t[m]), reg); };
    auto il = [&](Complex d) { return Complex(0.0, ell) / d; };
    Complex expected = 1.0 / ((2.0 * pi * ell) * (2.0 * pi * ell));
    for (Flavor X : {Flavor::F, Flavor::P}) {
      const double rs = s.rho(X) * s.sigma(X);
      const double r2 = s.rho(X) * s.rho(X);
      const double s2 = s.sigma(X) * s.sigma(X);
      for (int r : {1, -1}) {
        expected *= principal_power(z(r, 1, 3, X) / z(r, 1, 2, X), rs);
        expected *= principal_power(z(r, 2, 4, X) / z(r, 3, 4, X), rs);
      }
      expected *= principal_power(il(z(1, 1, 4, X)), r2) * principal_power(il(z(-1, 1, 4, X)), s2);
      expected *= principal_power(il(z(1, 2, 3, X)), s2) * principal_power(il(z(-1, 2, 3, X)), r2);
    }
    CHECK(rel(value, expected) < 1e-12);
  }
}

TEST_CASE("same-chirality free functions are Wick determinants") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(-4.0, 4.0);
  const double L = 9.0;
  for (int M = 1; M <= 4; ++M) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> xs(M);
      std::vector<double> ys(M);
      for (int i = 0; i < M; ++i) {
        xs[i] = pos(rng);
        ys[i] = pos(rng);
      }
      CorrelatorSpec spec;
      spec.regulator = 1e-13;
      for (int i = 0; i < M; ++i) spec.insertions.push_back({1, -1, xs[i], 0.0});
      for (int i = M - 1; i >= 0; --i) spec.insertions.push_back({1, 1, ys[i], 0.0});
      Eigen::MatrixXcd G(M, M);
      for (int i = 0; i < M; ++i) {
        for (int j = 0; j < M; ++j) {
          CorrelatorSpec pair;
          pair.regulator = spec.regulator;
          pair.insertions = {{1, -1, xs[i], 0.0}, {1, 1, ys[j], 0.0}};
          G(i, j) = free_finite_L(pair, L);
        }
      }
      const Complex det = G.determinant();
      CHECK(std::abs(free_finite_L(spec, L) - det) < 1e-10 * std::max(1.0, std::abs(det)));
    }
  }
}

TEST_CASE("order-parameter correlators") {
  const BogoliubovSolution s = solve(0.5, 0.0);
  const double ell = 1.0;
  const double x = 2.0;
  const ExponentTable e = exponents(s);
  const Complex cdw = order_correlator(OrderKind::CDW, x, 0.0, s, ell, 1e-12);
  const Complex sc = order_correlator(OrderKind::SC, x, 0.0, s, ell, 1e-12);
  const double norm = 1.0 / std::pow(2.0 * pi * ell, 2);
  CHECK(rel(cdw, norm * std::pow(ell / x, 2.0 * e.delta_cdw)) < 1e-12);
  CHECK(rel(sc, norm * std::pow(ell / x, 2.0 * e.delta_sc)) < 1e-12);
  const BogoliubovSolution free = solve(0.0, 0.0);
  const Complex moving = order_correlator(OrderKind::CDW, 1.0, 0.5, free, ell, 1e-12);
  CHECK(rel(moving, norm / Complex(0.75, 1e-12)) < 1e-10);
}

TEST_CASE("exponent table") {
  const ExponentTable e = exponents(solve(0.5, 0.0));
  CHECK(e.delta_cdw == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-12));
  CHECK(e.delta_sc == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  CHECK(e.delta_cdw * e.delta_sc == doctest::Approx(1.0).epsilon(1e-12));

  const ExponentTable free = exponents(solve(0.0, 0.0));
  CHECK(free.delta_cdw == 1.0);
  CHECK(free.delta_sc == 1.0);
  CHECK(free.fermion_dimension == 1.0);

  const ExponentTable g = exponents(solve(0.2, 0.3));
  CHECK(g.c(1, Flavor::P, 1, 1) == doctest::Approx(g.rho[1] * g.rho[1]));
  CHECK(g.c(-1, Flavor::P, 1, 1) == doctest::Approx(g.sigma[1] * g.sigma[1]));
  CHECK(g.c(1, Flavor::F, -1, 1) == doctest::Approx(g.rho[0] * g.sigma[0]));
}

TEST_CASE("decoupled phonons leave only fermion exponents") {
  const BogoliubovSolution s = solve(-0.4, 0.0);
  CorrelatorSpec spec;
  spec.regulator = 1e-12;
  spec.insertions = {{-1, -1, 1.1, 0.4}, {-1, 1, 0.0, 0.0}};
  const double rho2 = s.rho_F * s.rho_F;
  const double sigma2 = s.sigma_F * s.sigma_F;
  const Complex expected = 1.0 / (2.0 * pi) * principal_power(Complex(0.0, 1.0) / Complex(-1.1 - s.vtilde_F * 0.4, 1e-12), rho2) *
                           principal_power(Complex(0.0, 1.0) / Complex(1.1 - s.vtilde_F * 0.4, 1e-12), sigma2);
  CHECK(rel(npoint_continuum(spec, s), expected) < 1e-12);
}

TEST_CASE("exponent sum rule over random balanced words") {
  const BogoliubovSolution s = solve(0.25, 0.6, 0.4);
  const ExponentTable e = exponents(s);
  const double s2 = e.sigma[0] * e.sigma[0] + e.sigma[1] * e.sigma[1];
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> coin(0, 1);
  int tested = 0;
  while (tested < 200) {
    KleinWord word;
    const int n = 2 * (1 + coin(rng) + coin(rng));
    for (int i = 0; i < n; ++i) word.emplace_back(coin(rng) ? 1 : -1, coin(rng) ? 1 : -1);
    if (klein_sign(word) == 0) continue;
    ++tested;
    double total = 0.0;
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        double c = 0.0;
        for (int r : {1, -1}) {
          for (Flavor X : {Flavor::F, Flavor::P}) c += e.c(r, X, word[a].first, word[b].first);
        }
        total -= word[a].second * word[b].second * c;
      }
    }
    CHECK(total == doctest::Approx(0.5 * n * (1.0 + 2.0 * s2)).epsilon(1e-12));
  }
}

TEST_CASE("Cauchy determinant identity") {
  CHECK(cauchy_residual({0.3}, {1.1}) == 0.0);
  const double r2 = cauchy_residual({0.1, 0.7}, {1.3, -0.4});
  // Direct 2x2 evaluation.
  auto k = [](double a, double b) { return 1.0 / std::sin(a - b); };
  const double det = k(0.1, 1.3) * k(0.7, -0.4) - k(0.1, -0.4) * k(0.7, 1.3);
  const double prod = std::sin(0.1 - 0.7) * std::sin(-0.4 - 1.3) * k(0.1, 1.3) * k(0.1, -0.4) * k(0.7, 1.3) * k(0.7, -0.4);
  CHECK(std::abs(det - prod) < 1e-13);
  CHECK(r2 < 1e-13);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(0.0, pi);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> U(5);
    std::vector<double> V(5);
    for (int i = 0; i < 5; ++i) {
      U[i] = angle(rng);
      V[i] = angle(rng);
    }
    double scale = 1.0;
    for (double a : U) {
      for (double b : V) scale = std::max(scale, std::abs(1.0 / std::sin(a - b)));
    }
    CHECK(cauchy_residual(U, V) < 1e-9 * std::pow(scale, 5));
  }
  try {
    cauchy_residual({0.5, 1.0}, {0.5, 2.0});
    FAIL("expected SingularConfiguration");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularConfiguration);
  }
  CHECK_THROWS_AS(cauchy_residual({0.1}, {0.2, 0.3}), Error);
}
