#include "fph/correlators.hpp"

#include <cmath>

namespace fph {

KleinWord klein_word(const CorrelatorSpec& spec) {
  KleinWord word;
  for (const auto& p : spec.insertions) word.emplace_back(p.r, p.q);
  return word;
}

int klein_sign(const KleinWord& word) {
  int plus = 0;
  int minus = 0;
  for (const auto& [r, q] : word) (r > 0 ? plus : minus) += q;
  if (plus != 0 || minus != 0) return 0;
  int crossings = 0;
  int minus_seen = 0;
  for (const auto& [r, q] : word) {
    if (r < 0) {
      ++minus_seen;
    } else {
      crossings += minus_seen;
    }
  }
  return crossings % 2 == 0 ? 1 : -1;
}

SumRules sum_rules(const KleinWord& word) {
  if (klein_sign(word) == 0) throw Error(ErrorKind::SelectionViolated, "charges of the word do not cancel");
  SumRules out;
  for (std::size_t n = 0; n < word.size(); ++n) {
    for (std::size_t m = n + 1; m < word.size(); ++m) {
      const int qq = word[n].second * word[m].second;
      (word[n].first == word[m].first ? out.same : out.cross) += qq;
    }
  }
  return out;
}

Complex regulated_power(double ell, int r, double x, double t, double v, double exponent, double regulator) {
  if (exponent == 0.0) return {1.0, 0.0};
  const Complex z = Complex(0.0, ell) / Complex(r * x - v * t, regulator);
  return std::exp(exponent * std::log(z));
}

Complex free_finite_L(const CorrelatorSpec& spec, double L) {
  const auto& ins = spec.insertions;
  for (const auto& p : ins) {
    if (p.t != 0.0) throw Error(ErrorKind::BadArgument, "free_finite_L needs equal times");
    if (std::abs(p.x) > L / 2.0) throw Error(ErrorKind::BadArgument, "|x| must not exceed L/2");
  }
  const int sign = klein_sign(klein_word(spec));
  if (sign == 0) return {0.0, 0.0};
  Complex value = sign;
  for (std::size_t n = 0; n < ins.size(); ++n) {
    for (std::size_t m = n + 1; m < ins.size(); ++m) {
      if (ins[n].r != ins[m].r) continue;
      const int power = -ins[n].q * ins[m].q;
      const Complex arg = pi / L * Complex(ins[n].r * (ins[n].x - ins[m].x), spec.regulator);
      const Complex kernel = Complex(0.0, 1.0) / (2.0 * L * std::sin(arg));
      value *= power > 0 ? kernel : 1.0 / kernel;
    }
  }
  return value;
}

Complex two_point(int r, double x, double t, const BogoliubovSolution& sol, double ell, double regulator) {
  Complex value = 1.0 / (2.0 * pi * ell);
  for (Flavor X : {Flavor::F, Flavor::P}) {
    const double rho = sol.rho(X);
    const double sigma = sol.sigma(X);
    value *= regulated_power(ell, r, x, t, sol.vtilde(X), rho * rho, regulator);
    value *= regulated_power(ell, -r, x, t, sol.vtilde(X), sigma * sigma, regulator);
  }
  return value;
}

double ExponentTable::c(int r, Flavor X, int r_n, int r_m) const {
  const int i = static_cast<int>(X);
  if (r_n != r_m) return rho[i] * sigma[i];
  return r == r_n ? rho[i] * rho[i] : sigma[i] * sigma[i];
}

ExponentTable exponents(const BogoliubovSolution& sol) {
  ExponentTable e;
  for (Flavor X : {Flavor::F, Flavor::P}) {
    const int i = static_cast<int>(X);
    e.rho[i] = sol.rho(X);
    e.sigma[i] = sol.sigma(X);
    e.delta_cdw += (e.rho[i] - e.sigma[i]) * (e.rho[i] - e.sigma[i]);
    e.delta_sc += (e.rho[i] + e.sigma[i]) * (e.rho[i] + e.sigma[i]);
    e.fermion_dimension += e.rho[i] * e.rho[i] + e.sigma[i] * e.sigma[i];
  }
  return e;
}

Complex npoint_continuum(const CorrelatorSpec& spec, const BogoliubovSolution& sol) {
  const auto& ins = spec.insertions;
  const int sign = klein_sign(klein_word(spec));
  if (sign == 0) return {0.0, 0.0};
  const ExponentTable table = exponents(sol);
  Complex value = static_cast<double>(sign) * std::pow(2.0 * pi * spec.ell, -0.5 * static_cast<double>(ins.size()));
  for (std::size_t n = 0; n < ins.size(); ++n) {
    for (std::size_t m = n + 1; m < ins.size(); ++m) {
      const double qq = ins[n].q * ins[m].q;
      for (int r : {1, -1}) {
        for (Flavor X : {Flavor::F, Flavor::P}) {
          const double exponent = -qq * table.c(r, X, ins[n].r, ins[m].r);
          value *= regulated_power(spec.ell, r, ins[n].x - ins[m].x, ins[n].t - ins[m].t, sol.vtilde(X), exponent,
                                   spec.regulator);
        }
      }
    }
  }
  return value;
}

Complex order_correlator(OrderKind kind, double x, double t, const BogoliubovSolution& sol, double ell,
                         double regulator) {
  Complex value = 1.0 / ((2.0 * pi * ell) * (2.0 * pi * ell));
  for (Flavor X : {Flavor::F, Flavor::P}) {
    const double mix = kind == OrderKind::CDW ? sol.rho(X) - sol.sigma(X) : sol.rho(X) + sol.sigma(X);
    const double exponent = mix * mix;
    if (exponent == 0.0) continue;
    const Complex shifted(sol.vtilde(X) * t, -regulator);
    const Complex base = ell * ell / (x * x - shifted * shifted);
    value *= std::exp(exponent * std::log(base));
  }
  return value;
}

namespace {

double determinant(std::vector<std::vector<double>> m) {
  const std::size_t n = m.size();
  if (n == 1) return m[0][0];
  double det = 0.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::vector<std::vector<double>> minor;
    minor.reserve(n - 1);
    for (std::size_t row = 1; row < n; ++row) {
      std::vector<double> line;
      line.reserve(n - 1);
      for (std::size_t c = 0; c < n; ++c) {
        if (c != col) line.push_back(m[row][c]);
      }
      minor.push_back(std::move(line));
    }
    const double sign = col % 2 == 0 ? 1.0 : -1.0;
    det += sign * m[0][col] * determinant(std::move(minor));
  }
  return det;
}

}  // namespace

double cauchy_residual(const std::vector<double>& U, const std::vector<double>& V) {
  const std::size_t M = U.size();
  if (M == 0 || M != V.size() || M > 8) throw Error(ErrorKind::BadArgument, "need equal-length lists with 1 <= M <= 8");
  std::vector<std::vector<double>> kernel(M, std::vector<double>(M));
  double product = 1.0;
  for (std::size_t n = 0; n < M; ++n) {
    for (std::size_t m = 0; m < M; ++m) {
      const double s = std::sin(U[n] - V[m]);
      if (std::abs(s) < 1e-300) throw Error(ErrorKind::SingularConfiguration, "sin(U_n - V_m) vanishes");
      kernel[n][m] = 1.0 / s;
      product /= s;
    }
  }
  for (std::size_t n = 0; n < M; ++n) {
    for (std::size_t m = n + 1; m < M; ++m) product *= std::sin(U[n] - U[m]) * std::sin(V[m] - V[n]);
  }
  return std::abs(product - determinant(kernel));
}

}  // namespace fph
