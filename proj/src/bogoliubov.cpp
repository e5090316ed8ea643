#include "fph/bogoliubov.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <tuple>

namespace fph {

bool within_cutoff(double p, double a) {
  return std::abs(p) <= (pi / a) * (1.0 + 4.0 * std::numeric_limits<double>::epsilon());
}

double BogoliubovSolution::rho_at(Flavor X, double p) const {
  if (within_cutoff(p, params.a)) return rho(X);
  return X == Flavor::F ? 1.0 : 0.0;
}

double BogoliubovSolution::sigma_at(Flavor X, double p) const {
  return within_cutoff(p, params.a) ? sigma(X) : 0.0;
}

double BogoliubovSolution::vtilde_at(Flavor X, double p) const {
  return within_cutoff(p, params.a) ? vtilde(X) : bare_velocity(X);
}

BogoliubovSolution solve_closed_form(const ModelParams& raw) {
  const ModelParams params = validate_params(raw);
  const DerivedCouplings d = derived_couplings(params);
  const double vF = params.vF;
  const double vP = params.vP;
  const double g1 = d.gamma1;
  const double g2 = d.gamma2;
  const double W = d.W;
  if (W < 1e-8 * vF * vF) {
    throw Error(ErrorKind::DegenerateBranches, "W below 1e-8 v_f^2: the two branches cannot be told apart");
  }

  const double D = vF * vF * (1.0 - g1 * g1) - vP * vP;
  BogoliubovSolution sol;
  sol.params = params;
  sol.couplings = d;
  // h_F^2 = vt_F^2 - vF^2(1-g1^2) and h_P^2 = vF^2(1-g1^2) - vt_P^2, with
  // h_F h_P = vF vP |g2| sqrt(1-g1). The ratio g2 vP / h_X is evaluated through
  // whichever of h_F, h_P stays away from zero.
  const double hF = std::sqrt(std::max(0.0, (W - D) / 2.0));
  const double hP = std::sqrt(std::max(0.0, (W + D) / 2.0));
  const double fermi2 = vF * vF * (1.0 - g1 * g1);
  // Adding or subtracting only the small one of h_F^2, h_P^2 keeps the
  // decoupled velocities exact.
  if (D >= 0.0) {
    sol.vtilde_F = std::sqrt(fermi2 + hF * hF);
    sol.vtilde_P = std::sqrt(std::max(0.0, vP * vP - hF * hF));
  } else {
    sol.vtilde_F = std::sqrt(vP * vP + hP * hP);
    sol.vtilde_P = std::sqrt(std::max(0.0, fermi2 - hP * hP));
  }
  if (!(sol.vtilde_P > 0.0)) throw Error(ErrorKind::UnstableCouplings, "phonon branch velocity is not positive");
  const double root1 = std::sqrt(1.0 - g1);
  double kF = 0.0;
  double kP = 0.0;
  if (D >= 0.0) {
    const double sign = g2 < 0.0 ? -1.0 : 1.0;
    kF = sign * hP / (vF * root1);
    kP = g2 * vP / hP;
  } else {
    const double sign = g2 > 0.0 ? 1.0 : -1.0;
    kF = g2 * vP / hF;
    kP = sign * hF / (vF * root1);
  }
  const double sW = 2.0 * std::sqrt(W);
  const double b = vF * (1.0 - g1);
  sol.rho_F = std::sqrt(vF / sol.vtilde_F) * (sol.vtilde_F + b) * kF / sW;
  sol.sigma_F = std::sqrt(vF / sol.vtilde_F) * (sol.vtilde_F - b) * kF / sW;
  sol.rho_P = -std::sqrt(vF / sol.vtilde_P) * (sol.vtilde_P + b) * kP / sW;
  sol.sigma_P = -std::sqrt(vF / sol.vtilde_P) * (sol.vtilde_P - b) * kP / sW;
  sol.E0 = ground_state_energy(params, sol);
  return sol;
}

double ground_state_energy(const ModelParams& params, const BogoliubovSolution& solution) {
  const double na = static_cast<double>(cutoff_mode_count(params.L, params.a));
  const double shift = (solution.vtilde_F - params.vF) + (solution.vtilde_P - params.vP);
  return shift * (2.0 * pi / params.L) * na * (na + 1.0) / 2.0;
}

namespace {

struct Oscillator {
  Flavor flavor;
  int m;  // 0 marks the phonon zero mode
  double frequency;
};

bool same_energy(double x, double y) { return std::abs(x - y) <= 1e-12 * std::max({1.0, std::abs(x), std::abs(y)}); }

}  // namespace

std::vector<SpectrumEntry> spectrum(const ModelParams& params, const BogoliubovSolution& solution, double e_max,
                                    const MomentumGrid& grid) {
  if (!std::isfinite(e_max)) throw Error(ErrorKind::BadArgument, "E_max must be finite");
  const double u = 2.0 * pi / params.L;
  const double slack = 1e-12 * std::max(1.0, std::abs(e_max));

  // The cheapest mode just outside the grid must lie above E_max.
  const double p_out = u * (grid.K + 1);
  const double cheapest_outside =
      std::min(solution.vtilde_at(Flavor::F, p_out), solution.vtilde_at(Flavor::P, p_out)) * p_out;
  if (cheapest_outside <= e_max + slack) {
    throw Error(ErrorKind::GridTooSmall, "boson modes above |m| = K contribute below E_max; enlarge grid.K");
  }

  std::vector<Oscillator> modes;
  modes.push_back({Flavor::P, 0, params.zero_mode_frequency()});
  for (int m : grid.boson_modes()) {
    if (m == 0) continue;
    const double p = u * std::abs(m);
    for (Flavor X : {Flavor::F, Flavor::P}) modes.push_back({X, m, solution.vtilde_at(X, p) * p});
  }

  const double g1 = solution.couplings.gamma1;
  const double charge_unit = pi * params.vF / params.L;
  const int q_bound =
      static_cast<int>(std::floor(std::sqrt(std::max(0.0, e_max) / (charge_unit * (1.0 - std::abs(g1)))))) + 1;

  std::vector<SpectrumEntry> out;
  for (int qp = -q_bound; qp <= q_bound; ++qp) {
    for (int qm = -q_bound; qm <= q_bound; ++qm) {
      const double charge = charge_unit * (qp * qp + qm * qm + 2.0 * g1 * qp * qm);
      if (charge > e_max + slack) continue;
      SpectrumEntry base;
      base.q_plus = qp;
      base.q_minus = qm;
      std::function<void(std::size_t, double, SpectrumEntry&)> fill = [&](std::size_t i, double used,
                                                                        SpectrumEntry& entry) {
        if (i == modes.size()) {
          entry.energy = solution.E0 + used;
          out.push_back(entry);
          return;
        }
        const Oscillator& osc = modes[i];
        for (int n = 0; used + n * osc.frequency <= e_max + slack; ++n) {
          if (osc.m == 0) {
            entry.phonon_zero_mode = n;
          } else if (n > 0) {
            entry.occupations[{osc.flavor, osc.m}] = n;
          }
          fill(i + 1, used + n * osc.frequency, entry);
        }
        if (osc.m == 0) {
          entry.phonon_zero_mode = 0;
        } else {
          entry.occupations.erase({osc.flavor, osc.m});
        }
      };
      fill(0, charge, base);
    }
  }

  auto labels = [](const SpectrumEntry& e) {
    return std::tie(e.q_plus, e.q_minus, e.phonon_zero_mode, e.occupations);
  };
  std::sort(out.begin(), out.end(), [&](const SpectrumEntry& x, const SpectrumEntry& y) {
    if (!same_energy(x.energy, y.energy)) return x.energy < y.energy;
    return labels(x) < labels(y);
  });
  for (std::size_t i = 0; i < out.size();) {
    std::size_t j = i;
    while (j < out.size() && same_energy(out[i].energy, out[j].energy)) ++j;
    for (std::size_t k = i; k < j; ++k) out[k].degeneracy = static_cast<int>(j - i);
    i = j;
  }
  return out;
}

}  // namespace fph
