#include "fph/model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fph/errors.hpp"

namespace fph {

double ModelParams::zero_mode_frequency() const {
  return omega0 ? *omega0 : 2.0 * pi * vP / L;
}

double MomentumGrid::spacing() const { return 2.0 * pi / L; }

double MomentumGrid::fermion_momentum(int k2) const { return spacing() * 0.5 * k2; }

double MomentumGrid::boson_momentum(int m) const { return spacing() * m; }

bool MomentumGrid::has_fermion_mode(int k2) const {
  return (k2 % 2 != 0) && std::abs(k2) <= 2 * K - 1;
}

bool MomentumGrid::has_boson_mode(int m) const { return std::abs(m) <= K; }

std::vector<int> MomentumGrid::fermion_modes() const {
  std::vector<int> out;
  for (int k2 = -(2 * K - 1); k2 <= 2 * K - 1; k2 += 2) out.push_back(k2);
  return out;
}

std::vector<int> MomentumGrid::boson_modes() const {
  std::vector<int> out;
  for (int m = -K; m <= K; ++m) out.push_back(m);
  return out;
}

double MomentumGrid::cutoff_momentum() const { return spacing() * static_cast<double>(Na); }

long long cutoff_mode_count(double L, double a) {
  // p = 2*pi*n/L <= pi/a  <=>  n <= L/(2a); a relative nudge keeps exact ties inside.
  const double ratio = L / (2.0 * a);
  return static_cast<long long>(std::floor(ratio * (1.0 + 4.0 * std::numeric_limits<double>::epsilon())));
}

namespace {

void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) throw Error(kind, what);
}

}  // namespace

ModelParams validate_params(const ModelParams& raw) {
  const double fields[] = {raw.vF, raw.vP, raw.lambda, raw.g, raw.a, raw.L};
  for (double f : fields) require(std::isfinite(f), ErrorKind::BadGeometry, "parameters must be finite");
  require(raw.vF > 0.0, ErrorKind::BadGeometry, "v_f must be positive");
  require(raw.vP > 0.0, ErrorKind::BadGeometry, "v_p must be positive");
  require(raw.vP < raw.vF, ErrorKind::BadGeometry, "v_p must be smaller than v_f");
  require(raw.a > 0.0, ErrorKind::BadGeometry, "a must be positive");
  require(raw.L > 0.0, ErrorKind::BadGeometry, "L must be positive");
  require(raw.a < raw.L, ErrorKind::BadGeometry, "a must be smaller than L");
  if (raw.omega0) {
    require(std::isfinite(*raw.omega0) && *raw.omega0 > 0.0, ErrorKind::BadGeometry,
            "omega0 must be positive");
  }
  require(raw.lambda < 2.0 * pi * raw.vF, ErrorKind::UnstableCouplings,
          "violates lambda < 2*pi*v_f");
  const double lhs = 2.0 * (raw.g / raw.vP) * (raw.g / raw.vP);
  require(lhs < 2.0 * pi * raw.vF + raw.lambda, ErrorKind::UnstableCouplings,
          "violates 2*(g/v_p)^2 < 2*pi*v_f + lambda");
  return raw;
}

DerivedCouplings derived_couplings(const ModelParams& params) {
  DerivedCouplings d;
  d.gamma1 = params.lambda / (2.0 * pi * params.vF);
  d.gamma2 = params.g / (params.vP * std::sqrt(pi * params.vF));
  const double vf2 = params.vF * params.vF;
  const double vp2 = params.vP * params.vP;
  const double D = vf2 * (1.0 - d.gamma1 * d.gamma1) - vp2;
  d.W = std::sqrt(D * D + 4.0 * vf2 * vp2 * d.gamma2 * d.gamma2 * (1.0 - d.gamma1));
  return d;
}

MomentumGrid momentum_grid(double L, int K, double a) {
  if (!(L > 0.0) || !(a > 0.0) || !std::isfinite(L) || !std::isfinite(a)) {
    throw Error(ErrorKind::BadGeometry, "L and a must be positive and finite");
  }
  if (K < 1) throw Error(ErrorKind::BadGeometry, "K must be at least 1");
  if (a > L / 2.0) throw Error(ErrorKind::BadGeometry, "a must not exceed L/2");
  MomentumGrid grid;
  grid.L = L;
  grid.K = K;
  grid.a = a;
  grid.Na = cutoff_mode_count(L, a);
  return grid;
}

}  // namespace fph
