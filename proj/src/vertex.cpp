#include "fph/vertex.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fph {

namespace {

int slot(int r) { return r > 0 ? 0 : 1; }

// Neumaier-compensated accumulator for one real component.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// sum_{n = first}^{last} exp(n (i theta - delta)) / n. Powers are re-anchored
// every block so the recurrence never runs long enough to drift.
Complex log_series(long long first, long long last, double theta, double delta) {
  constexpr long long block = 256;
  CompensatedSum re;
  CompensatedSum im;
  const Complex step = std::polar(std::exp(-delta), theta);
  for (long long start = first; start <= last; start += block) {
    const double n0 = static_cast<double>(start);
    Complex w = std::polar(std::exp(-delta * n0), std::fmod(theta * n0, 2.0 * pi));
    const long long stop = std::min(last, start + block - 1);
    for (long long n = start; n <= stop; ++n) {
      const double inv = 1.0 / static_cast<double>(n);
      re.add(w.real() * inv);
      im.add(w.imag() * inv);
      w *= step;
    }
  }
  return {re.value(), im.value()};
}

// Bound on |sum_{n > last} exp(n (i theta - delta)) / n|.
double log_series_tail(long long last, double delta) {
  const double next = static_cast<double>(last + 1);
  return std::exp(-delta * next) / (next * -std::expm1(-delta));
}

const ChannelCoefficients* find_channel(const VertexFactor& v, int s, Flavor X) {
  for (const auto& c : v.channels) {
    if (c.s == s && c.X == X) return &c;
  }
  return nullptr;
}

double regularized_harmonic(long long Na, double L, double eps) {
  CompensatedSum acc;
  const double u = 2.0 * pi / L;
  for (long long n = 1; n <= Na; ++n) acc.add(std::exp(-eps * u * static_cast<double>(n)) / static_cast<double>(n));
  return acc.value();
}

}  // namespace

bool ChannelCoefficients::vanishes() const {
  if (explicit_modes) return explicit_modes->empty();
  return amp_low == 0.0 && amp_high == 0.0;
}

Complex VertexFactor::coefficient(int s, Flavor X, long long m) const {
  const ChannelCoefficients* c = find_channel(*this, s, X);
  if (c == nullptr || m == 0) return {0.0, 0.0};
  if (c->explicit_modes) {
    auto it = c->explicit_modes->find(m);
    return it == c->explicit_modes->end() ? Complex{0.0, 0.0} : it->second;
  }
  const bool low = std::llabs(m) <= Na;
  const double amp = low ? c->amp_low : c->amp_high;
  if (amp == 0.0) return {0.0, 0.0};
  const double p = 2.0 * pi * static_cast<double>(m) / L;
  const double y = x - s * (low ? c->v_low : c->v_high) * t;
  return amp * std::exp(Complex(-eps * std::abs(p) / 2.0, -p * y)) / Complex(0.0, p);
}

VertexFactor field_vertex(int r, int q, double x, double t, double eps, const BogoliubovSolution& sol) {
  if (r != 1 && r != -1) throw Error(ErrorKind::BadArgument, "chirality must be +1 or -1");
  if (q != 1 && q != -1) throw Error(ErrorKind::BadArgument, "q must be +1 or -1");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw Error(ErrorKind::BadRegulator, "eps must be positive");
  const ModelParams& params = sol.params;
  if (std::abs(x) > params.L / 2.0) throw Error(ErrorKind::BadArgument, "|x| must not exceed L/2");

  VertexFactor v;
  v.L = params.L;
  v.Na = cutoff_mode_count(params.L, params.a);
  v.x = x;
  v.t = t;
  v.eps = eps;
  v.winding[slot(r)] = q * r;
  v.charge_shift[slot(r)] = q;
  v.zero_mode[slot(r)] = -2.0 * pi * q * (r * x - params.vF * t) / params.L;
  v.zero_mode[slot(-r)] = -2.0 * pi * q * sol.couplings.gamma1 * params.vF * t / params.L;
  for (Flavor X : {Flavor::F, Flavor::P}) {
    ChannelCoefficients same;
    same.s = r;
    same.X = X;
    same.amp_low = q * r * sol.rho(X);
    same.amp_high = X == Flavor::F ? q * r : 0.0;
    same.v_low = sol.vtilde(X);
    same.v_high = sol.bare_velocity(X);
    ChannelCoefficients opposite = same;
    opposite.s = -r;
    opposite.amp_low = -q * r * sol.sigma(X);
    opposite.amp_high = 0.0;
    v.channels.push_back(same);
    v.channels.push_back(opposite);
  }
  v.prefactor = z_renorm(params, sol, eps).Z / std::sqrt(params.L);
  return v;
}

Contraction pair_contraction(const VertexFactor& v1, const VertexFactor& v2, const SumPolicy& policy) {
  Contraction out;
  if (v1.L != v2.L) throw Error(ErrorKind::BadArgument, "factors live on different system sizes");
  const double u = 2.0 * pi / v1.L;
  for (const auto& c1 : v1.channels) {
    const ChannelCoefficients* c2 = find_channel(v2, c1.s, c1.X);
    if (c2 == nullptr || c1.vanishes() || c2->vanishes()) continue;
    const int s = c1.s;

    if (c1.explicit_modes || c2->explicit_modes) {
      // Sum over the support of whichever side is listed explicitly.
      const bool right_listed = c2->explicit_modes.has_value();
      const auto& listed = right_listed ? *c2->explicit_modes : *c1.explicit_modes;
      for (const auto& [m, value] : listed) {
        const long long n = right_listed ? s * m : -s * m;
        if (n <= 0) continue;
        const Complex a1 = right_listed ? v1.coefficient(s, c1.X, -s * n) : value;
        const Complex a2 = right_listed ? value : v2.coefficient(s, c1.X, s * n);
        out.log_value -= u * (u * static_cast<double>(n)) * a1 * a2;
      }
      continue;
    }

    if (v1.Na != v2.Na) throw Error(ErrorKind::BadArgument, "factors use different interaction cutoffs");
    const double delta = (v1.eps + v2.eps) / 2.0 * u;
    const long long Na = v1.Na;
    const double low = c1.amp_low * c2->amp_low;
    if (low != 0.0) {
      const double theta = s * u * ((v1.x - s * c1.v_low * v1.t) - (v2.x - s * c2->v_low * v2.t));
      out.log_value -= low * log_series(1, Na, theta, delta);
    }
    const double high = c1.amp_high * c2->amp_high;
    if (high != 0.0) {
      if (!(delta > 0.0)) throw Error(ErrorKind::BadRegulator, "mode sums above the cutoff need eps > 0");
      long long last = std::max<long long>(Na, 1);
      while (std::abs(high) * log_series_tail(last, delta) > policy.tolerance) {
        if (last >= policy.max_modes) {
          throw Error(ErrorKind::TailTooLarge, "tolerance unreachable within " + std::to_string(policy.max_modes) +
                                                   " modes; increase eps or max_modes");
        }
        last = std::min(policy.max_modes, 2 * last);
      }
      // Shrink back to the smallest cutoff that still meets the tolerance.
      long long lo = std::max<long long>(Na, last / 2);
      long long hi = last;
      while (lo < hi) {
        const long long mid = lo + (hi - lo) / 2;
        if (std::abs(high) * log_series_tail(mid, delta) > policy.tolerance) {
          lo = mid + 1;
        } else {
          hi = mid;
        }
      }
      last = hi;
      const double theta = s * u * ((v1.x - s * c1.v_high * v1.t) - (v2.x - s * c2->v_high * v2.t));
      if (last > Na) out.log_value -= high * log_series(Na + 1, last, theta, delta);
      out.log_tail_bound += std::abs(high) * log_series_tail(last, delta);
    }
  }
  out.value = std::exp(out.log_value);
  return out;
}

NormalOrderedProduct normal_order_product(const std::vector<VertexFactor>& factors, const SumPolicy& policy) {
  if (factors.empty()) throw Error(ErrorKind::BadArgument, "normal_order_product needs at least one factor");
  NormalOrderedProduct out;
  out.factors = factors;
  Complex log_pairs{0.0, 0.0};
  for (std::size_t j = 0; j < factors.size(); ++j) {
    out.prefactor *= factors[j].prefactor;
    for (int c = 0; c < 2; ++c) {
      if (factors[j].winding[c] != 0) out.klein_word.emplace_back(c == 0 ? 1 : -1, factors[j].winding[c]);
    }
    for (std::size_t k = j + 1; k < factors.size(); ++k) {
      const Contraction c = pair_contraction(factors[j], factors[k], policy);
      log_pairs += c.log_value;
      out.log_tail_bound += c.log_tail_bound;
    }
  }
  out.prefactor *= std::exp(log_pairs);
  return out;
}

int klein_reorder_sign(const std::vector<std::pair<int, int>>& word) {
  int charge[2] = {0, 0};
  for (const auto& [r, w] : word) charge[slot(r)] += r * w;
  if (charge[0] != 0 || charge[1] != 0) return 0;
  // Bubble every R_+ power to the left of every R_- power; each exchange of
  // R_-^b R_+^a into R_+^a R_-^b costs (-1)^{ab}.
  std::vector<std::pair<int, int>> w = word;
  int sign = 1;
  for (std::size_t pass = 0; pass < w.size(); ++pass) {
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      if (w[i].first < 0 && w[i + 1].first > 0) {
        if ((w[i].second * w[i + 1].second) % 2 != 0) sign = -sign;
        std::swap(w[i], w[i + 1]);
      }
    }
  }
  return sign;
}

Complex vacuum_expectation(const NormalOrderedProduct& product) {
  const int sign = klein_reorder_sign(product.klein_word);
  if (sign == 0) return {0.0, 0.0};
  // Acting on the vacuum from the right, factor j sees the charges created by
  // all factors to its right; the symmetrized zero-mode exponential averages
  // the charge before and after its own Klein word.
  double phase = 0.0;
  std::array<int, 2> charge{0, 0};
  for (std::size_t j = product.factors.size(); j-- > 0;) {
    const VertexFactor& f = product.factors[j];
    for (int c = 0; c < 2; ++c) phase += f.zero_mode[c] * (charge[c] + 0.5 * f.charge_shift[c]);
    for (int c = 0; c < 2; ++c) charge[c] += f.charge_shift[c];
  }
  return static_cast<double>(sign) * product.prefactor * std::polar(1.0, phase);
}

ZRenorm z_renorm(const ModelParams& params, const BogoliubovSolution& sol, double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) throw Error(ErrorKind::BadRegulator, "eps must be non-negative");
  const double s2 = sol.sigma_F * sol.sigma_F + sol.sigma_P * sol.sigma_P;
  ZRenorm out;
  if (s2 == 0.0) return out;
  const long long Na = cutoff_mode_count(params.L, params.a);
  out.Z = std::exp(-s2 * regularized_harmonic(Na, params.L, eps));
  out.asymptote = std::pow(std::exp(euler_gamma) * params.L / (2.0 * params.a), -s2);
  return out;
}

FiniteResult finite_correlator(const CorrelatorSpec& spec, const BogoliubovSolution& sol, const SumPolicy& policy) {
  FiniteResult out;
  const auto& ins = spec.insertions;
  if (ins.empty()) {
    out.value = 1.0;
    return out;
  }
  std::vector<std::pair<int, int>> word;
  for (const auto& p : ins) word.emplace_back(p.r, p.q * p.r);
  if (klein_reorder_sign(word) == 0) return out;

  std::vector<VertexFactor> factors;
  factors.reserve(ins.size());
  for (const auto& p : ins) factors.push_back(field_vertex(p.r, p.q, p.x, p.t, spec.regulator, sol));
  const NormalOrderedProduct product = normal_order_product(factors, policy);
  out.value = vacuum_expectation(product);
  out.tail_bound = std::abs(out.value) * std::expm1(product.log_tail_bound);
  return out;
}

FiniteResult renormalized_correlator(const CorrelatorSpec& spec, const BogoliubovSolution& sol,
                                     const SumPolicy& policy) {
  FiniteResult out = finite_correlator(spec, sol, policy);
  const double s2 = sol.sigma_F * sol.sigma_F + sol.sigma_P * sol.sigma_P;
  const double Z = z_renorm(sol.params, sol, spec.regulator).Z;
  const double per_field = std::pow(2.0 * pi * spec.ell / sol.params.L, s2) / Z;
  const double factor = std::pow(per_field, static_cast<double>(spec.insertions.size()));
  out.value *= factor;
  out.tail_bound *= factor;
  return out;
}

}  // namespace fph
