#include "commands.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "fph/bogoliubov.hpp"
#include "fph/correlators.hpp"
#include "fph/errors.hpp"
#include "fph/fock.hpp"
#include "fph/vertex.hpp"
#include "json.hpp"

namespace fph::cli {

using nlohmann::ordered_json;

namespace {

std::string num(double x) { return fmt::format("{:.17g}", x); }

void require_format(const std::optional<std::string>& format) {
  if (format != "csv" && format != "json") throw Error(ErrorKind::ConfigError, "format must be csv or json");
}

}  // namespace

unsigned thread_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const BogoliubovSolution sol = solve_closed_form(cfg.model);
  const ExponentTable e = exponents(sol);
  if (cfg.format == "csv") {
    out << "key,value\n";
    const std::pair<const char*, double> rows[] = {
        {"gamma1", sol.couplings.gamma1}, {"gamma2", sol.couplings.gamma2},
        {"W", sol.couplings.W},           {"vtilde_f", sol.vtilde_F},
        {"vtilde_p", sol.vtilde_P},       {"rho_f", sol.rho_F},
        {"rho_p", sol.rho_P},             {"sigma_f", sol.sigma_F},
        {"sigma_p", sol.sigma_P},         {"E0", sol.E0},
        {"delta_cdw", e.delta_cdw},       {"delta_sc", e.delta_sc},
        {"fermion_dimension", e.fermion_dimension}};
    for (const auto& [k, v] : rows) out << k << ',' << num(v) << '\n';
    return Success;
  }
  ordered_json j;
  const ModelParams& p = sol.params;
  j["params"] = {{"v_f", p.vF}, {"v_p", p.vP}, {"lambda", p.lambda}, {"g", p.g},
                 {"a", p.a},    {"L", p.L},    {"omega0", p.zero_mode_frequency()}};
  j["couplings"] = {{"gamma1", sol.couplings.gamma1}, {"gamma2", sol.couplings.gamma2}, {"W", sol.couplings.W}};
  j["solution"] = {{"vtilde_f", sol.vtilde_F}, {"vtilde_p", sol.vtilde_P}, {"rho_f", sol.rho_F},
                   {"rho_p", sol.rho_P},       {"sigma_f", sol.sigma_F},   {"sigma_p", sol.sigma_P},
                   {"E0", sol.E0}};
  j["exponents"] = {{"delta_cdw", e.delta_cdw}, {"delta_sc", e.delta_sc}, {"fermion_dimension", e.fermion_dimension}};
  out << j.dump(2) << '\n';
  return Success;
}

// ---------------------------------------------------------------------------

namespace {

struct VerifyRow {
  std::string identity;
  std::string window;
  std::string residual;
  bool pass = false;
  std::optional<std::string> offender;
};

VerifyRow reconstruction_row(const FockSpace& space) {
  VerifyRow row{"RECONSTRUCTION", to_string(space.interior_window()), "0", true, std::nullopt};
  Rational worst = 0;
  for (int r : {1, -1}) {
    for (int k2 : space.grid().fermion_modes()) {
      for (std::size_t j : space.states_up_to(space.interior_window())) {
        const StateVector diff = reconstructed_field(space, r, k2, j) -
                                 apply_field(space, r, k2, false, StateVector(space.state(j)));
        const auto [value, where] = diff.max_abs();
        if (value > worst) {
          worst = value;
          row.offender = fmt::format("r={} k2={} on {} -> {}", r, k2, space.state(j).describe(), where.describe());
        }
      }
    }
  }
  row.residual = to_string(worst);
  row.pass = worst == Rational(0);
  return row;
}

VerifyRow boson_row(const FockSpace& space) {
  VerifyRow row{"BOSON_CCR", to_string(space.interior_window()), "0", true, std::nullopt};
  Rational worst = 0;
  const int K = space.K();
  for (int m1 = -K; m1 <= K; ++m1) {
    for (int m2 = -K; m2 <= K; ++m2) {
      if (m1 == 0 || m2 == 0) continue;
      const Rational r = boson_commutator_residual(space, m1, m2, space.interior_window());
      if (r > worst) {
        worst = r;
        row.offender = fmt::format("[b({}), b^dag({})]", m1, m2);
      }
    }
  }
  row.residual = to_string(worst);
  row.pass = worst == Rational(0);
  return row;
}

VerifyRow degeneracy_row(const FockSpace& space) {
  const Rational e_max(space.K());
  VerifyRow row{"DEGENERACY", to_string(e_max), "0", true, std::nullopt};
  long long mismatched = 0;
  for (const auto& [energy, counts] : degeneracy_counts(space, e_max)) {
    if (counts.first != counts.second) {
      ++mismatched;
      if (!row.offender) {
        row.offender = fmt::format("E={}: dim_F={} dim_B={}", to_string(energy), counts.first, counts.second);
      }
    }
  }
  row.residual = std::to_string(mismatched);
  row.pass = mismatched == 0;
  return row;
}

VerifyRow jacobi_row() {
  const JacobiReport rep = jacobi_check(0.5, 60);
  return {"JACOBI", "z=0.5 order=60", num(rep.residual), rep.pass(), std::nullopt};
}

}  // namespace

int cmd_verify(const RunConfig& cfg, bool corrupt_signs, std::ostream& out, std::ostream& err) {
  if (cfg.K < 1 || cfg.K > 5) throw Error(ErrorKind::BadArgument, "verify needs 1 <= K <= 5");
  const double L = cfg.model.L;
  const MomentumGrid grid = momentum_grid(L, cfg.K, L / 2.0);
  const FockSpace space = build_space(grid, corrupt_signs ? SignConvention::Ignored : SignConvention::Ordered);

  const auto& ids = all_identities();
  std::vector<VerifyRow> rows(ids.size() + 4);
  parallel_for(rows.size(), [&](std::size_t i) {
    if (i < ids.size()) {
      const IdentityReport rep = identity_residual(space, ids[i]);
      rows[i] = {to_string(ids[i]), to_string(rep.window), to_string(rep.residual), rep.pass(), rep.offender};
    } else if (i == ids.size()) {
      rows[i] = boson_row(space);
    } else if (i == ids.size() + 1) {
      rows[i] = degeneracy_row(space);
    } else if (i == ids.size() + 2) {
      rows[i] = jacobi_row();
    } else {
      rows[i] = reconstruction_row(space);
    }
  });

  bool all_pass = true;
  for (const auto& row : rows) {
    all_pass = all_pass && row.pass;
    if (!row.pass) {
      err << "verification failed: " << row.identity << " residual " << row.residual;
      if (row.offender) err << " at " << *row.offender;
      err << '\n';
    }
  }
  if (cfg.format == "csv") {
    out << "identity,K,L,window,residual,pass,offender\n";
    for (const auto& row : rows) {
      out << row.identity << ',' << cfg.K << ',' << num(L) << ",\"" << row.window << "\",\"" << row.residual << "\","
          << (row.pass ? "true" : "false") << ",\"" << row.offender.value_or("") << "\"\n";
    }
  } else {
    ordered_json list = ordered_json::array();
    for (const auto& row : rows) {
      ordered_json j = {{"identity", row.identity}, {"K", cfg.K},   {"L", L}, {"window", row.window},
                        {"residual", row.residual}, {"pass", row.pass}};
      if (row.offender) j["offender"] = *row.offender;
      list.push_back(j);
    }
    out << list.dump(2) << '\n';
  }
  return all_pass ? Success : VerificationFailed;
}

// ---------------------------------------------------------------------------

int cmd_spectrum(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (!cfg.e_max) throw Error(ErrorKind::ConfigError, "spectrum needs --e-max or spectrum.e_max");
  const BogoliubovSolution sol = solve_closed_form(cfg.model);
  const MomentumGrid grid = momentum_grid(cfg.model.L, cfg.K, cfg.model.a);
  const auto entries = spectrum(cfg.model, sol, *cfg.e_max, grid);
  auto occupation_label = [](const SpectrumEntry& e) {
    std::string s;
    for (const auto& [mode, n] : e.occupations) {
      if (!s.empty()) s += ';';
      s += fmt::format("{}{}:{}", mode.first == Flavor::F ? 'F' : 'P', mode.second, n);
    }
    return s;
  };
  if (cfg.format == "json") {
    ordered_json list = ordered_json::array();
    for (const auto& e : entries) {
      list.push_back({{"q_plus", e.q_plus},
                      {"q_minus", e.q_minus},
                      {"m_p0", e.phonon_zero_mode},
                      {"occupations", occupation_label(e)},
                      {"energy", e.energy},
                      {"excitation", e.energy - sol.E0},
                      {"degeneracy", e.degeneracy}});
    }
    out << list.dump(2) << '\n';
    return Success;
  }
  out << "q_plus,q_minus,m_p0,occupations,energy,excitation,degeneracy\n";
  for (const auto& e : entries) {
    out << e.q_plus << ',' << e.q_minus << ',' << e.phonon_zero_mode << ",\"" << occupation_label(e) << "\","
        << num(e.energy) << ',' << num(e.energy - sol.E0) << ',' << e.degeneracy << '\n';
  }
  return Success;
}

// ---------------------------------------------------------------------------

int cmd_correlate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto& corr = cfg.correlator;
  if (corr.mode != "continuum" && corr.mode != "finite") {
    throw Error(ErrorKind::ConfigError, "mode must be finite or continuum");
  }
  if (!(corr.spec.ell > 0.0)) throw Error(ErrorKind::ConfigError, "ell must be positive");
  if (!(corr.spec.regulator > 0.0)) throw Error(ErrorKind::BadRegulator, "regulator must be positive");
  const BogoliubovSolution sol = solve_closed_form(cfg.model);

  const std::vector<double> xs = corr.sweep.x.values();
  const std::vector<double> ts =
      corr.sweep.t ? corr.sweep.t->values()
                   : std::vector<double>{corr.spec.insertions.empty() ? 0.0 : corr.spec.insertions[corr.sweep.index].t};
  struct Row {
    double x, t;
    Complex value;
  };
  std::vector<Row> rows(ts.size() * xs.size());
  const bool selected = klein_sign(klein_word(corr.spec)) != 0;
  if (!selected) err << "warning: insertions violate charge selection; the correlator vanishes identically\n";

  parallel_for(rows.size(), [&](std::size_t i) {
    Row& row = rows[i];
    row.t = ts[i / xs.size()];
    row.x = xs[i % xs.size()];
    if (!selected) return;
    CorrelatorSpec spec = corr.spec;
    spec.insertions[corr.sweep.index].x = row.x;
    spec.insertions[corr.sweep.index].t = row.t;
    row.value = corr.mode == "continuum" ? npoint_continuum(spec, sol) : finite_correlator(spec, sol).value;
  });

  if (cfg.format == "json") {
    ordered_json list = ordered_json::array();
    for (const auto& r : rows) {
      list.push_back({{"x", r.x}, {"t", r.t}, {"re", r.value.real()}, {"im", r.value.imag()}, {"abs", std::abs(r.value)}});
    }
    out << list.dump(2) << '\n';
    return Success;
  }
  out << "x,t,re,im,abs\n";
  for (const auto& r : rows) {
    out << num(r.x) << ',' << num(r.t) << ',' << num(r.value.real()) << ',' << num(r.value.imag()) << ','
        << num(std::abs(r.value)) << '\n';
  }
  return Success;
}

// ---------------------------------------------------------------------------

int cmd_scan(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const std::vector<double> firsts = cfg.scan.first.values();
  const std::vector<double> seconds = cfg.scan.second.values();
  struct Row {
    double lambda = 0, g = 0, gamma1 = 0, gamma2 = 0;
    double vtilde_f = 0, vtilde_p = 0, delta_cdw = 0, delta_sc = 0;
    bool stable = false;
    std::string reason;
  };
  const ModelParams base = cfg.model;
  std::vector<Row> rows(firsts.size() * seconds.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    Row& row = rows[i];
    ModelParams p = base;
    const double first = firsts[i / seconds.size()];
    const double second = seconds[i % seconds.size()];
    p.lambda = cfg.scan.first_is_gamma ? first * 2.0 * pi * p.vF : first;
    p.g = cfg.scan.second_is_gamma ? second * p.vP * std::sqrt(pi * p.vF) : second;
    row.lambda = p.lambda;
    row.g = p.g;
    const DerivedCouplings d = derived_couplings(p);
    row.gamma1 = cfg.scan.first_is_gamma ? first : d.gamma1;
    row.gamma2 = cfg.scan.second_is_gamma ? second : d.gamma2;
    try {
      const BogoliubovSolution sol = solve_closed_form(p);
      const ExponentTable e = exponents(sol);
      row.vtilde_f = sol.vtilde_F;
      row.vtilde_p = sol.vtilde_P;
      row.delta_cdw = e.delta_cdw;
      row.delta_sc = e.delta_sc;
      row.stable = true;
    } catch (const Error& e) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.vtilde_f = row.vtilde_p = row.delta_cdw = row.delta_sc = nan;
      row.reason = to_string(e.kind());
    }
  });

  if (cfg.format == "json") {
    ordered_json list = ordered_json::array();
    for (const auto& r : rows) {
      ordered_json j = {{"lambda", r.lambda}, {"g", r.g}, {"gamma1", r.gamma1}, {"gamma2", r.gamma2}, {"stable", r.stable}};
      if (r.stable) {
        j["vtilde_f"] = r.vtilde_f;
        j["vtilde_p"] = r.vtilde_p;
        j["delta_cdw"] = r.delta_cdw;
        j["delta_sc"] = r.delta_sc;
      } else {
        j["reason"] = r.reason;
      }
      list.push_back(j);
    }
    out << list.dump(2) << '\n';
    return Success;
  }
  out << "lambda,g,gamma1,gamma2,vtilde_f,vtilde_p,delta_cdw,delta_sc,stable\n";
  for (const auto& r : rows) {
    out << num(r.lambda) << ',' << num(r.g) << ',' << num(r.gamma1) << ',' << num(r.gamma2) << ',' << num(r.vtilde_f)
        << ',' << num(r.vtilde_p) << ',' << num(r.delta_cdw) << ',' << num(r.delta_sc) << ',' << (r.stable ? 1 : 0)
        << '\n';
  }
  return Success;
}

// ---------------------------------------------------------------------------

int run(const Options& options, std::ostream& out, std::ostream& err) {
  try {
    RunConfig cfg = options.config_path ? load_config(*options.config_path) : parse_config("{}");
    if (options.format) cfg.format = options.format;
    if (!cfg.format) cfg.format = (options.command == "solve" || options.command == "verify") ? "json" : "csv";
    if (options.output) cfg.output = options.output;
    if (options.e_max) cfg.e_max = options.e_max;
    if (options.mode) cfg.correlator.mode = *options.mode;
    if (options.regulator) cfg.correlator.spec.regulator = *options.regulator;
    if (options.ell) cfg.correlator.spec.ell = *options.ell;
    require_format(cfg.format);

    std::ostringstream buffer;
    int code = InvalidInput;
    if (options.command == "solve") {
      code = cmd_solve(cfg, buffer, err);
    } else if (options.command == "verify") {
      code = cmd_verify(cfg, options.corrupt_signs, buffer, err);
    } else if (options.command == "spectrum") {
      code = cmd_spectrum(cfg, buffer, err);
    } else if (options.command == "correlate") {
      code = cmd_correlate(cfg, buffer, err);
    } else if (options.command == "scan") {
      code = cmd_scan(cfg, buffer, err);
    } else {
      err << "unknown command '" << options.command << "'\n";
      return InvalidInput;
    }

    if (cfg.output) {
      std::ofstream file(*cfg.output, std::ios::binary);
      if (!file || !(file << buffer.str())) {
        err << "cannot write " << *cfg.output << '\n';
        return InvalidInput;
      }
    } else {
      out << buffer.str();
    }
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return InvalidInput;
  }
}

}  // namespace fph::cli
