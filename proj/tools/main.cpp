#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Exact-solution toolkit for the fermion-phonon model"};
  app.require_subcommand(1);
  fph::cli::Options options;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", options.config_path, "YAML configuration file");
    sub->add_option("--output", options.output, "write results to this file instead of standard output");
    sub->add_option("--format", options.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };

  CLI::App* solve = app.add_subcommand("solve", "closed-form Bogoliubov solution and exponents");
  add_common(solve);

  CLI::App* verify = app.add_subcommand("verify", "exact Fock-space identity suite");
  add_common(verify);
  verify->add_flag("--corrupt-signs", options.corrupt_signs, "test fixture: drop fermionic signs");

  CLI::App* spectrum = app.add_subcommand("spectrum", "eigenvalues below an excitation energy");
  add_common(spectrum);
  spectrum->add_option("--e-max", options.e_max, "maximal excitation energy above the ground state");

  CLI::App* correlate = app.add_subcommand("correlate", "correlation functions on a spacetime grid");
  add_common(correlate);
  correlate->add_option("--mode", options.mode, "finite or continuum")->check(CLI::IsMember({"finite", "continuum"}));
  correlate->add_option("--regulator", options.regulator, "i0+ stand-in (continuum) or eps (finite)");
  correlate->add_option("--ell", options.ell, "renormalization length");

  CLI::App* scan = app.add_subcommand("scan", "velocities and exponents over a coupling grid");
  add_common(scan);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fph::cli::InvalidInput;
  }
  options.command = app.get_subcommands().front()->get_name();
  return fph::cli::run(options, std::cout, std::cerr);
}
