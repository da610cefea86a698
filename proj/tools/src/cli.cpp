#include "cli.hpp"

#include <CLI11.hpp>
#include <ostream>

#include "flipspec/errors.hpp"

namespace flipspec::cli {

namespace {

MultiIndex default_sizes(ExperimentId id) {
  switch (id) {
    case ExperimentId::Ex1:
    case ExperimentId::Ex2: return MultiIndex({10, 10});
    case ExperimentId::Ex3: return MultiIndex({5, 5, 5});
    case ExperimentId::Custom: return MultiIndex({4, 4});
  }
  return MultiIndex({10, 10});
}

struct RawOptions {
  std::string exp = "ex1";
  std::string n;
  std::string precond = "none";
  std::string shift = "on";
};

void add_experiment_options(CLI::App* sub, Options& opt, RawOptions& raw) {
  sub->add_option("--exp", raw.exp, "Experiment: ex1 | ex2 | ex3 | custom")
      ->check(CLI::IsMember({"ex1", "ex2", "ex3", "custom"}));
  sub->add_option("--n", raw.n, "Sizes n1,n2[,n3]");
  sub->add_option("--alpha", opt.config.alpha, "Fractional order in x (ex2)");
  sub->add_option("--beta", opt.config.beta, "Fractional order in y (ex2)");
  sub->add_option("--M", opt.config.M, "Time steps (ex2); 0 means M = n1");
  sub->add_option("--precond", raw.precond,
                  "Preconditioner: none | toepfr | p22 | p2beta | circsum | abs_exact")
      ->check(CLI::IsMember({"none", "toepfr", "p22", "p2beta", "circsum", "abs_exact"}));
  sub->add_option("--shift", raw.shift, "Identity shift 2 h_x^alpha / dt (ex2)")
      ->check(CLI::IsMember({"on", "off"}));
  sub->add_option("--coeffs", opt.config.coefficients,
                  "Custom symbol coefficients, e.g. \"0,0:4;1,0:1;0,1:1\"");
  sub->add_option("--out", opt.out_dir, "Output directory");
  sub->add_option("--seed", opt.config.seed, "Seed for random probes");
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"flipspec: spectra of flipped multilevel Toeplitz matrices and MINRES tables"};
  app.set_version_flag("--version", std::string(FLIPSPEC_VERSION));
  app.require_subcommand(1);

  Options opt;
  RawOptions raw;

  auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues of Y T (or P^-1 Y T) against Lambda");
  add_experiment_options(spectrum, opt, raw);
  spectrum->add_option("--export-matrix", opt.export_matrix, "Also write Y T as bin or csv")
      ->check(CLI::IsMember({"bin", "csv"}));

  auto* match = app.add_subcommand("match", "Match eigenvalues to the symbol on the Delta grid");
  add_experiment_options(match, opt, raw);

  auto* table = app.add_subcommand("table", "Preconditioned MINRES iteration counts");
  add_experiment_options(table, opt, raw);
  table->add_option("--sizes", opt.sizes, "Per-level sizes of the rows, e.g. 10,20,40")
      ->delimiter(',');
  table->add_flag("--diagnostic", opt.diagnostic,
                  "Add an exact-preconditioner row at the smallest size");

  auto* verify = app.add_subcommand("verify", "Run the invariant suites");
  add_experiment_options(verify, opt, raw);
  verify->add_option("--suite", opt.suite, "all | operators | prop31 | hankel | odd | "
                                           "discrepancy | overlay | precond | cluster");
  verify->add_option("--sizes", opt.sizes, "Sizes for prop31 / hankel, e.g. 8,16")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    opt.config.experiment = parse_experiment_id(raw.exp);
    opt.config.precond = parse_precond_id(raw.precond);
    opt.config.shift = raw.shift == "on";
    opt.config.n = raw.n.empty() ? default_sizes(opt.config.experiment) : parse_multi_index(raw.n);
    if (spectrum->parsed()) return cmd_spectrum(opt, out);
    if (match->parsed()) return cmd_match(opt, out);
    if (table->parsed()) return cmd_table(opt, out);
    if (verify->parsed()) return cmd_verify(opt, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace flipspec::cli
