#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "cli.hpp"
#include "flipspec/errors.hpp"
#include "flipspec/matrix_io.hpp"
#include "flipspec/parallel.hpp"
#include "verify.hpp"

namespace flipspec::cli {

namespace {

std::ofstream open_output(const Options& options, const std::string& file,
                          std::ios::openmode mode = std::ios::out) {
  std::filesystem::create_directories(options.out_dir);
  const auto path = std::filesystem::path(options.out_dir) / file;
  std::ofstream stream(path, mode);
  if (!stream) throw Error("cannot open " + path.string() + " for writing");
  stream.precision(17);
  return stream;
}

Eigen::MatrixXd spectrum_matrix(const Experiment& e, const Preconditioner* p) {
  Eigen::MatrixXd s = flipped_dense(e.f, e.config.n);
  return p != nullptr ? p->whiten(s) : s;
}

}  // namespace

std::string header_line(const std::string& command, const Options& options) {
  std::ostringstream out;
  out << "# flipspec " << FLIPSPEC_VERSION << ' ' << command << ' ';
  if (command == "verify") {
    out << "suite=" << options.suite;
  } else if (command == "table") {
    ExperimentConfig c = options.config;
    std::string d = c.describe();
    // Rows carry their own sizes; drop the unused n from the summary.
    const auto pos = d.find(" n=");
    if (pos != std::string::npos) d.erase(pos, d.find(' ', pos + 1) - pos);
    out << d;
  } else {
    out << options.config.describe();
  }
  if (!options.sizes.empty()) {
    out << " sizes=";
    for (std::size_t i = 0; i < options.sizes.size(); ++i) out << (i ? "," : "") << options.sizes[i];
  }
  return out.str();
}

int cmd_spectrum(const Options& options, std::ostream& out) {
  const Experiment e = make_experiment(options.config);
  const auto p = make_preconditioner(e, options.config.precond);
  const SpectrumResult s = compute_spectrum(e, p.get());
  const std::string header = header_line("spectrum", options);

  auto eigs = open_output(options, "eigs.csv");
  eigs << header << "\nindex,eigenvalue\n";
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) eigs << i << ',' << s.eigenvalues[i] << '\n';

  auto lambda = open_output(options, "lambda.csv");
  lambda << header << "\nindex,value,branch";
  for (std::size_t l = 0; l < s.lambda.grid.levels(); ++l) lambda << ",theta_" << (l + 1);
  lambda << '\n';
  for (std::size_t i = 0; i < s.lambda.entries.size(); ++i) {
    const auto& entry = s.lambda.entries[i];
    lambda << i << ',' << entry.value << ',' << static_cast<int>(entry.branch);
    for (double t : s.lambda.grid.point(entry.point)) lambda << ',' << t;
    lambda << '\n';
  }

  const auto picked = resample_by_rank(s.lambda.values(), s.eigenvalues.size());
  auto overlay = open_output(options, "overlay.csv");
  overlay << header << "\nindex,eig,lambda,gap\n";
  for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
    overlay << i << ',' << s.eigenvalues[i] << ',' << picked[i] << ',' << s.gaps[i] << '\n';
  }

  if (!options.export_matrix.empty()) {
    const Eigen::MatrixXd m = flipped_dense(e.f, e.config.n);
    if (options.export_matrix == "bin") {
      auto bin = open_output(options, "matrix.bin", std::ios::out | std::ios::binary);
      write_matrix_binary(bin, m, e.config.n, kMatrixFlagSymmetric);
    } else {
      auto csv = open_output(options, "matrix.csv");
      write_matrix_csv(csv, m);
    }
  }

  out << "eigenvalues " << s.eigenvalues.size() << ", lambda " << s.lambda.size()
      << ", max gap " << s.max_gap << ", mean gap " << s.mean_gap << '\n';
  return 0;
}

int cmd_match(const Options& options, std::ostream& out) {
  if (options.config.n.levels() != 2) {
    throw ParameterError("match is defined for 2-level problems only (Delta is 2-D)");
  }
  const Experiment e = make_experiment(options.config);
  const auto p = make_preconditioner(e, options.config.precond);
  const auto eigs = sym_eigenvalues(spectrum_matrix(e, p.get()));
  const LambdaSet lambda =
      build_lambda(e.f, p != nullptr ? p->symbol() : nullptr, build_delta(e.config.n));
  const auto matches = match_eigenvalues(eigs, lambda);
  const std::string header = header_line("match", options);

  auto surface = open_output(options, "surface.csv");
  surface << header << "\ntheta_1,theta_2,branch,eigenvalue,symbol_value\n";
  double total = 0.0;
  for (const auto& m : matches) {
    const auto theta = lambda.grid.point(m.point);
    surface << theta[0] << ',' << theta[1] << ',' << static_cast<int>(m.branch) << ','
            << m.eigenvalue << ',' << m.matched_value << '\n';
    total += m.distance;
  }
  auto report = open_output(options, "report.csv");
  report << header << '\n';
  write_spectral_report_csv(report, matches, lambda);

  out << "matched " << matches.size() << " eigenvalues, mean distance "
      << (matches.empty() ? 0.0 : total / static_cast<double>(matches.size())) << '\n';
  return 0;
}

int cmd_table(const Options& options, std::ostream& out) {
  const ExperimentId id = options.config.experiment;
  if (id != ExperimentId::Ex2 && id != ExperimentId::Ex3) {
    throw ParameterError("table is defined for ex2 and ex3");
  }
  const std::size_t levels = id == ExperimentId::Ex2 ? 2 : 3;
  std::vector<int> sizes = options.sizes.empty() ? table_sizes(id) : options.sizes;
  std::vector<PrecondId> preconds = table_preconditioners(id);
  if (options.config.precond != PrecondId::None) preconds = {options.config.precond};

  struct Job {
    MultiIndex n;
    PrecondId precond;
  };
  std::vector<Job> jobs;
  for (int s : sizes) {
    for (PrecondId p : preconds) jobs.push_back({MultiIndex(std::vector<int>(levels, s)), p});
  }
  if (options.diagnostic) {
    const int smallest = *std::min_element(sizes.begin(), sizes.end());
    jobs.push_back({MultiIndex(std::vector<int>(levels, smallest)), PrecondId::AbsExact});
  }

  ExperimentConfig base = options.config;
  base.n = jobs.front().n;
  std::vector<std::optional<TableRow>> rows(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) rows[i] = run_table_row(base, jobs[i].n, jobs[i].precond);
  });

  auto table = open_output(options, "table.csv");
  table << header_line("table", options) << "\nd_n,preconditioner,iterations,converged,wall_time\n";
  for (const auto& row : rows) {
    table << row->dimension << ',' << to_string(row->precond) << ',' << row->iterations << ','
          << (row->converged ? 1 : 0) << ',' << std::fixed << std::setprecision(3)
          << row->wall_seconds << std::defaultfloat << std::setprecision(17) << '\n';
  }

  out << std::left << std::setw(10) << "d_n";
  for (PrecondId p : preconds) out << std::setw(10) << to_string(p);
  out << '\n';
  for (std::size_t i = 0; i < rows.size(); i += preconds.size()) {
    if (rows[i]->precond == PrecondId::AbsExact) {
      out << std::setw(10) << rows[i]->dimension << "abs_exact " << rows[i]->iterations << '\n';
      continue;
    }
    out << std::setw(10) << rows[i]->dimension;
    for (std::size_t j = 0; j < preconds.size(); ++j) {
      const auto& row = *rows[i + j];
      out << std::setw(10) << (std::to_string(row.iterations) + (row.converged ? "" : "*"));
    }
    out << '\n';
  }
  return 0;
}

int cmd_verify(const Options& options, std::ostream& out) {
  std::vector<std::string> suites;
  if (options.suite == "all") {
    suites = suite_names();
  } else {
    const auto& known = suite_names();
    if (std::find(known.begin(), known.end(), options.suite) == known.end()) {
      throw ParameterError("unknown suite '" + options.suite + "'");
    }
    suites = {options.suite};
  }
  std::vector<std::vector<Check>> results(suites.size());
  parallel_for(suites.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      results[i] = run_suite(suites[i], options.sizes, options.config.seed);
    }
  });

  auto report = open_output(options, "verify.csv");
  report << header_line("verify", options) << "\nsuite,check,status,value,threshold,detail\n";
  std::size_t failures = 0;
  for (const auto& suite : results) {
    for (const auto& c : suite) {
      const char* status = c.pass ? "PASS" : "FAIL";
      failures += c.pass ? 0 : 1;
      out << status << ' ' << c.suite << '/' << c.name << " value=" << c.value;
      if (!std::isnan(c.threshold)) out << " threshold=" << c.threshold;
      if (!c.detail.empty()) out << " (" << c.detail << ')';
      out << '\n';
      report << c.suite << ',' << c.name << ',' << status << ',' << c.value << ',';
      if (!std::isnan(c.threshold)) report << c.threshold;
      report << ",\"" << c.detail << "\"\n";
    }
  }
  out << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed")
      << '\n';
  return failures == 0 ? 0 : 2;
}

}  // namespace flipspec::cli
