#include "flipspec/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "flipspec/errors.hpp"
#include "flipspec/krylov.hpp"
#include "flipspec/operators.hpp"

namespace flipspec {

namespace {

std::size_t required_levels(ExperimentId id) {
  switch (id) {
    case ExperimentId::Ex1:
    case ExperimentId::Ex2: return 2;
    case ExperimentId::Ex3: return 3;
    case ExperimentId::Custom: return 0;
  }
  return 0;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(item);
  return parts;
}

}  // namespace

ExperimentId parse_experiment_id(const std::string& text) {
  if (text == "ex1") return ExperimentId::Ex1;
  if (text == "ex2") return ExperimentId::Ex2;
  if (text == "ex3") return ExperimentId::Ex3;
  if (text == "custom") return ExperimentId::Custom;
  throw ParameterError("unknown experiment '" + text + "' (ex1|ex2|ex3|custom)");
}

PrecondId parse_precond_id(const std::string& text) {
  if (text == "none") return PrecondId::None;
  if (text == "toepfr") return PrecondId::ToepFr;
  if (text == "p22") return PrecondId::P22;
  if (text == "p2beta") return PrecondId::P2Beta;
  if (text == "circsum") return PrecondId::CircSum;
  if (text == "abs_exact") return PrecondId::AbsExact;
  throw ParameterError("unknown preconditioner '" + text +
                       "' (none|toepfr|p22|p2beta|circsum|abs_exact)");
}

std::string to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::Ex1: return "ex1";
    case ExperimentId::Ex2: return "ex2";
    case ExperimentId::Ex3: return "ex3";
    case ExperimentId::Custom: return "custom";
  }
  return "?";
}

std::string to_string(PrecondId id) {
  switch (id) {
    case PrecondId::None: return "none";
    case PrecondId::ToepFr: return "toepfr";
    case PrecondId::P22: return "p22";
    case PrecondId::P2Beta: return "p2beta";
    case PrecondId::CircSum: return "circsum";
    case PrecondId::AbsExact: return "abs_exact";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  const std::size_t want = required_levels(experiment);
  if (want != 0 && n.levels() != want) {
    throw ParameterError(to_string(experiment) + " needs " + std::to_string(want) +
                         " levels, got n = " + n.to_string());
  }
  if ((precond == PrecondId::P22 || precond == PrecondId::P2Beta) &&
      experiment != ExperimentId::Ex2) {
    throw ParameterError(to_string(precond) + " is only defined for ex2");
  }
  if (precond == PrecondId::CircSum && experiment != ExperimentId::Ex3) {
    throw ParameterError("circsum is only defined for ex3");
  }
  if (M < 0) throw ParameterError("M must be >= 0");
  if (experiment != ExperimentId::Custom && !coefficients.empty()) {
    throw ParameterError("coefficients are only accepted by the custom experiment");
  }
}

std::string ExperimentConfig::describe() const {
  std::ostringstream out;
  out << "exp=" << to_string(experiment) << " n=" << n.to_string();
  if (experiment == ExperimentId::Ex2) {
    out << " alpha=" << alpha << " beta=" << beta << " M=";
    if (M > 0) {
      out << M;
    } else {
      out << "n1";
    }
    out << " shift=" << (shift ? "on" : "off");
  }
  if (experiment == ExperimentId::Custom) {
    out << " coeffs=" << (coefficients.empty() ? "0:1" : coefficients);
  }
  out << " precond=" << to_string(precond) << " seed=" << seed;
  return out.str();
}

CoefficientTable parse_coefficient_list(const std::string& text, std::size_t levels) {
  CoefficientTable table(levels);
  for (const std::string& term : split(text, ';')) {
    if (term.empty()) continue;
    const auto colon = term.find(':');
    if (colon == std::string::npos) {
      throw ParameterError("coefficient term '" + term + "' needs the form k1,...,kd:value");
    }
    std::vector<int> k;
    for (const std::string& part : split(term.substr(0, colon), ',')) {
      try {
        k.push_back(std::stoi(part));
      } catch (const std::exception&) {
        throw ParameterError("bad coefficient index in '" + term + "'");
      }
    }
    if (k.size() != levels) {
      throw ParameterError("coefficient '" + term + "' has " + std::to_string(k.size()) +
                           " indices, expected " + std::to_string(levels));
    }
    double value;
    try {
      value = std::stod(term.substr(colon + 1));
    } catch (const std::exception&) {
      throw ParameterError("bad coefficient value in '" + term + "'");
    }
    table.add(std::move(k), value);
  }
  return table;
}

std::vector<double> Experiment::rhs() const {
  const std::size_t n = config.n.total();
  if (fractional) return std::vector<double>(n, 2.0 * std::pow(fractional->hx(), fractional->alpha));
  return std::vector<double>(n, 1.0);
}

Experiment make_experiment(const ExperimentConfig& config) {
  config.validate();
  const MultiIndex& n = config.n;
  switch (config.experiment) {
    case ExperimentId::Ex1:
      return {config, ex1_symbol(), std::nullopt, {}};
    case ExperimentId::Ex2: {
      FractionalParams params{config.alpha, config.beta, n[0], n[1], config.M, config.shift};
      params.validate();
      return {config, fractional_symbol(params), params, {}};
    }
    case ExperimentId::Ex3: {
      auto parts = convection_diffusion_level_symbols(n[0], n[1], n[2]);
      return {config, convection_diffusion_symbol(n[0], n[1], n[2]), std::nullopt,
              {parts.begin(), parts.end()}};
    }
    case ExperimentId::Custom: {
      CoefficientTable table(n.levels());
      if (config.coefficients.empty()) {
        table.set(std::vector<int>(n.levels(), 0), 1.0);
      } else {
        table = parse_coefficient_list(config.coefficients, n.levels());
      }
      return {config, Symbol::from_coefficients(std::move(table), "custom"), std::nullopt, {}};
    }
  }
  throw ParameterError("unknown experiment");
}

Eigen::MatrixXd flipped_dense(const Symbol& f, const MultiIndex& n) {
  // Y_n reverses the flattened index, so Y T is T with its rows reversed.
  return ToeplitzOperator(f, n).assemble_dense().colwise().reverse();
}

std::unique_ptr<Preconditioner> absolute_value_preconditioner(const Symbol& f, const MultiIndex& n) {
  const SymmetricEigen eig = sym_eigendecomposition(flipped_dense(f, n));
  const Eigen::MatrixXd p =
      eig.vectors * eig.values.cwiseAbs().asDiagonal() * eig.vectors.transpose();
  return std::make_unique<DensePreconditioner>(0.5 * (p + p.transpose()), "abs_exact");
}

std::unique_ptr<Preconditioner> make_preconditioner(const Experiment& experiment, PrecondId id) {
  ExperimentConfig check = experiment.config;
  check.precond = id;
  check.validate();
  const MultiIndex& n = experiment.config.n;
  switch (id) {
    case PrecondId::None: return nullptr;
    case PrecondId::ToepFr: return build_toeplitz_fr(experiment.f, n);
    case PrecondId::P22: return build_p22(*experiment.fractional);
    case PrecondId::P2Beta: return build_p2beta(*experiment.fractional);
    case PrecondId::CircSum: return build_circulant_kron_sum(experiment.level_symbols, n);
    case PrecondId::AbsExact: return absolute_value_preconditioner(experiment.f, n);
  }
  return nullptr;
}

SpectrumResult compute_spectrum(const Experiment& experiment, const Preconditioner* p) {
  const MultiIndex& n = experiment.config.n;
  Eigen::MatrixXd s = flipped_dense(experiment.f, n);
  if (p != nullptr) s = p->whiten(s);
  SpectrumResult out;
  out.eigenvalues = sym_eigenvalues(s);
  out.lambda = build_lambda(experiment.f, p != nullptr ? p->symbol() : nullptr, build_gamma(n));
  out.gaps = index_gaps(out.eigenvalues, out.lambda.values());
  if (!out.gaps.empty()) {
    out.max_gap = *std::max_element(out.gaps.begin(), out.gaps.end());
    out.mean_gap = std::accumulate(out.gaps.begin(), out.gaps.end(), 0.0) /
                   static_cast<double>(out.gaps.size());
  }
  return out;
}

double cluster_fraction(const std::vector<double>& values, double delta) {
  if (values.empty()) return 0.0;
  const auto hits = std::count_if(values.begin(), values.end(), [delta](double v) {
    return std::abs(v - 1.0) <= delta || std::abs(v + 1.0) <= delta;
  });
  return static_cast<double>(hits) / static_cast<double>(values.size());
}

std::vector<int> table_sizes(ExperimentId id) {
  switch (id) {
    case ExperimentId::Ex2: return {10, 20, 40, 80};
    case ExperimentId::Ex3: return {5, 10, 20};
    default: throw ParameterError("tables exist for ex2 and ex3 only");
  }
}

std::vector<PrecondId> table_preconditioners(ExperimentId id) {
  switch (id) {
    case ExperimentId::Ex2: return {PrecondId::ToepFr, PrecondId::P22, PrecondId::P2Beta};
    case ExperimentId::Ex3: return {PrecondId::ToepFr, PrecondId::CircSum};
    default: throw ParameterError("tables exist for ex2 and ex3 only");
  }
}

TableRow run_table_row(const ExperimentConfig& config, const MultiIndex& n, PrecondId precond) {
  ExperimentConfig row_config = config;
  row_config.n = n;
  row_config.precond = precond;
  const Experiment experiment = make_experiment(row_config);
  const auto p = make_preconditioner(experiment, precond);
  SolveConfig solve;
  solve.seed = config.seed;
  solve.record_residuals = false;
  const auto b = experiment.rhs();
  const SolveResult result = flipped_solve(experiment.f, n, b, p.get(), solve);
  return {n.total(), n, precond, result.iterations, result.converged,
          result.final_relative_residual, result.wall_seconds};
}

}  // namespace flipspec
