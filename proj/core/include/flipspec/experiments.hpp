#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flipspec/multi_index.hpp"
#include "flipspec/precond.hpp"
#include "flipspec/spectral.hpp"
#include "flipspec/symbol.hpp"

namespace flipspec {

enum class ExperimentId { Ex1, Ex2, Ex3, Custom };
enum class PrecondId { None, ToepFr, P22, P2Beta, CircSum, AbsExact };

ExperimentId parse_experiment_id(const std::string& text);
PrecondId parse_precond_id(const std::string& text);
std::string to_string(ExperimentId id);
std::string to_string(PrecondId id);

struct ExperimentConfig {
  ExperimentId experiment = ExperimentId::Ex1;
  MultiIndex n{10, 10};
  double alpha = 1.8;
  double beta = 1.6;
  int M = 0;  // 0 means M = n_1
  PrecondId precond = PrecondId::None;
  bool shift = true;
  std::uint64_t seed = 12345;
  // Custom experiment only: "k1,k2:value;..." (empty means f = 1).
  std::string coefficients;

  // Throws ParameterError for invalid experiment/preconditioner combinations
  // or level counts.
  void validate() const;
  // Single-line key=value summary for output headers.
  std::string describe() const;
};

// Parses "0,0:4;1,0:1" into a table with `levels` levels.
CoefficientTable parse_coefficient_list(const std::string& text, std::size_t levels);

struct Experiment {
  ExperimentConfig config;
  Symbol f;
  std::optional<FractionalParams> fractional;  // ex2
  std::vector<Symbol> level_symbols;           // ex3: f_1, f_2, f_3

  // ex2: 2 h_x^alpha * ones; otherwise ones.
  std::vector<double> rhs() const;
};

Experiment make_experiment(const ExperimentConfig& config);

// nullptr for PrecondId::None.
std::unique_ptr<Preconditioner> make_preconditioner(const Experiment& experiment, PrecondId id);

// Y_n T_n(f) as a dense symmetric matrix.
Eigen::MatrixXd flipped_dense(const Symbol& f, const MultiIndex& n);

// P = |Y T| = Q |Lambda| Q^T: the exact SPD preconditioner of the flipped matrix.
std::unique_ptr<Preconditioner> absolute_value_preconditioner(const Symbol& f, const MultiIndex& n);

struct SpectrumResult {
  std::vector<double> eigenvalues;  // ascending
  LambdaSet lambda;                 // on Gamma, with h from the preconditioner
  std::vector<double> gaps;         // index-wise |eig - Lambda|
  double max_gap = 0.0;
  double mean_gap = 0.0;
};

// Eigenvalues of Y T (or of the whitened L^{-1} Y T L^{-T}) against Lambda.
SpectrumResult compute_spectrum(const Experiment& experiment, const Preconditioner* p);

// Fraction of values within delta of -1 or +1.
double cluster_fraction(const std::vector<double>& values, double delta);

// Rows of the iteration-count tables.
std::vector<int> table_sizes(ExperimentId id);
std::vector<PrecondId> table_preconditioners(ExperimentId id);

struct TableRow {
  std::size_t dimension;
  MultiIndex n;
  PrecondId precond;
  std::size_t iterations;
  bool converged;
  double relative_residual;
  double wall_seconds;
};

// One MINRES solve at size n for the given preconditioner; `config` supplies
// the experiment and its parameters (its n is replaced).
TableRow run_table_row(const ExperimentConfig& config, const MultiIndex& n, PrecondId precond);

}  // namespace flipspec
