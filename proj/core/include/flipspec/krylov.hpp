#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "flipspec/operators.hpp"
#include "flipspec/precond.hpp"

namespace flipspec {

// y = A x.
using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

struct SolveConfig {
  double rel_tolerance = 1e-8;
  std::size_t max_iterations = 0;  // 0 means 10 * dimension
  bool record_residuals = true;
  bool check_symmetry = true;      // three random probes before iterating
  std::uint64_t seed = 12345;      // probe vectors

  void validate() const;
};

struct SolveResult {
  std::vector<double> solution;
  std::size_t iterations = 0;
  // ||b - A x_k|| / ||b|| from the residual recurrence, k = 0..iterations.
  std::vector<double> residual_history;
  // |eta_k| / |eta_0|: the preconditioned residual norm MINRES minimizes.
  std::vector<double> preconditioned_history;
  bool converged = false;
  // Recomputed from scratch at exit.
  double final_relative_residual = 0.0;
  double wall_seconds = 0.0;
};

// Preconditioned MINRES from x_0 = 0. Stops once the true relative residual
// drops below the tolerance; the recurred value gates, then a from-scratch
// residual confirms (iteration resumes if it does not).
// `pinv` == nullptr means no preconditioning.
SolveResult minres(const LinearOperator& a, const LinearOperator* pinv,
                   std::span<const double> b, const SolveConfig& cfg = {});

// MINRES on Y T x = Y b with z = P^{-1} r when `p` is given.
SolveResult flipped_solve(const ToeplitzOperator& t, std::span<const double> b,
                          const Preconditioner* p, const SolveConfig& cfg = {});
SolveResult flipped_solve(const Symbol& f, const MultiIndex& n, std::span<const double> b,
                          const Preconditioner* p, const SolveConfig& cfg = {});

// iter,rel_resid
void write_residual_history_csv(std::ostream& out, const SolveResult& result);

}  // namespace flipspec
