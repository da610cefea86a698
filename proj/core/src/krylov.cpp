#include "flipspec/krylov.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <random>

#include "flipspec/errors.hpp"

namespace flipspec {

namespace {

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void probe_symmetry(const LinearOperator& a, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<double> x(n), y(n), ax(n), ay(n);
  for (int trial = 0; trial < 3; ++trial) {
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = gauss(rng);
      y[i] = gauss(rng);
    }
    a(x, ax);
    a(y, ay);
    const double gap = std::abs(dot(ax, y) - dot(x, ay));
    const double scale = norm(ax) * norm(y) + norm(x) * norm(ay);
    if (gap > 1e-8 * scale) {
      throw OperatorError("operator fails the symmetry probe: |<Ax,y> - <x,Ay>| = " +
                          std::to_string(gap) + " (scale " + std::to_string(scale) + ")");
    }
  }
}

}  // namespace

void SolveConfig::validate() const {
  if (!(rel_tolerance > 0.0 && rel_tolerance < 1.0)) {
    throw ParameterError("rel_tolerance must lie in (0, 1)");
  }
}

SolveResult minres(const LinearOperator& a, const LinearOperator* pinv,
                   std::span<const double> b, const SolveConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = b.size();
  const std::size_t max_it = cfg.max_iterations > 0 ? cfg.max_iterations : 10 * n;
  if (cfg.check_symmetry && n > 0) probe_symmetry(a, n, cfg.seed);

  auto precondition = [&](std::span<const double> v, std::span<double> z) {
    if (pinv != nullptr) {
      (*pinv)(v, z);
    } else {
      std::copy(v.begin(), v.end(), z.begin());
    }
  };

  SolveResult result;
  result.solution.assign(n, 0.0);
  std::vector<double>& x = result.solution;
  const double b_norm = norm(b);
  auto finish = [&](bool converged, double rel) {
    result.converged = converged;
    result.final_relative_residual = rel;
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
  };
  if (cfg.record_residuals) {
    result.residual_history.push_back(b_norm > 0.0 ? 1.0 : 0.0);
    result.preconditioned_history.push_back(b_norm > 0.0 ? 1.0 : 0.0);
  }
  if (b_norm == 0.0) return finish(true, 0.0);

  std::vector<double> r(b.begin(), b.end());
  std::vector<double> v(b.begin(), b.end()), v_old(n, 0.0), v_new(n);
  std::vector<double> z(n), z_new(n), az(n);
  std::vector<double> w(n, 0.0), w_old(n, 0.0), aw(n, 0.0), aw_old(n, 0.0);
  std::vector<double> scratch(n);

  precondition(v, z);
  double vz = dot(v, z);
  if (!(vz > 0.0)) throw OperatorError("preconditioner is not positive definite");
  double beta = std::sqrt(vz);
  const double eta0 = beta;
  double eta = beta;
  double gamma = 1.0, gamma_old = 1.0, s = 0.0, s_old = 0.0;
  const double breakdown = 1e-14 * b_norm;

  auto true_residual = [&]() {
    a(x, scratch);
    for (std::size_t i = 0; i < n; ++i) scratch[i] = b[i] - scratch[i];
    return norm(scratch) / b_norm;
  };

  for (std::size_t k = 1; k <= max_it; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      z[i] /= beta;
      v[i] /= beta;
    }
    a(z, az);
    const double alpha = dot(az, z);
    for (std::size_t i = 0; i < n; ++i) v_new[i] = az[i] - alpha * v[i] - beta * v_old[i];
    precondition(v_new, z_new);
    vz = dot(v_new, z_new);
    if (vz < -1e-8 * norm(v_new) * norm(z_new)) {
      throw OperatorError("preconditioner is not positive definite");
    }
    const double beta_new = std::sqrt(std::max(vz, 0.0));

    // Givens rotation on the new tridiagonal column.
    const double d0 = gamma * alpha - gamma_old * s * beta;
    const double d1 = std::hypot(d0, beta_new);
    const double d2 = s * alpha + gamma_old * gamma * beta;
    const double d3 = s_old * beta;
    if (d1 == 0.0) throw OperatorError("MINRES breakdown: singular tridiagonal");
    gamma_old = gamma;
    s_old = s;
    gamma = d0 / d1;
    s = beta_new / d1;

    for (std::size_t i = 0; i < n; ++i) {
      const double wn = (z[i] - d3 * w_old[i] - d2 * w[i]) / d1;
      const double awn = (az[i] - d3 * aw_old[i] - d2 * aw[i]) / d1;
      w_old[i] = w[i];
      w[i] = wn;
      aw_old[i] = aw[i];
      aw[i] = awn;
      x[i] += gamma * eta * wn;
      r[i] -= gamma * eta * awn;
    }
    eta = -s * eta;
    std::swap(v_old, v);
    std::swap(v, v_new);
    std::swap(z, z_new);
    beta = beta_new;

    double rel = norm(r) / b_norm;
    result.iterations = k;
    if (cfg.record_residuals) {
      result.residual_history.push_back(rel);
      result.preconditioned_history.push_back(std::abs(eta) / eta0);
    }
    const bool lucky = beta < breakdown;
    if (rel < cfg.rel_tolerance || lucky) {
      const double exact = true_residual();
      if (exact < cfg.rel_tolerance) return finish(true, exact);
      if (lucky) {
        throw OperatorError("MINRES breakdown with relative residual " + std::to_string(exact));
      }
      // Recurrence drifted: continue from the recomputed residual.
      std::copy(scratch.begin(), scratch.end(), r.begin());
    }
  }
  return finish(false, true_residual());
}

SolveResult flipped_solve(const ToeplitzOperator& t, std::span<const double> b,
                          const Preconditioner* p, const SolveConfig& cfg) {
  if (!t.is_real()) throw ParameterError("flipped_solve: symbol must have real coefficients");
  const MultiIndex& n = t.sizes();
  if (b.size() != n.total()) throw ShapeError("flipped_solve: right-hand side length mismatch");
  if (p != nullptr && p->dimension() != n.total()) {
    throw ShapeError("flipped_solve: preconditioner order mismatch");
  }
  std::vector<double> tmp(n.total());
  const LinearOperator apply_a = [&](std::span<const double> x, std::span<double> y) {
    t.matvec(x, tmp);
    flip_apply(n, tmp, y);
  };
  LinearOperator apply_p;
  if (p != nullptr) {
    apply_p = [p](std::span<const double> r, std::span<double> z) { p->apply_inverse(r, z); };
  }
  const std::vector<double> rhs = flip_apply(n, b);
  return minres(apply_a, p != nullptr ? &apply_p : nullptr, rhs, cfg);
}

SolveResult flipped_solve(const Symbol& f, const MultiIndex& n, std::span<const double> b,
                          const Preconditioner* p, const SolveConfig& cfg) {
  return flipped_solve(ToeplitzOperator(f, n), b, p, cfg);
}

void write_residual_history_csv(std::ostream& out, const SolveResult& result) {
  const auto old = out.precision(17);
  out << "iter,rel_resid\n";
  for (std::size_t k = 0; k < result.residual_history.size(); ++k) {
    out << k << ',' << result.residual_history[k] << '\n';
  }
  out.precision(old);
}

}  // namespace flipspec
