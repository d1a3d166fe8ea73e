#include "alasso/solver.hpp"

#include <cmath>
#include <string>

#include "alasso/errors.hpp"
#include "alasso/io.hpp"

namespace alasso {

namespace {

void require_solver_config(const SolverConfig& config,
                           const ProblemInstance& instance) {
  if (!(config.beta > 0) || !std::isfinite(config.beta))
    throw InvalidInputError("beta must be positive and finite");
  if (config.max_iters < 1) throw InvalidInputError("max_iters must be >= 1");
  if (!(config.primal_tol > 0) || !(config.dual_tol > 0))
    throw InvalidInputError("residual tolerances must be > 0");
  if (config.record_every < 1)
    throw InvalidInputError("record_every must be >= 1");
  if (config.x0 && config.x0->size() != instance.signal_dim())
    throw InvalidInputError("x0 has wrong length");
  if (config.lambda0 && config.lambda0->size() != instance.analysis_dim())
    throw InvalidInputError("lambda0 has wrong length");
}

}  // namespace

double soft_threshold(double v, double tau) {
  if (v > tau) return v - tau;
  if (v < -tau) return v + tau;
  return 0.0;
}

Vector soft_threshold(const Vector& v, double tau) {
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = soft_threshold(v[i], tau);
  return out;
}

XUpdateCache::XUpdateCache(const ProblemInstance& instance, double beta) {
  if (!(beta > 0) || !std::isfinite(beta))
    throw InvalidInputError("beta must be positive and finite");
  const Matrix& D = instance.D.entries;
  lhs_ = instance.alpha * (instance.M.transpose() * instance.M) +
         beta * (D.transpose() * D);
  llt_.compute(lhs_);
  if (llt_.info() != Eigen::Success)
    throw NumericError("x-step system is not positive definite");
}

Vector XUpdateCache::solve(const Vector& rhs, double* rel_residual) const {
  if (rhs.size() != lhs_.rows())
    throw InvalidInputError("x-step right side has wrong length");
  Vector x = llt_.solve(rhs);
  x += llt_.solve(rhs - lhs_ * x);
  const double rel = (lhs_ * x - rhs).norm() / (1.0 + rhs.norm());
  if (rel_residual) *rel_residual = rel;
  if (!(rel <= 1e-10))
    throw NumericError("x-step solve residual " + std::to_string(rel) +
                       " exceeds its bound");
  return x;
}

Vector z_update(const Vector& x, const Vector& lambda,
                const ProblemInstance& instance, const SolverConfig& config) {
  const Vector target = instance.D.entries * x - lambda / config.beta;
  double tau = 1.0 / config.beta;
  if (config.corruption == Corruption::z_threshold) tau *= 2.0;
  return soft_threshold(target, tau);
}

Vector x_update(const Vector& z, const Vector& lambda,
                const ProblemInstance& instance, const SolverConfig& config,
                const XUpdateCache& cache, double* rel_residual) {
  const double dual_sign =
      config.corruption == Corruption::x_rhs_sign ? -1.0 : 1.0;
  const Vector rhs =
      instance.alpha * (instance.M.transpose() * instance.y) +
      instance.D.entries.transpose() * (dual_sign * lambda + config.beta * z);
  return cache.solve(rhs, rel_residual);
}

Vector multiplier_update(const Vector& lambda, const Vector& x_new,
                         const Vector& z_new, double beta,
                         const TightFrame& D) {
  return lambda - beta * (D.entries * x_new - z_new);
}

SolverTrace solve(const ProblemInstance& instance, const SolverConfig& config) {
  validate_instance(instance);
  require_solver_config(config, instance);

  const Eigen::Index d = instance.signal_dim();
  const Eigen::Index n = instance.analysis_dim();
  const Matrix& D = instance.D.entries;
  const XUpdateCache cache(instance, config.beta);
  const double multiplier_beta =
      config.corruption == Corruption::multiplier_sign ? -config.beta
                                                       : config.beta;

  Vector z = Vector::Zero(n);
  Vector x = config.x0 ? *config.x0 : Vector::Zero(d);
  Vector lambda = config.lambda0 ? *config.lambda0 : Vector::Zero(n);

  SolverTrace trace;
  trace.instance_ref = io::fingerprint(instance);
  trace.config = config;
  trace.iterates.push_back({0, z, x, lambda});
  trace.primal_residuals.push_back((D * x - z).norm());
  trace.dual_residuals.push_back(0.0);
  trace.objective_values.push_back(theta(z, x, instance));

  for (int k = 1; k <= config.max_iters; ++k) {
    const Vector z_prev = z;
    z = z_update(x, lambda, instance, config);
    double rel = 0.0;
    x = x_update(z, lambda, instance, config, cache, &rel);
    trace.max_x_solve_rel_residual =
        std::max(trace.max_x_solve_rel_residual, rel);
    lambda = multiplier_update(lambda, x, z, multiplier_beta, instance.D);

    const double primal = (D * x - z).norm();
    const double dual = config.beta * (D.transpose() * (z - z_prev)).norm();
    trace.primal_residuals.push_back(primal);
    trace.dual_residuals.push_back(dual);
    trace.objective_values.push_back(theta(z, x, instance));
    trace.iters_run = k;
    if (k % config.record_every == 0)
      trace.iterates.push_back({k, z, x, lambda});

    if (primal <= config.primal_tol && dual <= config.dual_tol) {
      trace.converged = true;
      break;
    }
  }

  if (trace.iterates.back().k != trace.iters_run)
    trace.iterates.push_back({trace.iters_run, z, x, lambda});
  return trace;
}

Reference reference_solution(const ProblemInstance& instance, double beta,
                             const ReferenceOptions& options) {
  SolverConfig config;
  config.beta = beta;
  config.max_iters = options.max_iters;
  config.primal_tol = options.primal_tol;
  config.dual_tol = options.dual_tol;
  config.record_every = options.max_iters;  // endpoints only

  const SolverTrace trace = solve(instance, config);
  Reference ref;
  ref.point = trace.iterates.back();
  ref.kkt = kkt_residuals(to_point(ref.point), instance);
  ref.converged = trace.converged;
  ref.iters_run = trace.iters_run;
  ref.certified = trace.converged && ref.kkt.max() <= options.kkt_gate;
  return ref;
}

}  // namespace alasso
