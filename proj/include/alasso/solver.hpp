#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "alasso/problem.hpp"
#include "alasso/vi.hpp"

namespace alasso {

// Fault injection for certificate-sensitivity tests.  Never serialized; every
// production path runs with `none`.
enum class Corruption {
  none,
  z_threshold,      // shrinkage threshold doubled
  x_rhs_sign,       // sign error on the dual term of the x-step right side
  multiplier_sign,  // multiplier stepped along +(D x - z) instead of -(D x - z)
};

struct SolverConfig {
  double beta = 1.0;           // augmented-Lagrangian penalty, > 0
  int max_iters = 100000;      // >= 1
  double primal_tol = 1e-8;    // on ||D x^k - z^k||_2, > 0
  double dual_tol = 1e-8;      // on beta ||D^T (z^k - z^{k-1})||_2, > 0
  int record_every = 1;        // iterate recording stride, >= 1
  std::optional<Vector> x0;        // default 0
  std::optional<Vector> lambda0;   // default 0
  Corruption corruption = Corruption::none;
};

struct AdmmIterate {
  int k = 0;
  Vector z;
  Vector x;
  Vector lambda;
};

inline ViPoint to_point(const AdmmIterate& it) { return {it.z, it.x, it.lambda}; }

struct SolverTrace {
  std::string instance_ref;            // instance fingerprint
  SolverConfig config;
  std::vector<AdmmIterate> iterates;   // stride record_every; k=0 and final always
  std::vector<double> primal_residuals;   // per iteration, index = k
  std::vector<double> dual_residuals;     // per iteration; entry 0 is 0 by convention
  std::vector<double> objective_values;   // theta(u^k) per iteration
  bool converged = false;
  int iters_run = 0;
  double max_x_solve_rel_residual = 0.0;  // worst ||A x - rhs|| / (1 + ||rhs||)

  // True when every iterate 0..iters_run is recorded.
  bool stride_one() const {
    return config.record_every == 1 &&
           iterates.size() == static_cast<std::size_t>(iters_run) + 1;
  }
};

// Componentwise shrinkage: sign(v) * max(|v| - tau, 0).  Ties |v| = tau map
// to exactly 0.
double soft_threshold(double v, double tau);
Vector soft_threshold(const Vector& v, double tau);

// Cached SPD factorization of alpha M^T M + beta D^T D for the x-step,
// valid for one (instance, beta) pair.
class XUpdateCache {
 public:
  XUpdateCache(const ProblemInstance& instance, double beta);
  const Matrix& lhs() const { return lhs_; }
  // Solves lhs * x = rhs with one iterative-refinement pass; the residual
  // contract ||lhs x - rhs|| <= 1e-10 (1 + ||rhs||) is enforced.
  Vector solve(const Vector& rhs, double* rel_residual = nullptr) const;

 private:
  Matrix lhs_;
  Eigen::LLT<Matrix> llt_;
};

// One shrinkage step: argmin_z ||z||_1 - lambda^T(D x - z) + (beta/2)||D x - z||^2
//                   = soft_threshold(D x - lambda/beta, 1/beta).
Vector z_update(const Vector& x, const Vector& lambda,
                const ProblemInstance& instance, const SolverConfig& config);

// One quadratic step: solves (alpha M^T M + beta D^T D) x
//                          = alpha M^T y + D^T (lambda + beta z).
Vector x_update(const Vector& z, const Vector& lambda,
                const ProblemInstance& instance, const SolverConfig& config,
                const XUpdateCache& cache, double* rel_residual = nullptr);

// lambda - beta (D x_new - z_new).
Vector multiplier_update(const Vector& lambda, const Vector& x_new,
                         const Vector& z_new, double beta,
                         const TightFrame& D);

// Runs the splitting scheme (z step, then x step, then multiplier step) from
// the configured start until both residuals pass their tolerances or
// max_iters is reached.  The initial trace entry stores z^0 = 0.
SolverTrace solve(const ProblemInstance& instance, const SolverConfig& config);

struct ReferenceOptions {
  double primal_tol = 1e-12;
  double dual_tol = 1e-12;
  int max_iters = 400000;
  double kkt_gate = 1e-8;  // certification bound on the max optimality residual
};

struct Reference {
  AdmmIterate point;
  KktResiduals kkt;
  bool certified = false;  // kkt.max() <= kkt_gate
  bool converged = false;
  int iters_run = 0;
};

// High-accuracy run whose final iterate is independently checked against the
// optimality residuals.  Callers must treat certified == false as "no
// reference available", never as a solver failure.
Reference reference_solution(const ProblemInstance& instance, double beta,
                             const ReferenceOptions& options = {});

}  // namespace alasso
