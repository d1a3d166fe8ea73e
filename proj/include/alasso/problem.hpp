#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "alasso/frame.hpp"

namespace alasso {

// Data for one analysis-regularized least-squares problem
//   minimize_x  ||D x||_1 + (alpha/2) ||y - M x||_2^2 .
struct ProblemInstance {
  Matrix M;                                     // m x d measurement operator
  Vector y;                                     // m observations
  TightFrame D;                                 // n x d analysis operator
  double alpha = 1.0;                           // fidelity weight, > 0
  std::optional<Vector> ground_truth;           // planted signal, if any
  std::optional<std::vector<int>> planted_cosupport;  // 0-based row indices

  int signal_dim() const { return static_cast<int>(M.cols()); }
  int measurement_dim() const { return static_cast<int>(M.rows()); }
  int analysis_dim() const { return D.rows(); }
};

// Throws InvalidInputError on dimension mismatches, non-finite data,
// alpha <= 0, or a planted cosupport the ground truth does not satisfy.
void validate_instance(const ProblemInstance& instance);

// Number of analysis coefficients with |(D x)_j| <= tol.
int cosparsity(const TightFrame& D, const Vector& x, double tol = 1e-9);

struct CosupportResult {
  std::vector<int> indices;  // sorted, 0-based
  int count = 0;
};

// The index set of analysis coefficients with |(D x)_j| <= tol.
CosupportResult cosupport(const TightFrame& D, const Vector& x,
                          double tol = 1e-9);

struct CosparseSignal {
  Vector x;                   // unit norm
  std::vector<int> cosupport;  // the planted rows (sorted, 0-based)
};

// Draws a uniformly random size-ell row subset Lambda and returns a unit-norm
// signal in the null space of D restricted to Lambda (random Gaussian vector
// projected onto the null space, computed by SVD; singular values
// <= 1e-10 * sigma_max count as null directions).  Redraws Lambda up to
// max_retries times when the restriction has full column rank; throws
// InfeasibleCosupportError when every redraw fails.
CosparseSignal generate_cosparse_signal(const TightFrame& D, int ell,
                                        std::uint64_t seed,
                                        int max_retries = 32);

// Same construction for a caller-fixed cosupport (test hook).
CosparseSignal cosparse_signal_on(const TightFrame& D,
                                  const std::vector<int>& cosupport,
                                  std::uint64_t seed);

// Parameters for seeded instance generation.
struct InstanceSpec {
  int d = 8;                     // signal dimension
  int m = 6;                     // measurements
  int k = 2;                     // analysis blocks (n = k * d)
  int ell = 0;                   // planted cosparsity
  std::optional<double> alpha;   // default: 100 * m / ||y||^2
  double noise_sigma = 0.0;
};

// Builds a full instance from a master seed: concatenated-bases frame,
// planted cosparse signal, Gaussian measurement operator (entries
// N(0,1)/sqrt(m)), and observations y = M x_true + noise_sigma * w.
// Sub-seed streams (see derive_seed): 0 frame, 1 signal, 2 measurement,
// 3 noise.
ProblemInstance generate_instance(const InstanceSpec& spec,
                                  std::uint64_t master_seed);

// Variant that substitutes a fixed measurement operator (test hook).
ProblemInstance generate_instance(const InstanceSpec& spec,
                                  std::uint64_t master_seed,
                                  const std::optional<Matrix>& measurement);

// The default fidelity weight 100 * m / ||y||^2 (100 when y = 0).
double default_alpha(const Vector& y, int m);

}  // namespace alasso
