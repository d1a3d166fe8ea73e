#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "alasso/rng.hpp"

namespace alasso {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class FrameConstruction { identity, concatenated_bases, external };

std::string to_string(FrameConstruction c);
FrameConstruction frame_construction_from_string(const std::string& s);

// Analysis operator D (n x d, n >= d >= 1) with frame bounds A <= B:
//   A ||x||^2 <= ||D x||^2 <= B ||x||^2   for all x.
// A tight frame has A = B; the built-in constructions are Parseval (A = B = 1).
struct TightFrame {
  Matrix entries;                      // n x d
  double frame_lower = 0.0;            // A
  double frame_upper = 0.0;            // B
  std::optional<double> row_norm;      // set when all rows share a common norm
  FrameConstruction construction = FrameConstruction::external;
  int bases = 1;                       // block count (concatenated_bases)
  std::uint64_t seed = 0;              // construction seed (concatenated_bases)

  int rows() const { return static_cast<int>(entries.rows()); }
  int cols() const { return static_cast<int>(entries.cols()); }
  Vector analyze(const Vector& x) const { return entries * x; }
};

struct FrameReport {
  double lower_bound = 0.0;            // smallest eigenvalue of D^T D
  double upper_bound = 0.0;            // largest eigenvalue of D^T D
  bool is_tight = false;               // upper - lower <= tol
  bool is_uniform_row_norm = false;    // row_norm_spread <= tol
  double max_gram_deviation = 0.0;     // max_ij |(D^T D - I)_ij|
  double row_norm_spread = 0.0;        // max_i ||row_i|| - min_i ||row_i||
};

// The d x d identity as a (trivial) Parseval frame.
TightFrame build_identity_frame(int d);

// Stack of k orthogonal d x d blocks scaled by 1/sqrt(k).  Block 1 is always
// the identity; blocks 2..k are seeded random signed permutations.  Keeping
// the blocks axis-aligned matters: blocks in general position would cap the
// cosparsity of any nonzero signal at d - 1, whereas aligned blocks make
// cosupports of size up to k*(d - s) reachable, which the planted-signal
// generator relies on.  D^T D = I holds exactly for every seed.
TightFrame build_concatenated_bases_frame(int d, int k, std::uint64_t seed);

// Same stacking for caller-supplied orthogonal blocks (test hook; callers own
// the orthogonality of each block).
TightFrame build_concatenated_bases_frame(const std::vector<Matrix>& blocks);

// Wraps an arbitrary analysis matrix, computing and storing its frame bounds.
// Rejects matrices that are not frames (rank-deficient: lower bound ~ 0).
TightFrame external_frame(const Matrix& entries);

// Validates an analysis matrix: eigenvalue bounds of D^T D, Gram deviation
// from the identity, and row-norm uniformity.  Tightness and row-norm
// uniformity are independent properties and are reported separately.
FrameReport validate_frame(const Matrix& entries, double tol = 1e-9);
FrameReport validate_frame(const TightFrame& frame, double tol = 1e-9);

// Uniformly random signed permutation matrix (each row/column has exactly one
// entry, equal to +-1).
Matrix random_signed_permutation(int d, Rng& rng);

}  // namespace alasso
