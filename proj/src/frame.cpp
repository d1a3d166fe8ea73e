#include "alasso/frame.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "alasso/errors.hpp"

namespace alasso {

std::string to_string(FrameConstruction c) {
  switch (c) {
    case FrameConstruction::identity: return "identity";
    case FrameConstruction::concatenated_bases: return "concatenated_bases";
    case FrameConstruction::external: return "external";
  }
  throw InvalidInputError("unknown frame construction tag");
}

FrameConstruction frame_construction_from_string(const std::string& s) {
  if (s == "identity") return FrameConstruction::identity;
  if (s == "concatenated_bases") return FrameConstruction::concatenated_bases;
  if (s == "external") return FrameConstruction::external;
  throw InvalidInputError("unknown frame construction tag: " + s);
}

namespace {

void require_frame_shape(const Matrix& entries) {
  if (entries.rows() < 1 || entries.cols() < 1)
    throw InvalidInputError("analysis matrix must be at least 1 x 1");
  if (entries.rows() < entries.cols())
    throw InvalidInputError("analysis matrix needs rows >= cols (got " +
                            std::to_string(entries.rows()) + " x " +
                            std::to_string(entries.cols()) + ")");
  if (!entries.allFinite())
    throw InvalidInputError("analysis matrix has non-finite entries");
}

}  // namespace

Matrix random_signed_permutation(int d, Rng& rng) {
  if (d < 1) throw InvalidInputError("signed permutation needs d >= 1");
  std::vector<int> perm(d);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = d - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(i + 1)]);
  Matrix q = Matrix::Zero(d, d);
  for (int i = 0; i < d; ++i)
    q(i, perm[i]) = rng.uniform_int(2) == 0 ? 1.0 : -1.0;
  return q;
}

TightFrame build_identity_frame(int d) {
  if (d < 1) throw InvalidInputError("identity frame needs d >= 1");
  TightFrame frame;
  frame.entries = Matrix::Identity(d, d);
  frame.frame_lower = 1.0;
  frame.frame_upper = 1.0;
  frame.row_norm = 1.0;
  frame.construction = FrameConstruction::identity;
  frame.bases = 1;
  return frame;
}

TightFrame build_concatenated_bases_frame(const std::vector<Matrix>& blocks) {
  if (blocks.empty()) throw InvalidInputError("need at least one block");
  const int d = static_cast<int>(blocks.front().cols());
  const int k = static_cast<int>(blocks.size());
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  Matrix entries(static_cast<Eigen::Index>(k) * d, d);
  for (int b = 0; b < k; ++b) {
    if (blocks[b].rows() != d || blocks[b].cols() != d)
      throw InvalidInputError("blocks must all be d x d");
    entries.middleRows(static_cast<Eigen::Index>(b) * d, d) = scale * blocks[b];
  }
  TightFrame frame;
  frame.entries = std::move(entries);
  frame.frame_lower = 1.0;
  frame.frame_upper = 1.0;
  frame.row_norm = scale;
  frame.construction = FrameConstruction::concatenated_bases;
  frame.bases = k;
  return frame;
}

TightFrame build_concatenated_bases_frame(int d, int k, std::uint64_t seed) {
  if (d < 1) throw InvalidInputError("concatenated-bases frame needs d >= 1");
  if (k < 1) throw InvalidInputError("concatenated-bases frame needs k >= 1");
  Rng rng(seed);
  std::vector<Matrix> blocks;
  blocks.reserve(k);
  blocks.push_back(Matrix::Identity(d, d));
  for (int b = 1; b < k; ++b) blocks.push_back(random_signed_permutation(d, rng));
  TightFrame frame = build_concatenated_bases_frame(blocks);
  frame.seed = seed;
  return frame;
}

FrameReport validate_frame(const Matrix& entries, double tol) {
  require_frame_shape(entries);
  if (tol < 0) throw InvalidInputError("validation tolerance must be >= 0");
  const int d = static_cast<int>(entries.cols());

  FrameReport report;
  const Matrix gram = entries.transpose() * entries;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  if (eig.info() != Eigen::Success)
    throw NumericError("eigensolve of the frame Gram matrix failed");
  report.lower_bound = eig.eigenvalues().minCoeff();
  report.upper_bound = eig.eigenvalues().maxCoeff();
  report.is_tight = (report.upper_bound - report.lower_bound) <= tol;
  report.max_gram_deviation =
      (gram - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();

  const Vector row_norms = entries.rowwise().norm();
  report.row_norm_spread = row_norms.maxCoeff() - row_norms.minCoeff();
  report.is_uniform_row_norm = report.row_norm_spread <= tol;
  return report;
}

FrameReport validate_frame(const TightFrame& frame, double tol) {
  return validate_frame(frame.entries, tol);
}

TightFrame external_frame(const Matrix& entries) {
  require_frame_shape(entries);
  FrameReport report = validate_frame(entries, 1e-9);
  if (report.lower_bound <= 1e-10 * std::max(1.0, report.upper_bound))
    throw InvalidInputError(
        "matrix is not a frame: smallest Gram eigenvalue is numerically zero");
  TightFrame frame;
  frame.entries = entries;
  frame.frame_lower = report.lower_bound;
  frame.frame_upper = report.upper_bound;
  if (report.is_uniform_row_norm)
    frame.row_norm = entries.rowwise().norm().mean();
  frame.construction = FrameConstruction::external;
  frame.bases = 1;
  return frame;
}

}  // namespace alasso
