#include "alasso/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "alasso/errors.hpp"

namespace alasso {

namespace {

constexpr double kNullSingularRel = 1e-10;  // sigma <= rel * sigma_max => null
constexpr double kPlantedResidualTol = 1e-9;

}  // namespace

void validate_instance(const ProblemInstance& instance) {
  const int d = instance.signal_dim();
  const int m = instance.measurement_dim();
  if (d < 1 || m < 1)
    throw InvalidInputError("instance needs m >= 1 measurements and d >= 1 dims");
  if (instance.y.size() != m)
    throw InvalidInputError("y length does not match measurement rows");
  if (instance.D.cols() != d)
    throw InvalidInputError("analysis operator columns do not match signal dim");
  if (!(instance.alpha > 0.0))
    throw InvalidInputError("alpha must be > 0");
  if (!instance.M.allFinite() || !instance.y.allFinite() ||
      !instance.D.entries.allFinite())
    throw InvalidInputError("instance data has non-finite entries");
  if (instance.ground_truth) {
    if (instance.ground_truth->size() != d)
      throw InvalidInputError("ground truth length does not match signal dim");
    if (!instance.ground_truth->allFinite())
      throw InvalidInputError("ground truth has non-finite entries");
  }
  if (instance.planted_cosupport) {
    const int n = instance.analysis_dim();
    for (int idx : *instance.planted_cosupport)
      if (idx < 0 || idx >= n)
        throw InvalidInputError("planted cosupport index out of range");
    if (instance.ground_truth) {
      const Vector coeffs = instance.D.analyze(*instance.ground_truth);
      for (int idx : *instance.planted_cosupport)
        if (std::abs(coeffs[idx]) > kPlantedResidualTol)
          throw InvalidInputError(
              "ground truth violates the planted cosupport (|coefficient| = " +
              std::to_string(std::abs(coeffs[idx])) + ")");
    }
  }
}

int cosparsity(const TightFrame& D, const Vector& x, double tol) {
  if (x.size() != D.cols())
    throw InvalidInputError("signal length does not match analysis columns");
  if (tol < 0) throw InvalidInputError("cosparsity tolerance must be >= 0");
  const Vector coeffs = D.analyze(x);
  int count = 0;
  for (Eigen::Index j = 0; j < coeffs.size(); ++j)
    if (std::abs(coeffs[j]) <= tol) ++count;
  return count;
}

CosupportResult cosupport(const TightFrame& D, const Vector& x, double tol) {
  if (x.size() != D.cols())
    throw InvalidInputError("signal length does not match analysis columns");
  if (tol < 0) throw InvalidInputError("cosupport tolerance must be >= 0");
  const Vector coeffs = D.analyze(x);
  CosupportResult result;
  for (int j = 0; j < coeffs.size(); ++j)
    if (std::abs(coeffs[j]) <= tol) result.indices.push_back(j);
  result.count = static_cast<int>(result.indices.size());
  return result;
}

namespace {

// Unit-norm null-space sample for a fixed cosupport, or empty when the
// restricted rows have full column rank.
std::optional<Vector> null_space_sample(const TightFrame& D,
                                        const std::vector<int>& rows,
                                        Rng& rng) {
  const int d = D.cols();
  Vector g(d);
  for (int i = 0; i < d; ++i) g[i] = rng.normal();

  Vector x;
  if (rows.empty()) {
    x = g;
  } else {
    Matrix sub(static_cast<Eigen::Index>(rows.size()), d);
    for (std::size_t r = 0; r < rows.size(); ++r)
      sub.row(static_cast<Eigen::Index>(r)) = D.entries.row(rows[r]);
    Eigen::JacobiSVD<Matrix> svd(sub, Eigen::ComputeFullV);
    const auto& sigma = svd.singularValues();
    const double sigma_max = sigma.size() > 0 ? sigma[0] : 0.0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
      if (sigma[i] > kNullSingularRel * sigma_max) ++rank;
    if (rank >= d) return std::nullopt;
    const Matrix null_basis = svd.matrixV().rightCols(d - rank);
    x = null_basis * (null_basis.transpose() * g);
  }
  const double norm = x.norm();
  if (!(norm > 1e-12)) return std::nullopt;  // measure-zero unlucky draw
  return Vector(x / norm);
}

}  // namespace

CosparseSignal cosparse_signal_on(const TightFrame& D,
                                  const std::vector<int>& cosupport_rows,
                                  std::uint64_t seed) {
  const int n = D.rows();
  for (int idx : cosupport_rows)
    if (idx < 0 || idx >= n)
      throw InvalidInputError("cosupport index out of range");
  Rng rng(seed);
  auto x = null_space_sample(D, cosupport_rows, rng);
  if (!x)
    throw InfeasibleCosupportError(
        "the fixed cosupport admits no nonzero signal (restricted rows have "
        "full column rank)");
  CosparseSignal signal{*x, cosupport_rows};
  std::sort(signal.cosupport.begin(), signal.cosupport.end());
  return signal;
}

CosparseSignal generate_cosparse_signal(const TightFrame& D, int ell,
                                        std::uint64_t seed, int max_retries) {
  const int n = D.rows();
  if (ell < 0)
    throw InvalidInputError("requested cosparsity ell = " + std::to_string(ell) +
                            " must be >= 0");
  if (ell > n)
    throw InfeasibleCosupportError(
        "requested cosparsity ell = " + std::to_string(ell) +
        " exceeds the analysis dimension n = " + std::to_string(n) +
        " (d = " + std::to_string(D.cols()) + ")");
  if (max_retries < 1) throw InvalidInputError("max_retries must be >= 1");

  Rng rng(seed);
  std::vector<int> all(n);
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    std::iota(all.begin(), all.end(), 0);
    for (int i = 0; i < ell; ++i) std::swap(all[i], all[i + rng.uniform_int(n - i)]);
    std::vector<int> rows(all.begin(), all.begin() + ell);
    std::sort(rows.begin(), rows.end());
    if (auto x = null_space_sample(D, rows, rng)) return {*x, std::move(rows)};
  }
  throw InfeasibleCosupportError(
      "no feasible cosupport of size " + std::to_string(ell) + " found in " +
      std::to_string(max_retries) + " draws (d = " + std::to_string(D.cols()) +
      ", n = " + std::to_string(n) + "); ell is too large for this operator");
}

double default_alpha(const Vector& y, int m) {
  const double energy = y.squaredNorm();
  if (!(energy > 0.0)) return 100.0;
  return 100.0 * static_cast<double>(m) / energy;
}

ProblemInstance generate_instance(const InstanceSpec& spec,
                                  std::uint64_t master_seed) {
  return generate_instance(spec, master_seed, std::nullopt);
}

ProblemInstance generate_instance(const InstanceSpec& spec,
                                  std::uint64_t master_seed,
                                  const std::optional<Matrix>& measurement) {
  if (spec.d < 1 || spec.m < 1 || spec.k < 1)
    throw InvalidInputError("instance spec needs d, m, k >= 1");
  if (spec.noise_sigma < 0)
    throw InvalidInputError("noise_sigma must be >= 0");
  if (spec.alpha && !(*spec.alpha > 0))
    throw InvalidInputError("alpha must be > 0");

  ProblemInstance instance;
  instance.D = build_concatenated_bases_frame(spec.d, spec.k,
                                              derive_seed(master_seed, 0));
  CosparseSignal signal =
      generate_cosparse_signal(instance.D, spec.ell, derive_seed(master_seed, 1));

  if (measurement) {
    if (measurement->rows() != spec.m || measurement->cols() != spec.d)
      throw InvalidInputError("measurement override has the wrong shape");
    instance.M = *measurement;
  } else {
    Rng rng_m(derive_seed(master_seed, 2));
    instance.M.resize(spec.m, spec.d);
    const double scale = 1.0 / std::sqrt(static_cast<double>(spec.m));
    for (int i = 0; i < spec.m; ++i)
      for (int j = 0; j < spec.d; ++j) instance.M(i, j) = scale * rng_m.normal();
  }

  instance.y = instance.M * signal.x;
  if (spec.noise_sigma > 0) {
    Rng rng_w(derive_seed(master_seed, 3));
    Vector w(spec.m);
    for (int i = 0; i < spec.m; ++i) w[i] = rng_w.normal();
    instance.y += spec.noise_sigma * w;
  }

  instance.alpha = spec.alpha ? *spec.alpha : default_alpha(instance.y, spec.m);
  instance.ground_truth = signal.x;
  instance.planted_cosupport = signal.cosupport;
  validate_instance(instance);
  return instance;
}

}  // namespace alasso
