#include "alasso/vi.hpp"

#include <cmath>

#include "alasso/errors.hpp"

namespace alasso {

namespace {

void require_point_shape(const ViPoint& p, const ProblemInstance& instance,
                         const char* who) {
  if (p.z.size() != instance.analysis_dim() ||
      p.x.size() != instance.signal_dim() ||
      p.lambda.size() != instance.analysis_dim())
    throw InvalidInputError(std::string(who) + ": point blocks have wrong sizes");
}

}  // namespace

double theta(const Vector& z, const Vector& x, const ProblemInstance& instance) {
  if (z.size() != instance.analysis_dim() || x.size() != instance.signal_dim())
    throw InvalidInputError("theta: block sizes do not match the instance");
  const Vector misfit = instance.y - instance.M * x;
  return z.lpNorm<1>() + 0.5 * instance.alpha * misfit.squaredNorm();
}

ViPoint f_apply(const ViPoint& omega, const ProblemInstance& instance) {
  require_point_shape(omega, instance, "f_apply");
  ViPoint value;
  value.z = omega.lambda;
  value.x = -(instance.D.entries.transpose() * omega.lambda);
  value.lambda = instance.D.entries * omega.x - omega.z;
  return value;
}

double skew_defect(const ViPoint& omega, const ViPoint& omega_bar,
                   const ProblemInstance& instance) {
  const ViPoint f = f_apply(omega, instance);
  const ViPoint f_bar = f_apply(omega_bar, instance);
  const double inner = (omega.z - omega_bar.z).dot(f.z - f_bar.z) +
                       (omega.x - omega_bar.x).dot(f.x - f_bar.x) +
                       (omega.lambda - omega_bar.lambda).dot(f.lambda - f_bar.lambda);
  return std::abs(inner);
}

double KktResiduals::max() const {
  return std::max(subgradient, std::max(stationarity, feasibility));
}

KktResiduals kkt_residuals(const ViPoint& point, const ProblemInstance& instance,
                           double zero_tol) {
  require_point_shape(point, instance, "kkt_residuals");
  if (zero_tol < 0) throw InvalidInputError("zero_tol must be >= 0");

  KktResiduals r;
  for (Eigen::Index j = 0; j < point.z.size(); ++j) {
    if (std::abs(point.z[j]) > zero_tol) {
      const double sign = point.z[j] > 0 ? 1.0 : -1.0;
      r.subgradient = std::max(r.subgradient, std::abs(point.lambda[j] + sign));
    } else {
      r.subgradient =
          std::max(r.subgradient, std::max(0.0, std::abs(point.lambda[j]) - 1.0));
    }
  }
  const Vector grad = instance.alpha *
                          (instance.M.transpose() * (instance.M * point.x - instance.y)) -
                      instance.D.entries.transpose() * point.lambda;
  r.stationarity = grad.lpNorm<Eigen::Infinity>();
  r.feasibility =
      (instance.D.entries * point.x - point.z).lpNorm<Eigen::Infinity>();
  return r;
}

double vi_gap_probe(const ViPoint& candidate, const ViPoint& probe,
                    const ProblemInstance& instance) {
  require_point_shape(candidate, instance, "vi_gap_probe");
  require_point_shape(probe, instance, "vi_gap_probe");

  const double theta_gap =
      theta(probe.z, probe.x, instance) - theta(candidate.z, candidate.x, instance);
  const Vector dz = probe.z - candidate.z;
  const Vector dx = probe.x - candidate.x;
  const Vector dl = probe.lambda - candidate.lambda;

  const ViPoint f_probe = f_apply(probe, instance);
  const double probe_form =
      theta_gap + dz.dot(f_probe.z) + dx.dot(f_probe.x) + dl.dot(f_probe.lambda);

  const ViPoint f_cand = f_apply(candidate, instance);
  const double cand_form =
      theta_gap + dz.dot(f_cand.z) + dx.dot(f_cand.x) + dl.dot(f_cand.lambda);

  const double scale = 1.0 + std::abs(probe_form) + std::abs(cand_form) +
                       dz.squaredNorm() + dx.squaredNorm() + dl.squaredNorm();
  if (std::abs(probe_form - cand_form) > 1e-9 * scale)
    throw NumericError("gap forms disagree beyond the skew-symmetry tolerance");
  return probe_form;
}

namespace {

ViPoint direction_sample(const ViPoint& center, Rng& rng) {
  ViPoint dir;
  dir.z.resize(center.z.size());
  dir.x.resize(center.x.size());
  dir.lambda.resize(center.lambda.size());
  for (Eigen::Index i = 0; i < dir.z.size(); ++i) dir.z[i] = rng.normal();
  for (Eigen::Index i = 0; i < dir.x.size(); ++i) dir.x[i] = rng.normal();
  for (Eigen::Index i = 0; i < dir.lambda.size(); ++i) dir.lambda[i] = rng.normal();
  return dir;
}

ViPoint scaled_offset(const ViPoint& center, const ViPoint& dir, double factor) {
  return {center.z + factor * dir.z, center.x + factor * dir.x,
          center.lambda + factor * dir.lambda};
}

}  // namespace

ViPoint sphere_probe(const ViPoint& center, double radius, Rng& rng) {
  if (!(radius > 0)) throw InvalidInputError("sphere radius must be > 0");
  const ViPoint dir = direction_sample(center, rng);
  const double norm = std::sqrt(dir.z.squaredNorm() + dir.x.squaredNorm() +
                                dir.lambda.squaredNorm());
  if (!(norm > 0)) return sphere_probe(center, radius, rng);
  return scaled_offset(center, dir, radius / norm);
}

ViPoint ball_probe(const ViPoint& center, double radius, Rng& rng) {
  if (!(radius > 0)) throw InvalidInputError("ball radius must be > 0");
  const ViPoint dir = direction_sample(center, rng);
  const double norm = std::sqrt(dir.z.squaredNorm() + dir.x.squaredNorm() +
                                dir.lambda.squaredNorm());
  if (!(norm > 0)) return ball_probe(center, radius, rng);
  const double dim = static_cast<double>(center.z.size() + center.x.size() +
                                         center.lambda.size());
  const double r = radius * std::pow(rng.uniform(), 1.0 / dim);
  return scaled_offset(center, dir, r / norm);
}

}  // namespace alasso
