#pragma once

#include "alasso/problem.hpp"
#include "alasso/rng.hpp"

namespace alasso {

// A point omega = (z, x, lambda) of the variational reformulation: the
// objective splits as theta(u) = ||z||_1 + (alpha/2) ||y - M x||^2 with
// u = (z, x) under the coupling D x = z, and lambda is the multiplier.
// Saddle points are exactly the omega* with, for all omega:
//   theta(u) - theta(u*) + (omega - omega*)^T F(omega*) >= 0 .
struct ViPoint {
  Vector z;       // R^n
  Vector x;       // R^d
  Vector lambda;  // R^n
};

// theta(u) = ||z||_1 + (alpha/2) ||y - M x||^2.
double theta(const Vector& z, const Vector& x, const ProblemInstance& instance);

// The monotone operator F(omega) = (lambda, -D^T lambda, D x - z), returned
// with the same block shape as its argument.  F is affine with a
// skew-symmetric linear part.
ViPoint f_apply(const ViPoint& omega, const ProblemInstance& instance);

// |(omega - omega_bar)^T (F(omega) - F(omega_bar))|.  Identically zero in
// exact arithmetic by skew symmetry; the return value is the floating-point
// defect.
double skew_defect(const ViPoint& omega, const ViPoint& omega_bar,
                   const ProblemInstance& instance);

// Optimality residuals, all zero exactly at a saddle point:
//   subgradient:  distance of -lambda from the l1 subdifferential at z
//                 (components |z_j| <= zero_tol use the interval criterion),
//   stationarity: || alpha M^T (M x - y) - D^T lambda ||_inf,
//   feasibility:  || D x - z ||_inf.
struct KktResiduals {
  double subgradient = 0.0;
  double stationarity = 0.0;
  double feasibility = 0.0;
  double max() const;
};

KktResiduals kkt_residuals(const ViPoint& point, const ProblemInstance& instance,
                           double zero_tol = 1e-9);

// theta(u_probe) - theta(u_cand) + (omega_probe - omega_cand)^T F(omega_probe).
// Nonnegative for every probe exactly when the candidate solves the
// variational problem.  The same quantity with F evaluated at the candidate is
// equal by skew symmetry; both are computed and their agreement is asserted to
// 1e-9 * (1 + magnitudes) before the probe form is returned.
double vi_gap_probe(const ViPoint& candidate, const ViPoint& probe,
                    const ProblemInstance& instance);

// Probe drawn uniformly from the sphere of the given radius about the center
// (all three blocks jointly).
ViPoint sphere_probe(const ViPoint& center, double radius, Rng& rng);

// Probe drawn uniformly from the ball of the given radius about the center.
ViPoint ball_probe(const ViPoint& center, double radius, Rng& rng);

}  // namespace alasso
