#include "alasso/vi.hpp"

#include <cmath>
#include <vector>

#include "alasso/errors.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace alasso;

namespace {

ProblemInstance scalar_instance(double y, double alpha) {
  ProblemInstance instance;
  instance.M = Matrix::Ones(1, 1);
  instance.y = Vector::Constant(1, y);
  instance.D = build_identity_frame(1);
  instance.alpha = alpha;
  return instance;
}

ProblemInstance standard_instance(std::uint64_t seed) {
  InstanceSpec spec;
  spec.d = 8;
  spec.m = 6;
  spec.k = 2;
  spec.ell = 12;
  spec.alpha = 100.0;
  return generate_instance(spec, seed);
}

ViPoint scalar_point(double z, double x, double lambda) {
  return {Vector::Constant(1, z), Vector::Constant(1, x),
          Vector::Constant(1, lambda)};
}

ViPoint random_point(const ProblemInstance& instance, Rng& rng, double scale) {
  ViPoint p{Vector(instance.analysis_dim()), Vector(instance.signal_dim()),
            Vector(instance.analysis_dim())};
  for (int i = 0; i < p.z.size(); ++i) p.z[i] = scale * rng.normal();
  for (int i = 0; i < p.x.size(); ++i) p.x[i] = scale * rng.normal();
  for (int i = 0; i < p.lambda.size(); ++i) p.lambda[i] = scale * rng.normal();
  return p;
}

}  // namespace

TEST_CASE("the split objective matches a plain-loop evaluation") {
  const ProblemInstance instance = standard_instance(21);
  Rng rng(303);
  for (int trial = 0; trial < 5; ++trial) {
    const ViPoint p = random_point(instance, rng, 2.0);
    std::vector<double> z(p.z.data(), p.z.data() + p.z.size());
    std::vector<double> x(p.x.data(), p.x.data() + p.x.size());
    std::vector<double> y(instance.y.data(),
                          instance.y.data() + instance.y.size());
    std::vector<std::vector<double>> m(instance.measurement_dim());
    for (int i = 0; i < instance.measurement_dim(); ++i)
      for (int j = 0; j < instance.signal_dim(); ++j)
        m[i].push_back(instance.M(i, j));
    const double expected = oracle::objective(z, m, x, y, instance.alpha);
    CHECK(theta(p.z, p.x, instance) ==
          doctest::Approx(expected).epsilon(1e-12));
  }

  const ProblemInstance scalar = scalar_instance(10.0, 1.0);
  CHECK(theta(Vector::Zero(1), Vector::Zero(1), scalar) == 50.0);
  CHECK(theta(Vector::Constant(1, 9.0), Vector::Constant(1, 9.0), scalar) ==
        9.5);
  CHECK_THROWS_AS(theta(Vector::Zero(2), Vector::Zero(1), scalar),
                  InvalidInputError);
}

TEST_CASE("the monotone operator has the advertised block structure") {
  const ProblemInstance instance = standard_instance(22);
  Rng rng(404);
  const ViPoint p = random_point(instance, rng, 1.0);
  const ViPoint f = f_apply(p, instance);
  CHECK((f.z - p.lambda).cwiseAbs().maxCoeff() == 0.0);
  CHECK((f.x + instance.D.entries.transpose() * p.lambda).cwiseAbs().maxCoeff() <=
        1e-14);
  CHECK((f.lambda - (instance.D.analyze(p.x) - p.z)).cwiseAbs().maxCoeff() <=
        1e-14);

  // Scalar saddle point: F(omega*) = (-1, 1, 0).
  const ProblemInstance scalar = scalar_instance(10.0, 1.0);
  const ViPoint f_star = f_apply(scalar_point(9.0, 9.0, -1.0), scalar);
  CHECK(f_star.z[0] == -1.0);
  CHECK(f_star.x[0] == 1.0);
  CHECK(f_star.lambda[0] == 0.0);

  CHECK_THROWS_AS(f_apply(ViPoint{Vector::Zero(1), Vector::Zero(1),
                                  Vector::Zero(1)},
                          instance),
                  InvalidInputError);
}

TEST_CASE("the affine part of the operator is skew symmetric") {
  const ProblemInstance instance = standard_instance(23);
  Rng rng(505);
  for (int trial = 0; trial < 20; ++trial) {
    const ViPoint a = random_point(instance, rng, 5.0);
    const ViPoint b = random_point(instance, rng, 5.0);
    const double defect = skew_defect(a, b, instance);
    double norm_sq = (a.z - b.z).squaredNorm() + (a.x - b.x).squaredNorm() +
                     (a.lambda - b.lambda).squaredNorm();
    CHECK(defect <= 1e-11 * (1.0 + norm_sq));
  }
}

TEST_CASE("optimality residuals vanish exactly at the scalar saddle") {
  const ProblemInstance scalar = scalar_instance(10.0, 1.0);
  const KktResiduals at_saddle =
      kkt_residuals(scalar_point(9.0, 9.0, -1.0), scalar);
  CHECK(at_saddle.subgradient == 0.0);
  CHECK(at_saddle.stationarity == 0.0);
  CHECK(at_saddle.feasibility == 0.0);
  CHECK(at_saddle.max() == 0.0);

  SUBCASE("each residual reacts to its own perturbation") {
    // Wrong multiplier sign at an active coordinate.
    CHECK(kkt_residuals(scalar_point(9.0, 9.0, 1.0), scalar).subgradient ==
          2.0);
    // Multiplier escaping the subdifferential interval at z = 0.
    CHECK(kkt_residuals(scalar_point(0.0, 0.0, -1.5), scalar).subgradient ==
          doctest::Approx(0.5).epsilon(1e-15));
    CHECK(kkt_residuals(scalar_point(0.0, 0.0, 0.5), scalar).subgradient ==
          0.0);
    // Feasibility sees the coupling violation.
    CHECK(kkt_residuals(scalar_point(8.0, 9.0, -1.0), scalar).feasibility ==
          1.0);
    // Stationarity sees the quadratic slope.
    CHECK(kkt_residuals(scalar_point(9.0, 7.0, -1.0), scalar).stationarity ==
          doctest::Approx(2.0).epsilon(1e-15));
  }

  CHECK_THROWS_AS(kkt_residuals(scalar_point(0, 0, 0), scalar, -1.0),
                  InvalidInputError);
}

TEST_CASE("gap probes separate solutions from non-solutions") {
  const ProblemInstance scalar = scalar_instance(10.0, 1.0);
  const ViPoint saddle = scalar_point(9.0, 9.0, -1.0);
  const ViPoint origin = scalar_point(0.0, 0.0, 0.0);

  // theta(u*) - theta(0) + (omega* - 0)^T F(omega*) = 9.5 - 50 + 0.
  CHECK(vi_gap_probe(origin, saddle, scalar) ==
        doctest::Approx(-40.5).epsilon(1e-14));
  // Probing the true saddle stays nonnegative.
  CHECK(vi_gap_probe(saddle, origin, scalar) ==
        doctest::Approx(40.5).epsilon(1e-14));

  Rng rng(606);
  for (int trial = 0; trial < 50; ++trial) {
    const ViPoint probe = ball_probe(saddle, 3.0, rng);
    CHECK(vi_gap_probe(saddle, probe, scalar) >= -1e-12);
  }
}

TEST_CASE("sphere and ball probes respect their radii and seeds") {
  const ProblemInstance instance = standard_instance(24);
  Rng rng(707);
  const ViPoint center = random_point(instance, rng, 1.0);

  Rng probe_rng(808);
  double min_ball = 1e300;
  for (int trial = 0; trial < 40; ++trial) {
    const ViPoint on_sphere = sphere_probe(center, 2.0, probe_rng);
    const double r_sphere =
        std::sqrt((on_sphere.z - center.z).squaredNorm() +
                  (on_sphere.x - center.x).squaredNorm() +
                  (on_sphere.lambda - center.lambda).squaredNorm());
    CHECK(r_sphere == doctest::Approx(2.0).epsilon(1e-12));

    const ViPoint in_ball = ball_probe(center, 2.0, probe_rng);
    const double r_ball =
        std::sqrt((in_ball.z - center.z).squaredNorm() +
                  (in_ball.x - center.x).squaredNorm() +
                  (in_ball.lambda - center.lambda).squaredNorm());
    CHECK(r_ball <= 2.0 + 1e-12);
    min_ball = std::min(min_ball, r_ball);
  }
  CHECK(min_ball < 2.0);  // interior points do occur

  Rng a(99), b(99);
  const ViPoint pa = sphere_probe(center, 1.0, a);
  const ViPoint pb = sphere_probe(center, 1.0, b);
  CHECK((pa.z - pb.z).cwiseAbs().maxCoeff() == 0.0);
  CHECK((pa.x - pb.x).cwiseAbs().maxCoeff() == 0.0);
  CHECK((pa.lambda - pb.lambda).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(sphere_probe(center, 0.0, rng), InvalidInputError);
  CHECK_THROWS_AS(ball_probe(center, -1.0, rng), InvalidInputError);
}
