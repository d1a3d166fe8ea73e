#include "alasso/frame.hpp"

#include <cmath>
#include <vector>

#include "alasso/errors.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using namespace alasso;

namespace {

std::vector<std::vector<double>> gram_by_hand(const Matrix& entries) {
  const int n = static_cast<int>(entries.rows());
  const int d = static_cast<int>(entries.cols());
  std::vector<std::vector<double>> g(d, std::vector<double>(d, 0.0));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      double dot = 0.0;
      for (int i = 0; i < n; ++i) dot += entries(i, a) * entries(i, b);
      g[a][b] = dot;
    }
  return g;
}

}  // namespace

TEST_CASE("identity frame is the d x d identity with unit bounds") {
  const TightFrame frame = build_identity_frame(4);
  CHECK(frame.rows() == 4);
  CHECK(frame.cols() == 4);
  CHECK((frame.entries - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(frame.frame_lower == 1.0);
  CHECK(frame.frame_upper == 1.0);
  REQUIRE(frame.row_norm.has_value());
  CHECK(*frame.row_norm == 1.0);
  CHECK(frame.construction == FrameConstruction::identity);
  CHECK(frame.bases == 1);

  const FrameReport report = validate_frame(frame);
  CHECK(report.is_tight);
  CHECK(report.is_uniform_row_norm);
  CHECK(report.max_gram_deviation == 0.0);
  CHECK(report.lower_bound == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(report.upper_bound == doctest::Approx(1.0).epsilon(1e-14));

  CHECK_THROWS_AS(build_identity_frame(0), InvalidInputError);
}

TEST_CASE("seeded concatenated-bases frame is a Parseval frame") {
  const int d = 8;
  const int k = 2;
  const TightFrame frame = build_concatenated_bases_frame(d, k, 42);

  CHECK(frame.rows() == k * d);
  CHECK(frame.cols() == d);
  CHECK(frame.construction == FrameConstruction::concatenated_bases);
  CHECK(frame.bases == k);
  CHECK(frame.seed == 42);
  CHECK(frame.frame_lower == 1.0);
  CHECK(frame.frame_upper == 1.0);

  const double scale = 1.0 / std::sqrt(2.0);
  REQUIRE(frame.row_norm.has_value());
  CHECK(*frame.row_norm == doctest::Approx(scale).epsilon(1e-15));

  SUBCASE("first block is the scaled identity") {
    CHECK((frame.entries.topRows(d) - scale * Matrix::Identity(d, d))
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }

  SUBCASE("Gram matrix equals the identity to machine precision") {
    const Matrix gram = frame.entries.transpose() * frame.entries;
    CHECK((gram - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-12);
    const FrameReport report = validate_frame(frame);
    CHECK(report.is_tight);
    CHECK(report.is_uniform_row_norm);
    CHECK(report.max_gram_deviation <= 1e-12);
  }

  SUBCASE("every row has exactly one entry, equal to +-1/sqrt(k)") {
    for (int i = 0; i < frame.rows(); ++i) {
      int nonzeros = 0;
      for (int j = 0; j < d; ++j) {
        const double v = frame.entries(i, j);
        if (v != 0.0) {
          ++nonzeros;
          CHECK(std::abs(v) == doctest::Approx(scale).epsilon(1e-15));
        }
      }
      CHECK(nonzeros == 1);
      CHECK(frame.entries.row(i).norm() ==
            doctest::Approx(scale).epsilon(1e-15));
    }
  }

  SUBCASE("construction is bitwise deterministic in the seed") {
    const TightFrame again = build_concatenated_bases_frame(d, k, 42);
    CHECK((frame.entries - again.entries).cwiseAbs().maxCoeff() == 0.0);
    const TightFrame other = build_concatenated_bases_frame(d, k, 43);
    CHECK((frame.entries - other.entries).cwiseAbs().maxCoeff() > 0.0);
  }

  SUBCASE("k = 1 degenerates to the identity block") {
    const TightFrame single = build_concatenated_bases_frame(d, 1, 7);
    CHECK((single.entries - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() ==
          0.0);
    CHECK(single.bases == 1);
  }

  CHECK_THROWS_AS(build_concatenated_bases_frame(0, 2, 1), InvalidInputError);
  CHECK_THROWS_AS(build_concatenated_bases_frame(3, 0, 1), InvalidInputError);
}

TEST_CASE("caller-supplied blocks are stacked and scaled") {
  Matrix rot(2, 2);
  const double c = std::cos(0.3), s = std::sin(0.3);
  rot << c, -s, s, c;
  const TightFrame frame =
      build_concatenated_bases_frame({Matrix::Identity(2, 2), rot});
  CHECK(frame.rows() == 4);
  const FrameReport report = validate_frame(frame);
  CHECK(report.is_tight);
  CHECK(report.max_gram_deviation <= 1e-12);

  SUBCASE("a non-orthogonal block breaks tightness and validation sees it") {
    Matrix shear(2, 2);
    shear << 1.0, 0.5, 0.0, 1.0;
    const TightFrame skewed =
        build_concatenated_bases_frame({Matrix::Identity(2, 2), shear});
    const FrameReport bad = validate_frame(skewed);
    CHECK_FALSE(bad.is_tight);
    CHECK(bad.max_gram_deviation > 0.1);
  }

  CHECK_THROWS_AS(build_concatenated_bases_frame(std::vector<Matrix>{}),
                  InvalidInputError);
  CHECK_THROWS_AS(
      build_concatenated_bases_frame({Matrix::Identity(2, 2), Matrix::Ones(3, 2)}),
      InvalidInputError);
}

TEST_CASE("external frame bounds match an independent eigensolve") {
  Matrix entries(3, 2);
  entries << 1.0, 0.0, 0.0, 1.0, 0.0, 1.0;
  const TightFrame frame = external_frame(entries);

  // Independent route: plain-loop Gram + Jacobi iteration.
  const auto eigs = oracle::symmetric_eigenvalues(gram_by_hand(entries));
  REQUIRE(eigs.size() == 2);
  CHECK(frame.frame_lower == doctest::Approx(eigs.front()).epsilon(1e-12));
  CHECK(frame.frame_upper == doctest::Approx(eigs.back()).epsilon(1e-12));
  CHECK(frame.frame_lower == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(frame.frame_upper == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(frame.construction == FrameConstruction::external);

  const FrameReport report = validate_frame(entries);
  CHECK_FALSE(report.is_tight);
  CHECK(report.is_uniform_row_norm);  // every row has norm 1
  CHECK(report.max_gram_deviation == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(frame.row_norm.has_value());
  CHECK(*frame.row_norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tightness and row-norm uniformity are independent") {
  // Tight (Gram = I) but rows of unequal norm.
  Matrix tall(3, 2);
  tall << 1.0, 0.0, 0.0, 1.0, 0.0, 0.0;
  const FrameReport report = validate_frame(tall);
  CHECK(report.is_tight);
  CHECK_FALSE(report.is_uniform_row_norm);
  CHECK(report.row_norm_spread == doctest::Approx(1.0).epsilon(1e-12));

  const TightFrame frame = external_frame(tall);
  CHECK_FALSE(frame.row_norm.has_value());

  // A generous tolerance flips both verdicts; the spread itself is unchanged.
  const FrameReport loose = validate_frame(tall, 2.0);
  CHECK(loose.is_uniform_row_norm);
  CHECK(loose.row_norm_spread == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(validate_frame(tall, -1.0), InvalidInputError);
}

TEST_CASE("degenerate matrices are rejected") {
  Matrix wide(2, 3);
  wide.setOnes();
  CHECK_THROWS_AS(validate_frame(wide), InvalidInputError);
  CHECK_THROWS_AS(external_frame(wide), InvalidInputError);

  Matrix rank_deficient(3, 2);
  rank_deficient << 1.0, 0.0, 2.0, 0.0, 0.0, 0.0;
  CHECK_THROWS_AS(external_frame(rank_deficient), InvalidInputError);

  Matrix with_nan(2, 2);
  with_nan << 1.0, 0.0, 0.0, std::nan("");
  CHECK_THROWS_AS(validate_frame(with_nan), InvalidInputError);
}

TEST_CASE("random signed permutations are orthogonal and seeded") {
  Rng rng(7);
  const Matrix q = random_signed_permutation(5, rng);
  CHECK((q.transpose() * q - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() ==
        0.0);
  for (int i = 0; i < 5; ++i) {
    int nonzeros = 0;
    for (int j = 0; j < 5; ++j)
      if (q(i, j) != 0.0) {
        ++nonzeros;
        CHECK(std::abs(q(i, j)) == 1.0);
      }
    CHECK(nonzeros == 1);
  }

  Rng replay(7);
  const Matrix same = random_signed_permutation(5, replay);
  CHECK((q - same).cwiseAbs().maxCoeff() == 0.0);

  Rng other_rng(8);
  bool any_diff = false;
  for (int trial = 0; trial < 8 && !any_diff; ++trial)
    any_diff = (random_signed_permutation(5, other_rng) - q).cwiseAbs().maxCoeff() > 0.0;
  CHECK(any_diff);

  CHECK_THROWS_AS(random_signed_permutation(0, rng), InvalidInputError);
}

TEST_CASE("construction tags round-trip through strings") {
  for (auto c : {FrameConstruction::identity, FrameConstruction::concatenated_bases,
                 FrameConstruction::external})
    CHECK(frame_construction_from_string(to_string(c)) == c);
  CHECK_THROWS_AS(frame_construction_from_string("fourier"), InvalidInputError);
}
