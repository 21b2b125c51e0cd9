#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "semirandom/classifier.hpp"
#include "semirandom/rng.hpp"

using namespace semirandom;

namespace {

Classifier identity_affine() { return Classifier(AffineParams{Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero()}); }

Classifier single_sphere(const Eigen::VectorXd& center, double R) { return Classifier(RadialParams{{center}, R}); }

void expect_matches_finite_differences(const Classifier& c, const Eigen::VectorXd& x, Eigen::Index k) {
  const Eigen::VectorXd g = c.gradient(x, k);
  const Eigen::VectorXd fd = oracles::central_difference([&](const Eigen::VectorXd& y) { return c.scores(y)[k]; }, x, 1e-4);
  EXPECT_LE((g - fd).norm(), 1e-4 * std::max(1e-8, g.norm())) << "k=" << k;
}

}  // namespace

TEST(Scores, Examples) {
  EXPECT_EQ(identity_affine().scores(Eigen::Vector2d(3, -1)), Eigen::VectorXd(Eigen::Vector2d(3, -1)));

  const Eigen::VectorXd s = single_sphere(Eigen::Vector3d::Zero(), 2.0).scores(Eigen::Vector3d::Zero());
  EXPECT_EQ(s[0], 4.0);
  EXPECT_EQ(s[1], 0.0);

  MlpParams zero{{DenseLayer{Eigen::MatrixXd::Zero(8, 3), Eigen::VectorXd::Zero(8)},
                  DenseLayer{Eigen::MatrixXd::Zero(3, 8), Eigen::VectorXd::Zero(3)}}};
  EXPECT_TRUE(Classifier(zero).scores(Eigen::Vector3d(1, -2, 7)).isZero(0.0));
}

TEST(Scores, RejectsNonFiniteAndWrongSize) {
  const Classifier c = identity_affine();
  try {
    c.scores(Eigen::Vector2d(1, std::numeric_limits<double>::quiet_NaN()));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
  }
  try {
    c.scores(Eigen::Vector3d(1, 2, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidDimension);
  }
}

TEST(Predict, ExamplesAndTieBreak) {
  EXPECT_EQ(identity_affine().predict(Eigen::Vector2d(3, -1)), 0);
  EXPECT_EQ(identity_affine().predict(Eigen::Vector2d(0, 0)), 0);
  EXPECT_EQ(Classifier::argmax(Eigen::Vector3d(1, 5, 5)), 1);
  const Classifier sphere = single_sphere(Eigen::Vector2d::Zero(), 1.0);
  EXPECT_EQ(sphere.predict(Eigen::Vector2d(3, 0)), 1);
  EXPECT_EQ(sphere.predict(Eigen::Vector2d(0.5, 0)), 0);
}

TEST(Gradient, AffineIsRowOfW) {
  Eigen::Matrix<double, 3, 2> W;
  W << 1, 2, -3, 4, 0.5, 0;
  const Classifier c(AffineParams{W, Eigen::Vector3d(1, 2, 3)});
  Rng rng(1);
  for (int i = 0; i < 5; ++i) {
    const Eigen::VectorXd x = rng.gaussian_vector(2, 10.0);
    for (Eigen::Index k = 0; k < 3; ++k) EXPECT_EQ(c.gradient(x, k), Eigen::VectorXd(W.row(k).transpose()));
  }
}

TEST(Gradient, RadialSingleCenter) {
  const Eigen::Vector3d center(1, -1, 2);
  const Classifier c = single_sphere(center, 1.5);
  const Eigen::Vector3d x(0.3, 0.7, -2.0);
  EXPECT_TRUE(c.gradient(x, 0).isApprox(-2.0 * (x - center), 1e-15));
  EXPECT_TRUE(c.gradient(x, 1).isZero(0.0));
  expect_matches_finite_differences(c, x, 0);
}

TEST(Gradient, RadialEquidistantIsAmbiguous) {
  const Classifier c(RadialParams{{Eigen::Vector2d(-5, 0), Eigen::Vector2d(5, 0)}, 1.0});
  try {
    c.gradient(Eigen::Vector2d(0, 3), 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::AmbiguousGradient);
  }
  EXPECT_NO_THROW(c.gradient(Eigen::Vector2d(0.1, 3), 0));
}

TEST(GradientProperty, FiniteDifferencesAllKinds) {
  const Classifier affine = random_affine(12, 4, 1);
  const Classifier mlp = random_mlp(12, 4, {16, 8}, 1.5, 2);
  std::vector<Eigen::VectorXd> centers;
  Rng crng(3);
  for (int i = 0; i < 3; ++i) centers.push_back(crng.gaussian_vector(12, 20.0));
  const Classifier radial(RadialParams{centers, 2.0});
  for (const Classifier* c : {&affine, &mlp, &radial}) {
    for (std::uint64_t s = 0; s < 100; ++s) {
      Rng rng(derive_seed(17, s));
      const Eigen::VectorXd x = rng.gaussian_vector(12, 3.0);
      const Eigen::Index k = static_cast<Eigen::Index>(rng.next_u64() % c->num_classes());
      expect_matches_finite_differences(*c, x, k);
    }
  }
}

TEST(GradientProperty, JacobianRowsMatchGradients) {
  const Classifier mlp = random_mlp(6, 3, {5}, 1.0, 9);
  const Eigen::VectorXd x = Rng(4).gaussian_vector(6);
  const Eigen::MatrixXd J = mlp.jacobian(x);
  for (Eigen::Index k = 0; k < 3; ++k) EXPECT_TRUE(J.row(k).transpose().isApprox(mlp.gradient(x, k), 1e-14));
}

TEST(ClassifierProperty, CommonBiasShiftKeepsLabels) {
  const Classifier c = random_affine(8, 5, 21);
  AffineParams shifted = *c.affine();
  shifted.b.array() += 3.25;
  const Classifier d(shifted);
  Rng rng(22);
  for (int i = 0; i < 200; ++i) {
    const Eigen::VectorXd x = rng.gaussian_vector(8, 4.0);
    EXPECT_EQ(c.predict(x), d.predict(x));
  }
}

TEST(ClassifierProperty, RadialLabelFlipsAtRadius) {
  const Classifier c = single_sphere(Eigen::Vector3d::Zero(), 2.0);
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const Eigen::VectorXd u = rng.unit_vector(3);
    EXPECT_EQ(c.predict(u * 1.999), 0);
    EXPECT_EQ(c.predict(u * 2.001), 1);
  }
}

TEST(RandomMlp, ReproducibleAndNearBiasInSmallScaleLimit) {
  const Eigen::VectorXd probe = Rng(8).gaussian_vector(50);
  EXPECT_EQ(random_mlp(50, 4, {32}, 1.0, 3).scores(probe), random_mlp(50, 4, {32}, 1.0, 3).scores(probe));

  const Classifier tiny = random_mlp(50, 4, {32}, 1e-6, 3);
  const Eigen::VectorXd& b_out = tiny.mlp()->layers.back().b;
  EXPECT_LE((tiny.scores(probe) - b_out).norm(), 1e-3 * b_out.norm());
  EXPECT_THROW(random_mlp(50, 4, {32}, 0.0, 3), Error);
}

TEST(TangentAffine, MatchesScoresAndGradientsAtPoint) {
  const Classifier mlp = random_mlp(10, 3, {12}, 1.0, 4);
  const Eigen::VectorXd x = Rng(10).gaussian_vector(10);
  const Classifier t = tangent_affine(mlp, x);
  EXPECT_TRUE(t.scores(x).isApprox(mlp.scores(x), 1e-12));
  EXPECT_TRUE(t.jacobian(x).isApprox(mlp.jacobian(x), 0.0));
}

TEST(Validate, RejectsInconsistentShapes) {
  try {
    Classifier(AffineParams{Eigen::MatrixXd::Zero(3, 2), Eigen::VectorXd::Zero(2)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::FormatError);
    EXPECT_NE(std::string(e.what()).find("b"), std::string::npos);
  }
  EXPECT_THROW(Classifier(RadialParams{{}, 1.0}), Error);
  EXPECT_THROW(Classifier(RadialParams{{Eigen::Vector2d::Zero()}, -1.0}), Error);
}
