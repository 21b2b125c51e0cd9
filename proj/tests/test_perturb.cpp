#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "semirandom/perturb.hpp"

using namespace semirandom;

namespace {

Classifier binary_34() {
  Eigen::Matrix2d W;
  W << 3, 4, 0, 0;
  return Classifier(AffineParams{W, Eigen::Vector2d::Zero()});
}

Classifier sphere(Eigen::Index d, double R, const Eigen::VectorXd& center) {
  (void)d;
  return Classifier(RadialParams{{center}, R});
}

Eigen::VectorXd point_at_distance(Rng& rng, const Eigen::VectorXd& center, double dist) {
  return center + dist * rng.unit_vector(center.size());
}

}  // namespace

TEST(AffineWorstCase, TwoDimensionalExample) {
  const Classifier c = binary_34();
  const Eigen::Vector2d x0(1, 0);
  const AffineSolution sol = affine_worst_case(c, x0);
  EXPECT_EQ(sol.original_class, 0);
  EXPECT_NEAR(sol.overall.norm, 0.6, 1e-15);
  EXPECT_NEAR(sol.overall.r[0], -0.36, 1e-15);
  EXPECT_NEAR(sol.overall.r[1], -0.48, 1e-15);
  const double brute = oracles::brute_force_distance_2d(
      [&](const Eigen::Vector2d& x) { return c.scores(x)[0] - c.scores(x)[1]; }, x0, 5.0, 20000);
  EXPECT_NEAR(brute, 0.6, 1e-6);
}

TEST(AffineWorstCase, OnBoundaryGivesZero) {
  const Classifier c = binary_34();
  const AffineSolution sol = affine_worst_case(c, Eigen::Vector2d(4, -3));
  EXPECT_EQ(sol.overall.norm, 0.0);
  EXPECT_TRUE(sol.overall.r.isZero(0.0));
}

TEST(AffineWorstCase, DuplicateClassSkipped) {
  Eigen::Matrix<double, 3, 2> W;
  W << 1, 0, 0, 1, 1, 0;
  const Classifier c(AffineParams{W, Eigen::Vector3d(0, 0, 0)});
  const AffineSolution sol = affine_worst_case(c, Eigen::Vector2d(2, 1));
  EXPECT_EQ(sol.original_class, 0);
  ASSERT_EQ(sol.per_class.size(), 1u);
  EXPECT_EQ(sol.per_class[0].k, 1);
  EXPECT_NEAR(sol.overall.norm, 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(AffineWorstCase, IdenticalScoresUnreachable) {
  Eigen::Matrix2d W;
  W << 1, 1, 1, 1;
  const Classifier c(AffineParams{W, Eigen::Vector2d(1, 0)});
  try {
    affine_worst_case(c, Eigen::Vector2d(0, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Unreachable);
  }
}

TEST(AffineSubspace, FullSpaceReduction) {
  const Classifier c = random_affine(20, 5, 3);
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXd x0 = rng.gaussian_vector(20);
    const AffineSolution a = affine_worst_case(c, x0);
    const AffineSolution b = affine_subspace(c, x0, Subspace::full(20));
    EXPECT_DOUBLE_EQ(a.overall.norm, b.overall.norm);
    EXPECT_EQ(a.overall.attacked_class, b.overall.attacked_class);
  }
}

TEST(AffineSubspace, OrthogonalSubspaceUnreachable) {
  const Classifier c = binary_34();
  const Eigen::Vector2d perp(-4, 3);
  const Subspace S = subspace_from_vectors(std::vector<Eigen::VectorXd>{perp.normalized()}, false);
  try {
    affine_subspace(c, Eigen::Vector2d(1, 0), S);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Unreachable);
  }
}

TEST(SubspaceDeepFool, AgreesWithAffineClosedForm) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const Classifier c = random_affine(50, 5, derive_seed(31, s));
    Rng rng(derive_seed(32, s));
    const Eigen::VectorXd x0 = rng.gaussian_vector(50);
    const Subspace S = sample_subspace(50, 1 + static_cast<Eigen::Index>(s % 20), derive_seed(33, s));
    const double exact = affine_subspace(c, x0, S).overall.norm;
    const PerturbationResult df = subspace_deepfool(c, x0, S);
    ASSERT_TRUE(df.converged);
    EXPECT_LE(std::abs(df.norm - exact), 1e-6 * exact) << s;
  }
}

TEST(SubspaceDeepFool, SphereMatchesExactDistance) {
  Rng rng(5);
  for (int i = 0; i < 30; ++i) {
    const Eigen::VectorXd center = rng.gaussian_vector(15, 3.0);
    const double R = rng.uniform(0.5, 4.0);
    const double dist = rng.uniform(0.05, 3.0);
    const double signed_dist = (i % 2 == 0) ? dist : -std::min(dist, 0.9 * R);
    const Eigen::VectorXd x0 = point_at_distance(rng, center, R + signed_dist);
    const PerturbationResult res = worst_case(sphere(15, R, center), x0);
    const double exact = std::abs((x0 - center).norm() - R);
    EXPECT_LE(std::abs(res.norm - exact), 1e-6 * exact) << i;
  }
}

TEST(SubspaceDeepFool, SphereInRandomSubspaceMatchesChordOracle) {
  Rng rng(6);
  int checked = 0;
  for (int i = 0; i < 60; ++i) {
    const Eigen::VectorXd center = Eigen::VectorXd::Zero(30);
    const double R = 5.0;
    const Eigen::VectorXd x0 = point_at_distance(rng, center, i % 2 ? 5.5 : 4.6);
    const Subspace S = sample_subspace(30, 3 + i % 10, derive_seed(60, i));
    const double oracle = oracles::sphere_subspace_distance(x0, center, R, S.basis());
    if (!std::isfinite(oracle)) continue;
    const PerturbationResult res = subspace_deepfool(sphere(30, R, center), x0, S);
    ASSERT_TRUE(res.converged);
    EXPECT_LE(std::abs(res.norm - oracle), 1e-4 * oracle) << i;
    // Collinearity with the projected center direction.
    const Eigen::VectorXd py = S.project(x0);
    EXPECT_GE(std::abs(res.r.dot(py)) / (res.norm * py.norm()), 1.0 - 1e-6);
    ++checked;
  }
  EXPECT_GE(checked, 30);
}

TEST(SubspaceDeepFool, ReportsNonConvergence) {
  const Classifier c = sphere(3, 1.0, Eigen::Vector3d::Zero());
  SolverParams p;
  p.max_iterations = 1;
  // Far outside, one linearized step covers about half the distance.
  const PerturbationResult res = subspace_deepfool(c, Eigen::Vector3d(100, 0, 0), Subspace::full(3), p);
  EXPECT_FALSE(res.converged);
  EXPECT_EQ(res.iterations, 1);
  EXPECT_GT(res.norm, 40.0);
  EXPECT_LT(res.norm, 99.0);
  p.max_iterations = 200;
  EXPECT_NEAR(subspace_deepfool(c, Eigen::Vector3d(100, 0, 0), Subspace::full(3), p).norm, 99.0, 99e-6);
}

TEST(SubspaceDeepFool, StationaryGradient) {
  MlpParams zero{{DenseLayer{Eigen::MatrixXd::Zero(2, 2), Eigen::Vector2d(1, 0)}}};
  try {
    subspace_deepfool(Classifier(zero), Eigen::Vector2d(0, 0), Subspace::full(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::StationaryGradient);
  }
}

TEST(LineSearch, AffineBinaryClosedForm) {
  const Classifier c = binary_34();
  const Eigen::Vector2d x0(1, 0);
  Rng rng(8);
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXd v = rng.unit_vector(2);
    const double expected = 3.0 / std::abs(Eigen::Vector2d(3, 4).dot(v));
    const PerturbationResult res = line_search_robustness(c, x0, v);
    EXPECT_NEAR(res.norm, expected, 1e-8 * std::max(1.0, expected));
  }
}

TEST(LineSearch, OrthogonalDirectionHasNoCrossing) {
  try {
    line_search_robustness(binary_34(), Eigen::Vector2d(1, 0), Eigen::Vector2d(-0.8, 0.6));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoCrossing);
  }
}

TEST(LineSearch, SphereTowardCenter) {
  const Classifier c = sphere(4, 2.0, Eigen::Vector4d::Zero());
  const Eigen::Vector4d x0(0, 3.5, 0, 0);
  const PerturbationResult res = line_search_robustness(c, x0, Eigen::Vector4d(0, -1, 0, 0));
  EXPECT_NEAR(res.norm, 1.5, 1e-9);
  // From inside the ball every direction exits.
  const Eigen::Vector4d inside(0, 0.5, 0, 0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PerturbationResult res2 = random_direction_robustness(c, inside, seed);
    EXPECT_NEAR((inside + res2.r).norm(), 2.0, 1e-6);
  }
}

TEST(WorstCase, TinyMlpCloseToTangentAffine) {
  Rng rng(9);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Classifier mlp = random_mlp(20, 3, {16}, 0.02, derive_seed(90, s));
    const Eigen::VectorXd x0 = rng.gaussian_vector(20, 0.1);
    const double tangent = affine_worst_case(tangent_affine(mlp, x0), x0).overall.norm;
    const PerturbationResult res = worst_case(mlp, x0);
    ASSERT_TRUE(res.converged);
    EXPECT_LE(std::abs(res.norm - tangent), 0.02 * tangent) << s;
  }
}

TEST(PerClass, AffineAndMlpAgreeOnAffineNetwork) {
  // A one-layer MLP is affine; targeted DeepFool should match the closed form.
  const Classifier a = random_affine(10, 4, 12);
  const Classifier m(MlpParams{{DenseLayer{a.affine()->W, a.affine()->b}}});
  const Eigen::VectorXd x0 = Rng(13).gaussian_vector(10);
  const auto exact = per_class_worst_case(a, x0);
  const auto approx = per_class_worst_case(m, x0);
  ASSERT_EQ(exact.size(), approx.size());
  for (std::size_t i = 0; i < exact.size(); ++i) {
    EXPECT_EQ(exact[i].k, approx[i].k);
    EXPECT_NEAR(approx[i].norm, exact[i].norm, 1e-6 * exact[i].norm);
  }
}

TEST(PerturbProperty, DominanceNestingMinimalityMembership) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng rng(derive_seed(100, s));
    // DeepFool is local, so the MLP half stays at a moderate weight scale
    // where it reliably lands on the nearest boundary.
    const bool use_mlp = s % 2 == 1;
    const Classifier c = use_mlp ? random_mlp(25, 4, {20}, 0.5, s) : random_affine(25, 4, s);
    const Eigen::VectorXd x0 = rng.gaussian_vector(25);
    const Subspace big = sample_subspace(25, 12, derive_seed(101, s));
    const Subspace small = subspace_from_vectors(
        std::vector<Eigen::VectorXd>{big.basis().col(0), big.basis().col(1), big.basis().col(2)}, false);

    const PerturbationResult full = worst_case(c, x0);
    const PerturbationResult rb = subspace_perturbation(c, x0, big);
    const PerturbationResult rs = subspace_perturbation(c, x0, small);
    if (!full.converged || !rb.converged || !rs.converged) continue;
    EXPECT_GE(rb.norm, full.norm * (1 - 1e-6)) << s;
    EXPECT_GE(rs.norm, full.norm * (1 - 1e-6)) << s;
    if (!use_mlp) EXPECT_GE(rs.norm, rb.norm * (1 - 1e-12)) << s;

    for (const auto* pair : {&rb, &rs}) {
      const Subspace& S = pair == &rb ? big : small;
      EXPECT_LE((pair->r - S.project(pair->r)).norm(), 1e-8 * std::max(pair->norm, 1.0));
      EXPECT_EQ(c.predict(x0 + 0.999 * pair->r), c.predict(x0)) << s;
      // Non-strict crossing: the margin is >= 0 at x0 + r (closed forms up to rounding).
      EXPECT_GE(label_margin(c.scores(x0 + pair->r), c.predict(x0)), use_mlp ? 0.0 : -1e-12) << s;
    }
  }
}
