#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "semirandom/harness.hpp"

using namespace semirandom;
using namespace semirandom::harness;

namespace {

std::string trials_csv(const std::vector<TrialRecord>& r) {
  std::ostringstream os;
  write_trials_csv(os, r);
  return os.str();
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Eigen::VectorXd> gaussian_points(Eigen::Index d, int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Eigen::VectorXd> out;
  for (int i = 0; i < n; ++i) out.push_back(rng.gaussian_vector(d));
  return out;
}

}  // namespace

TEST(VerifyAffine, FullSpaceRatioIsOne) {
  const CoverageReport r = verify_affine_theorem1(30, 3, 30, 0.01, 50, 4);
  EXPECT_EQ(r.coverage, 1.0);
  for (const auto& rec : r.records) EXPECT_NEAR(rec.ratio, 1.0, 1e-12);
}

TEST(VerifyAffine, VacuousFloor) {
  try {
    verify_affine_theorem1(1000, 10, 10, 0.05, 100, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Vacuous);
  }
}

TEST(VerifyAffine, CoverageAboveFloorSmall) {
  const CoverageReport r = verify_affine_theorem1(200, 5, 10, 0.01, 300, 2);
  EXPECT_NEAR(r.floor, 0.88, 1e-15);
  EXPECT_GE(r.coverage, r.floor);
  EXPECT_EQ(r.converged, 300u);
}

TEST(Determinism, IdenticalAcrossThreadCounts) {
  RunOptions one, four;
  four.threads = 4;
  EXPECT_EQ(trials_csv(verify_affine_theorem1(100, 4, 7, 0.01, 64, 9, one).records),
            trials_csv(verify_affine_theorem1(100, 4, 7, 0.01, 64, 9, four).records));

  const Classifier mlp = random_mlp(20, 3, {16}, 0.5, 3);
  const auto pts = gaussian_points(20, 12, 5);
  const BetaReport a = beta_statistic(mlp, pts, 5, 7, {}, one);
  const BetaReport b = beta_statistic(mlp, pts, 5, 7, {}, four);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(dump_json(to_json(a)), dump_json(to_json(b)));

  const auto c1 = projection_concentration(50, 5, 0.05, 500, 3, one);
  const auto c4 = projection_concentration(50, 5, 0.05, 500, 3, four);
  EXPECT_EQ(dump_json(to_json(c1)), dump_json(to_json(c4)));
}

TEST(BetaStatistic, FullSpaceIsExactlyOne) {
  const Classifier mlp = random_mlp(10, 3, {8}, 0.5, 1);
  const BetaReport r = beta_statistic(mlp, gaussian_points(10, 8, 2), 10, 3);
  EXPECT_EQ(r.mean, 1.0);
  EXPECT_EQ(r.stddev, 0.0);
}

TEST(BetaStatistic, ConsistentWithRecords) {
  const Classifier a = random_affine(40, 3, 5);
  const BetaReport r = beta_statistic(a, gaussian_points(40, 30, 6), 10, 8);
  ASSERT_EQ(r.samples, 30u);
  double sum = 0.0;
  for (const auto& rec : r.records) sum += std::sqrt(10.0 / 40.0) * rec.subspace_norm / rec.worst_norm;
  EXPECT_NEAR(r.mean, sum / 30.0, 1e-12);
}

TEST(BetaStatistic, BoundaryPointRejected) {
  Eigen::Matrix2d W;
  W << 1, 0, -1, 0;
  const Classifier c(AffineParams{W, Eigen::Vector2d::Zero()});
  EXPECT_THROW(beta_statistic(c, {Eigen::Vector2d(0, 1)}, 1, 1), Error);
}

TEST(Concentration, Examples) {
  const auto full = projection_concentration(40, 40, 0.05, 200, 1);
  EXPECT_EQ(full.violations, 0u);
  const auto loose = projection_concentration(500, 1, 0.2, 10000, 2);
  EXPECT_LE(loose.violation_rate, 0.4);
  const auto tight = projection_concentration(500, 25, 0.01, 10000, 3);
  EXPECT_LE(tight.violation_rate, 0.02);
}

TEST(ArcSweep, SmallRunHasNoViolations) {
  const Lemma3Report r = lemma3_sweep(20000, 5);
  EXPECT_EQ(r.lower_violations, 0u);
  EXPECT_EQ(r.upper_violations, 0u);
  EXPECT_GT(r.evaluated, 19000u);
  EXPECT_LE(r.max_quadratic_residual, 1e-9);
}

TEST(ArcSweep, CornerConfigs) {
  // Category 0 is flat, 1 is the convex corner.
  const auto flat = random_arc_config(1, 0);
  EXPECT_EQ(flat.kappa, 0.0);
  EXPECT_EQ(geometry::arc_ratio(flat), 1.0);
  const auto corner = random_arc_config(1, 1);
  EXPECT_NEAR(corner.r * corner.kappa, 0.999, 1e-12);
  const auto b = geometry::lemma3_bounds(corner);
  ASSERT_TRUE(b.upper.has_value());
  const double ratio = geometry::arc_ratio(corner);
  EXPECT_GE(ratio - 1.0, b.lower);
  EXPECT_LE(ratio - 1.0, *b.upper);
}

TEST(VerifyNonlinear, AffineReductionUsesWiderInterval) {
  const Classifier c = random_affine(60, 2, 3);
  const CoverageReport r = verify_nonlinear_corollary(c, std::nullopt, gaussian_points(60, 10, 4), 6, 0.01, 100, 5);
  EXPECT_EQ(r.kappa, 0.0);
  EXPECT_EQ(r.ineligible, 0u);
  EXPECT_NEAR(r.floor, 1.0 - 4 * 4 * 0.01, 1e-15);
  EXPECT_GE(r.coverage, r.floor);
  for (const auto& rec : r.records) {
    const bounds::Interval iv = bounds::corollary_interval(60, 6, 0.01, rec.worst_norm);
    EXPECT_DOUBLE_EQ(rec.low, iv.low);
    EXPECT_DOUBLE_EQ(rec.high, iv.high);
  }
}

TEST(VerifyNonlinear, TooCurvedPointsAreExcluded) {
  const Classifier c(RadialParams{{Eigen::VectorXd::Zero(50)}, 2.0});
  std::vector<Eigen::VectorXd> pts{Eigen::VectorXd::Unit(50, 0) * 3.0};
  try {
    verify_nonlinear_corollary(c, std::nullopt, pts, 5, 0.01, 10, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoData);
  }
}

TEST(Export, EmptyRecordsGiveHeaderOnly) {
  EXPECT_EQ(trials_csv({}), "trial,seed,m,worst_norm,subspace_norm,ratio,low,high,within_bounds,converged,eligible\n");
}

TEST(Export, JsonRoundTripIsExact) {
  const CoverageReport r = verify_affine_theorem1(50, 3, 5, 0.01, 20, 11);
  const auto doc = nlohmann::json::parse(dump_json(to_json(r)));
  EXPECT_EQ(doc["schema_version"], kSchemaVersion);
  EXPECT_EQ(doc["coverage"].get<double>(), r.coverage);
  EXPECT_EQ(doc["floor"].get<double>(), r.floor);
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    const auto& j = doc["records"][i];
    EXPECT_EQ(j["seed"].get<std::uint64_t>(), r.records[i].seed);
    EXPECT_EQ(j["worst_norm"].get<double>(), r.records[i].worst_norm);
    EXPECT_EQ(j["subspace_norm"].get<double>(), r.records[i].subspace_norm);
    EXPECT_EQ(j["ratio"].get<double>(), r.records[i].ratio);
    EXPECT_EQ(j["low"].get<double>(), r.records[i].low);
    EXPECT_EQ(j["high"].get<double>(), r.records[i].high);
  }
}

TEST(Export, CsvNumbersRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.123456789, -2.5e17}) EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
}

// Frozen output of a seeded 10-trial run.
TEST(Export, GoldenAffineRun) {
  const CoverageReport r = verify_affine_theorem1(100, 5, 10, 0.01, 10, 2024);
  EXPECT_EQ(trials_csv(r.records), read_file(std::filesystem::path(SEMIRANDOM_SAMPLES_DIR) / "golden_affine_10.csv"));
}
