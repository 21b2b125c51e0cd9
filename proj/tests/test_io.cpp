#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "semirandom/io.hpp"

using namespace semirandom;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("semirandom_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" + name);
}

}  // namespace

TEST(Io, MlpRoundTripIsBitExact) {
  const Classifier c = random_mlp(7, 3, {5, 4}, 0.8, 12);
  const fs::path p = temp_file("mlp.json");
  io::save_classifier(c, p);
  const Classifier back = io::load_classifier(p);
  fs::remove(p);
  ASSERT_EQ(back.kind(), ClassifierKind::Mlp);
  const auto& a = c.mlp()->layers;
  const auto& b = back.mlp()->layers;
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].W, b[i].W);
    EXPECT_EQ(a[i].b, b[i].b);
  }
}

TEST(Io, AffineAndRadialRoundTrip) {
  const Classifier a = random_affine(4, 3, 2);
  const Classifier a2 = io::classifier_from_json(io::classifier_to_json(a));
  EXPECT_EQ(a.affine()->W, a2.affine()->W);
  EXPECT_EQ(a.affine()->b, a2.affine()->b);

  const Classifier r(RadialParams{{Eigen::Vector2d(0.1, 0.2), Eigen::Vector2d(9, 9)}, 1.0 / 3.0});
  const Classifier r2 = io::classifier_from_json(io::classifier_to_json(r));
  EXPECT_EQ(r.radial()->radius, r2.radial()->radius);
  EXPECT_EQ(r.radial()->centers[1], r2.radial()->centers[1]);
}

TEST(Io, BiasLengthMismatchNamesField) {
  const auto doc = nlohmann::json::parse(R"({"type":"affine","W":[[1,0],[0,1]],"b":[0,0,0]})");
  try {
    io::classifier_from_json(doc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::FormatError);
    EXPECT_NE(std::string(e.what()).find("b"), std::string::npos) << e.what();
  }
}

TEST(Io, MalformedDocuments) {
  for (const char* text : {R"({"type":"affine","W":[[1,0],[0]],"b":[0,0]})", R"({"type":"conv"})",
                           R"({"type":"radial","centers":[[0,0]]})", R"({"type":"mlp","activation":"relu","layers":[]})",
                           R"({"type":"affine","W":[[1,"x"]],"b":[0]})"}) {
    try {
      io::classifier_from_json(nlohmann::json::parse(text));
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::FormatError) << text;
    }
  }
  try {
    io::load_classifier("/nonexistent/dir/c.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IoError);
  }
}

TEST(Io, PointsAndSubspace) {
  const std::vector<Eigen::VectorXd> pts{Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(-0.1, 0, 1e-300)};
  const auto back = io::points_from_json(io::points_to_json(pts));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1], pts[1]);

  const auto doc = nlohmann::json::parse(R"({"basis":[[1,0,0],[1,1,0]],"orthonormalize":true})");
  const Subspace S = io::subspace_from_json(doc);
  EXPECT_EQ(S.m(), 2);
  EXPECT_LE(S.orthonormality_error(), 1e-12);
}

// Fixture written once by the implementation and frozen in samples/.
TEST(Io, FrozenAffineFixture) {
  const fs::path dir = SEMIRANDOM_SAMPLES_DIR;
  const Classifier c = io::load_classifier(dir / "affine.json");
  const auto points = io::load_points(dir / "affine_points.json");
  const auto expected = io::read_json(dir / "affine_labels.json").at("labels");
  ASSERT_EQ(points.size(), expected.size());
  for (std::size_t i = 0; i < points.size(); ++i) EXPECT_EQ(c.predict(points[i]), expected[i].get<long>()) << i;
}
