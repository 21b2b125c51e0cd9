#ifndef SEMIRANDOM_IO_HPP
#define SEMIRANDOM_IO_HPP

// JSON documents for classifiers, point sets and subspaces.
//
//   affine: {"type":"affine","W":[[...],...],"b":[...]}        W is L x d, row-major
//   radial: {"type":"radial","centers":[[...],...],"radius":R}
//   mlp:    {"type":"mlp","activation":"tanh","layers":[{"W":[[...]],"b":[...]},...]}   W is out x in
//   points: {"points":[[...],...]}
//   subspace: {"basis":[[...],...], "orthonormalize": true}   one basis vector per row

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "semirandom/classifier.hpp"
#include "semirandom/errors.hpp"
#include "semirandom/subspace.hpp"

namespace semirandom::io {

using json = nlohmann::json;

namespace detail {

inline const json& field(const json& doc, const std::string& key, const std::string& path) {
  if (!doc.is_object() || !doc.contains(key)) fail(ErrorKind::FormatError, path + key + ": missing");
  return doc.at(key);
}

inline double to_double(const json& v, const std::string& path) {
  if (!v.is_number()) fail(ErrorKind::FormatError, path + ": expected a number");
  return v.get<double>();
}

inline Eigen::VectorXd to_vector(const json& v, const std::string& path) {
  if (!v.is_array()) fail(ErrorKind::FormatError, path + ": expected an array of numbers");
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = to_double(v[i], path + "[" + std::to_string(i) + "]");
  return out;
}

inline Eigen::MatrixXd to_matrix(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(ErrorKind::FormatError, path + ": expected a non-empty array of rows");
  std::vector<Eigen::VectorXd> rows;
  for (std::size_t i = 0; i < v.size(); ++i) rows.push_back(to_vector(v[i], path + "[" + std::to_string(i) + "]"));
  const Eigen::Index cols = rows.front().size();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols)
      fail(ErrorKind::FormatError, path + "[" + std::to_string(i) + "]: ragged row");
    out.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  }
  return out;
}

inline json from_vector(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

inline json from_matrix(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(from_vector(m.row(r).transpose()));
  return out;
}

}  // namespace detail

inline json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::FormatError, path.string() + ": " + e.what());
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) fail(ErrorKind::IoError, "write failed for " + path.string());
}

inline Classifier classifier_from_json(const json& doc) {
  const std::string type = [&] {
    const json& t = detail::field(doc, "type", "");
    if (!t.is_string()) fail(ErrorKind::FormatError, "type: expected a string");
    return t.get<std::string>();
  }();
  if (type == "affine") {
    AffineParams p{detail::to_matrix(detail::field(doc, "W", ""), "W"),
                   detail::to_vector(detail::field(doc, "b", ""), "b")};
    if (p.b.size() != p.W.rows())
      fail(ErrorKind::FormatError, "b: length " + std::to_string(p.b.size()) + " does not match the " +
                                       std::to_string(p.W.rows()) + " rows of W");
    return Classifier(std::move(p));
  }
  if (type == "radial") {
    RadialParams p;
    const Eigen::MatrixXd centers = detail::to_matrix(detail::field(doc, "centers", ""), "centers");
    for (Eigen::Index r = 0; r < centers.rows(); ++r) p.centers.emplace_back(centers.row(r).transpose());
    p.radius = detail::to_double(detail::field(doc, "radius", ""), "radius");
    return Classifier(std::move(p));
  }
  if (type == "mlp") {
    if (doc.contains("activation") && doc.at("activation") != "tanh")
      fail(ErrorKind::FormatError, "activation: only \"tanh\" is supported");
    const json& layers = detail::field(doc, "layers", "");
    if (!layers.is_array()) fail(ErrorKind::FormatError, "layers: expected an array");
    MlpParams p;
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const std::string path = "layers[" + std::to_string(i) + "].";
      p.layers.push_back({detail::to_matrix(detail::field(layers[i], "W", path), path + "W"),
                          detail::to_vector(detail::field(layers[i], "b", path), path + "b")});
    }
    return Classifier(std::move(p));
  }
  fail(ErrorKind::FormatError, "type: unknown classifier type \"" + type + "\"");
}

inline json classifier_to_json(const Classifier& c) {
  json doc;
  if (const auto* p = c.affine()) {
    doc["type"] = "affine";
    doc["W"] = detail::from_matrix(p->W);
    doc["b"] = detail::from_vector(p->b);
  } else if (const auto* p = c.radial()) {
    doc["type"] = "radial";
    doc["centers"] = json::array();
    for (const auto& center : p->centers) doc["centers"].push_back(detail::from_vector(center));
    doc["radius"] = p->radius;
  } else {
    doc["type"] = "mlp";
    doc["activation"] = "tanh";
    doc["layers"] = json::array();
    for (const auto& layer : c.mlp()->layers)
      doc["layers"].push_back({{"W", detail::from_matrix(layer.W)}, {"b", detail::from_vector(layer.b)}});
  }
  return doc;
}

inline Classifier load_classifier(const std::filesystem::path& path) {
  try {
    return classifier_from_json(read_json(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::FormatError) throw Error(ErrorKind::FormatError, path.string() + ": " + e.what());
    throw;
  }
}

inline void save_classifier(const Classifier& c, const std::filesystem::path& path) {
  write_text(path, classifier_to_json(c).dump() + "\n");
}

inline std::vector<Eigen::VectorXd> points_from_json(const json& doc) {
  const json& pts = detail::field(doc, "points", "");
  if (!pts.is_array()) fail(ErrorKind::FormatError, "points: expected an array");
  std::vector<Eigen::VectorXd> out;
  for (std::size_t i = 0; i < pts.size(); ++i)
    out.push_back(detail::to_vector(pts[i], "points[" + std::to_string(i) + "]"));
  return out;
}

inline json points_to_json(const std::vector<Eigen::VectorXd>& points) {
  json doc;
  doc["points"] = json::array();
  for (const auto& p : points) doc["points"].push_back(detail::from_vector(p));
  return doc;
}

inline std::vector<Eigen::VectorXd> load_points(const std::filesystem::path& path) {
  return points_from_json(read_json(path));
}

inline void save_points(const std::vector<Eigen::VectorXd>& points, const std::filesystem::path& path) {
  write_text(path, points_to_json(points).dump() + "\n");
}

inline Subspace subspace_from_json(const json& doc) {
  const Eigen::MatrixXd rows = detail::to_matrix(detail::field(doc, "basis", ""), "basis");
  bool orthonormalize = true;
  if (doc.contains("orthonormalize")) {
    if (!doc.at("orthonormalize").is_boolean()) fail(ErrorKind::FormatError, "orthonormalize: expected a boolean");
    orthonormalize = doc.at("orthonormalize").get<bool>();
  }
  std::vector<Eigen::VectorXd> vectors;
  for (Eigen::Index r = 0; r < rows.rows(); ++r) vectors.emplace_back(rows.row(r).transpose());
  return subspace_from_vectors(vectors, orthonormalize);
}

inline json subspace_to_json(const Subspace& s) {
  json doc;
  doc["basis"] = detail::from_matrix(s.basis().transpose());
  doc["orthonormalize"] = false;
  return doc;
}

inline Subspace load_subspace(const std::filesystem::path& path) { return subspace_from_json(read_json(path)); }

}  // namespace semirandom::io

#endif  // SEMIRANDOM_IO_HPP
