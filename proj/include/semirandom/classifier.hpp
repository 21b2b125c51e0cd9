#ifndef SEMIRANDOM_CLASSIFIER_HPP
#define SEMIRANDOM_CLASSIFIER_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "semirandom/errors.hpp"
#include "semirandom/rng.hpp"

namespace semirandom {

enum class ClassifierKind { Affine, Radial, Mlp };

/// f(x) = W x + b, row k of W is w_k.
struct AffineParams {
  Eigen::MatrixXd W;
  Eigen::VectorXd b;
};

/// Binary: f_0(x) = min_i (R^2 - |x - c_i|^2), f_1(x) = 0. Class 0 is the
/// union of balls.
struct RadialParams {
  std::vector<Eigen::VectorXd> centers;
  double radius = 1.0;
};

struct DenseLayer {
  Eigen::MatrixXd W;  // out x in
  Eigen::VectorXd b;
};

/// tanh on every hidden layer, identity on the last.
struct MlpParams {
  std::vector<DenseLayer> layers;
};

/// L-class differentiable score function f: R^d -> R^L.
class Classifier {
 public:
  using Params = std::variant<AffineParams, RadialParams, MlpParams>;

  explicit Classifier(AffineParams p) : params_(std::move(p)) { validate(); }
  explicit Classifier(RadialParams p) : params_(std::move(p)) { validate(); }
  explicit Classifier(MlpParams p) : params_(std::move(p)) { validate(); }

  ClassifierKind kind() const { return static_cast<ClassifierKind>(params_.index()); }
  Eigen::Index d() const { return d_; }
  Eigen::Index num_classes() const { return classes_; }
  const Params& params() const { return params_; }

  const AffineParams* affine() const { return std::get_if<AffineParams>(&params_); }
  const RadialParams* radial() const { return std::get_if<RadialParams>(&params_); }
  const MlpParams* mlp() const { return std::get_if<MlpParams>(&params_); }

  Eigen::VectorXd scores(const Eigen::VectorXd& x) const {
    check_input(x);
    return std::visit([&](const auto& p) { return eval(p, x); }, params_);
  }

  /// argmax_k f_k(x), ties to the lowest index.
  Eigen::Index predict(const Eigen::VectorXd& x) const { return argmax(scores(x)); }

  static Eigen::Index argmax(const Eigen::VectorXd& s) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < s.size(); ++k)
      if (s[k] > s[best]) best = k;
    return best;
  }

  Eigen::VectorXd gradient(const Eigen::VectorXd& x, Eigen::Index k) const {
    if (k < 0 || k >= classes_)
      fail(ErrorKind::InvalidInput, "class index " + std::to_string(k) + " out of range");
    return jacobian(x).row(k).transpose();
  }

  /// L x d matrix whose row k is grad f_k(x).
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const {
    check_input(x);
    return std::visit([&](const auto& p) { return jac(p, x); }, params_);
  }

 private:
  void validate();

  void check_input(const Eigen::VectorXd& x) const {
    if (x.size() != d_)
      fail(ErrorKind::InvalidDimension,
           "input has dimension " + std::to_string(x.size()) + ", classifier expects " + std::to_string(d_));
    if (!x.allFinite()) fail(ErrorKind::InvalidInput, "input has non-finite coordinates");
  }

  static Eigen::VectorXd eval(const AffineParams& p, const Eigen::VectorXd& x) { return p.W * x + p.b; }

  static std::pair<std::size_t, double> nearest(const RadialParams& p, const Eigen::VectorXd& x, bool strict) {
    std::size_t best = 0;
    double best_sq = std::numeric_limits<double>::infinity();
    double second_sq = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < p.centers.size(); ++i) {
      const double sq = (x - p.centers[i]).squaredNorm();
      if (sq < best_sq) {
        second_sq = best_sq;
        best_sq = sq;
        best = i;
      } else if (sq < second_sq) {
        second_sq = sq;
      }
    }
    if (strict && std::isfinite(second_sq) && second_sq - best_sq <= 1e-12 * std::max(1.0, best_sq))
      fail(ErrorKind::AmbiguousGradient, "point is equidistant from two nearest centers");
    return {best, best_sq};
  }

  static Eigen::VectorXd eval(const RadialParams& p, const Eigen::VectorXd& x) {
    Eigen::VectorXd s(2);
    s[0] = p.radius * p.radius - nearest(p, x, false).second;
    s[1] = 0.0;
    return s;
  }

  static Eigen::VectorXd eval(const MlpParams& p, const Eigen::VectorXd& x) {
    Eigen::VectorXd a = x;
    for (std::size_t i = 0; i < p.layers.size(); ++i) {
      Eigen::VectorXd z = p.layers[i].W * a + p.layers[i].b;
      a = (i + 1 < p.layers.size()) ? Eigen::VectorXd(z.array().tanh()) : z;
    }
    return a;
  }

  static Eigen::MatrixXd jac(const AffineParams& p, const Eigen::VectorXd&) { return p.W; }

  static Eigen::MatrixXd jac(const RadialParams& p, const Eigen::VectorXd& x) {
    const auto [i, sq] = nearest(p, x, true);
    (void)sq;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2, x.size());
    J.row(0) = (-2.0 * (x - p.centers[i])).transpose();
    return J;
  }

  static Eigen::MatrixXd jac(const MlpParams& p, const Eigen::VectorXd& x) {
    // Forward pass keeping tanh derivatives, then accumulate from the output.
    std::vector<Eigen::VectorXd> slopes;
    slopes.reserve(p.layers.size());
    Eigen::VectorXd a = x;
    for (std::size_t i = 0; i + 1 < p.layers.size(); ++i) {
      a = (p.layers[i].W * a + p.layers[i].b).array().tanh();
      slopes.emplace_back(1.0 - a.array().square());
    }
    Eigen::MatrixXd J = p.layers.back().W;
    for (std::size_t i = p.layers.size() - 1; i-- > 0;) J = (J * slopes[i].asDiagonal()) * p.layers[i].W;
    return J;
  }

  Params params_;
  Eigen::Index d_ = 0;
  Eigen::Index classes_ = 0;
};

inline void Classifier::validate() {
  if (const auto* p = affine()) {
    if (p->W.rows() < 2) fail(ErrorKind::FormatError, "W: need at least 2 classes (rows)");
    if (p->W.cols() < 1) fail(ErrorKind::FormatError, "W: need at least one column");
    if (p->b.size() != p->W.rows())
      fail(ErrorKind::FormatError, "b: length " + std::to_string(p->b.size()) + " does not match " +
                                       std::to_string(p->W.rows()) + " classes");
    if (!p->W.allFinite() || !p->b.allFinite()) fail(ErrorKind::FormatError, "W/b: non-finite entries");
    d_ = p->W.cols();
    classes_ = p->W.rows();
  } else if (const auto* p = radial()) {
    if (!(p->radius > 0.0) || !std::isfinite(p->radius))
      fail(ErrorKind::FormatError, "radius: must be finite and > 0");
    if (p->centers.empty()) fail(ErrorKind::FormatError, "centers: need at least one center");
    d_ = p->centers.front().size();
    if (d_ < 1) fail(ErrorKind::FormatError, "centers[0]: empty");
    for (std::size_t i = 0; i < p->centers.size(); ++i) {
      if (p->centers[i].size() != d_)
        fail(ErrorKind::FormatError, "centers[" + std::to_string(i) + "]: dimension mismatch");
      if (!p->centers[i].allFinite())
        fail(ErrorKind::FormatError, "centers[" + std::to_string(i) + "]: non-finite entries");
    }
    classes_ = 2;
  } else {
    const auto& layers = mlp()->layers;
    if (layers.empty()) fail(ErrorKind::FormatError, "layers: need at least one layer");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const std::string where = "layers[" + std::to_string(i) + "]";
      if (layers[i].W.rows() < 1 || layers[i].W.cols() < 1) fail(ErrorKind::FormatError, where + ".W: empty");
      if (layers[i].b.size() != layers[i].W.rows())
        fail(ErrorKind::FormatError, where + ".b: length does not match W rows");
      if (i > 0 && layers[i].W.cols() != layers[i - 1].W.rows())
        fail(ErrorKind::FormatError, where + ".W: input width does not match previous layer output");
      if (!layers[i].W.allFinite() || !layers[i].b.allFinite())
        fail(ErrorKind::FormatError, where + ": non-finite entries");
    }
    d_ = layers.front().W.cols();
    classes_ = layers.back().W.rows();
    if (classes_ < 2) fail(ErrorKind::FormatError, "layers: final layer must have at least 2 outputs");
  }
}

/// Gaussian MLP with weights and biases of standard deviation
/// weight_scale / sqrt(fan_in). Small scales give near-affine boundaries.
inline Classifier random_mlp(Eigen::Index d, Eigen::Index num_classes, const std::vector<Eigen::Index>& hidden,
                             double weight_scale, std::uint64_t seed) {
  if (d < 1 || num_classes < 2) fail(ErrorKind::InvalidParameter, "need d >= 1 and L >= 2");
  if (!(weight_scale > 0.0)) fail(ErrorKind::InvalidParameter, "weight_scale must be > 0");
  for (auto w : hidden)
    if (w < 1) fail(ErrorKind::InvalidParameter, "hidden widths must be >= 1");
  Rng rng(seed);
  MlpParams p;
  Eigen::Index fan_in = d;
  auto add_layer = [&](Eigen::Index out) {
    const double sd = weight_scale / std::sqrt(static_cast<double>(fan_in));
    DenseLayer layer{Eigen::MatrixXd(out, fan_in), Eigen::VectorXd(out)};
    for (Eigen::Index r = 0; r < out; ++r)
      for (Eigen::Index c = 0; c < fan_in; ++c) layer.W(r, c) = sd * rng.gaussian();
    for (Eigen::Index r = 0; r < out; ++r) layer.b[r] = sd * rng.gaussian();
    p.layers.push_back(std::move(layer));
    fan_in = out;
  };
  for (auto w : hidden) add_layer(w);
  add_layer(num_classes);
  return Classifier(std::move(p));
}

/// W entries N(0, sd = 1/sqrt(d)), b entries N(0, 1).
inline Classifier random_affine(Eigen::Index d, Eigen::Index num_classes, std::uint64_t seed) {
  if (d < 1 || num_classes < 2) fail(ErrorKind::InvalidParameter, "need d >= 1 and L >= 2");
  Rng rng(seed);
  const double sd = 1.0 / std::sqrt(static_cast<double>(d));
  AffineParams p{Eigen::MatrixXd(num_classes, d), Eigen::VectorXd(num_classes)};
  for (Eigen::Index r = 0; r < num_classes; ++r)
    for (Eigen::Index c = 0; c < d; ++c) p.W(r, c) = sd * rng.gaussian();
  for (Eigen::Index r = 0; r < num_classes; ++r) p.b[r] = rng.gaussian();
  return Classifier(std::move(p));
}

/// First-order Taylor expansion of f at x as an affine classifier.
inline Classifier tangent_affine(const Classifier& c, const Eigen::VectorXd& x) {
  AffineParams p;
  p.W = c.jacobian(x);
  p.b = c.scores(x) - p.W * x;
  return Classifier(std::move(p));
}

}  // namespace semirandom

#endif  // SEMIRANDOM_CLASSIFIER_HPP
