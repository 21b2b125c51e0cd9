#ifndef SEMIRANDOM_PERTURB_HPP
#define SEMIRANDOM_PERTURB_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "semirandom/classifier.hpp"
#include "semirandom/errors.hpp"
#include "semirandom/rng.hpp"
#include "semirandom/subspace.hpp"

namespace semirandom {

struct SolverParams {
  int max_iterations = 200;
  double overshoot = 0.02;
  double refine_tolerance = 1e-6;  // relative, on the step length along the ray
  double bracket_growth = 2.0;
  double t_max_multiplier = 1e6;  // line search gives up past this times (1 + |x0|)

  void validate() const {
    if (max_iterations < 1) fail(ErrorKind::InvalidParameter, "max_iterations must be >= 1");
    if (!(overshoot > 0.0 && overshoot < 1.0)) fail(ErrorKind::InvalidParameter, "overshoot must lie in (0, 1)");
    if (!(refine_tolerance > 0.0)) fail(ErrorKind::InvalidParameter, "refine_tolerance must be > 0");
    if (!(bracket_growth > 1.0)) fail(ErrorKind::InvalidParameter, "bracket_growth must be > 1");
    if (!(t_max_multiplier > 0.0)) fail(ErrorKind::InvalidParameter, "t_max_multiplier must be > 0");
  }
};

struct PerturbationResult {
  Eigen::VectorXd r;
  double norm = 0.0;
  Eigen::Index original_class = 0;
  Eigen::Index attacked_class = -1;
  int iterations = 0;
  bool converged = true;
  bool refined = false;
};

/// Closed-form minimal perturbation towards one class.
struct ClassPerturbation {
  Eigen::Index k = 0;
  bool reachable = true;
  bool converged = true;
  double norm = std::numeric_limits<double>::infinity();
  Eigen::VectorXd r;
};

struct AffineSolution {
  Eigen::Index original_class = 0;
  std::vector<ClassPerturbation> per_class;  // every k != original_class that is not a duplicate
  PerturbationResult overall;
};

/// max_{k != khat} f_k(x) - f_khat(x); the label counts as changed when >= 0.
inline double label_margin(const Eigen::VectorXd& scores, Eigen::Index khat) {
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < scores.size(); ++k)
    if (k != khat) best = std::max(best, scores[k] - scores[khat]);
  return best;
}

inline Eigen::Index margin_class(const Eigen::VectorXd& scores, Eigen::Index khat) {
  Eigen::Index arg = -1;
  for (Eigen::Index k = 0; k < scores.size(); ++k)
    if (k != khat && (arg < 0 || scores[k] > scores[arg])) arg = k;
  return arg;
}

namespace detail {

inline AffineSolution affine_closed_form(const Classifier& c, const Eigen::VectorXd& x0, const Subspace* S) {
  const AffineParams* p = c.affine();
  if (p == nullptr) fail(ErrorKind::InvalidInput, "closed form requires an affine classifier");
  if (S != nullptr && S->d() != c.d())
    fail(ErrorKind::InvalidDimension, "subspace dimension does not match classifier input");
  const Eigen::VectorXd s = c.scores(x0);
  const Eigen::Index khat = Classifier::argmax(s);

  AffineSolution out;
  out.original_class = khat;
  const ClassPerturbation* best = nullptr;
  for (Eigen::Index k = 0; k < c.num_classes(); ++k) {
    if (k == khat) continue;
    const double gap = s[khat] - s[k];
    const Eigen::VectorXd dw = (p->W.row(k) - p->W.row(khat)).transpose();
    if (dw.norm() < 1e-12 && std::abs(gap) == 0.0 && k > khat) continue;  // duplicate class
    const Eigen::VectorXd u = S ? S->project(dw) : dw;
    ClassPerturbation cp;
    cp.k = k;
    const double un = u.norm();
    if (gap <= 0.0) {
      cp.norm = 0.0;
      cp.r = Eigen::VectorXd::Zero(c.d());
    } else if (un < 1e-12) {
      cp.reachable = false;
      cp.r = Eigen::VectorXd::Zero(c.d());
    } else {
      cp.r = (gap / (un * un)) * u;
      cp.norm = gap / un;
    }
    out.per_class.push_back(std::move(cp));
  }
  for (const auto& cp : out.per_class)
    if (cp.reachable && (best == nullptr || cp.norm < best->norm)) best = &cp;
  if (best == nullptr) fail(ErrorKind::Unreachable, "no class boundary is reachable from this point");
  out.overall.r = best->r;
  out.overall.norm = best->norm;
  out.overall.original_class = khat;
  out.overall.attacked_class = best->k;
  return out;
}

// Locates h(t) = 0 on [lo, hi] given h(lo) < 0 <= h(hi), returning the
// bracketing pair once hi - lo <= relative_tolerance * hi. Illinois false
// position with a bisection step every third iteration so the bracket always
// shrinks geometrically.
template <class F>
std::pair<double, double> refine_crossing(F&& h, double lo, double hi, double h_lo, double h_hi,
                                          double relative_tolerance) {
  int side = 0;
  for (int it = 0; it < 300 && hi - lo > relative_tolerance * hi; ++it) {
    double t = (it % 3 == 2) ? 0.5 * (lo + hi) : (lo * h_hi - hi * h_lo) / (h_hi - h_lo);
    if (!(t > lo && t < hi)) t = 0.5 * (lo + hi);
    if (!(t > lo && t < hi)) break;  // bracket at floating-point resolution
    const double ht = h(t);
    if (ht >= 0.0) {
      hi = t;
      h_hi = ht;
      if (side == +1) h_lo *= 0.5;
      side = +1;
    } else {
      lo = t;
      h_lo = ht;
      if (side == -1) h_hi *= 0.5;
      side = -1;
    }
  }
  return {lo, hi};
}

}  // namespace detail

/// Exact minimal perturbations r^k = gap_k / |w_k - w_khat|^2 (w_k - w_khat) and
/// their minimum-norm aggregate r*.
inline AffineSolution affine_worst_case(const Classifier& c, const Eigen::VectorXd& x0) {
  return detail::affine_closed_form(c, x0, nullptr);
}

/// Same with w_k - w_khat replaced by its projection onto S.
inline AffineSolution affine_subspace(const Classifier& c, const Eigen::VectorXd& x0, const Subspace& S) {
  return detail::affine_closed_form(c, x0, &S);
}

namespace detail {

// target < 0: any class other than khat may be reached; otherwise only
// `target` counts (binary problem target vs khat).
inline PerturbationResult deepfool(const Classifier& c, const Eigen::VectorXd& x0, const Subspace& S,
                                   const SolverParams& params, Eigen::Index target) {
  params.validate();
  if (S.d() != c.d()) fail(ErrorKind::InvalidDimension, "subspace dimension does not match classifier input");
  const Eigen::VectorXd s0 = c.scores(x0);
  const Eigen::Index khat = Classifier::argmax(s0);
  if (target >= c.num_classes()) fail(ErrorKind::InvalidInput, "target class out of range");
  if (target == khat) fail(ErrorKind::InvalidInput, "target class equals the predicted class");

  auto margin = [&](const Eigen::VectorXd& s) {
    return target < 0 ? label_margin(s, khat) : s[target] - s[khat];
  };
  auto reached = [&](const Eigen::VectorXd& s) { return target < 0 ? margin_class(s, khat) : target; };

  PerturbationResult out;
  out.original_class = khat;
  out.r = Eigen::VectorXd::Zero(c.d());
  if (margin(s0) >= 0.0) {
    // Already on a boundary: counts as changed.
    out.attacked_class = reached(s0);
    return out;
  }

  auto margin_at = [&](const Eigen::VectorXd& r) { return margin(c.scores(x0 + r)); };

  Eigen::VectorXd r = Eigen::VectorXd::Zero(c.d());
  Eigen::VectorXd best_r = r;
  double best_margin = margin(s0);
  std::optional<double> flip_scale;
  int iter = 0;
  for (;; ++iter) {
    const Eigen::VectorXd x = x0 + r;
    const Eigen::VectorXd s = c.scores(x);
    const double h = margin(s);
    if (h > best_margin) {
      best_margin = h;
      best_r = r;
    }
    if (h >= 0.0) {
      flip_scale = 1.0;
      break;
    }
    if (iter > 0 && margin_at((1.0 + params.overshoot) * r) >= 0.0) {
      flip_scale = 1.0 + params.overshoot;
      break;
    }
    if (iter == params.max_iterations) break;
    // Closest linearized boundary; ties go to the lowest class index.
    const Eigen::MatrixXd J = c.jacobian(x);
    double best_ratio = std::numeric_limits<double>::infinity();
    Eigen::VectorXd step;
    for (Eigen::Index k = 0; k < c.num_classes(); ++k) {
      if (k == khat || (target >= 0 && k != target)) continue;
      const Eigen::VectorXd u = S.project((J.row(k) - J.row(khat)).transpose());
      const double un = u.norm();
      if (un < 1e-12) continue;
      const double g = s[khat] - s[k];
      if (g / un < best_ratio) {
        best_ratio = g / un;
        step = (g / (un * un)) * u;
      }
    }
    if (!std::isfinite(best_ratio))
      fail(ErrorKind::StationaryGradient, "all projected gradient differences vanish");
    r += step;
  }
  out.iterations = iter;
  if (!flip_scale) {
    out.converged = false;
    out.r = best_r;
    out.norm = best_r.norm();
    out.attacked_class = reached(c.scores(x0 + best_r));
    return out;
  }

  // Overshot end point flips, x0 does not: refine the crossing on the ray.
  const Eigen::VectorXd direction = r;
  auto h_of = [&](double t) { return margin_at(t * direction); };
  const double hi_scale = *flip_scale;
  const auto [lo, hi] =
      refine_crossing(h_of, 0.0, hi_scale, margin(s0), h_of(hi_scale), params.refine_tolerance);
  (void)lo;
  out.r = hi * direction;
  out.norm = out.r.norm();
  out.refined = true;
  out.attacked_class = reached(c.scores(x0 + out.r));
  return out;
}

}  // namespace detail

/// DeepFool restricted to S: repeatedly step to the nearest linearized
/// boundary using projected gradient differences, then refine the crossing
/// along the final direction. Returns converged = false with the best iterate
/// when the label does not change within max_iterations.
inline PerturbationResult subspace_deepfool(const Classifier& c, const Eigen::VectorXd& x0, const Subspace& S,
                                            const SolverParams& params = {}) {
  return detail::deepfool(c, x0, S, params, -1);
}

/// r^k_S: minimal perturbation in S reaching the boundary between the
/// predicted class and class k.
inline PerturbationResult targeted_deepfool(const Classifier& c, const Eigen::VectorXd& x0, const Subspace& S,
                                            Eigen::Index k, const SolverParams& params = {}) {
  if (k < 0) fail(ErrorKind::InvalidInput, "target class must be >= 0");
  return detail::deepfool(c, x0, S, params, k);
}

/// Minimal |t| with a label change at x0 + t v, searching both signs by
/// geometric bracket growth then refinement.
inline PerturbationResult line_search_robustness(const Classifier& c, const Eigen::VectorXd& x0,
                                                 const Eigen::VectorXd& v, const SolverParams& params = {}) {
  params.validate();
  if (v.size() != c.d()) fail(ErrorKind::InvalidDimension, "direction dimension does not match classifier");
  const Eigen::VectorXd s0 = c.scores(x0);
  const Eigen::Index khat = Classifier::argmax(s0);
  const double h0 = label_margin(s0, khat);

  PerturbationResult out;
  out.original_class = khat;
  out.r = Eigen::VectorXd::Zero(c.d());
  if (h0 >= 0.0) {
    out.attacked_class = margin_class(s0, khat);
    return out;
  }

  const double scale = 1.0 + x0.norm();
  const double t_start = 1e-3 * scale;
  const double t_max = params.t_max_multiplier * scale;
  std::optional<double> best_t;
  int evaluations = 0;
  for (const double sign : {1.0, -1.0}) {
    auto h = [&](double t) {
      ++evaluations;
      return label_margin(c.scores(x0 + (sign * t) * v), khat);
    };
    double prev = 0.0, h_prev = h0;
    for (double t = t_start; t <= t_max; t *= params.bracket_growth) {
      if (best_t && prev >= *best_t) break;
      const double ht = h(t);
      if (ht >= 0.0) {
        const auto [lo, hi] = detail::refine_crossing(h, prev, t, h_prev, ht, 1e-10);
        (void)lo;
        if (!best_t || hi < *best_t) {
          best_t = hi;
          out.r = (sign * hi) * v;
        }
        break;
      }
      prev = t;
      h_prev = ht;
    }
  }
  if (!best_t) fail(ErrorKind::NoCrossing, "no label change along the direction within |t| <= " + std::to_string(t_max));
  out.norm = out.r.norm();
  out.iterations = evaluations;
  out.refined = true;
  out.attacked_class = margin_class(c.scores(x0 + out.r), khat);
  return out;
}

/// Random-noise robustness: line search along v drawn uniformly from the
/// unit sphere with the given seed.
inline PerturbationResult random_direction_robustness(const Classifier& c, const Eigen::VectorXd& x0,
                                                      std::uint64_t seed, const SolverParams& params = {}) {
  Rng rng(seed);
  return line_search_robustness(c, x0, rng.unit_vector(c.d()), params);
}

/// r*: closed form for affine classifiers, full-space DeepFool otherwise.
inline PerturbationResult worst_case(const Classifier& c, const Eigen::VectorXd& x0, const SolverParams& params = {}) {
  if (c.kind() == ClassifierKind::Affine) return affine_worst_case(c, x0).overall;
  return subspace_deepfool(c, x0, Subspace::full(c.d()), params);
}

/// r*_S: closed form for affine classifiers, DeepFool in S otherwise.
inline PerturbationResult subspace_perturbation(const Classifier& c, const Eigen::VectorXd& x0, const Subspace& S,
                                                const SolverParams& params = {}) {
  if (c.kind() == ClassifierKind::Affine) return affine_subspace(c, x0, S).overall;
  return subspace_deepfool(c, x0, S, params);
}

/// |r^k| for every k != khat: closed form for affine classifiers, targeted
/// DeepFool otherwise. A class whose search stalls on a vanishing gradient is
/// marked unreachable; one that runs out of iterations is marked unconverged.
inline std::vector<ClassPerturbation> per_class_worst_case(const Classifier& c, const Eigen::VectorXd& x0,
                                                           const SolverParams& params = {}) {
  if (c.kind() == ClassifierKind::Affine) {
    try {
      return affine_worst_case(c, x0).per_class;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Unreachable) throw;
      std::vector<ClassPerturbation> out;
      const Eigen::Index khat = c.predict(x0);
      for (Eigen::Index k = 0; k < c.num_classes(); ++k)
        if (k != khat) out.push_back({k, false, true, std::numeric_limits<double>::infinity(), Eigen::VectorXd::Zero(c.d())});
      return out;
    }
  }
  const Subspace full = Subspace::full(c.d());
  const Eigen::Index khat = c.predict(x0);
  std::vector<ClassPerturbation> out;
  for (Eigen::Index k = 0; k < c.num_classes(); ++k) {
    if (k == khat) continue;
    ClassPerturbation cp;
    cp.k = k;
    try {
      PerturbationResult res = targeted_deepfool(c, x0, full, k, params);
      cp.converged = res.converged;
      cp.norm = res.converged ? res.norm : std::numeric_limits<double>::infinity();
      cp.r = std::move(res.r);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::StationaryGradient) throw;
      cp.reachable = false;
      cp.r = Eigen::VectorXd::Zero(c.d());
    }
    out.push_back(std::move(cp));
  }
  return out;
}

}  // namespace semirandom

#endif  // SEMIRANDOM_PERTURB_HPP
