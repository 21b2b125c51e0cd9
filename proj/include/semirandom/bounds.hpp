#ifndef SEMIRANDOM_BOUNDS_HPP
#define SEMIRANDOM_BOUNDS_HPP

// Closed-form robustness bounds for random-subspace perturbations.
//
// For a random m-dimensional subspace S of R^d, a fixed unit vector v obeys
//   beta1 m/d <= |P_S v|^2 <= beta2 m/d            with probability >= 1 - 2 delta
// which, inverted (zeta1 = 1/beta2, zeta2 = 1/beta1), brackets the subspace
// robustness |r*_S| around sqrt(d/m) |r*|.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "semirandom/errors.hpp"

namespace semirandom::bounds {

inline constexpr double kCurvatureCap = 0.2;   // C
inline constexpr double kLowerArcConst = 0.625;  // C1
inline constexpr double kUpperArcConst = 2.25;   // C2
inline constexpr double kCorollaryLow = 1.0 - kCurvatureCap * kLowerArcConst;   // 0.875
inline constexpr double kCorollaryHigh = 1.0 + kCurvatureCap * kUpperArcConst;  // 1.45

struct Interval {
  double low = 0.0;
  double high = 0.0;
  bool contains(double x) const { return low <= x && x <= high; }
};

namespace detail {

inline void check_delta_m(double delta, double m) {
  if (!(delta > 0.0 && delta < 1.0))
    fail(ErrorKind::InvalidParameter, "delta must lie in (0, 1), got " + std::to_string(delta));
  if (!(m >= 1.0) || !std::isfinite(m)) fail(ErrorKind::InvalidParameter, "m must be >= 1");
}

inline void check_dims(double d, double m) {
  if (!(m >= 1.0) || !(d >= m) || !std::isfinite(d))
    fail(ErrorKind::InvalidDimension, "need 1 <= m <= d");
}

inline void check_norm(double n, const char* what) {
  if (!(n >= 0.0)) fail(ErrorKind::InvalidParameter, std::string(what) + " must be >= 0");
}

}  // namespace detail

/// max(delta^{2/m} / e, 1 - sqrt(2 (1 - delta^{2/m}))).
inline double beta1(double delta, double m) {
  detail::check_delta_m(delta, m);
  const double exponent = (2.0 / m) * std::log(delta);
  const double power = std::exp(exponent);
  const double one_minus_power = -std::expm1(exponent);
  return std::max(power / std::numbers::e, 1.0 - std::sqrt(2.0 * one_minus_power));
}

/// 1 + 2 sqrt(ln(1/delta)/m) + 2 ln(1/delta)/m.
inline double beta2(double delta, double m) {
  detail::check_delta_m(delta, m);
  const double t = -std::log(delta) / m;
  return 1.0 + 2.0 * std::sqrt(t) + 2.0 * t;
}

inline double zeta1(double m, double delta) { return 1.0 / beta2(delta, m); }
inline double zeta2(double m, double delta) { return 1.0 / beta1(delta, m); }

inline double theorem1_floor(double num_classes, double delta) { return 1.0 - 2.0 * (num_classes + 1.0) * delta; }
inline double theorem2_floor(double delta) { return 1.0 - 4.0 * delta; }
inline double corollary_floor(double num_classes, double delta) { return 1.0 - 4.0 * (num_classes + 2.0) * delta; }

/// [sqrt(zeta1) sqrt(d/m) n, sqrt(zeta2) sqrt(d/m) n] for the affine case.
inline Interval theorem1_interval(double d, double m, double delta, double worst_case_norm) {
  detail::check_dims(d, m);
  detail::check_norm(worst_case_norm, "worst_case_norm");
  const double scale = std::sqrt(d / m) * worst_case_norm;
  return {std::sqrt(zeta1(m, delta)) * scale, std::sqrt(zeta2(m, delta)) * scale};
}

/// Largest curvature for which the curved-boundary interval applies.
inline double max_admissible_curvature(double d, double m, double delta, double rk_norm) {
  if (rk_norm == 0.0) return std::numeric_limits<double>::infinity();
  return kCurvatureCap * m / (zeta2(m, delta) * rk_norm * d);
}

/// Interval for |r^k_S| around a boundary of curvature kappa. Fails instead of
/// clamping when kappa exceeds the admissible cap.
inline Interval theorem2_interval(double d, double m, double delta, double rk_norm, double kappa) {
  detail::check_dims(d, m);
  detail::check_norm(rk_norm, "rk_norm");
  detail::check_norm(kappa, "kappa");
  const double cap = max_admissible_curvature(d, m, delta, rk_norm);
  if (kappa > cap) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "kappa = " << kappa << " exceeds the admissible maximum " << cap;
    fail(ErrorKind::CurvatureConditionViolated, msg.str());
  }
  const double z1 = zeta1(m, delta);
  const double z2 = zeta2(m, delta);
  const double load = rk_norm * kappa * z2 * d / m;
  const double root = std::sqrt(d / m);
  return {(1.0 - kLowerArcConst * load) * std::sqrt(z1) * root * rk_norm,
          (1.0 + kUpperArcConst * load) * std::sqrt(z2) * root * rk_norm};
}

/// [0.875 sqrt(zeta1) sqrt(d/m) n, 1.45 sqrt(zeta2) sqrt(d/m) n].
inline Interval corollary_interval(double d, double m, double delta, double overall_norm) {
  const Interval base = theorem1_interval(d, m, delta, overall_norm);
  return {kCorollaryLow * base.low, kCorollaryHigh * base.high};
}

struct CurvatureVerdict {
  bool satisfied = false;
  double slack = 0.0;  // rhs - lhs
};

/// kappa |r^k| <= 0.2 / zeta2 * m / d.
inline CurvatureVerdict curvature_condition(double kappa, double rk_norm, double m, double d, double delta) {
  detail::check_norm(kappa, "kappa");
  detail::check_norm(rk_norm, "rk_norm");
  detail::check_dims(d, m);
  const double rhs = kCurvatureCap / zeta2(m, delta) * (m / d);
  const double lhs = kappa * rk_norm;
  return {lhs <= rhs, rhs - lhs};
}

/// Threshold 1.45 sqrt(zeta2) sqrt(d/m) |r*| above which a class is excluded.
inline double exclusion_threshold(double d, double m, double delta, double overall_norm) {
  return kCorollaryHigh * std::sqrt(zeta2(m, delta)) * std::sqrt(d / m) * overall_norm;
}

/// Classes whose |r^k| is at least the exclusion threshold (unreachable
/// classes, with infinite norm, always qualify). Returned in input order.
inline std::vector<long> excluded_set(const std::vector<std::pair<long, double>>& per_class_norms, double overall_norm,
                                      double d, double m, double delta) {
  detail::check_dims(d, m);
  detail::check_norm(overall_norm, "overall_norm");
  double smallest = std::numeric_limits<double>::infinity();
  for (const auto& [k, n] : per_class_norms) {
    if (!(n >= 0.0)) fail(ErrorKind::InvalidInput, "class " + std::to_string(k) + " has a negative or NaN norm");
    smallest = std::min(smallest, n);
  }
  if (std::isfinite(smallest) ? std::abs(smallest - overall_norm) > 1e-12 * std::max(1.0, smallest)
                              : std::isfinite(overall_norm))
    fail(ErrorKind::InvalidInput, "overall_norm is not the minimum of the per-class norms");
  const double threshold = exclusion_threshold(d, m, delta, overall_norm);
  std::vector<long> out;
  for (const auto& [k, n] : per_class_norms)
    if (!std::isfinite(n) || n >= threshold) out.push_back(k);
  return out;
}

struct BoundReport {
  double d = 0, m = 0, delta = 0;
  double zeta1 = 0, zeta2 = 0;
  double interval_low = 0, interval_high = 0;
  double probability_floor = 0;
  std::optional<bool> curvature_ok;
  std::optional<std::vector<long>> excluded;
};

/// Affine report for an L-class problem.
inline BoundReport affine_report(double d, double m, double delta, double num_classes, double worst_case_norm) {
  const Interval iv = theorem1_interval(d, m, delta, worst_case_norm);
  return {d, m, delta, zeta1(m, delta), zeta2(m, delta), iv.low, iv.high, theorem1_floor(num_classes, delta), {}, {}};
}

/// Curved-boundary multiclass report from the per-class worst-case norms and
/// one curvature value per class (same order).
inline BoundReport nonlinear_report(double d, double m, double delta, double num_classes,
                                    const std::vector<std::pair<long, double>>& per_class_norms,
                                    const std::vector<double>& curvatures) {
  if (curvatures.size() != per_class_norms.size())
    fail(ErrorKind::InvalidInput, "need one curvature per class");
  double overall = std::numeric_limits<double>::infinity();
  for (const auto& pc : per_class_norms) overall = std::min(overall, pc.second);
  const Interval iv = corollary_interval(d, m, delta, overall);
  std::vector<long> excluded = excluded_set(per_class_norms, overall, d, m, delta);
  bool ok = true;
  for (std::size_t i = 0; i < per_class_norms.size(); ++i) {
    const long k = per_class_norms[i].first;
    if (std::find(excluded.begin(), excluded.end(), k) != excluded.end()) continue;
    ok = ok && curvature_condition(curvatures[i], per_class_norms[i].second, m, d, delta).satisfied;
  }
  return {d, m, delta, zeta1(m, delta), zeta2(m, delta), iv.low, iv.high, corollary_floor(num_classes, delta), ok,
          std::move(excluded)};
}

}  // namespace semirandom::bounds

#endif  // SEMIRANDOM_BOUNDS_HPP
