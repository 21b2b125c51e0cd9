#ifndef SEMIRANDOM_GEOMETRY_HPP
#define SEMIRANDOM_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "semirandom/classifier.hpp"
#include "semirandom/errors.hpp"
#include "semirandom/parallel.hpp"
#include "semirandom/subspace.hpp"

namespace semirandom::geometry {

inline constexpr double kC1 = 0.625;
inline constexpr double kC2 = 2.25;
inline constexpr double kUpperTanCap = 0.2;  // tan^2(theta) <= 0.2 / (r kappa)

enum class ArcShape { Convex, Concave };

/// A point at distance r from a circular arc of curvature kappa (radius
/// R = 1/kappa), probed along a direction at angle theta from the normal.
/// Convex: the arc bulges towards the point. Concave: it bends away.
struct ArcConfig {
  double r = 1.0;
  double kappa = 0.0;
  double theta = 0.0;
  ArcShape shape = ArcShape::Convex;

  double radius() const { return kappa > 0.0 ? 1.0 / kappa : std::numeric_limits<double>::infinity(); }
  /// |u|: distance to the tangent line along theta.
  double tangent_distance() const { return r / std::cos(theta); }

  void validate() const {
    if (!(r > 0.0) || !std::isfinite(r)) fail(ErrorKind::InvalidConfig, "r must be finite and > 0");
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) fail(ErrorKind::InvalidConfig, "kappa must be finite and >= 0");
    if (!(std::abs(theta) < std::numbers::pi / 2)) fail(ErrorKind::InvalidConfig, "theta must lie in (-pi/2, pi/2)");
    if (!(r * kappa < 1.0)) fail(ErrorKind::InvalidConfig, "r * kappa must be < 1");
  }
};

/// Nearer root of r'^2 - 2 (R + r) cos(theta) r' + (2 R r + r^2) = 0, evaluated
/// in the cancellation-free form (product of roots over the larger root),
/// scaled by kappa so the flat limit is exact.
inline double arc_distance_convex(const ArcConfig& cfg) {
  cfg.validate();
  const double rk = cfg.r * cfg.kappa;
  const double c = std::cos(cfg.theta);
  const double half_b = (1.0 + rk) * c;
  const double disc = half_b * half_b - rk * (2.0 + rk);
  if (disc < 0.0) fail(ErrorKind::NoIntersection, "the probe direction misses the convex arc");
  return cfg.r * (2.0 + rk) / (half_b + std::sqrt(disc));
}

/// Positive root of r'^2 + 2 (R - r) cos(theta) r' - (2 R r - r^2) = 0.
inline double arc_distance_concave(const ArcConfig& cfg) {
  cfg.validate();
  const double rk = cfg.r * cfg.kappa;
  const double c = std::cos(cfg.theta);
  const double half_b = (1.0 - rk) * c;
  const double disc = half_b * half_b + rk * (2.0 - rk);
  return cfg.r * (2.0 - rk) / (half_b + std::sqrt(disc));
}

inline double arc_distance(const ArcConfig& cfg) {
  return cfg.shape == ArcShape::Convex ? arc_distance_convex(cfg) : arc_distance_concave(cfg);
}

/// |x_gamma - x| / |u|.
inline double arc_ratio(const ArcConfig& cfg) { return arc_distance(cfg) / cfg.tangent_distance(); }

struct ArcBounds {
  double lower = 0.0;             // -C1 r kappa tan^2
  std::optional<double> upper;    // C2 r kappa tan^2, absent when tan^2 exceeds 0.2/(r kappa)
};

/// Sandwich on arc_ratio - 1.
inline ArcBounds lemma3_bounds(const ArcConfig& cfg) {
  cfg.validate();
  const double rk = cfg.r * cfg.kappa;
  const double t = std::tan(cfg.theta);
  const double tan2 = t * t;
  ArcBounds b;
  b.lower = -kC1 * rk * tan2;
  if (rk == 0.0 || tan2 <= kUpperTanCap / rk) b.upper = kC2 * rk * tan2;
  return b;
}

/// sqrt(1 - x) - (1 - x/2 - x^2/4), nonnegative on [0, 2(sqrt(2) - 1)].
inline double sqrt_minus_slack(double x) { return std::sqrt(1.0 - x) - (1.0 - x / 2.0 - x * x / 4.0); }

/// sqrt(1 + x) - (1 + x/2 - x^2/8), nonnegative for x >= 0.
inline double sqrt_plus_slack(double x) { return std::sqrt(1.0 + x) - (1.0 + x / 2.0 - x * x / 8.0); }

// ---------------------------------------------------------------------------
// Exact curvature of analytic classifiers.

/// Radii of the largest balls that fit on either side of the boundary, tangent
/// to it, taken in the worst case over boundary points. Infinite when every
/// radius fits (flat side). Only available for affine and radial kinds.
struct InscribedRadii {
  double inside = 0.0;   // class 0 side
  double outside = 0.0;  // class 1 side
};

inline std::optional<InscribedRadii> inscribed_radii(const Classifier& c) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (c.kind() == ClassifierKind::Affine) return InscribedRadii{inf, inf};
  if (const auto* p = c.radial()) {
    for (std::size_t i = 0; i < p->centers.size(); ++i)
      for (std::size_t j = i + 1; j < p->centers.size(); ++j)
        if (!((p->centers[i] - p->centers[j]).norm() > 4.0 * p->radius))
          fail(ErrorKind::NotSufficientlyDistant,
               "centers " + std::to_string(i) + " and " + std::to_string(j) + " are within 4R of each other");
    return InscribedRadii{p->radius, inf};
  }
  return std::nullopt;
}

/// kappa = 1 / min(inside, outside) radius; nullopt for MLPs (use the
/// section estimate instead).
inline std::optional<double> exact_curvature(const Classifier& c) {
  const auto radii = inscribed_radii(c);
  if (!radii) return std::nullopt;
  return 1.0 / std::min(radii->inside, radii->outside);
}

// ---------------------------------------------------------------------------
// Planar sections of the decision boundary.

struct BoundaryPoint {
  double a = 0.0, b = 0.0;  // plane coordinates
  int ray = 0;
  int crossing = 0;  // order along the ray
  Eigen::Index class_from = 0;
  Eigen::Index class_to = 0;
  double score_gap = 0.0;  // |f_from - f_to| at the ambient point
};

struct SectionTrace {
  Eigen::VectorXd x0;
  Eigen::VectorXd u1, u2;
  double extent = 0.0;
  int n_rays = 0;
  int grid_n = 0;
  Eigen::Index center_label = 0;
  std::vector<int> labels;  // grid_n x grid_n, index i * grid_n + j for (grid_coord(i), grid_coord(j))
  std::vector<BoundaryPoint> points;  // sorted by (ray, crossing)
  bool empty = false;

  double grid_coord(int i) const {
    return grid_n == 1 ? 0.0 : -extent + 2.0 * extent * static_cast<double>(i) / static_cast<double>(grid_n - 1);
  }
  Eigen::VectorXd ambient(double a, double b) const { return x0 + a * u1 + b * u2; }
};

struct SectionOptions {
  int n_rays = 720;
  int grid_n = 101;
  int radial_samples = 256;
  double score_tolerance = 1e-9;
  unsigned threads = 1;
};

inline SectionTrace trace_section(const Classifier& c, const Eigen::VectorXd& x0, const Eigen::VectorXd& u1,
                                  const Eigen::VectorXd& u2, double extent, const SectionOptions& opt = {}) {
  if (!(extent > 0.0) || !std::isfinite(extent)) fail(ErrorKind::InvalidParameter, "extent must be > 0");
  if (opt.n_rays < 1 || opt.grid_n < 1 || opt.radial_samples < 2)
    fail(ErrorKind::InvalidParameter, "n_rays, grid_n must be >= 1 and radial_samples >= 2");
  if (x0.size() != c.d() || u1.size() != c.d() || u2.size() != c.d())
    fail(ErrorKind::InvalidDimension, "plane vectors must live in the classifier input space");
  const std::vector<Eigen::VectorXd> spanning{u1, u2};
  const Subspace plane = subspace_from_vectors(spanning, true);

  SectionTrace trace;
  trace.x0 = x0;
  trace.u1 = plane.basis().col(0);
  trace.u2 = plane.basis().col(1);
  trace.extent = extent;
  trace.n_rays = opt.n_rays;
  trace.grid_n = opt.grid_n;
  trace.center_label = c.predict(x0);

  trace.labels.assign(static_cast<std::size_t>(opt.grid_n) * opt.grid_n, 0);
  parallel_for(static_cast<std::size_t>(opt.grid_n), opt.threads, [&](std::size_t i) {
    for (int j = 0; j < opt.grid_n; ++j)
      trace.labels[i * opt.grid_n + j] =
          static_cast<int>(c.predict(trace.ambient(trace.grid_coord(static_cast<int>(i)), trace.grid_coord(j))));
  });

  std::vector<std::vector<BoundaryPoint>> per_ray(static_cast<std::size_t>(opt.n_rays));
  parallel_for(per_ray.size(), opt.threads, [&](std::size_t ray) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(ray) / opt.n_rays;
    const double ca = std::cos(angle), sa = std::sin(angle);
    const double length = extent / std::max(std::abs(ca), std::abs(sa));
    auto at = [&](double t) { return trace.ambient(t * ca, t * sa); };
    Eigen::Index prev_label = trace.center_label;
    double prev_t = 0.0;
    for (int s = 1; s <= opt.radial_samples; ++s) {
      const double t = length * s / opt.radial_samples;
      const Eigen::Index label = c.predict(at(t));
      if (label != prev_label) {
        // Bisect on "label == prev_label" until the pair's score gap is small
        // or the bracket hits floating-point resolution.
        double lo = prev_t, hi = t;
        Eigen::Index hi_label = label;
        double gap = std::numeric_limits<double>::infinity();
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (!(mid > lo && mid < hi)) break;
          const Eigen::VectorXd s_mid = c.scores(at(mid));
          const Eigen::Index l_mid = Classifier::argmax(s_mid);
          if (l_mid == prev_label) {
            lo = mid;
          } else {
            hi = mid;
            hi_label = l_mid;
          }
          if (hi - lo <= 1e-14 * length) break;
        }
        const double tb = 0.5 * (lo + hi);
        const Eigen::VectorXd sb = c.scores(at(tb));
        gap = std::abs(sb[prev_label] - sb[hi_label]);
        BoundaryPoint bp;
        bp.a = tb * ca;
        bp.b = tb * sa;
        bp.ray = static_cast<int>(ray);
        bp.crossing = static_cast<int>(per_ray[ray].size());
        bp.class_from = prev_label;
        bp.class_to = hi_label;
        bp.score_gap = gap;
        per_ray[ray].push_back(bp);
      }
      prev_label = label;
      prev_t = t;
    }
  });
  for (auto& pts : per_ray)
    for (auto& p : pts) trace.points.push_back(p);

  const bool uniform_grid =
      std::all_of(trace.labels.begin(), trace.labels.end(), [&](int l) { return l == trace.labels.front(); });
  trace.empty = trace.points.empty() && uniform_grid;
  return trace;
}

/// Curvature of the circle through three planar points: 4 Area / (|a||b||c|);
/// 0 for (numerically) collinear triples.
inline double circumcircle_curvature(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1, const Eigen::Vector2d& p2) {
  const Eigen::Vector2d e1 = p1 - p0, e2 = p2 - p0, e3 = p2 - p1;
  const double a = e1.norm(), b = e2.norm(), c = e3.norm();
  const double area = 0.5 * std::abs(e1.x() * e2.y() - e1.y() * e2.x());
  const double scale = std::max({a, b, c});
  if (!(scale > 0.0) || area < 1e-14 * scale * scale) return 0.0;
  return 4.0 * area / (a * b * c);
}

struct PointCurvature {
  std::size_t point = 0;  // index into SectionTrace::points
  double kappa = 0.0;
};

struct SectionCurvature {
  std::vector<PointCurvature> estimates;
  double median = 0.0;
  double max = 0.0;
};

/// Polylines per class pair: runs of adjacent rays that each cross that pair
/// exactly once (wrapping around when every ray qualifies). Each interior point
/// gets the curvature of the circle through it and its two neighbours.
inline SectionCurvature estimate_section_curvature(const SectionTrace& trace) {
  std::map<std::pair<Eigen::Index, Eigen::Index>, std::vector<std::vector<std::size_t>>> by_pair;
  {
    // pair -> per ray list of point indices
    std::map<std::pair<Eigen::Index, Eigen::Index>, std::vector<std::vector<std::size_t>>> hits;
    for (std::size_t i = 0; i < trace.points.size(); ++i) {
      const auto& p = trace.points[i];
      auto& rays = hits[{p.class_from, p.class_to}];
      rays.resize(static_cast<std::size_t>(trace.n_rays));
      rays[static_cast<std::size_t>(p.ray)].push_back(i);
    }
    for (auto& [pair, rays] : hits) {
      const std::size_t n = rays.size();
      auto single = [&](std::size_t r) { return rays[r].size() == 1; };
      std::vector<std::vector<std::size_t>> lines;
      if (std::all_of(rays.begin(), rays.end(), [](const auto& v) { return v.size() == 1; })) {
        std::vector<std::size_t> closed;
        for (std::size_t r = 0; r < n; ++r) closed.push_back(rays[r].front());
        closed.push_back(closed[0]);  // wrap markers
        closed.insert(closed.begin(), closed[n - 1]);
        lines.push_back(std::move(closed));
        by_pair[pair] = std::move(lines);
        continue;
      }
      // Start after a gap so runs are not split at ray 0.
      std::size_t start = 0;
      while (single(start)) ++start;
      std::vector<std::size_t> current;
      for (std::size_t step = 1; step <= n; ++step) {
        const std::size_t r = (start + step) % n;
        if (single(r)) {
          current.push_back(rays[r].front());
        } else if (!current.empty()) {
          lines.push_back(std::move(current));
          current.clear();
        }
      }
      if (!current.empty()) lines.push_back(std::move(current));
      by_pair[pair] = std::move(lines);
    }
  }

  SectionCurvature out;
  auto xy = [&](std::size_t i) { return Eigen::Vector2d(trace.points[i].a, trace.points[i].b); };
  for (const auto& [pair, lines] : by_pair) {
    for (const auto& line : lines) {
      if (line.size() < 3) continue;
      for (std::size_t j = 1; j + 1 < line.size(); ++j)
        out.estimates.push_back({line[j], circumcircle_curvature(xy(line[j - 1]), xy(line[j]), xy(line[j + 1]))});
    }
  }
  if (out.estimates.empty()) fail(ErrorKind::InsufficientPoints, "no class-pair polyline has 3 or more points");
  std::sort(out.estimates.begin(), out.estimates.end(),
            [](const PointCurvature& x, const PointCurvature& y) { return x.point < y.point; });
  std::vector<double> values;
  for (const auto& e : out.estimates) values.push_back(e.kappa);
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  out.median = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  out.max = values.back();
  return out;
}

}  // namespace semirandom::geometry

#endif  // SEMIRANDOM_GEOMETRY_HPP
