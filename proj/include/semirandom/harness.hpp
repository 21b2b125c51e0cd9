#ifndef SEMIRANDOM_HARNESS_HPP
#define SEMIRANDOM_HARNESS_HPP

// Desk-scale Monte Carlo experiments for the subspace robustness bounds.
//
// Every trial draws its randomness from derive_seed(master_seed, trial), and
// results land in per-trial slots, so reports are byte-identical for any
// worker count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "semirandom/bounds.hpp"
#include "semirandom/classifier.hpp"
#include "semirandom/errors.hpp"
#include "semirandom/geometry.hpp"
#include "semirandom/io.hpp"
#include "semirandom/parallel.hpp"
#include "semirandom/perturb.hpp"
#include "semirandom/rng.hpp"
#include "semirandom/subspace.hpp"

namespace semirandom::harness {

inline constexpr int kSchemaVersion = 1;

struct RunOptions {
  unsigned threads = 1;
  /// Called with the number of finished trials every 1000 trials.
  std::function<void(std::size_t done, std::size_t total)> progress;
};

struct TrialRecord {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  long m = 0;
  double worst_norm = 0.0;
  double subspace_norm = 0.0;
  double ratio = 0.0;
  double low = 0.0;
  double high = 0.0;
  bool within_bounds = false;
  bool converged = true;
  bool eligible = true;  // passed the curvature precondition (nonlinear runs)
};

struct CoverageReport {
  std::string experiment;
  long d = 0, num_classes = 0, m = 0;
  double delta = 0.0;
  std::size_t trials = 0;
  std::size_t converged = 0;    // denominator of coverage
  std::size_t not_converged = 0;
  std::size_t ineligible = 0;   // failed the curvature precondition
  std::size_t within = 0;
  double coverage = 0.0;
  double floor = 0.0;
  double kappa = 0.0;
  std::size_t excluded_class_wins = 0;  // r*_S attained by a class in A
  std::vector<TrialRecord> records;
};

struct BetaReport {
  long m = 0, d = 0;
  std::size_t samples = 0;       // points that entered the mean
  std::size_t not_converged = 0;
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> values;    // per included point
  std::vector<TrialRecord> records;  // one per input point
};

struct ConcentrationReport {
  long d = 0, m = 0;
  double delta = 0.0;
  std::size_t trials = 0;
  std::size_t violations = 0;
  double violation_rate = 0.0;
  double allowed_rate = 0.0;  // 2 delta
  double low = 0.0, high = 0.0;  // beta1 m/d, beta2 m/d
  double min_observed = 0.0, max_observed = 0.0;
};

struct Lemma3Report {
  std::size_t trials = 0;
  std::size_t evaluated = 0;
  std::size_t no_intersection = 0;
  std::size_t upper_checked = 0;
  std::size_t lower_violations = 0;
  std::size_t upper_violations = 0;
  double worst_lower_slack = std::numeric_limits<double>::infinity();
  double worst_upper_slack = std::numeric_limits<double>::infinity();
  double max_quadratic_residual = 0.0;  // relative to R^2
};

namespace detail {

class Progress {
 public:
  Progress(const RunOptions& opt, std::size_t total) : opt_(opt), total_(total) {}
  void tick() {
    const std::size_t done = ++done_;
    if (opt_.progress && done % 1000 == 0) {
      std::lock_guard lock(mutex_);
      opt_.progress(done, total_);
    }
  }

 private:
  const RunOptions& opt_;
  std::size_t total_;
  std::atomic<std::size_t> done_{0};
  std::mutex mutex_;
};

inline void check_floor(double floor, const std::string& what) {
  if (!(floor > 0.0))
    fail(ErrorKind::Vacuous, "probability floor " + what + " = " + std::to_string(floor) +
                                 " is not positive; reduce delta");
}

inline void finish_coverage(CoverageReport& rep) {
  for (const auto& r : rep.records) {
    if (!r.eligible) {
      ++rep.ineligible;
      continue;
    }
    if (!r.converged) {
      ++rep.not_converged;
      continue;
    }
    ++rep.converged;
    if (r.within_bounds) ++rep.within;
  }
  rep.coverage = rep.converged ? static_cast<double>(rep.within) / static_cast<double>(rep.converged) : 0.0;
}

}  // namespace detail

/// Affine coverage: fresh random affine classifier, point and subspace per
/// trial; norms from the closed forms; bounds from theorem1_interval.
inline CoverageReport verify_affine_theorem1(long d, long num_classes, long m, double delta, std::size_t n_trials,
                                             std::uint64_t seed, const RunOptions& opt = {}) {
  if (m < 1 || m > d) fail(ErrorKind::InvalidDimension, "need 1 <= m <= d");
  if (num_classes < 2) fail(ErrorKind::InvalidParameter, "need L >= 2");
  (void)bounds::zeta1(static_cast<double>(m), delta);  // validates delta
  const double floor = bounds::theorem1_floor(static_cast<double>(num_classes), delta);
  detail::check_floor(floor, "1 - 2(L+1)delta");

  CoverageReport rep;
  rep.experiment = "verify-affine";
  rep.d = d;
  rep.num_classes = num_classes;
  rep.m = m;
  rep.delta = delta;
  rep.trials = n_trials;
  rep.floor = floor;
  rep.records.resize(n_trials);
  detail::Progress progress(opt, n_trials);
  parallel_for(n_trials, opt.threads, [&](std::size_t t) {
    const std::uint64_t trial_seed = derive_seed(seed, t);
    const Classifier c = random_affine(d, num_classes, derive_seed(trial_seed, 0));
    Rng point_rng(derive_seed(trial_seed, 1));
    const Eigen::VectorXd x0 = point_rng.gaussian_vector(d);
    const Subspace S = sample_subspace(d, m, derive_seed(trial_seed, 2));

    TrialRecord rec;
    rec.trial = t;
    rec.seed = trial_seed;
    rec.m = m;
    rec.worst_norm = affine_worst_case(c, x0).overall.norm;
    try {
      rec.subspace_norm = affine_subspace(c, x0, S).overall.norm;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Unreachable) throw;
      rec.subspace_norm = std::numeric_limits<double>::infinity();
    }
    rec.ratio = rec.worst_norm > 0.0 ? rec.subspace_norm / rec.worst_norm : 1.0;
    const auto iv = bounds::theorem1_interval(static_cast<double>(d), static_cast<double>(m), delta, rec.worst_norm);
    rec.low = iv.low;
    rec.high = iv.high;
    rec.within_bounds = iv.contains(rec.subspace_norm);
    rep.records[t] = rec;
    progress.tick();
  });
  detail::finish_coverage(rep);
  return rep;
}

/// beta(f; m) = sqrt(m/d) * mean over points of |r*_S| / |r*|, with a fresh
/// subspace per point. Points whose solver does not converge are left out of
/// the mean and counted.
inline BetaReport beta_statistic(const Classifier& c, const std::vector<Eigen::VectorXd>& points, long m,
                                 std::uint64_t master_seed, const SolverParams& params = {},
                                 const RunOptions& opt = {}) {
  const long d = static_cast<long>(c.d());
  if (m < 1 || m > d) fail(ErrorKind::InvalidDimension, "need 1 <= m <= d");
  BetaReport rep;
  rep.m = m;
  rep.d = d;
  rep.records.resize(points.size());
  detail::Progress progress(opt, points.size());
  parallel_for(points.size(), opt.threads, [&](std::size_t i) {
    TrialRecord rec;
    rec.trial = i;
    rec.seed = derive_seed(master_seed, i);
    rec.m = m;
    const Subspace S = sample_subspace(d, m, rec.seed);
    try {
      const PerturbationResult worst = worst_case(c, points[i], params);
      if (worst.converged && worst.norm == 0.0)
        fail(ErrorKind::InvalidInput, "point " + std::to_string(i) + " lies on the decision boundary");
      const PerturbationResult sub = subspace_perturbation(c, points[i], S, params);
      rec.worst_norm = worst.norm;
      rec.subspace_norm = sub.norm;
      rec.converged = worst.converged && sub.converged;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::StationaryGradient && e.kind() != ErrorKind::Unreachable) throw;
      rec.converged = false;
    }
    rec.ratio = rec.converged ? rec.subspace_norm / rec.worst_norm : std::numeric_limits<double>::quiet_NaN();
    rec.low = rec.high = std::numeric_limits<double>::quiet_NaN();
    rep.records[i] = rec;
    progress.tick();
  });
  const double scale = std::sqrt(static_cast<double>(m) / static_cast<double>(d));
  for (const auto& rec : rep.records) {
    if (!rec.converged) {
      ++rep.not_converged;
      continue;
    }
    rep.values.push_back(scale * rec.ratio);
  }
  rep.samples = rep.values.size();
  if (rep.samples == 0) fail(ErrorKind::NoData, "no point produced converged perturbations");
  double sum = 0.0;
  for (double v : rep.values) sum += v;
  rep.mean = sum / static_cast<double>(rep.samples);
  double sq = 0.0;
  for (double v : rep.values) sq += (v - rep.mean) * (v - rep.mean);
  rep.stddev = rep.samples > 1 ? std::sqrt(sq / static_cast<double>(rep.samples - 1)) : 0.0;
  return rep;
}

/// Fraction of uniform unit vectors whose squared projection on the first m
/// coordinates falls outside [beta1 m/d, beta2 m/d].
inline ConcentrationReport projection_concentration(long d, long m, double delta, std::size_t n_trials,
                                                    std::uint64_t seed, const RunOptions& opt = {}) {
  if (m < 1 || m > d) fail(ErrorKind::InvalidDimension, "need 1 <= m <= d");
  ConcentrationReport rep;
  rep.d = d;
  rep.m = m;
  rep.delta = delta;
  rep.trials = n_trials;
  const double ratio = static_cast<double>(m) / static_cast<double>(d);
  rep.low = bounds::beta1(delta, static_cast<double>(m)) * ratio;
  rep.high = bounds::beta2(delta, static_cast<double>(m)) * ratio;
  rep.allowed_rate = 2.0 * delta;
  std::vector<double> values(n_trials);
  detail::Progress progress(opt, n_trials);
  parallel_for(n_trials, opt.threads, [&](std::size_t t) {
    Rng rng(derive_seed(seed, t));
    const Eigen::VectorXd v = rng.unit_vector(d);
    values[t] = v.head(m).squaredNorm();
    progress.tick();
  });
  rep.min_observed = std::numeric_limits<double>::infinity();
  rep.max_observed = -std::numeric_limits<double>::infinity();
  for (double p : values) {
    if (p < rep.low || p > rep.high) ++rep.violations;
    rep.min_observed = std::min(rep.min_observed, p);
    rep.max_observed = std::max(rep.max_observed, p);
  }
  rep.violation_rate = n_trials ? static_cast<double>(rep.violations) / static_cast<double>(n_trials) : 0.0;
  return rep;
}

// Rounding allowance when comparing arc ratios against their sandwich; the
// sandwich is tight (zero width) at theta = 0 and kappa = 0.
inline constexpr double kArcComparisonSlack = 1e-12;

/// Random arc configuration for the sandwich sweep. Every tenth draw is flat,
/// and two in ten sit at the r kappa = 0.999 corner (convex at the tan^2 cap,
/// concave at steep angles).
inline geometry::ArcConfig random_arc_config(std::uint64_t seed, std::size_t index) {
  using geometry::ArcConfig;
  using geometry::ArcShape;
  Rng rng(derive_seed(seed, index));
  ArcConfig cfg;
  cfg.r = std::pow(10.0, rng.uniform(-3.0, 3.0));
  const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
  const double steep = 1.55;
  switch (index % 10) {
    case 0:
      cfg.kappa = 0.0;
      cfg.shape = rng.uniform() < 0.5 ? ArcShape::Convex : ArcShape::Concave;
      cfg.theta = rng.uniform(-steep, steep);
      return cfg;
    case 1:
      cfg.kappa = 0.999 / cfg.r;
      cfg.shape = ArcShape::Convex;
      cfg.theta = sign * std::atan(std::sqrt(geometry::kUpperTanCap / 0.999));
      return cfg;
    case 2:
      cfg.kappa = 0.999 / cfg.r;
      cfg.shape = ArcShape::Concave;
      cfg.theta = rng.uniform(-steep, steep);
      return cfg;
    default:
      break;
  }
  const double rk = 0.999 * rng.uniform();
  cfg.kappa = rk / cfg.r;
  if (rng.uniform() < 0.5) {
    cfg.shape = ArcShape::Convex;
    // Mostly within the upper-bound cap, some beyond it (lower bound only).
    const double cap = rk > 0.0 ? geometry::kUpperTanCap / rk : 1e6;
    const double tan2 = cap * (rng.uniform() < 0.8 ? rng.uniform() : 1.0 + rng.uniform());
    cfg.theta = sign * std::min(std::atan(std::sqrt(tan2)), steep);
  } else {
    cfg.shape = ArcShape::Concave;
    cfg.theta = rng.uniform(-steep, steep);
  }
  return cfg;
}

/// Defining-equation residual of the arc distance, divided by R^2 (0 when flat).
inline double arc_quadratic_residual(const geometry::ArcConfig& cfg, double distance) {
  if (cfg.kappa == 0.0) return 0.0;
  const double R = 1.0 / cfg.kappa;
  const double c = std::cos(cfg.theta);
  const double res = cfg.shape == geometry::ArcShape::Convex
                         ? distance * distance - 2.0 * (R + cfg.r) * c * distance + (2.0 * R * cfg.r + cfg.r * cfg.r)
                         : distance * distance + 2.0 * (R - cfg.r) * c * distance - (2.0 * R * cfg.r - cfg.r * cfg.r);
  return std::abs(res) / (R * R);
}

inline Lemma3Report lemma3_sweep(std::size_t n_trials, std::uint64_t seed) {
  Lemma3Report rep;
  rep.trials = n_trials;
  for (std::size_t i = 0; i < n_trials; ++i) {
    const geometry::ArcConfig cfg = random_arc_config(seed, i);
    double distance = 0.0;
    try {
      distance = geometry::arc_distance(cfg);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoIntersection) throw;
      ++rep.no_intersection;
      continue;
    }
    ++rep.evaluated;
    const double excess = distance / cfg.tangent_distance() - 1.0;
    const geometry::ArcBounds b = geometry::lemma3_bounds(cfg);
    const double lower_slack = excess - b.lower;
    rep.worst_lower_slack = std::min(rep.worst_lower_slack, lower_slack);
    if (lower_slack < -kArcComparisonSlack) ++rep.lower_violations;
    if (b.upper) {
      ++rep.upper_checked;
      const double upper_slack = *b.upper - excess;
      rep.worst_upper_slack = std::min(rep.worst_upper_slack, upper_slack);
      if (upper_slack < -kArcComparisonSlack) ++rep.upper_violations;
    }
    rep.max_quadratic_residual = std::max(rep.max_quadratic_residual, arc_quadratic_residual(cfg, distance));
  }
  return rep;
}

/// Coverage of the curved-boundary multiclass interval. `kappa` is the
/// boundary curvature to test the precondition with; when absent the exact
/// curvature of an affine/radial classifier is used. Trials cycle through
/// `points`, each with a fresh subspace.
inline CoverageReport verify_nonlinear_corollary(const Classifier& c, std::optional<double> kappa,
                                                 const std::vector<Eigen::VectorXd>& points, long m, double delta,
                                                 std::size_t n_trials, std::uint64_t master_seed,
                                                 const SolverParams& params = {}, const RunOptions& opt = {}) {
  const long d = static_cast<long>(c.d());
  const long L = static_cast<long>(c.num_classes());
  if (m < 1 || m > d) fail(ErrorKind::InvalidDimension, "need 1 <= m <= d");
  if (points.empty()) fail(ErrorKind::NoData, "no points given");
  (void)bounds::zeta1(static_cast<double>(m), delta);
  const double floor = bounds::corollary_floor(static_cast<double>(L), delta);
  detail::check_floor(floor, "1 - 4(L+2)delta");
  if (!kappa) kappa = geometry::exact_curvature(c);
  if (!kappa) fail(ErrorKind::Unavailable, "no exact curvature for this classifier; pass an estimate");

  const double dd = static_cast<double>(d), md = static_cast<double>(m);

  // Per-point quantities do not depend on the subspace.
  struct PointInfo {
    bool converged = true;
    bool eligible = true;
    double worst = 0.0;
    std::vector<long> excluded;
  };
  const std::size_t n_points = std::min(points.size(), n_trials);
  std::vector<PointInfo> info(n_points);
  parallel_for(n_points, opt.threads, [&](std::size_t i) {
    PointInfo pi;
    const auto per_class = per_class_worst_case(c, points[i], params);
    std::vector<std::pair<long, double>> norms;
    for (const auto& cp : per_class) {
      if (!cp.converged) pi.converged = false;
      norms.emplace_back(static_cast<long>(cp.k), cp.reachable ? cp.norm : std::numeric_limits<double>::infinity());
    }
    double overall = std::numeric_limits<double>::infinity();
    for (const auto& n : norms) overall = std::min(overall, n.second);
    if (!pi.converged || !std::isfinite(overall) || overall == 0.0) {
      pi.converged = pi.converged && std::isfinite(overall) && overall > 0.0;
      info[i] = pi;
      return;
    }
    pi.worst = overall;
    pi.excluded = bounds::excluded_set(norms, overall, dd, md, delta);
    for (const auto& [k, n] : norms) {
      if (std::find(pi.excluded.begin(), pi.excluded.end(), k) != pi.excluded.end()) continue;
      if (!bounds::curvature_condition(*kappa, n, md, dd, delta).satisfied) pi.eligible = false;
    }
    info[i] = pi;
  });

  CoverageReport rep;
  rep.experiment = "verify-nonlinear";
  rep.d = d;
  rep.num_classes = L;
  rep.m = m;
  rep.delta = delta;
  rep.trials = n_trials;
  rep.floor = floor;
  rep.kappa = *kappa;
  rep.records.resize(n_trials);
  std::vector<char> excluded_win(n_trials, 0);
  detail::Progress progress(opt, n_trials);
  parallel_for(n_trials, opt.threads, [&](std::size_t t) {
    const PointInfo& pi = info[t % n_points];
    TrialRecord rec;
    rec.trial = t;
    rec.seed = derive_seed(master_seed, t);
    rec.m = m;
    rec.worst_norm = pi.worst;
    rec.eligible = pi.eligible;
    rec.converged = pi.converged;
    if (pi.converged && pi.eligible) {
      const Subspace S = sample_subspace(d, m, rec.seed);
      try {
        const PerturbationResult sub = subspace_perturbation(c, points[t % n_points], S, params);
        rec.converged = sub.converged;
        rec.subspace_norm = sub.norm;
        if (std::find(pi.excluded.begin(), pi.excluded.end(), static_cast<long>(sub.attacked_class)) !=
            pi.excluded.end())
          excluded_win[t] = 1;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::StationaryGradient && e.kind() != ErrorKind::Unreachable) throw;
        // No crossing inside S: the subspace robustness is unbounded.
        rec.subspace_norm = std::numeric_limits<double>::infinity();
      }
      const auto iv = bounds::corollary_interval(dd, md, delta, rec.worst_norm);
      rec.low = iv.low;
      rec.high = iv.high;
      rec.ratio = rec.subspace_norm / rec.worst_norm;
      rec.within_bounds = rec.converged && iv.contains(rec.subspace_norm);
    } else {
      rec.low = rec.high = rec.ratio = std::numeric_limits<double>::quiet_NaN();
    }
    rep.records[t] = rec;
    progress.tick();
  });
  for (char w : excluded_win) rep.excluded_class_wins += static_cast<std::size_t>(w);
  detail::finish_coverage(rep);
  if (rep.converged == 0) fail(ErrorKind::NoData, "no eligible converged trials");
  return rep;
}

// ---------------------------------------------------------------------------
// Serialization. CSV numbers use 17 significant digits; JSON numbers use the
// shortest round-trip representation. Non-finite values are written as
// inf/-inf/nan in CSV and null in JSON.

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << "trial,seed,m,worst_norm,subspace_norm,ratio,low,high,within_bounds,converged,eligible\n";
  for (const auto& r : records)
    out << r.trial << ',' << r.seed << ',' << r.m << ',' << format_double(r.worst_norm) << ','
        << format_double(r.subspace_norm) << ',' << format_double(r.ratio) << ',' << format_double(r.low) << ','
        << format_double(r.high) << ',' << (r.within_bounds ? 1 : 0) << ',' << (r.converged ? 1 : 0) << ','
        << (r.eligible ? 1 : 0) << '\n';
}

inline void write_beta_csv(std::ostream& out, const BetaReport& rep) {
  out << "trial,seed,m,worst_norm,subspace_norm,ratio,beta,converged\n";
  const double scale = std::sqrt(static_cast<double>(rep.m) / static_cast<double>(rep.d));
  for (const auto& r : rep.records)
    out << r.trial << ',' << r.seed << ',' << r.m << ',' << format_double(r.worst_norm) << ','
        << format_double(r.subspace_norm) << ',' << format_double(r.ratio) << ','
        << format_double(r.converged ? scale * r.ratio : std::numeric_limits<double>::quiet_NaN()) << ','
        << (r.converged ? 1 : 0) << '\n';
}

inline void write_concentration_csv(std::ostream& out, const ConcentrationReport& r) {
  out << "d,m,delta,trials,violations,violation_rate,allowed_rate,low,high,min_observed,max_observed\n";
  out << r.d << ',' << r.m << ',' << format_double(r.delta) << ',' << r.trials << ',' << r.violations << ','
      << format_double(r.violation_rate) << ',' << format_double(r.allowed_rate) << ',' << format_double(r.low) << ','
      << format_double(r.high) << ',' << format_double(r.min_observed) << ',' << format_double(r.max_observed)
      << '\n';
}

inline void write_lemma3_csv(std::ostream& out, const Lemma3Report& r) {
  out << "trials,evaluated,no_intersection,upper_checked,lower_violations,upper_violations,worst_lower_slack,"
         "worst_upper_slack,max_quadratic_residual\n";
  out << r.trials << ',' << r.evaluated << ',' << r.no_intersection << ',' << r.upper_checked << ','
      << r.lower_violations << ',' << r.upper_violations << ',' << format_double(r.worst_lower_slack) << ','
      << format_double(r.worst_upper_slack) << ',' << format_double(r.max_quadratic_residual) << '\n';
}

inline void write_section_csv(std::ostream& out, const geometry::SectionTrace& t) {
  out << "a,b,kind,class_from,class_to\n";
  out << "0,0,origin," << t.center_label << ',' << t.center_label << '\n';
  for (const auto& p : t.points)
    out << format_double(p.a) << ',' << format_double(p.b) << ",boundary," << p.class_from << ',' << p.class_to
        << '\n';
}

inline void write_grid_csv(std::ostream& out, const geometry::SectionTrace& t) {
  out << "a,b,label\n";
  for (int i = 0; i < t.grid_n; ++i)
    for (int j = 0; j < t.grid_n; ++j)
      out << format_double(t.grid_coord(i)) << ',' << format_double(t.grid_coord(j)) << ','
          << t.labels[static_cast<std::size_t>(i) * t.grid_n + j] << '\n';
}

using nlohmann::json;

inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json to_json(const TrialRecord& r) {
  return {{"trial", r.trial},          {"seed", r.seed},
          {"m", r.m},                  {"worst_norm", number(r.worst_norm)},
          {"subspace_norm", number(r.subspace_norm)}, {"ratio", number(r.ratio)},
          {"low", number(r.low)},      {"high", number(r.high)},
          {"within_bounds", r.within_bounds}, {"converged", r.converged},
          {"eligible", r.eligible}};
}

inline json to_json(const CoverageReport& r) {
  json records = json::array();
  for (const auto& rec : r.records) records.push_back(to_json(rec));
  return {{"schema_version", kSchemaVersion},
          {"experiment", r.experiment},
          {"d", r.d},
          {"L", r.num_classes},
          {"m", r.m},
          {"delta", r.delta},
          {"kappa", r.kappa},
          {"trials", r.trials},
          {"converged", r.converged},
          {"not_converged", r.not_converged},
          {"ineligible", r.ineligible},
          {"within", r.within},
          {"coverage", r.coverage},
          {"floor", r.floor},
          {"excluded_class_wins", r.excluded_class_wins},
          {"records", records}};
}

inline json to_json(const BetaReport& r) {
  json records = json::array();
  for (const auto& rec : r.records) records.push_back(to_json(rec));
  json values = json::array();
  for (double v : r.values) values.push_back(v);
  return {{"schema_version", kSchemaVersion},
          {"experiment", "beta"},
          {"d", r.d},
          {"m", r.m},
          {"samples", r.samples},
          {"not_converged", r.not_converged},
          {"mean", r.mean},
          {"std", r.stddev},
          {"values", values},
          {"records", records}};
}

inline json to_json(const ConcentrationReport& r) {
  return {{"schema_version", kSchemaVersion},
          {"experiment", "concentration"},
          {"d", r.d},
          {"m", r.m},
          {"delta", r.delta},
          {"trials", r.trials},
          {"violations", r.violations},
          {"violation_rate", r.violation_rate},
          {"allowed_rate", r.allowed_rate},
          {"low", r.low},
          {"high", r.high},
          {"min_observed", number(r.min_observed)},
          {"max_observed", number(r.max_observed)}};
}

inline json to_json(const Lemma3Report& r) {
  return {{"schema_version", kSchemaVersion},
          {"experiment", "lemma3"},
          {"trials", r.trials},
          {"evaluated", r.evaluated},
          {"no_intersection", r.no_intersection},
          {"upper_checked", r.upper_checked},
          {"lower_violations", r.lower_violations},
          {"upper_violations", r.upper_violations},
          {"worst_lower_slack", number(r.worst_lower_slack)},
          {"worst_upper_slack", number(r.worst_upper_slack)},
          {"max_quadratic_residual", r.max_quadratic_residual}};
}

inline std::string dump_json(const json& doc) { return doc.dump(2) + "\n"; }

/// Writes `text` to path ("-" means standard output is handled by callers).
inline void export_text(const std::string& text, const std::filesystem::path& path) { io::write_text(path, text); }

inline void export_csv(const std::vector<TrialRecord>& records, const std::filesystem::path& path) {
  std::ostringstream os;
  write_trials_csv(os, records);
  export_text(os.str(), path);
}

template <class Report>
void export_json(const Report& report, const std::filesystem::path& path) {
  export_text(dump_json(to_json(report)), path);
}

}  // namespace semirandom::harness

#endif  // SEMIRANDOM_HARNESS_HPP
