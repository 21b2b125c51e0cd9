#ifndef SEMIRANDOM_CLI_HPP
#define SEMIRANDOM_CLI_HPP

// Command-line front end. run() returns the process exit code:
//   0 success, 1 usage or validation error, 2 numerical failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "semirandom/bounds.hpp"
#include "semirandom/classifier.hpp"
#include "semirandom/errors.hpp"
#include "semirandom/geometry.hpp"
#include "semirandom/harness.hpp"
#include "semirandom/io.hpp"
#include "semirandom/perturb.hpp"
#include "semirandom/subspace.hpp"

namespace semirandom::cli {

struct CliConfig {
  std::string classifier_path;
  std::string points_path;
  std::string subspace_path;
  long d = 1000;
  long num_classes = 10;
  std::vector<long> m{250};
  double delta = 0.05;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  double extent = 0.0;
  int grid = 101;
  int rays = 720;
  std::string out = "-";
  std::string grid_out;
  std::string format = "csv";
  unsigned threads = 1;
  bool quiet = false;
  SolverParams solver;
  // Synthetic inputs for beta when no files are given.
  std::vector<long> hidden{64};
  double weight_scale = 0.05;
  std::uint64_t model_seed = 1;
  std::size_t n_points = 200;
  std::optional<double> kappa;
  std::size_t point_index = 0;
};

namespace detail {

inline void emit(const CliConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out == "-" || cfg.out.empty()) {
    out << text;
    out.flush();
  } else {
    io::write_text(cfg.out, text);
  }
}

inline harness::RunOptions run_options(const CliConfig& cfg, std::ostream& err) {
  harness::RunOptions opt;
  opt.threads = cfg.threads;
  if (!cfg.quiet)
    opt.progress = [&err](std::size_t done, std::size_t total) { err << done << "/" << total << " trials\n"; };
  return opt;
}

inline std::vector<Eigen::VectorXd> synthetic_points(long d, std::size_t n, std::uint64_t seed) {
  std::vector<Eigen::VectorXd> pts;
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed ^ 0x706f696e7473ULL, i));
    pts.push_back(rng.gaussian_vector(d));
  }
  return pts;
}

inline long single_m(const CliConfig& cfg) {
  if (cfg.m.size() != 1) fail(ErrorKind::InvalidParameter, "--m takes a single value for this subcommand");
  return cfg.m.front();
}

struct PerturbTable {
  std::string text;
  std::size_t failures = 0;
  std::size_t total = 0;
};

inline PerturbTable perturb_table(const CliConfig& cfg) {
  const Classifier c = io::load_classifier(cfg.classifier_path);
  const auto points = io::load_points(cfg.points_path);
  const long d = static_cast<long>(c.d());
  std::optional<Subspace> fixed;
  if (!cfg.subspace_path.empty()) fixed = io::load_subspace(cfg.subspace_path);
  const long m = fixed ? static_cast<long>(fixed->m()) : single_m(cfg);
  if (m < 1 || m > d)
    fail(ErrorKind::InvalidDimension, "--m must satisfy 1 <= m <= d = " + std::to_string(d));
  if (fixed && fixed->d() != c.d()) fail(ErrorKind::InvalidDimension, "subspace does not match classifier input");

  std::ostringstream os;
  nlohmann::json rows = nlohmann::json::array();
  if (cfg.format == "csv")
    os << "point,original_class,worst_norm,worst_class,subspace_norm,subspace_class,random_norm,m,low,high,"
          "converged\n";
  std::size_t failures = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::uint64_t s = derive_seed(cfg.seed, i);
    const Subspace S = fixed ? *fixed : sample_subspace(d, m, s);
    const PerturbationResult worst = worst_case(c, points[i], cfg.solver);
    PerturbationResult sub;
    bool sub_ok = true;
    try {
      sub = subspace_perturbation(c, points[i], S, cfg.solver);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Unreachable && e.kind() != ErrorKind::StationaryGradient) throw;
      sub_ok = false;
      sub.norm = std::numeric_limits<double>::infinity();
      sub.converged = false;
    }
    double random_norm = std::numeric_limits<double>::infinity();
    try {
      random_norm = random_direction_robustness(c, points[i], derive_seed(s, 1), cfg.solver).norm;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoCrossing) throw;
    }
    const bool converged = worst.converged && sub.converged && sub_ok;
    if (!converged) ++failures;
    const auto iv = bounds::theorem1_interval(static_cast<double>(d), static_cast<double>(m), cfg.delta, worst.norm);
    if (cfg.format == "csv") {
      os << i << ',' << worst.original_class << ',' << harness::format_double(worst.norm) << ','
         << worst.attacked_class << ',' << harness::format_double(sub.norm) << ',' << sub.attacked_class << ','
         << harness::format_double(random_norm) << ',' << m << ',' << harness::format_double(iv.low) << ','
         << harness::format_double(iv.high) << ',' << (converged ? 1 : 0) << '\n';
    } else {
      rows.push_back({{"point", i},
                      {"original_class", worst.original_class},
                      {"worst_norm", harness::number(worst.norm)},
                      {"worst_class", worst.attacked_class},
                      {"subspace_norm", harness::number(sub.norm)},
                      {"subspace_class", sub.attacked_class},
                      {"random_norm", harness::number(random_norm)},
                      {"m", m},
                      {"low", iv.low},
                      {"high", iv.high},
                      {"converged", converged}});
    }
  }
  if (cfg.format == "json")
    os << harness::dump_json({{"schema_version", harness::kSchemaVersion}, {"experiment", "perturb"}, {"rows", rows}});
  return {os.str(), failures, points.size()};
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CliConfig cfg;
  CLI::App app{"Random and semi-random (random-subspace) robustness of classifiers", "semirandom"};
  app.require_subcommand(1, 1);
  app.option_defaults()->always_capture_default();

  auto add_common = [&](CLI::App* sub, bool seeded) {
    sub->add_option("--out", cfg.out, "Output path, - for standard output");
    sub->add_option("--format", cfg.format, "Report serialization")->check(CLI::IsMember({"csv", "json"}));
    if (seeded) sub->add_option("--seed", cfg.seed, "Master seed");
  };
  auto add_threads = [&](CLI::App* sub) {
    sub->add_option("--threads", cfg.threads, "Worker threads (output is identical for any count)");
    sub->add_flag("--quiet", cfg.quiet, "No progress lines on the error stream");
  };
  auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--max-iter", cfg.solver.max_iterations, "DeepFool iteration cap");
    sub->add_option("--overshoot", cfg.solver.overshoot, "DeepFool overshoot before refinement");
    sub->add_option("--refine-tol", cfg.solver.refine_tolerance, "Relative tolerance of the crossing refinement");
    sub->add_option("--bracket-growth", cfg.solver.bracket_growth, "Line-search bracket growth factor");
    sub->add_option("--t-max", cfg.solver.t_max_multiplier, "Line-search limit, in units of (1 + |x0|)");
  };

  auto* zeta = app.add_subcommand("zeta", "Tabulate zeta1, zeta2, beta1, beta2");
  zeta->add_option("--m", cfg.m, "Subspace dimension(s)");
  zeta->add_option("--delta", cfg.delta, "Failure probability parameter");
  add_common(zeta, false);

  auto* perturb = app.add_subcommand("perturb", "Worst-case, subspace and random-direction perturbations");
  perturb->add_option("--classifier", cfg.classifier_path, "Classifier JSON")->required();
  perturb->add_option("--points", cfg.points_path, "Points JSON")->required();
  perturb->add_option("--subspace", cfg.subspace_path, "Fixed subspace JSON (otherwise random per point)");
  perturb->add_option("--m", cfg.m, "Random subspace dimension");
  perturb->add_option("--delta", cfg.delta, "Delta for the reported interval");
  add_common(perturb, true);
  add_solver(perturb);

  auto* affine = app.add_subcommand("verify-affine", "Monte Carlo coverage of the affine interval");
  affine->add_option("--d", cfg.d, "Input dimension");
  affine->add_option("--L", cfg.num_classes, "Number of classes");
  affine->add_option("--m", cfg.m, "Subspace dimension");
  affine->add_option("--delta", cfg.delta, "Failure probability parameter");
  affine->add_option("--trials", cfg.trials, "Number of trials");
  add_common(affine, true);
  add_threads(affine);

  auto* nonlinear = app.add_subcommand("verify-nonlinear", "Monte Carlo coverage of the curved-boundary interval");
  nonlinear->add_option("--classifier", cfg.classifier_path, "Classifier JSON")->required();
  nonlinear->add_option("--points", cfg.points_path, "Points JSON")->required();
  nonlinear->add_option("--kappa", cfg.kappa, "Boundary curvature (default: exact for affine/radial)");
  nonlinear->add_option("--m", cfg.m, "Subspace dimension");
  nonlinear->add_option("--delta", cfg.delta, "Failure probability parameter");
  nonlinear->add_option("--trials", cfg.trials, "Number of trials");
  add_common(nonlinear, true);
  add_threads(nonlinear);
  add_solver(nonlinear);

  auto* beta = app.add_subcommand("beta", "beta(f; m) statistic over a point set");
  beta->add_option("--classifier", cfg.classifier_path, "Classifier JSON (otherwise a random tanh MLP)");
  beta->add_option("--points", cfg.points_path, "Points JSON (otherwise standard Gaussian points)");
  beta->add_option("--d", cfg.d, "Input dimension of the random MLP");
  beta->add_option("--L", cfg.num_classes, "Classes of the random MLP");
  beta->add_option("--hidden", cfg.hidden, "Hidden widths of the random MLP");
  beta->add_option("--weight-scale", cfg.weight_scale, "Weight scale of the random MLP");
  beta->add_option("--model-seed", cfg.model_seed, "Seed of the random MLP");
  beta->add_option("--n-points", cfg.n_points, "Number of synthetic points");
  beta->add_option("--m", cfg.m, "Subspace dimension");
  add_common(beta, true);
  add_threads(beta);
  add_solver(beta);

  auto* section = app.add_subcommand("section", "Boundary trace in the plane of r* and r*_S through a point");
  section->add_option("--classifier", cfg.classifier_path, "Classifier JSON")->required();
  section->add_option("--points", cfg.points_path, "Points JSON")->required();
  section->add_option("--index", cfg.point_index, "Which point to section");
  section->add_option("--m", cfg.m, "Subspace dimension for r*_S");
  section->add_option("--extent", cfg.extent, "Half-width of the window (0: 3 |r*_S|)");
  section->add_option("--grid", cfg.grid, "Label grid resolution");
  section->add_option("--rays", cfg.rays, "Number of rays");
  section->add_option("--grid-out", cfg.grid_out, "Label grid CSV path");
  add_common(section, true);
  add_threads(section);
  add_solver(section);

  auto* lemma3 = app.add_subcommand("lemma3", "Randomized check of the arc-distance sandwich");
  lemma3->add_option("--trials", cfg.trials, "Number of random configurations");
  add_common(lemma3, true);

  auto* conc = app.add_subcommand("concentration", "Projection concentration on random subspaces");
  conc->add_option("--d", cfg.d, "Ambient dimension");
  conc->add_option("--m", cfg.m, "Subspace dimension");
  conc->add_option("--delta", cfg.delta, "Failure probability parameter");
  conc->add_option("--trials", cfg.trials, "Number of trials");
  add_common(conc, true);
  add_threads(conc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return 0;
    }
    err << e.what() << "\n" << app.help();
    return 1;
  }

  std::ostringstream os;
  std::string numeric_failure;  // non-empty: report written, exit 2
  try {
    if (zeta->parsed()) {
      using namespace bounds;
      nlohmann::json rows = nlohmann::json::array();
      if (cfg.format == "csv") os << "m,delta,zeta1,zeta2,beta1,beta2\n";
      for (long m : cfg.m) {
        const double md = static_cast<double>(m);
        const double z1 = zeta1(md, cfg.delta), z2 = zeta2(md, cfg.delta);
        const double b1 = beta1(cfg.delta, md), b2 = beta2(cfg.delta, md);
        if (cfg.format == "csv")
          os << m << ',' << harness::format_double(cfg.delta) << ',' << harness::format_double(z1) << ','
             << harness::format_double(z2) << ',' << harness::format_double(b1) << ',' << harness::format_double(b2)
             << '\n';
        else
          rows.push_back({{"m", m}, {"delta", cfg.delta}, {"zeta1", z1}, {"zeta2", z2}, {"beta1", b1}, {"beta2", b2}});
      }
      if (cfg.format == "json")
        os << harness::dump_json({{"schema_version", harness::kSchemaVersion}, {"experiment", "zeta"}, {"rows", rows}});
    } else if (perturb->parsed()) {
      const auto [text, failures, total] = detail::perturb_table(cfg);
      os << text;
      if (2 * failures > total)
        numeric_failure = "NotConverged: " + std::to_string(failures) + " of " + std::to_string(total) +
                          " points did not converge";
    } else if (affine->parsed()) {
      const auto rep = harness::verify_affine_theorem1(cfg.d, cfg.num_classes, detail::single_m(cfg), cfg.delta,
                                                       cfg.trials, cfg.seed, detail::run_options(cfg, err));
      if (cfg.format == "csv") harness::write_trials_csv(os, rep.records);
      else os << harness::dump_json(harness::to_json(rep));
      err << "coverage " << rep.coverage << " over " << rep.converged << " trials (floor " << rep.floor << ")\n";
    } else if (nonlinear->parsed()) {
      const Classifier c = io::load_classifier(cfg.classifier_path);
      const auto points = io::load_points(cfg.points_path);
      const auto rep = harness::verify_nonlinear_corollary(c, cfg.kappa, points, detail::single_m(cfg), cfg.delta,
                                                           cfg.trials, cfg.seed, cfg.solver,
                                                           detail::run_options(cfg, err));
      if (cfg.format == "csv") harness::write_trials_csv(os, rep.records);
      else os << harness::dump_json(harness::to_json(rep));
      err << "coverage " << rep.coverage << " over " << rep.converged << " trials (floor " << rep.floor << "), "
          << rep.ineligible << " ineligible, " << rep.not_converged << " not converged\n";
      if (2 * rep.not_converged > rep.trials) numeric_failure = "NotConverged: majority of trials did not converge";
    } else if (beta->parsed()) {
      const Classifier c = cfg.classifier_path.empty()
                               ? random_mlp(cfg.d, cfg.num_classes, std::vector<Eigen::Index>(cfg.hidden.begin(), cfg.hidden.end()),
                                            cfg.weight_scale, cfg.model_seed)
                               : io::load_classifier(cfg.classifier_path);
      const auto points = cfg.points_path.empty()
                              ? detail::synthetic_points(static_cast<long>(c.d()), cfg.n_points, cfg.seed)
                              : io::load_points(cfg.points_path);
      const auto rep = harness::beta_statistic(c, points, detail::single_m(cfg), cfg.seed, cfg.solver,
                                               detail::run_options(cfg, err));
      if (cfg.format == "csv") harness::write_beta_csv(os, rep);
      else os << harness::dump_json(harness::to_json(rep));
      err << "beta mean " << rep.mean << " std " << rep.stddev << " over " << rep.samples << " points\n";
      if (2 * rep.not_converged > rep.records.size())
        numeric_failure = "NotConverged: majority of points did not converge";
    } else if (section->parsed()) {
      const Classifier c = io::load_classifier(cfg.classifier_path);
      const auto points = io::load_points(cfg.points_path);
      if (cfg.point_index >= points.size()) fail(ErrorKind::InvalidParameter, "--index is past the last point");
      const Eigen::VectorXd& x0 = points[cfg.point_index];
      const long m = detail::single_m(cfg);
      const PerturbationResult worst = worst_case(c, x0, cfg.solver);
      const PerturbationResult sub =
          subspace_perturbation(c, x0, sample_subspace(static_cast<long>(c.d()), m, derive_seed(cfg.seed, 0)), cfg.solver);
      Eigen::VectorXd u1 = worst.r, u2 = sub.r;
      Rng rng(derive_seed(cfg.seed, 1));
      if (!(u1.norm() > 0.0)) u1 = rng.gaussian_vector(c.d());
      const Eigen::VectorXd residual = u2 - u1.dot(u2) / u1.squaredNorm() * u1;
      if (!(residual.norm() > 1e-9 * std::max(1.0, u2.norm()))) u2 = rng.gaussian_vector(c.d());
      const double extent = cfg.extent > 0.0 ? cfg.extent : 3.0 * std::max(sub.norm, worst.norm);
      geometry::SectionOptions opt;
      opt.n_rays = cfg.rays;
      opt.grid_n = cfg.grid;
      opt.threads = cfg.threads;
      const auto trace = geometry::trace_section(c, x0, u1, u2, extent, opt);
      std::optional<geometry::SectionCurvature> curv;
      try {
        curv = geometry::estimate_section_curvature(trace);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::InsufficientPoints) throw;
      }
      if (cfg.format == "csv") {
        harness::write_section_csv(os, trace);
      } else {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : trace.points)
          pts.push_back({{"a", p.a}, {"b", p.b}, {"ray", p.ray}, {"class_from", p.class_from},
                         {"class_to", p.class_to}, {"score_gap", p.score_gap}});
        nlohmann::json doc = {{"schema_version", harness::kSchemaVersion},
                              {"experiment", "section"},
                              {"extent", extent},
                              {"center_label", trace.center_label},
                              {"empty", trace.empty},
                              {"worst_norm", worst.norm},
                              {"subspace_norm", sub.norm},
                              {"points", pts}};
        if (curv) doc["curvature"] = {{"median", curv->median}, {"max", curv->max}};
        os << harness::dump_json(doc);
      }
      if (!cfg.grid_out.empty()) {
        std::ostringstream g;
        harness::write_grid_csv(g, trace);
        io::write_text(cfg.grid_out, g.str());
      }
      if (trace.empty) err << "EmptyTrace: no label change inside the window\n";
      if (curv) err << "section curvature median " << curv->median << " max " << curv->max << "\n";
    } else if (lemma3->parsed()) {
      const auto rep = harness::lemma3_sweep(cfg.trials, cfg.seed);
      if (cfg.format == "csv") harness::write_lemma3_csv(os, rep);
      else os << harness::dump_json(harness::to_json(rep));
      err << rep.lower_violations + rep.upper_violations << " violations in " << rep.evaluated << " configurations\n";
    } else if (conc->parsed()) {
      const auto rep = harness::projection_concentration(cfg.d, detail::single_m(cfg), cfg.delta, cfg.trials, cfg.seed,
                                                         detail::run_options(cfg, err));
      if (cfg.format == "csv") harness::write_concentration_csv(os, rep);
      else os << harness::dump_json(harness::to_json(rep));
    }
    detail::emit(cfg, os.str(), out);
    if (!numeric_failure.empty()) {
      err << numeric_failure << "\n";
      return 2;
    }
    return 0;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return is_usage_error(e.kind()) ? 1 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace semirandom::cli

#endif  // SEMIRANDOM_CLI_HPP
