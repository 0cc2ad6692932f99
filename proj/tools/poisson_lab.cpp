// poisson_lab: command-line driver for every pipeline stage.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "poisson_lab/calibration.hpp"
#include "poisson_lab/contour.hpp"
#include "poisson_lab/errors.hpp"
#include "poisson_lab/io.hpp"
#include "poisson_lab/montecarlo.hpp"
#include "poisson_lab/saddle.hpp"
#include "poisson_lab/sampler.hpp"
#include "poisson_lab/series.hpp"
#include "poisson_lab/stats.hpp"
#include "poisson_lab/zeros.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace plab;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct RunConfig {
  std::string command;
  int k = 60;
  double window = 0.0;         // sample window M; for `zeros` the extraction window W
  double sample_window = 0.0;  // M for `zeros`
  unsigned bits = 0;
  double delta = 0.4;
  int replicas = 100;
  std::uint64_t base_seed = 1;
  int threads = 1;
  std::string output_dir = ".";
  std::string points;
  int n_max = -1;
  int r = 0;
  int nodes = 512;
  double grid_step = 0.05;
  double failure_quota = 0.05;

  std::optional<std::vector<double>> explicit_points;
};

std::vector<double> parse_points(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw InvalidParameter("cannot parse point '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos)
      throw InvalidParameter("cannot parse point '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw InvalidParameter("--points is empty");
  return out;
}

double default_sample_window(int k) { return std::max(10.0 * k, 500.0); }

/// Window M for the sampled configuration of a single-sample stage.
double sample_window(const RunConfig& c, const std::string& stage) {
  if (stage == "zeros") return c.sample_window > 0 ? c.sample_window : default_sample_window(c.k);
  return c.window > 0 ? c.window : default_sample_window(c.k);
}

double zero_window(const RunConfig& c) { return c.window > 0 ? c.window : 5.0; }

PoissonSample make_sample(const RunConfig& c, const std::string& stage) {
  if (c.explicit_points) {
    double M = stage == "zeros" ? c.sample_window : c.window;
    for (double x : *c.explicit_points) M = std::max(M, std::fabs(x));
    return PoissonSample(*c.explicit_points, M, 1.0, c.base_seed);
  }
  return sample_poisson(sample_window(c, stage), 1.0, c.base_seed);
}

json resolved(const RunConfig& c, const std::string& stage) {
  json j{{"command", c.command},
         {"stage", stage},
         {"k", c.k},
         {"bits", c.bits},
         {"delta", c.delta},
         {"replicas", c.replicas},
         {"base_seed", c.base_seed},
         {"n_max", c.n_max},
         {"r", c.r},
         {"nodes", c.nodes},
         {"grid_step", c.grid_step},
         {"failure_quota", c.failure_quota}};
  if (stage == "zeros") {
    j["window"] = zero_window(c);
    j["sample_window"] = c.explicit_points ? 0.0 : sample_window(c, stage);
  } else {
    j["window"] = c.explicit_points ? c.window : sample_window(c, stage);
  }
  if (c.explicit_points) j["points"] = *c.explicit_points;
  return j;
}

std::ofstream open_output(const RunConfig& c, const std::string& name) {
  fs::create_directories(c.output_dir);
  const fs::path path = fs::path(c.output_dir) / name;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  return os;
}

std::string tagged(const std::string& stem, const json& cfg, const std::string& ext) {
  return stem + "_" + io::config_hash(cfg) + "." + ext;
}

void validate_common(const RunConfig& c) {
  if (c.k < 0) throw InvalidParameter("--k must be >= 0");
  if (c.window < 0 || c.sample_window < 0) throw InvalidParameter("windows must be >= 0");
  if (c.bits != 0) PrecisionConfig{c.bits}.validate();
  if (c.replicas < 1) throw InvalidParameter("--replicas must be >= 1");
  if (c.threads < 1) throw InvalidParameter("--threads must be >= 1");
  if (c.r < 0) throw InvalidParameter("--r must be >= 0");
  if (!(c.failure_quota >= 0 && c.failure_quota <= 1)) throw InvalidParameter("--failure-quota must be in [0, 1]");
}

// ------------------------------------------------------------------ stages

void run_sample(const RunConfig& c) {
  const json cfg = resolved(c, "sample");
  const PoissonSample s = make_sample(c, "sample");
  auto os = open_output(c, tagged("sample", cfg, "json"));
  json out = json::parse(sample_to_json(s));
  out["header"] = {{"version", io::kVersion}, {"config", cfg}};
  os << out.dump() << '\n';
  std::cout << "sample: " << s.size() << " points on [-" << s.window_halfwidth() << ", "
            << s.window_halfwidth() << "], seed " << s.seed() << '\n';
}

void run_coeffs(const RunConfig& c) {
  const json cfg = resolved(c, "coeffs");
  const PoissonSample s = make_sample(c, "coeffs");
  const int n = c.n_max >= 0 ? c.n_max
                             : (c.explicit_points ? static_cast<int>(s.size()) : c.k + 2);
  const PrecisionConfig p = c.bits ? PrecisionConfig{c.bits} : PrecisionConfig::for_degree(n);
  const CoefficientTable table = coefficients_product(s, n, p);
  auto os = open_output(c, tagged("coefficients", cfg, "csv"));
  io::write_coefficients_csv(os, table, cfg);
  std::cout << "coeffs: n_max " << n << ", " << p.bits << " bits";
  if (n <= 12) {
    std::cout << ", e =";
    for (int j = 0; j <= n; ++j) std::cout << (j ? ", " : " ") << table.e[j].to_double();
  }
  std::cout << '\n';
}

SaddlePoint solve_saddle(const RunConfig& c, const PoissonSample& s) {
  if (c.k < 1) throw InvalidParameter("the saddle needs --k >= 1");
  return find_saddle(s, c.k, default_saddle_tolerance(c.k));
}

void run_saddle(const RunConfig& c) {
  const json cfg = resolved(c, "saddle");
  const PoissonSample s = make_sample(c, "saddle");
  SaddlePoint sp;
  try {
    sp = solve_saddle(c, s);
  } catch (const SaddleFailure& e) {
    SaddlePoint partial;
    partial.trace = e.trace();
    auto os = open_output(c, tagged("saddle_trace", cfg, "jsonl"));
    io::write_saddle_trace(os, partial, cfg);
    throw;
  }
  auto os = open_output(c, tagged("saddle_trace", cfg, "jsonl"));
  io::write_saddle_trace(os, sp, cfg);
  const auto diag = saddle_diagnostics(s, sp);
  std::cout << "saddle: sigma = " << io::format_double(sp.sigma.real()) << " + "
            << io::format_double(sp.sigma.imag()) << "i, residual " << sp.residual << ", "
            << sp.iterations << " iterations, offset/sqrt(k) " << sp.normalized_offset
            << ", sigma^2 phi''/k " << diag.scaled_curvature.real() << '\n';
}

void run_contour(const RunConfig& c) {
  const json cfg = resolved(c, "contour");
  const PoissonSample s = make_sample(c, "contour");
  const SaddlePoint sp = solve_saddle(c, s);
  const ContourSpec spec = build_contour(sp, c.delta, c.nodes);
  const ContourResult res = coefficient_via_contour(s, c.k, c.r, spec);
  const int n = c.k + c.r;
  const CoefficientTable table =
      coefficients_product(s, n, c.bits ? PrecisionConfig{c.bits} : PrecisionConfig::for_degree(n));
  auto os = open_output(c, tagged("contour", cfg, "csv"));
  io::write_contour_csv(os, res, cfg);
  std::cout << "contour: e_" << n << " = " << res.total_value().real() << " (direct "
            << table.e[n].to_double() << ", relative error " << relative_error(res, table.e[n])
            << "), G1 ratio " << res.dominant_ratio.real() << " + " << res.dominant_ratio.imag()
            << "i, G2 fraction " << res.negligible_fraction(Arc::Gamma2)
            << (res.converged ? "" : " [quadrature not converged]") << '\n';
}

void run_zeros(const RunConfig& c) {
  const json cfg = resolved(c, "zeros");
  const PoissonSample s = make_sample(c, "zeros");
  const double W = zero_window(c);
  const int r_max = default_r_max(W);
  const SaddlePoint sp = solve_saddle(c, s);
  const int n = c.k + r_max;
  if (static_cast<int>(s.size()) < n) throw InvalidParameter("sample has fewer points than k + r_max");
  const PrecisionConfig p = c.bits ? PrecisionConfig{c.bits} : PrecisionConfig::for_degree(n);
  const CoefficientTable table = coefficients_product(s, n, p);
  const DerivativeCoefficients d = derivative_coefficients(table, s, c.k, r_max, sp.sigma);
  const ZeroSet zs = find_real_zeros(d, W, c.grid_step);
  const SpacingReport sr = spacing_stats(zs);
  {
    auto os = open_output(c, tagged("zeros", cfg, "csv"));
    io::write_zeros_csv(os, zs, s.seed(), cfg);
  }
  {
    auto os = open_output(c, tagged("fractional", cfg, "csv"));
    io::write_fractional_csv(os, sr, c.k, s.seed(), cfg);
  }
  const MatchReport m = match_zero_sets(zs, d.theta, 0.05, 0.5);
  std::cout << "zeros: " << zs.zeros.size() << " zeros on [-" << W << ", " << W << "]";
  if (!sr.empty)
    std::cout << ", median gap " << sr.median_gap << ", max |gap - 1| " << sr.max_abs_dev_from_1;
  std::cout << ", theta_k " << d.theta << ", matched " << m.pairs.size() << "/"
            << m.pairs.size() + m.unmatched_found.size() << '\n';
}

TestResult fraction_test(const std::string& name, std::size_t hits, std::size_t n, double threshold) {
  TestResult t;
  t.name = name;
  t.statistic = n ? static_cast<double>(hits) / static_cast<double>(n) : 0.0;
  t.threshold = threshold;
  t.relation = ">=";
  t.n_replicas = n;
  t.pass = n > 0 && t.statistic >= threshold;
  return t;
}

TestResult median_test(const std::string& name, std::vector<double> v, double threshold) {
  TestResult t;
  t.name = name;
  t.threshold = threshold;
  t.relation = "<=";
  t.n_replicas = v.size();
  t.statistic = v.empty() ? NAN : stats::median(std::move(v));
  t.pass = t.n_replicas > 0 && t.statistic <= threshold;
  return t;
}

int run_verify(const RunConfig& c) {
  if (c.explicit_points) throw InvalidParameter("verify samples its own configurations; drop --points");
  EnsembleConfig e;
  e.k = c.k;
  e.window_halfwidth = c.window;
  e.bits = c.bits;
  e.replicas = c.replicas;
  e.base_seed = c.base_seed;
  e.threads = c.threads;
  e.grid_step = c.grid_step;
  e.validate();
  json cfg = resolved(c, "verify");
  cfg["ensemble"] = e.to_json();

  const auto rs = run_replicas(e);
  {
    auto os = open_output(c, tagged("replicas", cfg, "jsonl"));
    io::write_replicas_jsonl(os, rs, cfg);
  }

  std::vector<TestResult> tests;
  std::size_t converged = 0, curvature_ok = 0, interior = 0, matched = 0;
  std::vector<double> offsets, cos_law, spacing, sup_f, fracs, e1;
  for (const auto& r : rs) {
    e1.push_back(r.e1);
    if (!r.saddle_converged) continue;
    ++converged;
    offsets.push_back(r.normalized_offset);
    if (std::abs(r.scaled_curvature - 1.0) <= 0.5) ++curvature_ok;
    if (!r.ok) continue;
    cos_law.push_back(*std::max_element(r.cosine_law_errors.begin(), r.cosine_law_errors.end()));
    if (!r.spacing.empty) spacing.push_back(r.spacing.max_abs_dev);
    if (r.spacing.n_zeros > 0) fracs.push_back(r.spacing.nearest_fraction);
    sup_f.push_back(r.cosine.sup_f);
    interior += r.spacing.interior;
    matched += r.spacing.matched;
  }
  tests.push_back(fraction_test("saddle_convergence", converged, rs.size(), 0.95));
  tests.push_back(fraction_test("saddle_curvature", curvature_ok, converged, 0.90));
  {
    TestResult t;
    t.name = "saddle_offset_p95";
    t.statistic = offsets.empty() ? NAN : stats::quantile(offsets, 0.95);
    t.threshold = calibration::kSaddleOffsetP95;
    t.relation = "<=";
    t.n_replicas = offsets.size();
    t.pass = !offsets.empty() && t.statistic <= t.threshold;
    t.details = {{"calibrated_at_k", 100}};
    tests.push_back(t);
  }
  try {
    tests.push_back(test_sign_periodicity(rs, c.k));
  } catch (const InvalidParameter&) {
  }
  tests.push_back(median_test("cosine_law", cos_law, 0.1));
  tests.push_back(median_test("cosine_sup_error", sup_f, 0.2));
  tests.push_back(median_test("gap_deviation", spacing, 0.1));
  tests.push_back(fraction_test("lattice_matching", matched, interior, 0.95));
  json skipped = json::array();
  if (fracs.size() >= 1000) tests.push_back(test_translate_uniformity(fracs));
  else skipped.push_back("translate_uniformity");
  if (e1.size() < 1000) skipped.push_back("e1_cauchy");
  else {
    auto t = test_e1_cauchy(e1);
    t.details["oracle_scale"] = cauchy_scale_oracle(e.resolved_window());
    tests.push_back(t);
  }
  {
    const auto w = poisson_integral_stats({0.0, 1.0}, 1, std::max(c.replicas, 2),
                                          e.resolved_window(), c.base_seed, c.threads);
    tests.push_back(w.mean_test);
    tests.push_back(w.variance_test);
  }

  json summary{{"header", {{"version", io::kVersion}, {"config", cfg}}},
               {"replicas", rs.size()},
               {"saddle_failures", rs.size() - converged}};
  json jt = json::array();
  for (const auto& t : tests) {
    jt.push_back(t.to_json());
    std::cout << "verify: " << t.name << " " << (t.pass ? "PASS" : "FAIL") << " statistic "
              << t.statistic << " " << t.relation << " " << t.threshold << " (n = " << t.n_replicas << ")\n";
  }
  summary["tests"] = jt;
  summary["skipped_below_1000_replicas"] = skipped;
  const std::string name = tagged("summary", cfg, "json");
  {
    auto os = open_output(c, name);
    os << summary.dump(2) << '\n';
  }
  std::cout << "verify: summary written to " << (fs::path(c.output_dir) / name).string() << '\n';

  const double failure_rate = static_cast<double>(rs.size() - converged) / static_cast<double>(rs.size());
  if (failure_rate > c.failure_quota) {
    std::cerr << "verify: saddle failure rate " << failure_rate << " exceeds quota " << c.failure_quota << '\n';
    return kExitNumerical;
  }
  return 0;
}

int dispatch(const RunConfig& c) {
  validate_common(c);
  const std::string& cmd = c.command;
  if (cmd == "sample") run_sample(c);
  else if (cmd == "coeffs") run_coeffs(c);
  else if (cmd == "saddle") run_saddle(c);
  else if (cmd == "contour") run_contour(c);
  else if (cmd == "zeros") run_zeros(c);
  else if (cmd == "verify") return run_verify(c);
  else if (cmd == "all") {
    run_sample(c);
    run_coeffs(c);
    run_saddle(c);
    run_contour(c);
    run_zeros(c);
    if (!c.explicit_points) return run_verify(c);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random analytic functions with Poisson zeros: sampling, coefficients, saddle, contour, zeros, ensembles"};
  app.require_subcommand(1, 1);
  app.set_config("--config", "", "key = value configuration file; flags override it");

  RunConfig c;
  app.add_option("--k", c.k, "derivative order k")->capture_default_str();
  app.add_option("--window", c.window,
                 "sample window half-width M (0: max(10k, 500)); for `zeros` the extraction window W (default 5)");
  app.add_option("--sample-window", c.sample_window, "sample window M for `zeros` (0: max(10k, 500))");
  app.add_option("--bits", c.bits, "MPFR precision (0: derived from the degree)");
  app.add_option("--delta", c.delta, "dominant arc exponent, in (1/3, 1/2)")->capture_default_str();
  app.add_option("--replicas", c.replicas, "ensemble size for verify")->capture_default_str();
  app.add_option("--base-seed", c.base_seed, "seed of the first replica")
      ->envname("POISSON_LAB_SEED")
      ->capture_default_str();
  app.add_option("--threads", c.threads, "worker threads")->capture_default_str();
  app.add_option("--output-dir", c.output_dir, "directory for output files")->capture_default_str();
  app.add_option("--points", c.points, "explicit comma-separated points (debug mode, bypasses the sampler)");
  app.add_option("--n-max", c.n_max, "highest coefficient index for coeffs");
  app.add_option("--r", c.r, "offset r for the contour coefficient e_{k+r}")->capture_default_str();
  app.add_option("--nodes", c.nodes, "initial nodes per arc")->capture_default_str();
  app.add_option("--grid-step", c.grid_step, "zero scan grid step")->capture_default_str();
  app.add_option("--failure-quota", c.failure_quota, "tolerated saddle failure rate in verify")
      ->capture_default_str();

  const std::pair<const char*, const char*> stages[] = {
      {"sample", "draw a Poisson sample and write it as JSON"},
      {"coeffs", "Taylor coefficients e_0..e_n as log10 CSV"},
      {"saddle", "locate sigma_k and write the Newton trace"},
      {"contour", "six-arc Cauchy integral for e_{k+r}"},
      {"zeros", "real zeros of f^(k) and their fractional parts"},
      {"verify", "replica ensemble and statistical tests"},
      {"all", "every stage in order"},
  };
  for (const auto& [name, help] : stages) {
    auto* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    sub->callback([&c, sub] { c.command = sub->get_name(); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitValidation;
  }

  try {
    if (!c.points.empty()) c.explicit_points = parse_points(c.points);
    return dispatch(c);
  } catch (const InvalidParameter& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const InvalidSample& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const SaddleFailure& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const PoleError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const WindowTooLarge& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
