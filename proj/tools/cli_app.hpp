#ifndef BGCS_TOOLS_CLI_APP_HPP
#define BGCS_TOOLS_CLI_APP_HPP

// Command-line front end. run() is kept in a header so tests can drive it in-process.
//
// Exit codes: 0 every check within tolerance, 2 tolerance breach or numerical
// non-convergence, 1 usage or domain error.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bgcs/coherent.hpp"
#include "bgcs/errors.hpp"
#include "bgcs/fock.hpp"
#include "bgcs/measure.hpp"
#include "bgcs/pathint.hpp"
#include "bgcs/random.hpp"

namespace bgcs::cli {

using Json = nlohmann::json;

inline constexpr const char* kSeedEnv = "BGCS_SEED";
inline constexpr std::size_t kDefaultSamples = 1'000'000;
inline constexpr std::size_t kDefaultRefinements = 12;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Seed default: BGCS_SEED when set, else 42.
inline std::uint64_t default_seed() {
  const char* env = std::getenv(kSeedEnv);
  if (env == nullptr || *env == '\0') return kDefaultSeed;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(env, &used, 0);
    if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string(kSeedEnv) + " is not an unsigned 64-bit integer: " + env);
  }
}

struct Common {
  std::string format = "json";
  std::string out;
  std::uint64_t seed = kDefaultSeed;
  unsigned workers = 1;
  std::size_t budget = 0;  ///< 0: command default

  std::size_t samples() const { return budget == 0 ? kDefaultSamples : budget; }
  QuadratureBudget quadrature() const {
    QuadratureBudget b;
    if (budget != 0) b.max_refinements = budget;
    return b;
  }
  MonteCarloOptions monte_carlo() const { return {samples(), workers, seed}; }
};

struct Report {
  std::string command;
  std::vector<Json> records;
  Json extra = Json::object();

  bool pass() const {
    return std::all_of(records.begin(), records.end(), [](const Json& r) { return r.at("pass").get<bool>(); });
  }
};

inline Json complex_json(Complex v) { return Json{{"re", v.real()}, {"im", v.imag()}}; }

inline std::vector<Complex> complex_vector(const std::vector<double>& re, const std::vector<double>& im,
                                           const char* name) {
  if (!im.empty() && im.size() != re.size()) {
    throw UsageError(std::string(name) + ": real and imaginary parts need the same length");
  }
  std::vector<Complex> v;
  for (std::size_t i = 0; i < re.size(); ++i) v.emplace_back(re[i], im.empty() ? 0.0 : im[i]);
  return v;
}

inline Json rel_record(const std::string& check, Json params, double lhs, double rhs, double rel_err, double tol,
                       const Common& common, std::size_t budget) {
  return Json{{"check", check},   {"params", std::move(params)}, {"lhs", lhs},
              {"rhs", rhs},       {"rel_err", rel_err},          {"tolerance", tol},
              {"budget", budget}, {"seed", common.seed},         {"pass", rel_err <= tol}};
}

inline Json stat_record(const std::string& check, Json params, const StatCheck& c, double z_max, const Common& common,
                        std::size_t budget) {
  const double z = c.z_score();
  return Json{{"check", check},
              {"params", std::move(params)},
              {"lhs", c.estimate},
              {"rhs", c.expected},
              {"standard_error", c.standard_error},
              {"z_score", z},
              {"tolerance", z_max},
              {"budget", budget},
              {"seed", common.seed},
              {"pass", z <= z_max}};
}

// ---------- serialization ----------

inline void flatten(const Json& j, const std::string& prefix, std::map<std::string, std::string>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), out);
  } else if (j.is_string()) {
    out[prefix] = j.get<std::string>();
  } else {
    out[prefix] = j.dump();
  }
}

inline std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

inline std::string serialize(const Report& report, const Common& common) {
  if (common.format == "csv") {
    std::vector<std::map<std::string, std::string>> rows;
    std::set<std::string> keys;
    for (const auto& r : report.records) {
      std::map<std::string, std::string> flat;
      flatten(r, "", flat);
      for (const auto& [k, v] : flat) keys.insert(k);
      rows.push_back(std::move(flat));
    }
    std::ostringstream os;
    std::string sep;
    for (const auto& k : keys) {
      os << sep << csv_cell(k);
      sep = ",";
    }
    os << '\n';
    for (const auto& row : rows) {
      sep.clear();
      for (const auto& k : keys) {
        const auto it = row.find(k);
        os << sep << (it == row.end() ? "" : csv_cell(it->second));
        sep = ",";
      }
      os << '\n';
    }
    return os.str();
  }
  Json doc{{"command", report.command},
           {"pass", report.pass()},
           {"records", report.records},
           {"seed", common.seed},
           {"workers", common.workers}};
  for (const auto& [k, v] : report.extra.items()) doc[k] = v;
  return doc.dump(2) + "\n";
}

// ---------- commands ----------

struct EvalF {
  double k = 1.0;
  std::vector<double> w_re{1.0};
  std::vector<double> w_im;
  double tol = 1e-14;
  int max_shells = 500;
  double rel_tol = 1e-10;

  Report run(const Common& common) const {
    const auto w = complex_vector(w_re, w_im, "--w");
    const Complex series = f_series(k, w, {tol, max_shells});
    Complex s{};
    for (const auto& v : w) s += v;
    const Complex collapsed = confluent_f1(k, s);
    const double rel = std::abs(series - collapsed) / std::abs(collapsed);
    Json rec = rel_record("f_series_vs_single_variable", Json{{"K", k}, {"w_re", w_re}, {"w_im", w_im}, {"tol", tol}},
                          0, 0, rel, rel_tol, common, static_cast<std::size_t>(max_shells));
    rec["lhs"] = complex_json(series);
    rec["rhs"] = complex_json(collapsed);
    return {"eval-f", {rec}};
  }
};

struct Inner {
  double k = 1.0;
  std::vector<double> z_re{0.5};
  std::vector<double> z_im{0.0};
  std::vector<double> zp_re{0.3};
  std::vector<double> zp_im{0.0};
  int cutoff = 40;
  double rel_tol = 1e-10;

  Report run(const Common& common) const {
    const Label z(complex_vector(z_re, z_im, "--z"));
    const Label zp(complex_vector(zp_re, zp_im, "--zp"));
    if (z.size() != zp.size()) throw UsageError("--z and --zp need the same length");
    const Complex series = inner_product(z, zp, k);
    const TruncatedRepSpace space(z.size(), k, cutoff);
    const Complex section = state_vector(z, space).dot(state_vector(zp, space));
    const double rel = std::abs(series - section) / std::abs(series);
    Json rec = rel_record("inner_product_vs_finite_section",
                          Json{{"K", k}, {"z_re", z_re}, {"z_im", z_im}, {"zp_re", zp_re}, {"zp_im", zp_im},
                               {"cutoff", cutoff}},
                          0, 0, rel, rel_tol, common, static_cast<std::size_t>(cutoff));
    rec["lhs"] = complex_json(series);
    rec["rhs"] = complex_json(section);
    return {"inner", {rec}};
  }
};

struct MeasureCheck {
  int n = 1;
  double k = 1.0;
  std::vector<int> moment;
  double rel_tol = 1e-8;

  Report run(const Common& common) const {
    std::vector<double> s(static_cast<std::size_t>(n), 0.0);
    if (!moment.empty()) {
      if (moment.size() != static_cast<std::size_t>(n)) throw UsageError("--moment needs N entries");
      for (std::size_t a = 0; a < moment.size(); ++a) {
        if (moment[a] < 0) throw UsageError("--moment entries must be >= 0");
        s[a] = moment[a];
      }
    }
    const auto budget = common.quadrature();
    const IdentityCheck c = moment_check(MeasureModel(static_cast<std::size_t>(n), k), s, budget);
    return {"measure-check", {rel_record("moment_identity", Json{{"N", n}, {"K", k}, {"moment", s}}, c.lhs, c.rhs,
                                         c.rel_err, rel_tol, common, budget.max_refinements)}};
  }
};

struct FormulaA {
  double k = 1.0;
  std::vector<double> s{0.0};
  double rel_tol = 1e-8;

  Report run(const Common& common) const {
    const auto budget = common.quadrature();
    const IdentityCheck c = verify_formula_a(s, k, budget);
    return {"formula-a", {rel_record("formula_a", Json{{"K", k}, {"s", s}}, c.lhs, c.rhs, c.rel_err, rel_tol, common,
                                     budget.max_refinements)}};
  }
};

struct FormulaB {
  double mu = 2.0;
  double nu = 0.0;
  double a = 2.0;
  double rel_tol = 1e-8;

  Report run(const Common& common) const {
    const auto budget = common.quadrature();
    const IdentityCheck c = verify_formula_b(mu, nu, a, budget);
    return {"formula-b", {rel_record("formula_b", Json{{"mu", mu}, {"nu", nu}, {"a", a}}, c.lhs, c.rhs, c.rel_err,
                                     rel_tol, common, budget.max_refinements)}};
  }
};

inline EvaluationMode parse_mode(const std::string& mode) {
  if (mode == "quadrature") return EvaluationMode::quadrature;
  if (mode == "montecarlo") return EvaluationMode::montecarlo;
  throw UsageError("--mode must be quadrature or montecarlo");
}

struct Rou {
  int n = 1;
  double k = 1.0;
  int cutoff = 4;
  std::string mode = "quadrature";
  double rel_tol = 1e-8;
  double z_max = 4.0;

  Report run(const Common& common) const {
    const EvaluationMode m = parse_mode(mode);
    const MeasureModel model(static_cast<std::size_t>(n), k);
    const Json params{{"N", n}, {"K", k}, {"cutoff", cutoff}, {"mode", mode}};
    if (m == EvaluationMode::quadrature) {
      const auto budget = common.quadrature();
      const ResolutionReport r = resolution_check(model, cutoff, m, {}, budget);
      Json rec = rel_record("resolution_of_unity", params, r.max_deviation, 0.0, r.max_deviation, rel_tol, common,
                            budget.max_refinements);
      rec["dimension"] = r.dimension;
      return {"rou", {rec}};
    }
    const ResolutionReport r = resolution_check(model, cutoff, m, common.monte_carlo());
    Json rec{{"check", "resolution_of_unity"},
             {"params", params},
             {"lhs", r.max_deviation},
             {"rhs", 0.0},
             {"z_score", r.max_z_score},
             {"tolerance", z_max},
             {"dimension", r.dimension},
             {"budget", r.samples},
             {"seed", common.seed},
             {"pass", r.max_z_score <= z_max}};
    return {"rou", {rec}};
  }
};

struct Sample {
  int n = 1;
  double k = 1.0;
  int points = 0;
  double z_max = 4.0;

  Report run(const Common& common) const {
    if (points < 0) throw UsageError("--points must be >= 0");
    const MeasureModel model(static_cast<std::size_t>(n), k);
    const auto mc = common.monte_carlo();
    const Json params{{"N", n}, {"K", k}};
    Report report{"sample", {}};
    for (const auto& c : sampler_moment_checks(model, mc)) {
      report.records.push_back(stat_record("sampler " + c.name, params, c, z_max, common, mc.samples));
    }
    for (const auto& c : radial_quantile_checks(model, mc)) {
      report.records.push_back(stat_record("radial_cdf " + c.name, params, c, z_max, common, mc.samples));
    }
    if (points > 0) {
      // separate stream id so the dump never overlaps the worker streams
      Engine engine = make_stream(common.seed, 1u << 20);
      MeasureSampler sampler(model);
      Json dump = Json::array();
      for (int i = 0; i < points; ++i) {
        const RadialPoint p = sampler(engine);
        dump.push_back(Json{{"r", p.r}, {"theta", p.theta}});
      }
      report.extra["points"] = dump;
    }
    return report;
  }
};

struct Trace {
  int n = 1;
  double k = 1.0;
  std::vector<double> mu{1.0};
  std::vector<double> c;
  double c_last = 0.0;
  std::string mode = "imaginary";
  double beta = 1.0;
  double time = 0.001;
  int m = 64;
  int cutoff = -1;
  std::string backend = "matrix";
  std::string weights = "linear";
  double tol = 0.0;
  double z_max = 4.0;

  HamiltonianParams hamiltonian() const {
    if (!c.empty()) {
      if (c.size() != static_cast<std::size_t>(n) + 1) throw UsageError("--c needs N+1 entries");
      return HamiltonianParams(c);
    }
    if (mu.size() != static_cast<std::size_t>(n)) throw UsageError("--mu needs N entries");
    return HamiltonianParams::from_mu(mu, c_last);
  }

  Report run(const Common& common) const {
    const HamiltonianParams hp = hamiltonian();
    const bool imaginary = mode == "imaginary";
    if (!imaginary && mode != "real") throw UsageError("--mode must be imaginary or real");
    if (weights != "linear" && weights != "exponential") throw UsageError("--weights must be linear or exponential");
    const std::optional<int> cut = cutoff >= 0 ? std::optional<int>(cutoff) : std::nullopt;

    Json rec{{"N", n}, {"K", k}, {"c", hp.c()}, {"mu", hp.mu()}, {"mode", mode}, {"backend", backend},
             {"seed", common.seed}, {"cutoff", cut ? Json(*cut) : Json(nullptr)}};
    rec[imaginary ? "beta" : "T"] = imaginary ? beta : time;

    auto finish_rel = [&](Complex value, double error, Complex reference, double tolerance) {
      const double rel = std::abs(value - reference) / std::abs(reference);
      rec["value"] = imaginary ? Json(value.real()) : complex_json(value);
      rec["error"] = error;
      rec["reference"] = imaginary ? Json(reference.real()) : complex_json(reference);
      rec["rel_err"] = rel;
      rec["tolerance"] = tolerance;
      rec["pass"] = rel <= tolerance;
    };
    auto finish_z = [&](const TraceEstimate& est, Complex reference) {
      const double d = std::abs(est.value - reference);
      const double z = est.error > 0.0 ? d / est.error : (d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
      rec["value"] = imaginary ? Json(est.value.real()) : complex_json(est.value);
      rec["error"] = est.error;
      rec["reference"] = imaginary ? Json(reference.real()) : complex_json(reference);
      rec["z_score"] = z;
      rec["tolerance"] = z_max;
      rec["budget"] = est.samples;
      rec["max_sample_share"] = est.max_sample_share;
      rec["pass"] = z <= z_max;
    };

    if (backend == "kernel-quadrature" || backend == "kernel-montecarlo") {
      if (!imaginary) throw UsageError("kernel backends evaluate exp(-beta H); use --mode imaginary");
      rec["check"] = "kernel_trace";
      const Complex reference = exact_spectral_trace(hp, k, beta, cut);
      if (backend == "kernel-quadrature") {
        const auto budget = common.quadrature();
        const TraceEstimate est = exact_kernel_trace(hp, k, beta, EvaluationMode::quadrature, {}, budget);
        finish_rel(est.value, est.error, reference, tol > 0.0 ? tol : 1e-6);
        rec["budget"] = budget.max_refinements;
      } else {
        const TraceEstimate est = exact_kernel_trace(hp, k, beta, EvaluationMode::montecarlo, common.monte_carlo());
        finish_z(est, reference);
        rec["variance_finite"] = est.variance_finite;
      }
      return {"trace", {rec}};
    }

    if (backend != "matrix" && backend != "montecarlo") {
      throw UsageError("--backend must be matrix, montecarlo, kernel-quadrature or kernel-montecarlo");
    }
    TraceConfig config;
    config.mode = imaginary ? TimeMode::imaginary : TimeMode::real;
    config.horizon = imaginary ? beta : time;
    config.slices = m;
    config.cutoff = cut;
    config.weights = weights == "linear" ? SliceWeights::linear : SliceWeights::exponential;
    config.backend = backend == "matrix" ? SliceBackend::matrix : SliceBackend::montecarlo;
    config.mc = common.monte_carlo();
    rec["check"] = "sliced_trace";
    rec["M"] = m;
    rec["weights"] = weights;

    const TraceEstimate est = sliced_trace(hp, k, config);
    if (config.backend == SliceBackend::montecarlo) {
      TraceConfig exact = config;
      exact.backend = SliceBackend::matrix;
      finish_z(est, sliced_trace(hp, k, exact).value);
      rec["reference_kind"] = "matrix backend, same weights and cutoff";
      return {"trace", {rec}};
    }
    Complex reference;
    if (imaginary) {
      reference = exact_spectral_trace(hp, k, beta, cut);
      rec["reference_kind"] = "spectral trace on the same truncation";
      rec["reference_untruncated"] = exact_spectral_trace(hp, k, beta);
    } else {
      for (const auto& state : enumerate_basis(hp.n_modes(), *cut)) {
        reference += std::exp(Complex(0.0, -time * hp.energy(state, k)));
      }
      rec["reference_kind"] = "sum of exp(-i T E_n) on the truncation";
    }
    finish_rel(est.value, est.error, reference, tol > 0.0 ? tol : 1e-2);
    return {"trace", {rec}};
  }
};

// ---------- entry point ----------

inline void add_common(CLI::App* sub, Common& common) {
  sub->add_option("--format", common.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--out", common.out, "Write the report to this path instead of stdout");
  sub->add_option("--seed", common.seed, std::string("RNG seed (default from ") + kSeedEnv + ", else 42)");
  sub->add_option("--workers", common.workers, "Worker threads; results depend on (seed, workers)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--budget", common.budget,
                  "Work limit: Monte Carlo samples (0 = 1000000) or quadrature refinement levels (0 = 12)");
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Common common;
  try {
    common.seed = default_seed();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  CLI::App app{"Extended Barut-Girardello coherent states for U(N,1): evaluations and verification suites", "bgcs"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  EvalF eval_f;
  auto* s_eval = app.add_subcommand("eval-f", "Evaluate F_N(K; w) and cross-check it against the single-variable sum");
  s_eval->add_option("--k", eval_f.k, "Representation label K > 0");
  s_eval->add_option("--w-re", eval_f.w_re, "Real parts of w_1..w_N")->delimiter(',');
  s_eval->add_option("--w-im", eval_f.w_im, "Imaginary parts of w_1..w_N (empty = 0)")->delimiter(',');
  s_eval->add_option("--tol", eval_f.tol, "Series tolerance");
  s_eval->add_option("--max-shells", eval_f.max_shells, "Degree-shell cap");
  s_eval->add_option("--rel-tol", eval_f.rel_tol, "Pass threshold on the relative difference");

  Inner inner;
  auto* s_inner = app.add_subcommand("inner", "<z|z'> from the series against the truncated state vectors");
  s_inner->add_option("--k", inner.k, "Representation label K > 0");
  s_inner->add_option("--z-re", inner.z_re, "Real parts of z")->delimiter(',');
  s_inner->add_option("--z-im", inner.z_im, "Imaginary parts of z")->delimiter(',');
  s_inner->add_option("--zp-re", inner.zp_re, "Real parts of z'")->delimiter(',');
  s_inner->add_option("--zp-im", inner.zp_im, "Imaginary parts of z'")->delimiter(',');
  s_inner->add_option("--cutoff", inner.cutoff, "Fock cutoff of the finite section");
  s_inner->add_option("--rel-tol", inner.rel_tol, "Pass threshold on the relative difference");

  MeasureCheck measure;
  auto* s_measure = app.add_subcommand("measure-check", "Moment identity by the xi-substitution quadrature");
  s_measure->add_option("--n", measure.n, "Number of modes N")->check(CLI::PositiveNumber);
  s_measure->add_option("--k", measure.k, "Representation label K > 0");
  s_measure->add_option("--moment", measure.moment, "Occupation numbers n_1..n_N (empty = all zero)")->delimiter(',');
  s_measure->add_option("--rel-tol", measure.rel_tol, "Pass threshold on rel_err");

  FormulaA formula_a;
  auto* s_fa = app.add_subcommand("formula-a", "Multi-r Bessel-K integral against prod Gamma(s+1) Gamma(K+sum s)");
  s_fa->add_option("--k", formula_a.k, "K > 0");
  s_fa->add_option("--s", formula_a.s, "Exponents s_1..s_N, each > -1")->delimiter(',');
  s_fa->add_option("--rel-tol", formula_a.rel_tol, "Pass threshold on rel_err");

  FormulaB formula_b;
  auto* s_fb = app.add_subcommand("formula-b", "Mellin transform of K_nu(a x); requires a > 0 and mu > |nu|");
  s_fb->add_option("--mu", formula_b.mu, "Mellin exponent mu");
  s_fb->add_option("--nu", formula_b.nu, "Bessel order nu");
  s_fb->add_option("--a", formula_b.a, "Scale a > 0");
  s_fb->add_option("--rel-tol", formula_b.rel_tol, "Pass threshold on rel_err");

  Rou rou;
  auto* s_rou = app.add_subcommand("rou", "Resolution of unity: Gram matrix of the truncated basis under d mu");
  s_rou->add_option("--n", rou.n, "Number of modes N")->check(CLI::PositiveNumber);
  s_rou->add_option("--k", rou.k, "Representation label K > 0");
  s_rou->add_option("--cutoff", rou.cutoff, "Fock cutoff");
  s_rou->add_option("--mode", rou.mode, "quadrature or montecarlo");
  s_rou->add_option("--rel-tol", rou.rel_tol, "Quadrature pass threshold on max |G - I|");
  s_rou->add_option("--z-max", rou.z_max, "Monte Carlo pass threshold on the largest z-score");

  Sample sample;
  auto* s_sample = app.add_subcommand("sample", "Exact sampler: moment, angle and radial-CDF checks");
  s_sample->add_option("--n", sample.n, "Number of modes N")->check(CLI::PositiveNumber);
  s_sample->add_option("--k", sample.k, "Representation label K > 0");
  s_sample->add_option("--points", sample.points, "Also dump this many sampled points");
  s_sample->add_option("--z-max", sample.z_max, "Pass threshold on each z-score");

  Trace trace;
  auto* s_trace = app.add_subcommand("trace", "Partition-function traces: sliced, kernel and spectral");
  s_trace->add_option("--n", trace.n, "Number of modes N")->check(CLI::PositiveNumber);
  s_trace->add_option("--k", trace.k, "Representation label K > 0");
  s_trace->add_option("--mu", trace.mu, "mu_1..mu_N (used when --c is empty)")->delimiter(',');
  s_trace->add_option("--c", trace.c, "Mode coefficients c_1..c_{N+1} (overrides --mu)")->delimiter(',');
  s_trace->add_option("--c-last", trace.c_last, "c_{N+1} when --mu is used");
  s_trace->add_option("--mode", trace.mode, "imaginary or real");
  s_trace->add_option("--beta", trace.beta, "Inverse temperature (imaginary mode)");
  s_trace->add_option("--time", trace.time, "Horizon T (real mode)");
  s_trace->add_option("--m", trace.m, "Slice count M");
  s_trace->add_option("--cutoff", trace.cutoff, "Fock cutoff (-1 = none; sliced backends need one)");
  s_trace->add_option("--backend", trace.backend, "matrix, montecarlo, kernel-quadrature or kernel-montecarlo");
  s_trace->add_option("--weights", trace.weights, "Slice weights: linear or exponential");
  s_trace->add_option("--tol", trace.tol, "Relative pass threshold (0 = 1e-2 sliced, 1e-6 kernel quadrature)");
  s_trace->add_option("--z-max", trace.z_max, "Monte Carlo pass threshold on the z-score");

  for (auto* sub : app.get_subcommands({})) add_common(sub, common);

  std::vector<std::string> storage = args;
  std::vector<char*> argv{const_cast<char*>("bgcs")};
  for (auto& a : storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }

  try {
    Report report;
    if (*s_eval) report = eval_f.run(common);
    else if (*s_inner) report = inner.run(common);
    else if (*s_measure) report = measure.run(common);
    else if (*s_fa) report = formula_a.run(common);
    else if (*s_fb) report = formula_b.run(common);
    else if (*s_rou) report = rou.run(common);
    else if (*s_sample) report = sample.run(common);
    else report = trace.run(common);

    const std::string text = serialize(report, common);
    if (common.out.empty()) {
      out << text;
    } else {
      std::ofstream file(common.out, std::ios::binary);
      if (!file) throw UsageError("cannot open --out path " + common.out);
      file << text;
    }
    return report.pass() ? 0 : 2;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << " (estimate " << e.estimate() << ", error estimate " << e.error_estimate()
        << ")\n";
    return 2;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::overflow_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace bgcs::cli

#endif  // BGCS_TOOLS_CLI_APP_HPP
