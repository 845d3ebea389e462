#ifndef BGCS_MEASURE_HPP
#define BGCS_MEASURE_HPP

// The radial measure d mu(z) = sigma(r) [dz^dag dz] with its exact sampler, the
// xi-substitution quadrature, and verifiers for the moment identity, the resolution
// of unity and the two Bessel-K integral formulas.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "bgcs/coherent.hpp"
#include "bgcs/errors.hpp"
#include "bgcs/fock.hpp"
#include "bgcs/quadrature.hpp"
#include "bgcs/random.hpp"
#include "bgcs/specfun.hpp"

namespace bgcs {

class MeasureModel {
 public:
  MeasureModel(std::size_t n_modes, double k) : n_(n_modes), k_(k) {
    if (n_modes == 0) throw PreconditionError("MeasureModel: N must be at least 1");
    if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("MeasureModel: K must be positive");
  }

  std::size_t n_modes() const noexcept { return n_; }
  double k() const noexcept { return k_; }
  double order() const noexcept { return k_ - static_cast<double>(n_); }  ///< Bessel order K - N

  /// log of 2 R^{(K-N)/2} K_{K-N}(2 sqrt R) for R > 0. This is pi^N Gamma(K) sigma.
  double log_radial_kernel(double radius) const {
    if (!(radius > 0.0)) throw DomainError("log_radial_kernel: R must be positive");
    return std::numbers::ln2 + 0.5 * order() * std::log(radius) + specfun::log_bessel_k(order(), 2.0 * std::sqrt(radius));
  }

 private:
  std::size_t n_;
  double k_;
};

/// z_a = sqrt(r_a) exp(i theta_a).
struct RadialPoint {
  std::vector<double> r;
  std::vector<double> theta;

  double radius() const {
    double s = 0.0;
    for (double v : r) s += v;
    return s;
  }

  Label label() const {
    std::vector<Complex> z(r.size());
    for (std::size_t a = 0; a < r.size(); ++a) z[a] = std::polar(std::sqrt(r[a]), theta[a]);
    return Label(std::move(z));
  }
};

/// sigma(r) = 2/(pi^N Gamma(K)) R^{(K-N)/2} K_{K-N}(2 sqrt R), R = sum r_a.
inline double density(const MeasureModel& model, std::span<const double> r) {
  if (r.size() != model.n_modes()) throw PreconditionError("density: r must have N entries");
  double radius = 0.0;
  for (double v : r) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("density: r_a must be finite and >= 0");
    radius += v;
  }
  const double n = static_cast<double>(model.n_modes());
  const double log_prefactor = -n * std::log(std::numbers::pi) - specfun::log_gamma(model.k());
  if (radius == 0.0) {
    if (model.k() <= n) throw SingularityError("density: sigma diverges at the origin when K <= N");
    return std::exp(log_prefactor + specfun::log_gamma(model.k() - n));
  }
  return std::exp(log_prefactor + model.log_radial_kernel(radius));
}

struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_err = 0.0;
  double error_estimate = 0.0;  ///< relative error estimate of the quadrature side
};

inline IdentityCheck make_check(double lhs, double rhs, double error_estimate) {
  return {lhs, rhs, std::fabs(lhs - rhs) / std::fabs(rhs), error_estimate};
}

/// Quadrature over R_+^N through
///   r_1 = xi_1 (1 - xi_2), r_2 = xi_1 xi_2 (1 - xi_3), ..., r_N = xi_1 xi_2 ... xi_N,
/// so sum r_a = xi_1 and dr = xi_1^{N-1} xi_2^{N-2} ... xi_{N-1} dxi.
/// xi_1 runs over the half line (exp-sinh), xi_2..xi_N over (0,1).
class SimplexQuadrature {
 public:
  explicit SimplexQuadrature(MeasureModel model, QuadratureBudget budget = {}) : model_(model), budget_(budget) {}

  const MeasureModel& model() const noexcept { return model_; }

  /// \int prod_a r_a^{s_a} * 2 R^{(K-N)/2} K_{K-N}(2 sqrt R) dr.
  /// Monomials factorize: one half-line integral in xi_1 and one Beta-type factor per
  /// remaining xi. Integer-exponent factors are polynomials and use Gauss-Legendre 64;
  /// the others use tanh-sinh because of the endpoint singularities.
  QuadratureResult monomial(std::span<const double> s) const {
    const std::size_t n = model_.n_modes();
    if (s.size() != n) throw PreconditionError("monomial: need one exponent per mode");
    double total_s = 0.0;
    for (double v : s) {
      if (!(v > -1.0) || !std::isfinite(v)) throw DomainError("monomial: exponents must exceed -1");
      total_s += v;
    }
    if (!(model_.k() + total_s > 0.0)) throw DomainError("monomial: K + sum s must be positive");

    const double power = total_s + static_cast<double>(n) - 1.0;
    auto radial = [&](double xi) {
      if (xi <= 0.0) return 0.0;
      const double log_value = power * std::log(xi) + model_.log_radial_kernel(xi);
      return log_value < -745.0 ? 0.0 : std::exp(log_value);
    };
    QuadratureResult result = integrate_half_line(radial, budget_);
    double rel_err = result.relative_error();

    double tail = 0.0;  // sum_{j >= k} s_j
    for (std::size_t k = n; k >= 2; --k) {
      tail += s[k - 1];
      const double a = tail + static_cast<double>(n - k);  // power of xi_k
      const double b = s[k - 2];                             // power of (1 - xi_k)
      auto factor = [a, b](double x) { return std::exp(a * std::log(x) + b * std::log1p(-x)); };
      if (is_integer(a) && is_integer(b)) {
        result.value *= gauss_legendre_unit(factor);
      } else {
        // xc is the signed distance to the nearer endpoint, exact where x itself rounds
        auto near_ends = [a, b](double x, double xc) {
          const double left = xc < 0.0 ? -xc : x;
          const double right = xc > 0.0 ? xc : 1.0 - x;
          return std::exp(a * std::log(left) + b * std::log(right));
        };
        const QuadratureResult f = integrate_unit_interval(near_ends, budget_);
        result.value *= f.value;
        rel_err += f.relative_error();
      }
    }
    result.error = rel_err * std::fabs(result.value);
    return result;
  }

  /// E_mu[f] for a function of r; `log_f` returns log f(r) (f > 0). Nested rule:
  /// exp-sinh in xi_1 and a Gauss-Legendre 64 tensor over xi_2..xi_N.
  template <class LogF>
  QuadratureResult expectation_log(LogF&& log_f) const {
    const std::size_t n = model_.n_modes();
    const double log_norm = -specfun::log_gamma(model_.k());
    const auto& rule = boost::math::quadrature::gauss<double, 64>::abscissa();
    const auto& rule_w = boost::math::quadrature::gauss<double, 64>::weights();
    // map the symmetric half-rule onto (0,1): nodes (1 +- x)/2, weights w/2
    std::vector<double> nodes;
    std::vector<double> weights;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      if (rule[i] == 0.0) {
        nodes.push_back(0.5);
        weights.push_back(0.5 * rule_w[i]);
        continue;
      }
      nodes.push_back(0.5 * (1.0 - rule[i]));
      weights.push_back(0.5 * rule_w[i]);
      nodes.push_back(0.5 * (1.0 + rule[i]));
      weights.push_back(0.5 * rule_w[i]);
    }

    std::vector<double> r(n);
    auto radial = [&](double xi1) {
      if (xi1 <= 0.0) return 0.0;
      const double log_outer = log_norm + (static_cast<double>(n) - 1.0) * std::log(xi1) + model_.log_radial_kernel(xi1);
      if (n == 1) {
        r[0] = xi1;
        const double v = log_outer + log_f(std::span<const double>(r));
        return v < -745.0 ? 0.0 : std::exp(v);
      }
      const std::size_t inner = n - 1;
      std::vector<std::size_t> idx(inner, 0);
      double sum = 0.0;
      while (true) {
        double weight = 1.0;
        double prefix = xi1;
        for (std::size_t j = 0; j < inner; ++j) {
          const double x = nodes[idx[j]];
          weight *= weights[idx[j]] * std::pow(x, static_cast<double>(inner - 1 - j));
          r[j] = prefix * (1.0 - x);
          prefix *= x;
        }
        r[n - 1] = prefix;
        const double v = log_outer + log_f(std::span<const double>(r));
        if (v > -745.0) sum += weight * std::exp(v);
        std::size_t j = 0;
        while (j < inner && ++idx[j] == nodes.size()) idx[j++] = 0;
        if (j == inner) break;
      }
      return sum;
    };
    return integrate_half_line(radial, budget_);
  }

 private:
  static bool is_integer(double v) { return v == std::floor(v); }

  MeasureModel model_;
  QuadratureBudget budget_;
};

/// pi^N Gamma(K) \int sigma prod r^{n_a} against prod Gamma(n_a+1) * Gamma(K + sum n).
inline IdentityCheck moment_check(const MeasureModel& model, std::span<const double> n, QuadratureBudget budget = {}) {
  for (double v : n) {
    if (!(v >= 0.0)) throw DomainError("moment_check: exponents must be >= 0");
  }
  const QuadratureResult lhs = SimplexQuadrature(model, budget).monomial(n);
  double log_rhs = 0.0;
  double total = 0.0;
  for (double v : n) {
    log_rhs += specfun::log_gamma(v + 1.0);
    total += v;
  }
  log_rhs += specfun::log_gamma(model.k() + total);
  return make_check(lhs.value, std::exp(log_rhs), lhs.relative_error());
}

/// \int prod dr r^{s} 2 R^{(K-N)/2} K_{K-N}(2 sqrt R) = prod Gamma(s_a+1) Gamma(K + sum s).
inline IdentityCheck verify_formula_a(std::span<const double> s, double k, QuadratureBudget budget = {}) {
  if (s.empty()) throw PreconditionError("formula A: need at least one exponent");
  if (!(k > 0.0)) throw DomainError("formula A: K must be positive");
  double total = 0.0;
  double log_rhs = 0.0;
  for (double v : s) {
    if (!(v > -1.0)) throw DomainError("formula A: every s_a must exceed -1");
    total += v;
    log_rhs += specfun::log_gamma(v + 1.0);
  }
  if (!(k + total > 0.0)) throw DomainError("formula A: K + sum s must be positive");
  log_rhs += specfun::log_gamma(k + total);
  const QuadratureResult lhs = SimplexQuadrature(MeasureModel(s.size(), k), budget).monomial(s);
  return make_check(lhs.value, std::exp(log_rhs), lhs.relative_error());
}

/// \int_0^inf x^{mu-1} K_nu(a x) dx = 1/4 (2/a)^mu Gamma((mu+nu)/2) Gamma((mu-nu)/2), mu > |nu|, a > 0.
inline IdentityCheck verify_formula_b(double mu, double nu, double a, QuadratureBudget budget = {}) {
  if (!std::isfinite(mu) || !std::isfinite(nu) || !std::isfinite(a)) throw DomainError("formula B: parameters must be finite");
  if (!(a > 0.0)) throw DomainError("formula B: requires a > 0");
  if (!(mu > std::fabs(nu))) throw DomainError("formula B: requires mu > |nu|");
  auto integrand = [&](double x) {
    if (x <= 0.0) return 0.0;
    const double v = (mu - 1.0) * std::log(x) + specfun::log_bessel_k(nu, a * x);
    return v < -745.0 ? 0.0 : std::exp(v);
  };
  const QuadratureResult lhs = integrate_half_line(integrand, budget);
  const double log_rhs = std::log(0.25) + mu * std::log(2.0 / a) + specfun::log_gamma(0.5 * (mu + nu)) +
                         specfun::log_gamma(0.5 * (mu - nu));
  return make_check(lhs.value, std::exp(log_rhs), lhs.relative_error());
}

/// Exact sampler for d mu: x ~ Gamma(K, 1), r_a | x ~ Exponential(mean x), theta_a uniform.
/// The joint density is proportional to x^{K-N-1} exp(-x - R/x); integrating out x gives sigma.
class MeasureSampler {
 public:
  explicit MeasureSampler(MeasureModel model) : model_(model), mix_(model.k(), 1.0) {}

  RadialPoint operator()(Engine& engine) {
    RadialPoint p;
    p.r.resize(model_.n_modes());
    p.theta.resize(model_.n_modes());
    const double x = mix_(engine);
    for (std::size_t a = 0; a < model_.n_modes(); ++a) p.r[a] = x * unit_exp_(engine);
    for (std::size_t a = 0; a < model_.n_modes(); ++a) {
      double t = angle_(engine);
      if (t >= 2.0 * std::numbers::pi) t = 0.0;
      p.theta[a] = t;
    }
    return p;
  }

 private:
  MeasureModel model_;
  std::gamma_distribution<double> mix_;
  std::exponential_distribution<double> unit_exp_{1.0};
  std::uniform_real_distribution<double> angle_{0.0, 2.0 * std::numbers::pi};
};

struct MonteCarloOptions {
  std::size_t samples = 1'000'000;
  unsigned workers = 1;
  std::uint64_t seed = kDefaultSeed;
};

/// A Monte Carlo estimate compared with its exact value.
struct StatCheck {
  std::string name;
  double estimate = 0.0;
  double expected = 0.0;
  double standard_error = 0.0;

  double z_score() const {
    const double d = std::fabs(estimate - expected);
    if (standard_error > 0.0) return d / standard_error;
    return d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
};

/// Draws `samples` points and reduces per-sample vectors of statistics.
/// stats(point, out) must write out.size() values.
template <class Stats>
std::vector<RunningMoments> sample_statistics(const MeasureModel& model, const MonteCarloOptions& mc, std::size_t count,
                                              Stats stats) {
  const std::vector<RunningMoments> proto(count);
  auto parts = run_streams(mc.seed, mc.samples, mc.workers, proto,
                           [&](Engine& engine, std::vector<RunningMoments>& acc, std::size_t n) {
                             MeasureSampler sampler(model);
                             std::vector<double> out(count);
                             for (std::size_t i = 0; i < n; ++i) {
                               stats(sampler(engine), out);
                               for (std::size_t j = 0; j < count; ++j) acc[j].add(out[j]);
                             }
                           });
  std::vector<RunningMoments> total(count);
  for (const auto& part : parts) {
    for (std::size_t j = 0; j < count; ++j) total[j].merge(part[j]);
  }
  return total;
}

/// E[r_a] = K, E[r_a r_b] = K(K+1) for a != b, E[cos theta_a] = E[sin theta_a] = 0.
inline std::vector<StatCheck> sampler_moment_checks(const MeasureModel& model, const MonteCarloOptions& mc) {
  const std::size_t n = model.n_modes();
  const double k = model.k();
  std::vector<StatCheck> checks;
  for (std::size_t a = 0; a < n; ++a) checks.push_back({"E[r_" + std::to_string(a + 1) + "]", 0, k, 0});
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      checks.push_back({"E[r_" + std::to_string(a + 1) + " r_" + std::to_string(b + 1) + "]", 0, k * (k + 1.0), 0});
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    checks.push_back({"E[cos theta_" + std::to_string(a + 1) + "]", 0, 0.0, 0});
    checks.push_back({"E[sin theta_" + std::to_string(a + 1) + "]", 0, 0.0, 0});
  }
  const auto moments = sample_statistics(model, mc, checks.size(), [n](const RadialPoint& p, std::vector<double>& out) {
    std::size_t j = 0;
    for (std::size_t a = 0; a < n; ++a) out[j++] = p.r[a];
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) out[j++] = p.r[a] * p.r[b];
    }
    for (std::size_t a = 0; a < n; ++a) {
      out[j++] = std::cos(p.theta[a]);
      out[j++] = std::sin(p.theta[a]);
    }
  });
  for (std::size_t j = 0; j < checks.size(); ++j) {
    checks[j].estimate = moments[j].mean();
    checks[j].standard_error = moments[j].standard_error();
  }
  return checks;
}

/// Density of R = sum r_a under d mu: R^{N-1}/Gamma(N) * 2 R^{(K-N)/2} K_{K-N}(2 sqrt R) / Gamma(K).
inline double radial_density(const MeasureModel& model, double radius) {
  if (!(radius > 0.0)) return 0.0;
  const double n = static_cast<double>(model.n_modes());
  const double v = (n - 1.0) * std::log(radius) - specfun::log_gamma(n) - specfun::log_gamma(model.k()) +
                   model.log_radial_kernel(radius);
  return v < -745.0 ? 0.0 : std::exp(v);
}

/// P(R <= radius) by tanh-sinh on (0, radius).
inline double radial_cdf(const MeasureModel& model, double radius, QuadratureBudget budget = {}) {
  if (!(radius > 0.0)) return 0.0;
  return integrate_unit_interval([&](double t) { return radius * radial_density(model, radius * t); }, budget).value;
}

/// Inverse of radial_cdf by bracketing root search.
inline double radial_quantile(const MeasureModel& model, double p, QuadratureBudget budget = {}) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("radial_quantile: p must lie in (0,1)");
  auto f = [&](double radius) { return radial_cdf(model, radius, budget) - p; };
  double hi = model.k() * static_cast<double>(model.n_modes()) + 1.0;
  while (f(hi) < 0.0) hi *= 2.0;
  double lo = hi;
  while (f(lo) > 0.0) lo *= 0.5;
  std::uintmax_t iterations = 200;
  const auto bracket =
      boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(48), iterations);
  return 0.5 * (bracket.first + bracket.second);
}

/// Empirical P(R <= R_p) at the quantiles R_p of p = 0.05, 0.15, ..., 0.95.
inline std::vector<StatCheck> radial_quantile_checks(const MeasureModel& model, const MonteCarloOptions& mc) {
  std::vector<double> probs;
  std::vector<double> cuts;
  for (int i = 0; i < 10; ++i) {
    probs.push_back(0.05 + 0.1 * i);
    cuts.push_back(radial_quantile(model, probs.back()));
  }
  const auto moments = sample_statistics(model, mc, cuts.size(), [&](const RadialPoint& p, std::vector<double>& out) {
    const double radius = p.radius();
    for (std::size_t j = 0; j < cuts.size(); ++j) out[j] = radius <= cuts[j] ? 1.0 : 0.0;
  });
  std::vector<StatCheck> checks;
  for (std::size_t j = 0; j < cuts.size(); ++j) {
    const double p = probs[j];
    checks.push_back({"P(R <= q_" + std::to_string(p).substr(0, 4) + ")", moments[j].mean(), p,
                      std::sqrt(p * (1.0 - p) / static_cast<double>(moments[j].count()))});
  }
  return checks;
}

enum class EvaluationMode { quadrature, montecarlo };

struct ResolutionReport {
  double max_deviation = 0.0;  ///< max |G - I| over all entries
  double max_z_score = 0.0;    ///< Monte Carlo only
  std::size_t dimension = 0;
  std::size_t samples = 0;
};

/// Gram matrix G_mn = \int d mu <m|z><z|n> on the truncated basis against the identity.
/// Quadrature mode: the angular integral removes every m != n entry exactly, and the
/// diagonal is C_n^2 E_mu[prod r^n] with the moment from SimplexQuadrature.
/// Monte Carlo mode estimates every entry (real and imaginary parts) from the sampler.
inline ResolutionReport resolution_check(const MeasureModel& model, int cutoff, EvaluationMode mode,
                                         const MonteCarloOptions& mc = {}, QuadratureBudget budget = {}) {
  if (cutoff < 0) throw PreconditionError("resolution_check: cutoff must be >= 0");
  const TruncatedRepSpace space(model.n_modes(), model.k(), cutoff);
  const std::size_t dim = space.dimension();
  ResolutionReport report;
  report.dimension = dim;

  if (mode == EvaluationMode::quadrature) {
    const SimplexQuadrature quad(model, budget);
    const double gamma_k = specfun::log_gamma(model.k());
    for (std::size_t i = 0; i < dim; ++i) {
      const MultiIndex& n = space.state(i);
      std::vector<double> s(n.begin(), n.end());
      const double moment = quad.monomial(s).value;
      const double diag = coefficient_squared(n, model.k()) * moment * std::exp(-gamma_k);
      report.max_deviation = std::max(report.max_deviation, std::fabs(diag - 1.0));
    }
    return report;
  }

  std::vector<double> coeff(dim);
  for (std::size_t i = 0; i < dim; ++i) coeff[i] = coefficient(space.state(i), model.k());
  const auto moments =
      sample_statistics(model, mc, 2 * dim * dim, [&](const RadialPoint& p, std::vector<double>& out) {
        const Label z = p.label();
        const auto powers = detail::label_powers(z, cutoff);
        std::vector<Complex> amp(dim);
        for (std::size_t i = 0; i < dim; ++i) {
          Complex m = coeff[i];
          const MultiIndex& n = space.state(i);
          for (std::size_t a = 0; a < n.size(); ++a) m *= powers[a][n[a]];
          amp[i] = m;
        }
        for (std::size_t i = 0; i < dim; ++i) {
          for (std::size_t j = 0; j < dim; ++j) {
            const Complex g = amp[i] * std::conj(amp[j]);
            out[2 * (i * dim + j)] = g.real();
            out[2 * (i * dim + j) + 1] = g.imag();
          }
        }
      });
  report.samples = mc.samples;
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      for (int part = 0; part < 2; ++part) {
        const auto& m = moments[2 * (i * dim + j) + part];
        const double expected = (i == j && part == 0) ? 1.0 : 0.0;
        const StatCheck c{"", m.mean(), expected, m.standard_error()};
        report.max_deviation = std::max(report.max_deviation, std::fabs(c.estimate - expected));
        report.max_z_score = std::max(report.max_z_score, c.z_score());
      }
    }
  }
  return report;
}

}  // namespace bgcs

#endif  // BGCS_MEASURE_HPP
