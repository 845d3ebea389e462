#ifndef BGCS_PATHINT_HPP
#define BGCS_PATHINT_HPP

// Diagonal Hamiltonian H = sum_a mu_a E_aa + K c_{N+1}, its coherent-state matrix
// elements, exact traces, and the time-sliced trace built from coherent-state weights.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bgcs/coherent.hpp"
#include "bgcs/errors.hpp"
#include "bgcs/fock.hpp"
#include "bgcs/measure.hpp"
#include "bgcs/random.hpp"
#include "bgcs/series.hpp"
#include "bgcs/specfun.hpp"

namespace bgcs {

/// Mode coefficients c_1..c_{N+1}; mu_a = c_a + c_{N+1}.
class HamiltonianParams {
 public:
  explicit HamiltonianParams(std::vector<double> c) : c_(std::move(c)) {
    if (c_.size() < 2) throw PreconditionError("HamiltonianParams: need N+1 >= 2 coefficients");
    for (double v : c_) {
      if (!std::isfinite(v)) throw DomainError("HamiltonianParams: coefficients must be finite");
    }
  }

  /// c_a = mu_a - c_last, c_{N+1} = c_last.
  static HamiltonianParams from_mu(std::span<const double> mu, double c_last = 0.0) {
    std::vector<double> c;
    for (double m : mu) c.push_back(m - c_last);
    c.push_back(c_last);
    return HamiltonianParams(std::move(c));
  }

  std::size_t n_modes() const noexcept { return c_.size() - 1; }
  const std::vector<double>& c() const noexcept { return c_; }
  double c_last() const noexcept { return c_.back(); }
  double mu(std::size_t a) const { return c_[a] + c_.back(); }
  std::vector<double> mu() const {
    std::vector<double> m;
    for (std::size_t a = 0; a < n_modes(); ++a) m.push_back(mu(a));
    return m;
  }
  double min_mu() const {
    const auto m = mu();
    return *std::min_element(m.begin(), m.end());
  }

  /// E_n = K c_{N+1} + sum mu_a n_a.
  double energy(const MultiIndex& n, double k) const {
    double e = k * c_last();
    for (std::size_t a = 0; a < n.size(); ++a) e += mu(a) * n[a];
    return e;
  }

 private:
  std::vector<double> c_;
};

namespace detail {

inline void require_modes(const HamiltonianParams& hp, std::size_t n) {
  if (hp.n_modes() != n) throw PreconditionError("Hamiltonian has a different number of modes");
}

inline void require_confining(const HamiltonianParams& hp, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be positive and finite");
  if (!(hp.min_mu() > 0.0)) throw DomainError("every mu_a = c_a + c_{N+1} must be positive");
}

}  // namespace detail

/// sum_{alpha=1}^{N+1} c_alpha E_{alpha alpha} on the truncated space.
inline SparseOperator hamiltonian_operator(const TruncatedRepSpace& space, const HamiltonianParams& hp) {
  detail::require_modes(hp, space.n_modes());
  SparseOperator h(space.dimension());
  for (std::size_t alpha = 1; alpha <= space.n_modes() + 1; ++alpha) {
    h = h + Complex(hp.c()[alpha - 1]) * generator_matrix(space, alpha, alpha);
  }
  return h;
}

/// <z|H|z'> = K c_{N+1} F_N(K; w) + sum_a mu_a w_a F_N(K+1; w) / K,  w_a = conj(z_a) z'_a.
inline Complex h_matrix_element(const Label& z, const Label& zp, const HamiltonianParams& hp, double k,
                                SeriesOptions opts = {}) {
  detail::require_modes(hp, z.size());
  const auto w = overlap_arguments(z, zp);
  Complex weighted{};
  for (std::size_t a = 0; a < w.size(); ++a) weighted += hp.mu(a) * w[a];
  return k * hp.c_last() * f_series(k, w, opts) + weighted * f_series(k + 1.0, w, opts) / k;
}

/// <z|H|z'> / <z|z'> as a function of w, through the collapsed one-variable series.
inline Complex slice_exponent(std::span<const Complex> w, const HamiltonianParams& hp, double k) {
  detail::require_modes(hp, w.size());
  Complex s{};
  Complex weighted{};
  for (std::size_t a = 0; a < w.size(); ++a) {
    s += w[a];
    weighted += hp.mu(a) * w[a];
  }
  return k * hp.c_last() + weighted * confluent_f1(k + 1.0, s) / (k * confluent_f1(k, s));
}

namespace detail {

// I_nu(x) for complex x by the power series; (x/2)^nu on the principal branch.
inline Complex bessel_i_complex(double nu, Complex x) {
  const Complex half = 0.5 * x;
  const Complex q = half * half;
  Complex term = std::exp(nu * std::log(half) - specfun::log_gamma(nu + 1.0));
  Complex sum = term;
  double bound = std::abs(term);
  double bound_sum = bound;
  const double aq = std::abs(q);
  for (int n = 0; n < 10000; ++n) {
    const double scale = 1.0 / ((n + 1.0) * (nu + n + 1.0));
    term *= q * scale;
    bound *= aq * scale;
    sum += term;
    bound_sum += bound;
    if (aq * scale < 0.5 && bound <= 1e-17 * bound_sum) return sum;
  }
  throw ConvergenceError("bessel_i_complex: series did not converge", std::abs(sum), bound);
}

}  // namespace detail

/// N = 1 only: K c_2 + h sqrt(w) I_K(2 sqrt w) / I_{K-1}(2 sqrt w), h = c_1 + c_2.
inline Complex bessel_ratio_exponent(Complex w, const HamiltonianParams& hp, double k) {
  detail::require_modes(hp, 1);
  if (!(k > 0.0)) throw DomainError("bessel_ratio_exponent: K must be positive");
  if (w == Complex{}) return k * hp.c_last();
  const Complex root = std::sqrt(w);
  const Complex x = 2.0 * root;
  const Complex denom = detail::bessel_i_complex(k - 1.0, x);
  if (denom == Complex{}) throw SingularityError("bessel_ratio_exponent: I_{K-1} vanishes");
  return k * hp.c_last() + hp.mu(0) * root * detail::bessel_i_complex(k, x) / denom;
}

/// sum_{|n| <= cutoff} exp(-beta E_n); without a cutoff, the closed form
/// exp(-beta K c_{N+1}) prod_a (1 - exp(-beta mu_a))^{-1}.
inline double exact_spectral_trace(const HamiltonianParams& hp, double k, double beta,
                                   std::optional<int> cutoff = std::nullopt) {
  detail::require_confining(hp, beta);
  if (!(k > 0.0)) throw DomainError("exact_spectral_trace: K must be positive");
  if (!cutoff) {
    double log_z = -beta * k * hp.c_last();
    for (double m : hp.mu()) log_z -= std::log1p(-std::exp(-beta * m));
    return specfun::detail::checked_exp(log_z, "exact_spectral_trace");
  }
  double z = 0.0;
  for (const auto& n : enumerate_basis(hp.n_modes(), *cutoff)) z += std::exp(-beta * hp.energy(n, k));
  return z;
}

/// <z|exp(-beta H)|z> = exp(-beta K c_{N+1}) F_N(K; |z_a|^2 exp(-beta mu_a)).
/// Each series term C_n^2 |z^n|^2 picks up exp(-beta E_n).
inline double closed_kernel(const Label& z, const HamiltonianParams& hp, double k, double beta) {
  detail::require_modes(hp, z.size());
  std::vector<Complex> w(z.size());
  for (std::size_t a = 0; a < z.size(); ++a) w[a] = std::norm(z[a]) * std::exp(-beta * hp.mu(a));
  return std::exp(-beta * k * hp.c_last()) * f_series(k, w).real();
}

struct TraceEstimate {
  Complex value{};
  double error = 0.0;  ///< quadrature error estimate or Monte Carlo standard error
  std::size_t samples = 0;
  bool variance_finite = true;
  double max_sample_share = 0.0;  ///< largest |sample| over the sum of |samples| (Monte Carlo)
};

/// Z = \int d mu <z|exp(-beta H)|z>. The Monte Carlo variance of this estimator is finite
/// only when every exp(-beta mu_a) < 1/4; otherwise the standard error is not trustworthy
/// and variance_finite is false.
inline TraceEstimate exact_kernel_trace(const HamiltonianParams& hp, double k, double beta, EvaluationMode mode,
                                        const MonteCarloOptions& mc = {}, QuadratureBudget budget = {}) {
  detail::require_confining(hp, beta);
  const MeasureModel model(hp.n_modes(), k);
  std::vector<double> q;
  for (double m : hp.mu()) q.push_back(std::exp(-beta * m));
  const double log_ground = -beta * k * hp.c_last();
  auto log_kernel = [&](std::span<const double> r) {
    double s = 0.0;
    for (std::size_t a = 0; a < r.size(); ++a) s += r[a] * q[a];
    return log_ground + log_confluent_f1(k, s);
  };

  TraceEstimate out;
  out.variance_finite = *std::max_element(q.begin(), q.end()) < 0.25;
  if (mode == EvaluationMode::quadrature) {
    const QuadratureResult res = SimplexQuadrature(model, budget).expectation_log(log_kernel);
    out.value = res.value;
    out.error = res.error;
    return out;
  }
  struct Acc {
    RunningMoments moments;
    double abs_sum = 0.0;
    double abs_max = 0.0;
  };
  const auto parts = run_streams(mc.seed, mc.samples, mc.workers, Acc{}, [&](Engine& engine, Acc& acc, std::size_t n) {
    MeasureSampler sampler(model);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = std::exp(log_kernel(sampler(engine).r));
      acc.moments.add(v);
      acc.abs_sum += v;
      acc.abs_max = std::max(acc.abs_max, v);
    }
  });
  Acc total;
  for (const auto& p : parts) {
    total.moments.merge(p.moments);
    total.abs_sum += p.abs_sum;
    total.abs_max = std::max(total.abs_max, p.abs_max);
  }
  out.value = total.moments.mean();
  out.error = total.moments.standard_error();
  out.samples = total.moments.count();
  out.max_sample_share = total.abs_sum > 0.0 ? total.abs_max / total.abs_sum : 0.0;
  return out;
}

enum class TimeMode { imaginary, real };
enum class SliceWeights { linear, exponential };
enum class SliceBackend { matrix, montecarlo };

/// horizon is beta (imaginary time) or T (real time); each slice has length horizon / slices.
struct TraceConfig {
  TimeMode mode = TimeMode::imaginary;
  double horizon = 1.0;
  int slices = 1;
  std::optional<int> cutoff;
  SliceWeights weights = SliceWeights::linear;
  SliceBackend backend = SliceBackend::matrix;
  MonteCarloOptions mc{};

  double step() const { return horizon / slices; }
  /// Delta (imaginary time) or i Delta (real time): the factor multiplying H in a slice.
  Complex step_factor() const { return mode == TimeMode::imaginary ? Complex(step()) : Complex(0.0, step()); }
};

namespace detail {

inline void validate(const TraceConfig& config) {
  if (config.slices < 1) throw ConfigurationError("sliced trace: M must be at least 1");
  if (!(config.horizon > 0.0) || !std::isfinite(config.horizon)) {
    throw ConfigurationError("sliced trace: horizon must be positive and finite");
  }
  if (!config.cutoff) {
    throw ConfigurationError(
        "sliced trace: a Fock cutoff is required; the untruncated sliced product with these weights diverges");
  }
  if (*config.cutoff < 0) throw ConfigurationError("sliced trace: cutoff must be >= 0");
}

}  // namespace detail

/// Diagonal entries lambda_n of the one-slice operator T with <z|T|z'> equal to the slice weight.
///
/// Linear weights: T = 1 - Delta' H, read off the truncated Hamiltonian matrix.
/// Exponential weights: the weight <z|z'> exp(-Delta' <z|H|z'>/<z|z'>) depends on z, z' only through
/// w_a = conj(z_a) z'_a, so T is diagonal with lambda_n = d_n / C_n^2, where d_n are the Taylor
/// coefficients of the weight in w. The weight has essential singularities where F_N(K; w)
/// vanishes, so the high-degree lambda_n eventually grow without bound; any lambda_n larger in
/// modulus than the exact slice factor allows is rejected.
inline std::vector<Complex> slice_eigenvalues(const TruncatedRepSpace& space, const HamiltonianParams& hp,
                                              const TraceConfig& config) {
  detail::require_modes(hp, space.n_modes());
  const Complex dt = config.step_factor();
  const double k = space.k();
  const std::size_t dim = space.dimension();

  const SparseOperator h = hamiltonian_operator(space, hp);
  if (!h.is_diagonal()) throw ConfigurationError("slice_eigenvalues: Hamiltonian matrix is not diagonal");
  const auto energies = h.diagonal();
  double e_max = 0.0;
  double e_min = std::numeric_limits<double>::infinity();
  for (const auto& e : energies) {
    e_max = std::max(e_max, std::fabs(e.real()));
    e_min = std::min(e_min, e.real());
  }

  std::vector<Complex> lambda(dim);
  if (config.weights == SliceWeights::linear) {
    if (config.mode == TimeMode::imaginary && config.step() * e_max >= 1.0) {
      throw ConfigurationError("sliced trace: Delta * max|E| = " + std::to_string(config.step() * e_max) +
                               " >= 1 on the truncation; increase M or lower the cutoff");
    }
    for (std::size_t i = 0; i < dim; ++i) lambda[i] = 1.0 - dt * energies[i];
    return lambda;
  }

  using Wide = std::complex<long double>;
  auto table = std::make_shared<const ConvolutionTable>(space.basis());
  std::vector<Wide> f_k(dim);
  std::vector<Wide> f_k1(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    f_k[i] = static_cast<long double>(coefficient_squared(space.state(i), k));
    f_k1[i] = static_cast<long double>(coefficient_squared(space.state(i), k + 1.0));
  }
  const TruncatedSeries<Wide> fk(table, f_k);
  const TruncatedSeries<Wide> fk1(table, f_k1);
  TruncatedSeries<Wide> numerator = TruncatedSeries<Wide>::constant(table, Wide{});
  for (std::size_t a = 0; a < space.n_modes(); ++a) {
    numerator = numerator + Wide(static_cast<long double>(hp.mu(a) / k)) * fk1.shifted(a);
  }
  const Wide wdt(dt.real(), dt.imag());
  const TruncatedSeries<Wide> exponent =
      Wide(static_cast<long double>(-k * hp.c_last())) * wdt * TruncatedSeries<Wide>::constant(table, 1.0L) +
      (-wdt) * (numerator / fk);
  const TruncatedSeries<Wide> weight = fk * exponent.exp();

  const double bound = config.mode == TimeMode::imaginary ? std::exp(-config.step() * e_min) * (1.0 + 1e-12)
                                                          : 1.0 + config.step() * e_max;
  for (std::size_t i = 0; i < dim; ++i) {
    const Wide l = weight[i] / f_k[i];
    lambda[i] = Complex(static_cast<double>(l.real()), static_cast<double>(l.imag()));
    if (!(std::abs(lambda[i]) <= bound)) {
      throw ConfigurationError("sliced trace: exponential-weight slice eigenvalue " + std::to_string(std::abs(lambda[i])) +
                               " at degree " + std::to_string(space.state(i).degree()) +
                               " exceeds the stable bound; lower the cutoff or increase M");
    }
  }
  return lambda;
}

/// Time-sliced trace.
/// Matrix backend: Tr T^M on the truncation, by repeated sparse products.
/// Monte Carlo backend: z_1..z_M drawn independently from d mu, averaging
/// prod_j <z_j|T|z_{j-1}> with z_0 = z_M; its expectation is exactly Tr T^M.
inline TraceEstimate sliced_trace(const HamiltonianParams& hp, double k, const TraceConfig& config) {
  detail::validate(config);
  if (config.mode == TimeMode::imaginary && !(hp.min_mu() > 0.0)) {
    throw DomainError("sliced trace: every mu_a must be positive in imaginary time");
  }
  const TruncatedRepSpace space(hp.n_modes(), k, *config.cutoff);
  const auto lambda = slice_eigenvalues(space, hp, config);
  const std::size_t dim = space.dimension();

  TraceEstimate out;
  if (config.backend == SliceBackend::matrix) {
    std::vector<SparseOperator::Entry> entries;
    for (std::size_t i = 0; i < dim; ++i) entries.push_back({i, i, lambda[i]});
    SparseOperator base(dim, std::move(entries));
    SparseOperator power = SparseOperator::identity(dim);
    for (int m = config.slices; m > 0; m >>= 1) {
      if (m & 1) power = power * base;
      if (m > 1) base = base * base;
    }
    for (std::size_t i = 0; i < dim; ++i) out.value += power.at(i, i);
    return out;
  }

  std::vector<Complex> poly(dim);
  for (std::size_t i = 0; i < dim; ++i) poly[i] = lambda[i] * coefficient_squared(space.state(i), k);
  const MeasureModel model(hp.n_modes(), k);
  const int cutoff = *config.cutoff;
  const int slices = config.slices;
  auto slice_weight = [&](const Label& left, const Label& right) {
    const auto w = overlap_arguments(left, right);
    std::vector<std::vector<Complex>> powers(w.size(), std::vector<Complex>(cutoff + 1));
    for (std::size_t a = 0; a < w.size(); ++a) {
      powers[a][0] = 1.0;
      for (int p = 1; p <= cutoff; ++p) powers[a][p] = powers[a][p - 1] * w[a];
    }
    Complex total{};
    for (std::size_t i = 0; i < dim; ++i) {
      Complex m = poly[i];
      const MultiIndex& n = space.state(i);
      for (std::size_t a = 0; a < n.size(); ++a) m *= powers[a][n[a]];
      total += m;
    }
    return total;
  };

  struct Acc {
    RunningMoments re;
    RunningMoments im;
    double abs_sum = 0.0;
    double abs_max = 0.0;
  };
  const auto parts =
      run_streams(config.mc.seed, config.mc.samples, config.mc.workers, Acc{}, [&](Engine& engine, Acc& acc, std::size_t n) {
        MeasureSampler sampler(model);
        std::vector<Label> labels(slices);
        for (std::size_t s = 0; s < n; ++s) {
          for (auto& z : labels) z = sampler(engine).label();
          Complex product = 1.0;
          for (int j = 0; j < slices; ++j) product *= slice_weight(labels[j], labels[(j + slices - 1) % slices]);
          acc.re.add(product.real());
          acc.im.add(product.imag());
          acc.abs_sum += std::abs(product);
          acc.abs_max = std::max(acc.abs_max, std::abs(product));
        }
      });
  Acc total;
  for (const auto& p : parts) {
    total.re.merge(p.re);
    total.im.merge(p.im);
    total.abs_sum += p.abs_sum;
    total.abs_max = std::max(total.abs_max, p.abs_max);
  }
  out.value = Complex(total.re.mean(), total.im.mean());
  out.error = std::hypot(total.re.standard_error(), total.im.standard_error());
  out.samples = total.re.count();
  out.max_sample_share = total.abs_sum > 0.0 ? total.abs_max / total.abs_sum : 0.0;
  return out;
}

}  // namespace bgcs

#endif  // BGCS_PATHINT_HPP
