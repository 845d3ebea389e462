#ifndef BGCS_COHERENT_HPP
#define BGCS_COHERENT_HPP

// Barut-Girardello type coherent states |z> of the constrained u(N,1) representation,
// normalized so that the vacuum amplitude is exactly 1 (states are not unit norm).

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bgcs/errors.hpp"
#include "bgcs/fock.hpp"
#include "bgcs/specfun.hpp"

namespace bgcs {

/// Coherent-state label z in C^N.
class Label {
 public:
  Label() = default;
  explicit Label(std::vector<Complex> z) : z_(std::move(z)) {
    for (const auto& v : z_) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw DomainError("Label: entries must be finite");
      }
    }
  }
  Label(std::initializer_list<Complex> z) : Label(std::vector<Complex>(z)) {}

  std::size_t size() const noexcept { return z_.size(); }
  const Complex& operator[](std::size_t i) const { return z_[i]; }
  std::span<const Complex> values() const noexcept { return z_; }

  double norm_squared() const noexcept {
    double s = 0.0;
    for (const auto& v : z_) s += std::norm(v);
    return s;
  }

 private:
  std::vector<Complex> z_;
};

/// Componentwise conj(z_a) * zp_a, the argument of every overlap series.
inline std::vector<Complex> overlap_arguments(const Label& z, const Label& zp) {
  if (z.size() != zp.size()) throw PreconditionError("overlap_arguments: label sizes differ");
  std::vector<Complex> w(z.size());
  for (std::size_t a = 0; a < z.size(); ++a) w[a] = std::conj(z[a]) * zp[a];
  return w;
}

/// C_n^2 = Gamma(K) / (n_1! ... n_N! Gamma(K+|n|)).
inline double coefficient_squared(const MultiIndex& n, double k) {
  if (!(k > 0.0)) throw DomainError("coefficient: K must be positive");
  double log_value = specfun::log_gamma(k) - specfun::log_gamma(k + n.degree());
  for (int v : n) log_value -= specfun::log_gamma(v + 1.0);
  return std::exp(log_value);
}

inline double coefficient(const MultiIndex& n, double k) { return std::sqrt(coefficient_squared(n, k)); }

/// Amplitudes of |z> over a truncated basis.
struct CoherentVector {
  TruncatedRepSpace space;
  std::vector<Complex> amplitudes;

  /// <this|other> restricted to the truncated basis.
  Complex dot(const CoherentVector& other) const {
    if (other.amplitudes.size() != amplitudes.size()) throw PreconditionError("CoherentVector::dot: size mismatch");
    Complex s{};
    for (std::size_t i = 0; i < amplitudes.size(); ++i) s += std::conj(amplitudes[i]) * other.amplitudes[i];
    return s;
  }
};

namespace detail {

inline void require_label_size(const Label& z, const TruncatedRepSpace& space) {
  if (z.size() != space.n_modes()) throw PreconditionError("label length must equal N");
}

// powers[a][k] = z_a^k for k <= cutoff
inline std::vector<std::vector<Complex>> label_powers(const Label& z, int cutoff) {
  std::vector<std::vector<Complex>> powers(z.size(), std::vector<Complex>(cutoff + 1));
  for (std::size_t a = 0; a < z.size(); ++a) {
    powers[a][0] = 1.0;
    for (int k = 1; k <= cutoff; ++k) powers[a][k] = powers[a][k - 1] * z[a];
  }
  return powers;
}

}  // namespace detail

/// Closed form: amplitude of |n> is C_n z_1^{n_1} ... z_N^{n_N}.
inline CoherentVector state_vector(const Label& z, const TruncatedRepSpace& space) {
  detail::require_label_size(z, space);
  const auto powers = detail::label_powers(z, space.cutoff());
  std::vector<Complex> amp(space.dimension());
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    const MultiIndex& n = space.state(i);
    Complex monomial = 1.0;
    for (std::size_t a = 0; a < n.size(); ++a) monomial *= powers[a][n[a]];
    amp[i] = coefficient(n, space.k()) * monomial;
  }
  return {space, std::move(amp)};
}

/// Same amplitudes built only from the one-step relation
///   C_{n+e_a} sqrt(n_a+1) sqrt(K+|n|) = C_n,
/// walking each state back to a predecessor by lowering its last occupied mode.
inline CoherentVector state_vector_by_recursion(const Label& z, const TruncatedRepSpace& space) {
  detail::require_label_size(z, space);
  std::vector<Complex> amp(space.dimension());
  amp[0] = 1.0;
  for (std::size_t i = 1; i < space.dimension(); ++i) {
    const MultiIndex& n = space.state(i);
    std::size_t mode = n.size() - 1;
    while (n[mode] == 0) --mode;
    const MultiIndex prev = n.lowered(mode);
    const double step = std::sqrt(static_cast<double>(prev[mode]) + 1.0) * std::sqrt(space.k() + prev.degree());
    amp[i] = amp[*space.index_of(prev)] * z[mode] / step;
  }
  return {space, std::move(amp)};
}

struct EigenResidual {
  double residual;       ///< ||(E_{N+1,a} - z_a)|z>|| over states of degree <= cutoff-1
  double interior_norm;  ///< ||z>|| over the same states

  double relative() const { return interior_norm > 0.0 ? residual / interior_norm : residual; }
};

/// Checks E_{N+1,alpha}|z> = z_alpha |z> (alpha is 1-based, 1..N) away from the cutoff.
inline EigenResidual eigen_residual(const Label& z, const TruncatedRepSpace& space, std::size_t alpha) {
  if (space.cutoff() < 1) throw PreconditionError("eigen_residual: cutoff must be at least 1");
  if (alpha < 1 || alpha > space.n_modes()) throw PreconditionError("eigen_residual: alpha must lie in 1..N");
  const CoherentVector v = state_vector(z, space);
  const auto lowered = generator_matrix(space, space.n_modes() + 1, alpha).apply(v.amplitudes);
  double res2 = 0.0;
  double norm2 = 0.0;
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    if (space.state(i).degree() > space.cutoff() - 1) continue;
    res2 += std::norm(lowered[i] - z[alpha - 1] * v.amplitudes[i]);
    norm2 += std::norm(v.amplitudes[i]);
  }
  return {std::sqrt(res2), std::sqrt(norm2)};
}

struct SeriesOptions {
  double tolerance = 1e-14;
  int max_shells = 500;
};

/// F_N(K; w) = sum_n Gamma(K)/(n_1!...n_N! Gamma(K+|n|)) w_1^{n_1}...w_N^{n_N},
/// summed shell by shell in total degree. Shell sums come from the Cauchy product of
/// the per-mode sequences w_a^k/k!, so every multi-index term is included once.
///
/// Stops when the remaining tail, bounded through |w_a|, falls below
/// tolerance times the sum of shell bounds; this also covers cancelling shells.
inline Complex f_series(double k, std::span<const Complex> w, SeriesOptions opts = {}) {
  if (!(k > 0.0)) throw DomainError("f_series: K must be positive");
  if (!(opts.tolerance > 0.0)) throw DomainError("f_series: tolerance must be positive");
  const std::size_t modes = w.size();
  if (modes == 0) throw PreconditionError("f_series: need at least one variable");

  double abs_sum = 0.0;
  for (const auto& v : w) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw DomainError("f_series: arguments must be finite");
    abs_sum += std::abs(v);
  }

  // per_mode[a][j] = w_a^j / j!;  tail[a][d] = shell-d sum over modes a..N-1
  std::vector<std::vector<Complex>> per_mode(modes);
  std::vector<std::vector<Complex>> tail(modes);

  Complex total{};
  double bound_total = 0.0;
  double shell_bound = 1.0;  // Gamma(K)/Gamma(K+d) * abs_sum^d / d!
  double gamma_ratio = 1.0;  // Gamma(K)/Gamma(K+d)
  for (int d = 0; d <= opts.max_shells; ++d) {
    for (std::size_t a = 0; a < modes; ++a) {
      per_mode[a].push_back(d == 0 ? Complex(1.0) : per_mode[a][d - 1] * w[a] / static_cast<double>(d));
    }
    for (std::size_t a = modes; a-- > 0;) {
      if (a + 1 == modes) {
        tail[a].push_back(per_mode[a][d]);
        continue;
      }
      Complex s{};
      for (int j = 0; j <= d; ++j) s += per_mode[a][j] * tail[a + 1][d - j];
      tail[a].push_back(s);
    }
    total += gamma_ratio * tail[0][d];
    bound_total += shell_bound;
    if (!std::isfinite(total.real()) || !std::isfinite(total.imag()) || !std::isfinite(bound_total)) {
      throw OverflowError("f_series: partial sum exceeds double range");
    }

    const double ratio = abs_sum / ((d + 1.0) * (k + d));
    const double next_bound = shell_bound * ratio;
    const double next_ratio = abs_sum / ((d + 2.0) * (k + d + 1.0));
    if (next_ratio < 0.5 && 2.0 * next_bound <= opts.tolerance * bound_total) return total;

    shell_bound = next_bound;
    gamma_ratio /= k + d;
  }
  throw ConvergenceError("f_series: exceeded the degree-shell cap", std::abs(total), shell_bound);
}

/// Single-variable series sum_d s^d / (d! (K)_d). By the multinomial theorem
/// F_N(K; w) equals this at s = w_1 + ... + w_N, which hot loops use instead of the
/// full multi-index sum.
inline Complex confluent_f1(double k, Complex s, double tolerance = 1e-15) {
  if (!(k > 0.0)) throw DomainError("confluent_f1: K must be positive");
  const double a = std::abs(s);
  Complex term = 1.0;
  Complex total = 1.0;
  double bound = 1.0;
  double bound_total = 1.0;
  for (int d = 0; d < 100000; ++d) {
    const double scale = 1.0 / ((d + 1.0) * (k + d));
    term *= s * scale;
    bound *= a * scale;
    total += term;
    bound_total += bound;
    if (!std::isfinite(bound_total)) throw OverflowError("confluent_f1: series exceeds double range");
    if (a / ((d + 2.0) * (k + d + 1.0)) < 0.5 && 2.0 * bound <= tolerance * bound_total) return total;
  }
  throw ConvergenceError("confluent_f1: series did not converge", std::abs(total), bound);
}

/// log of the same series for real s >= 0, rescaled on the fly so large arguments
/// do not overflow.
inline double log_confluent_f1(double k, double s, double tolerance = 1e-15) {
  if (!(k > 0.0)) throw DomainError("log_confluent_f1: K must be positive");
  if (!(s >= 0.0) || !std::isfinite(s)) throw DomainError("log_confluent_f1: argument must be finite and >= 0");

  // Large s: the series equals Gamma(K) s^{(1-K)/2} I_{K-1}(2 sqrt s), and I_nu(x) has the
  // expansion e^x / sqrt(2 pi x) * sum_j (-1)^j a_j / x^j with a_j = prod_{i<=j} (4nu^2-(2i-1)^2) / (j! 8^j).
  const double nu = k - 1.0;
  const double x = 2.0 * std::sqrt(s);
  if (x > std::max(100.0, 4.0 * nu * nu)) {
    double term = 1.0;
    double sum = 1.0;
    for (int j = 1; j < 60; ++j) {
      const double odd = 2.0 * j - 1.0;
      term *= -(4.0 * nu * nu - odd * odd) / (8.0 * j * x);
      sum += term;
      if (std::fabs(term) <= 1e-17 * std::fabs(sum)) break;
    }
    return specfun::log_gamma(k) + 0.5 * (1.0 - k) * std::log(s) + x - 0.5 * std::log(2.0 * std::numbers::pi * x) +
           std::log(sum);
  }
  constexpr double kRescale = 1e-200;
  const double log_rescale = std::log(kRescale);
  double term = 1.0;
  double total = 1.0;
  double log_offset = 0.0;
  for (int d = 0; d < 1000000; ++d) {
    term *= s / ((d + 1.0) * (k + d));
    total += term;
    if (total > 1e200) {
      total *= kRescale;
      term *= kRescale;
      log_offset -= log_rescale;
    }
    if (s / ((d + 2.0) * (k + d + 1.0)) < 0.5 && 2.0 * term <= tolerance * total) {
      return log_offset + std::log(total);
    }
  }
  throw ConvergenceError("log_confluent_f1: series did not converge", total, term);
}

/// <z|z'> = F_N(K; conj(z_a) z'_a).
inline Complex inner_product(const Label& z, const Label& zp, double k, SeriesOptions opts = {}) {
  const auto w = overlap_arguments(z, zp);
  return f_series(k, w, opts);
}

}  // namespace bgcs

#endif  // BGCS_COHERENT_HPP
