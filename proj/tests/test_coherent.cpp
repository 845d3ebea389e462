#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "bgcs/coherent.hpp"
#include "bgcs/random.hpp"
#include "oracles.hpp"

using namespace bgcs;
using oracle::rel;

namespace {

Label random_label(std::size_t n, Engine& engine, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<Complex> z;
  for (std::size_t a = 0; a < n; ++a) z.emplace_back(g(engine), g(engine));
  return Label(z);
}

}  // namespace

TEST_CASE("single-variable F equals the Bessel form", "[coherent]") {
  for (double two_k : {1.0, 2.0, 5.0}) {
    const double k = 0.5 * two_k;
    for (double x : {0.1, 1.0, 10.0}) {
      const double bessel = std::tgamma(k) * std::pow(x, 0.5 * (1.0 - k)) * oracle::bessel_i_boost(k - 1.0, 2.0 * std::sqrt(x));
      const std::vector<Complex> w{x};
      INFO("K=" << k << " x=" << x);
      CHECK(rel(f_series(k, w).real(), bessel) <= 1e-10);
      CHECK(rel(confluent_f1(k, x).real(), bessel) <= 1e-10);
      CHECK(std::fabs(log_confluent_f1(k, x) - std::log(bessel)) <= 1e-12);
    }
  }
}

TEST_CASE("F_N against the 50-digit double sum and mpmath", "[coherent]") {
  const std::vector<Complex> w{1.0, 2.0};
  const double big = oracle::f2_double_sum_big(3.0, 1.0, 2.0);
  CHECK(rel(big, oracle::mpmath::f2_k3_w12) < 1e-15);
  CHECK(rel(f_series(3.0, w).real(), big) < 1e-14);
  CHECK(rel(confluent_f1(2.5, Complex(1.5, -0.7)), oracle::mpmath::f1_k2_5_at_1_5m0_7i) < 1e-14);
  CHECK(rel(f_series(0.5, std::vector<Complex>{-1.5, -2.5}).real(), oracle::mpmath::f1_k0_5_at_m4) < 1e-12);
}

TEST_CASE("F_N collapses to one variable", "[coherent][property]") {
  Engine engine = make_stream(11, 0);
  std::uniform_real_distribution<double> kdist(0.2, 6.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 4;
    const double k = kdist(engine);
    const Label z = random_label(n, engine, 1.2);
    const auto w = z.values();
    Complex s{};
    for (const auto& v : w) s += v;
    INFO("trial " << trial);
    CHECK(std::abs(f_series(k, w) - confluent_f1(k, s)) <= 1e-12 * std::max(1.0, std::abs(confluent_f1(k, s))));
  }
}

TEST_CASE("log_confluent_f1 is continuous across the large-argument switch", "[coherent]") {
  for (double k : {0.5, 1.0, 3.0}) {
    const double nu = k - 1.0;
    const double switch_s = std::pow(0.5 * std::max(100.0, 4.0 * nu * nu), 2);
    for (double f : {0.98, 1.02}) {
      const double s = switch_s * f;
      const double expected = std::lgamma(k) + 0.5 * (1.0 - k) * std::log(s) +
                              std::log(oracle::bessel_i_boost(nu, 2.0 * std::sqrt(s)));
      CHECK(rel(log_confluent_f1(k, s), expected) < 1e-14);
    }
  }
  CHECK(std::isfinite(log_confluent_f1(1.0, 1e300)));
  CHECK(log_confluent_f1(2.0, 0.0) == 0.0);
  CHECK_THROWS_AS(log_confluent_f1(2.0, -1.0), DomainError);
}

TEST_CASE("coefficients obey the one-step recursion", "[coherent][property]") {
  Engine engine = make_stream(12, 0);
  for (std::size_t n = 1; n <= 3; ++n) {
    for (double k : {0.3, 1.0, 4.5}) {
      const TruncatedRepSpace space(n, k, 8);
      const Label z = random_label(n, engine);
      const auto closed = state_vector(z, space);
      const auto walked = state_vector_by_recursion(z, space);
      for (std::size_t i = 0; i < space.dimension(); ++i) {
        CHECK(std::abs(closed.amplitudes[i] - walked.amplitudes[i]) <= 1e-14 * std::max(1.0, std::abs(closed.amplitudes[i])));
      }
    }
  }
  CHECK(coefficient_squared(MultiIndex({0, 0}), 2.0) == 1.0);
  CHECK(coefficient_squared(MultiIndex({2, 1}), 2.0) == Catch::Approx(1.0 / (2.0 * 24.0)).epsilon(1e-15));
}

TEST_CASE("coherent states are eigenvectors of the lowering generators", "[coherent][property]") {
  for (std::size_t n = 1; n <= 3; ++n) {
    for (double k : {0.5, 1.0, 2.5}) {
      Engine engine = make_stream(2024, n * 10 + static_cast<std::size_t>(k * 2));
      const TruncatedRepSpace space(n, k, 6);
      double worst = 0.0;
      for (int trial = 0; trial < 100; ++trial) {
        const Label z = random_label(n, engine);
        for (std::size_t a = 1; a <= n; ++a) worst = std::max(worst, eigen_residual(z, space, a).relative());
      }
      INFO("N=" << n << " K=" << k);
      CHECK(worst <= 1e-12);
    }
  }
  const TruncatedRepSpace space(2, 1.0, 3);
  CHECK_THROWS_AS(eigen_residual(Label{0.1, 0.2}, space, 3), PreconditionError);
  CHECK_THROWS_AS(eigen_residual(Label{0.1}, space, 1), PreconditionError);
}

TEST_CASE("overlap series matches the finite section", "[coherent]") {
  const Label z{{0.3, 0.4}, {-0.5, 0.2}};
  const Label zp{{0.1, -0.6}, {0.7, 0.0}};
  for (double k : {0.5, 1.0, 3.5}) {
    const TruncatedRepSpace space(2, k, 40);
    const Complex section = state_vector(z, space).dot(state_vector(zp, space));
    CHECK(rel(inner_product(z, zp, k), section) <= 1e-10);
  }
}

TEST_CASE("overlap is Hermitian and the norm is at least one", "[coherent][property]") {
  Engine engine = make_stream(13, 0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const double k = 0.25 + 0.2 * trial;
    const Label z = random_label(n, engine, 1.5);
    const Label zp = random_label(n, engine, 1.5);
    CHECK(std::abs(inner_product(z, zp, k) - std::conj(inner_product(zp, z, k))) <=
          1e-13 * std::abs(inner_product(z, zp, k)));
    const Complex norm = inner_product(z, z, k);
    CHECK(norm.imag() == 0.0);
    CHECK(norm.real() >= 1.0);
    // Cauchy-Schwarz
    CHECK(std::norm(inner_product(z, zp, k)) <= norm.real() * inner_product(zp, zp, k).real() * (1 + 1e-12));
  }
}

TEST_CASE("labels and series reject bad input", "[coherent]") {
  CHECK_THROWS_AS(Label{Complex(std::nan(""), 0.0)}, DomainError);
  CHECK_THROWS_AS(f_series(0.0, std::vector<Complex>{1.0}), DomainError);
  CHECK_THROWS_AS(f_series(1.0, std::vector<Complex>{}), PreconditionError);
  CHECK_THROWS_AS(f_series(1.0, std::vector<Complex>{1e6}, {1e-14, 50}), ConvergenceError);
  CHECK_THROWS_AS(inner_product(Label{0.1}, Label{0.1, 0.2}, 1.0), PreconditionError);
}
