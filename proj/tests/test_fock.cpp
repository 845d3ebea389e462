#include <catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "bgcs/fock.hpp"

using namespace bgcs;

namespace {

Eigen::MatrixXcd dense(const SparseOperator& op) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(op.dimension(), op.dimension());
  for (const auto& e : op.entries()) m(e.row, e.col) = e.value;
  return m;
}

std::size_t binom(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<std::size_t>(std::llround(r));
}

}  // namespace

TEST_CASE("basis is degree ordered with lexicographically descending shells", "[fock]") {
  const auto basis = enumerate_basis(2, 2);
  REQUIRE(basis.size() == 6);
  const std::vector<std::vector<int>> expected{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  for (std::size_t i = 0; i < basis.size(); ++i) CHECK(std::vector<int>(basis[i].begin(), basis[i].end()) == expected[i]);
}

TEST_CASE("basis size and rank round trip", "[fock][property]") {
  for (std::size_t n = 1; n <= 4; ++n) {
    for (int c = 0; c <= 7; ++c) {
      const DegreeBasis basis(n, c);
      CHECK(basis.dimension() == binom(n + c, n));
      for (std::size_t i = 0; i < basis.dimension(); ++i) {
        REQUIRE(basis.index_of(basis.state(i)) == i);
        if (i > 0) CHECK(basis.state(i - 1).degree() <= basis.state(i).degree());
      }
    }
  }
  const DegreeBasis basis(2, 3);
  CHECK_FALSE(basis.index_of(std::vector<int>{2, 2}).has_value());
  CHECK_FALSE(basis.index_of(std::vector<int>{-1, 0}).has_value());
  CHECK_FALSE(basis.index_of(std::vector<int>{1}).has_value());
}

TEST_CASE("generator matrix elements on small spaces", "[fock]") {
  const TruncatedRepSpace one(1, 2.0, 4);
  // E_{2,1} on |1>: sqrt(1) * sqrt(K - 1 + 1)
  CHECK(generator_matrix(one, 2, 1).at(0, 1).real() == Catch::Approx(std::sqrt(2.0)).epsilon(1e-15));
  // E_{1,2} on |1>: sqrt(2) * sqrt(K + 1)
  CHECK(generator_matrix(one, 1, 2).at(2, 1).real() == Catch::Approx(std::sqrt(6.0)).epsilon(1e-15));
  CHECK(generator_matrix(one, 2, 2).at(3, 3).real() == 5.0);
  CHECK(generator_matrix(one, 1, 1).at(3, 3).real() == 3.0);
  // raising out of the top shell is dropped
  CHECK(generator_matrix(one, 1, 2).at(4, 4) == Complex{});
  CHECK(generator_matrix(one, 1, 2).entries().size() == 4);

  const TruncatedRepSpace two(2, 1.5, 3);
  const auto e12 = generator_matrix(two, 1, 2);
  // |0,1> -> sqrt(1)*sqrt(1) |1,0>
  CHECK(e12.at(*two.index_of(MultiIndex({1, 0})), *two.index_of(MultiIndex({0, 1}))).real() == 1.0);
  CHECK_THROWS_AS(generator_matrix(two, 0, 1), PreconditionError);
  CHECK_THROWS_AS(generator_matrix(two, 1, 4), PreconditionError);
}

TEST_CASE("lowering generators stay real for K below one", "[fock]") {
  const TruncatedRepSpace space(2, 0.25, 5);
  for (std::size_t a = 1; a <= 2; ++a) {
    const auto op = generator_matrix(space, 3, a);
    for (const auto& e : op.entries()) {
      CHECK(std::isfinite(e.value.real()));
      CHECK(e.value.imag() == 0.0);
      CHECK(e.value.real() > 0.0);
    }
  }
}

TEST_CASE("commutation relations hold on interior states", "[fock][property]") {
  for (std::size_t n = 1; n <= 3; ++n) {
    for (int cutoff = 2; cutoff <= 6; ++cutoff) {
      for (double k : {0.5, 1.0, 2.5, static_cast<double>(n) + 2.0}) {
        const TruncatedRepSpace space(n, k, cutoff);
        double worst = 0.0;
        for (std::size_t a = 1; a <= n + 1; ++a)
          for (std::size_t b = 1; b <= n + 1; ++b)
            for (std::size_t c = 1; c <= n + 1; ++c)
              for (std::size_t d = 1; d <= n + 1; ++d) worst = std::max(worst, commutator_check(space, {a, b}, {c, d}));
        INFO("N=" << n << " cutoff=" << cutoff << " K=" << k);
        CHECK(worst <= 1e-12);
        CHECK(subsidiary_residual(space) <= 1e-12);
      }
    }
  }
}

TEST_CASE("commutators agree with dense products", "[fock]") {
  const TruncatedRepSpace space(2, 1.7, 5);
  for (std::size_t a = 1; a <= 3; ++a) {
    for (std::size_t b = 1; b <= 3; ++b) {
      const auto x = generator_matrix(space, a, b);
      const auto y = generator_matrix(space, b, a);
      const Eigen::MatrixXcd expected = dense(x) * dense(y) - dense(y) * dense(x);
      CHECK((dense(x * y - y * x) - expected).norm() < 1e-12);
    }
  }
}

TEST_CASE("adjoint pairs are transposes where both are represented", "[fock][property]") {
  const TruncatedRepSpace space(3, 0.8, 4);
  for (std::size_t a = 1; a <= 4; ++a) {
    for (std::size_t b = 1; b <= 4; ++b) {
      const Eigen::MatrixXcd x = dense(generator_matrix(space, a, b));
      const Eigen::MatrixXcd y = dense(generator_matrix(space, b, a));
      CHECK((x - y.adjoint()).norm() < 1e-13);
    }
  }
}

TEST_CASE("commutator check refuses spaces without interior", "[fock]") {
  CHECK_THROWS_AS(commutator_check(TruncatedRepSpace(1, 1.0, 1), {1, 2}, {2, 1}), PreconditionError);
  CHECK_THROWS_AS(TruncatedRepSpace(0, 1.0, 3), PreconditionError);
  CHECK_THROWS_AS(TruncatedRepSpace(1, 0.0, 3), DomainError);
  CHECK_THROWS_AS(TruncatedRepSpace(1, 1.0, -1), PreconditionError);
}

TEST_CASE("sparse operator algebra", "[fock]") {
  const SparseOperator a(3, {{0, 1, 2.0}, {2, 2, Complex(0, 1)}, {0, 1, 1.0}, {1, 0, 0.0}});
  CHECK(a.entries().size() == 2);
  CHECK(a.at(0, 1) == Complex(3.0));
  CHECK_FALSE(a.is_diagonal());
  const auto id = SparseOperator::identity(3, 2.0);
  CHECK(id.is_diagonal());
  CHECK(id.diagonal() == std::vector<Complex>(3, 2.0));
  CHECK((a - a).entries().empty());
  const std::vector<Complex> v{1.0, 2.0, 3.0};
  const auto av = a.apply(v);
  CHECK(av[0] == Complex(6.0));
  CHECK(av[2] == Complex(0.0, 3.0));
  CHECK((Complex(2.0) * a).at(2, 2) == Complex(0.0, 2.0));
}

TEST_CASE("triplet dump is one row-col-re-im line per entry", "[fock]") {
  const SparseOperator op(4, {{3, 0, Complex(0.1, -2.5)}, {0, 2, 1.0 / 3.0}});
  std::ostringstream os;
  op.write_triplets(os);
  CHECK(os.str() == "0 2 0.33333333333333331 0\n3 0 0.10000000000000001 -2.5\n");

  std::istringstream in(os.str());
  std::size_t row = 0, col = 0;
  double re = 0.0, im = 0.0;
  std::vector<SparseOperator::Entry> back;
  while (in >> row >> col >> re >> im) back.push_back({row, col, Complex(re, im)});
  const SparseOperator parsed(4, back);
  CHECK(parsed.at(0, 2) == op.at(0, 2));
  CHECK(parsed.at(3, 0) == op.at(3, 0));
}

TEST_CASE("generators shift the degree by a fixed amount", "[fock][property]") {
  const TruncatedRepSpace space(3, 1.25, 4);
  for (std::size_t a = 1; a <= 4; ++a) {
    for (std::size_t b = 1; b <= 4; ++b) {
      const int shift = (b == 4 && a != 4) ? 1 : (a == 4 && b != 4) ? -1 : 0;
      const auto op = generator_matrix(space, a, b);
      for (const auto& e : op.entries()) {
        CHECK(space.state(e.row).degree() - space.state(e.col).degree() == shift);
      }
    }
  }
}

TEST_CASE("a generator commutes with itself", "[fock]") {
  const TruncatedRepSpace space(2, 1.5, 5);
  for (std::size_t a = 1; a <= 3; ++a) {
    for (std::size_t b = 1; b <= 3; ++b) {
      const auto x = generator_matrix(space, a, b);
      CHECK((x * x - x * x).entries().empty());
    }
  }
}
