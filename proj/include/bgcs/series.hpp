#ifndef BGCS_SERIES_HPP
#define BGCS_SERIES_HPP

// Multivariate power series in w_1..w_N truncated at total degree `cutoff`, with
// coefficients indexed by the same degree-ordered basis as the Fock states.

#include <complex>
#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include "bgcs/errors.hpp"
#include "bgcs/fock.hpp"

namespace bgcs {

/// For every basis index i, all index pairs (j, k) with state_j + state_k = state_i.
class ConvolutionTable {
 public:
  explicit ConvolutionTable(DegreeBasis basis) : basis_(std::move(basis)), pairs_(basis_.dimension()) {
    const std::size_t dim = basis_.dimension();
    std::vector<int> sum(basis_.modes());
    for (std::size_t j = 0; j < dim; ++j) {
      const MultiIndex& a = basis_.state(j);
      for (std::size_t k = 0; k < dim; ++k) {
        const MultiIndex& b = basis_.state(k);
        if (a.degree() + b.degree() > basis_.cutoff()) continue;
        for (std::size_t m = 0; m < sum.size(); ++m) sum[m] = a[m] + b[m];
        pairs_[*basis_.index_of(std::span<const int>(sum))].emplace_back(j, k);
      }
    }
  }

  const DegreeBasis& basis() const noexcept { return basis_; }
  std::size_t dimension() const noexcept { return basis_.dimension(); }
  const std::vector<std::pair<std::size_t, std::size_t>>& pairs(std::size_t i) const { return pairs_[i]; }

 private:
  DegreeBasis basis_;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> pairs_;
};

template <class T>
class TruncatedSeries {
 public:
  using value_type = T;

  TruncatedSeries(std::shared_ptr<const ConvolutionTable> table, std::vector<T> coeffs)
      : table_(std::move(table)), c_(std::move(coeffs)) {
    if (c_.size() != table_->dimension()) throw PreconditionError("TruncatedSeries: coefficient count mismatch");
  }

  static TruncatedSeries constant(std::shared_ptr<const ConvolutionTable> table, T value) {
    std::vector<T> c(table->dimension(), T{});
    c[0] = value;
    return TruncatedSeries(std::move(table), std::move(c));
  }

  const std::vector<T>& coefficients() const noexcept { return c_; }
  const T& operator[](std::size_t i) const { return c_[i]; }
  const ConvolutionTable& table() const noexcept { return *table_; }

  friend TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) {
    std::vector<T> c(a.c_);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += b.c_[i];
    return {a.table_, std::move(c)};
  }

  friend TruncatedSeries operator*(T s, const TruncatedSeries& a) {
    std::vector<T> c(a.c_);
    for (auto& v : c) v *= s;
    return {a.table_, std::move(c)};
  }

  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    std::vector<T> c(a.c_.size(), T{});
    for (std::size_t i = 0; i < c.size(); ++i) {
      for (const auto& [j, k] : a.table_->pairs(i)) c[i] += a.c_[j] * b.c_[k];
    }
    return {a.table_, std::move(c)};
  }

  /// a / b, requires b_0 != 0. Solves b * q = a in basis order, which is degree order.
  friend TruncatedSeries operator/(const TruncatedSeries& a, const TruncatedSeries& b) {
    if (b.c_[0] == T{}) throw DomainError("TruncatedSeries: division by a series with zero constant term");
    std::vector<T> q(a.c_.size(), T{});
    for (std::size_t i = 0; i < q.size(); ++i) {
      T acc = a.c_[i];
      for (const auto& [j, k] : a.table_->pairs(i)) {
        if (j != 0) acc -= b.c_[j] * q[k];
      }
      q[i] = acc / b.c_[0];
    }
    return {a.table_, std::move(q)};
  }

  /// Multiplies by the monomial w_mode (0-based); the top-degree shell is dropped.
  TruncatedSeries shifted(std::size_t mode) const {
    std::vector<T> c(c_.size(), T{});
    const DegreeBasis& basis = table_->basis();
    for (std::size_t i = 0; i < c_.size(); ++i) {
      const MultiIndex& n = basis.state(i);
      if (n.degree() == basis.cutoff()) continue;
      c[*basis.index_of(n.raised(mode))] = c_[i];
    }
    return {table_, std::move(c)};
  }

  /// exp(p) from the Euler-operator relation |n| E_n = sum_m |m| p_m E_{n-m}.
  TruncatedSeries exp() const {
    using std::exp;
    const DegreeBasis& basis = table_->basis();
    std::vector<T> e(c_.size(), T{});
    e[0] = exp(c_[0]);
    for (std::size_t i = 1; i < e.size(); ++i) {
      T acc{};
      for (const auto& [j, k] : table_->pairs(i)) {
        if (j != 0) acc += static_cast<T>(basis.state(j).degree()) * c_[j] * e[k];
      }
      e[i] = acc / static_cast<T>(basis.state(i).degree());
    }
    return {table_, std::move(e)};
  }

 private:
  std::shared_ptr<const ConvolutionTable> table_;
  std::vector<T> c_;
};

}  // namespace bgcs

#endif  // BGCS_SERIES_HPP
