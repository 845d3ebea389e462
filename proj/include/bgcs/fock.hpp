#ifndef BGCS_FOCK_HPP
#define BGCS_FOCK_HPP

// Truncated Fock-space realization of the u(N,1) generators on the subspace fixed by
// the subsidiary condition  -sum_a E_aa + E_{N+1,N+1} = K.  A basis state is labeled by
// the first N occupations; the last mode carries K-1+|n| quanta implicitly.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bgcs/errors.hpp"

namespace bgcs {

using Complex = std::complex<double>;

/// Occupation tuple (n_1, ..., n_N), all entries nonnegative.
class MultiIndex {
 public:
  MultiIndex() = default;

  explicit MultiIndex(std::vector<int> occupations) : n_(std::move(occupations)) {
    for (int v : n_) {
      if (v < 0) throw DomainError("MultiIndex: occupations must be nonnegative");
    }
  }

  MultiIndex(std::initializer_list<int> occupations) : MultiIndex(std::vector<int>(occupations)) {}

  std::size_t size() const noexcept { return n_.size(); }
  int operator[](std::size_t i) const { return n_[i]; }
  std::span<const int> occupations() const noexcept { return n_; }
  auto begin() const noexcept { return n_.begin(); }
  auto end() const noexcept { return n_.end(); }

  int degree() const noexcept {
    int d = 0;
    for (int v : n_) d += v;
    return d;
  }

  MultiIndex raised(std::size_t mode) const {
    MultiIndex r = *this;
    ++r.n_.at(mode);
    return r;
  }

  MultiIndex lowered(std::size_t mode) const {
    if (n_.at(mode) == 0) throw DomainError("MultiIndex: cannot lower an empty mode");
    MultiIndex r = *this;
    --r.n_[mode];
    return r;
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> n_;
};

inline std::ostream& operator<<(std::ostream& os, const MultiIndex& n) {
  os << '(';
  for (std::size_t i = 0; i < n.size(); ++i) os << (i ? "," : "") << n[i];
  return os << ')';
}

namespace detail {

inline std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Number of compositions of `total` into `parts` nonnegative parts.
inline std::size_t compositions(int total, std::size_t parts) {
  if (parts == 0) return total == 0 ? 1 : 0;
  return binomial(static_cast<std::size_t>(total) + parts - 1, parts - 1);
}

inline void append_degree_shell(std::vector<int>& prefix, std::size_t modes, int remaining,
                                 std::vector<MultiIndex>& out) {
  if (prefix.size() + 1 == modes) {
    prefix.push_back(remaining);
    out.emplace_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int first = remaining; first >= 0; --first) {
    prefix.push_back(first);
    append_degree_shell(prefix, modes, remaining - first, out);
    prefix.pop_back();
  }
}

}  // namespace detail

/// All multi-indices with total degree <= cutoff, ordered by degree and then by
/// descending n_1, n_2, ... within a degree: (0,0),(1,0),(0,1),(2,0),(1,1),(0,2),...
inline std::vector<MultiIndex> enumerate_basis(std::size_t modes, int cutoff) {
  if (modes == 0) throw PreconditionError("enumerate_basis: need at least one mode");
  if (cutoff < 0) throw PreconditionError("enumerate_basis: cutoff must be nonnegative");
  std::vector<MultiIndex> out;
  out.reserve(detail::binomial(static_cast<std::size_t>(cutoff) + modes, modes));
  std::vector<int> prefix;
  for (int d = 0; d <= cutoff; ++d) detail::append_degree_shell(prefix, modes, d, out);
  return out;
}

/// Position of an occupation tuple in the enumerate_basis order (any degree).
inline std::size_t basis_rank(std::span<const int> n) {
  const std::size_t modes = n.size();
  int degree = 0;
  for (int v : n) degree += v;
  std::size_t rank = degree == 0 ? 0 : detail::binomial(static_cast<std::size_t>(degree) - 1 + modes, modes);
  int remaining = degree;
  for (std::size_t i = 0; i + 1 < modes; ++i) {
    for (int first = remaining; first > n[i]; --first) {
      rank += detail::compositions(remaining - first, modes - i - 1);
    }
    remaining -= n[i];
  }
  return rank;
}

/// Enumerated multi-index basis with O(N) rank lookup; cheap to copy.
class DegreeBasis {
 public:
  DegreeBasis(std::size_t modes, int cutoff)
      : modes_(modes),
        cutoff_(cutoff),
        states_(std::make_shared<const std::vector<MultiIndex>>(enumerate_basis(modes, cutoff))) {}

  std::size_t modes() const noexcept { return modes_; }
  int cutoff() const noexcept { return cutoff_; }
  std::size_t dimension() const noexcept { return states_->size(); }
  const std::vector<MultiIndex>& states() const noexcept { return *states_; }
  const MultiIndex& state(std::size_t i) const { return (*states_)[i]; }

  std::optional<std::size_t> index_of(std::span<const int> n) const {
    if (n.size() != modes_) return std::nullopt;
    int degree = 0;
    for (int v : n) {
      if (v < 0) return std::nullopt;
      degree += v;
    }
    if (degree > cutoff_) return std::nullopt;
    return basis_rank(n);
  }

  std::optional<std::size_t> index_of(const MultiIndex& n) const { return index_of(n.occupations()); }

 private:
  std::size_t modes_;
  int cutoff_;
  std::shared_ptr<const std::vector<MultiIndex>> states_;
};

/// The metric diag(1, ..., 1, -1) of u(N,1); indices are 1-based like the generators.
struct StructureMetric {
  std::size_t n_modes;

  int operator()(std::size_t a, std::size_t b) const {
    if (a != b) return 0;
    return a == n_modes + 1 ? -1 : 1;
  }
};

/// Representation label K > 0 plus a degree-truncated basis.
class TruncatedRepSpace {
 public:
  TruncatedRepSpace(std::size_t n_modes, double k, int cutoff)
      : basis_(checked_modes(n_modes, k, cutoff), cutoff), k_(k) {}

  std::size_t n_modes() const noexcept { return basis_.modes(); }
  double k() const noexcept { return k_; }
  int cutoff() const noexcept { return basis_.cutoff(); }
  std::size_t dimension() const noexcept { return basis_.dimension(); }
  const DegreeBasis& basis() const noexcept { return basis_; }
  const MultiIndex& state(std::size_t i) const { return basis_.state(i); }
  std::optional<std::size_t> index_of(const MultiIndex& n) const { return basis_.index_of(n); }
  StructureMetric metric() const noexcept { return {n_modes()}; }

 private:
  static std::size_t checked_modes(std::size_t n_modes, double k, int cutoff) {
    if (n_modes == 0) throw PreconditionError("TruncatedRepSpace: N must be at least 1");
    if (!(k > 0.0)) throw DomainError("TruncatedRepSpace: K must be positive");
    if (cutoff < 0) throw PreconditionError("TruncatedRepSpace: cutoff must be nonnegative");
    return n_modes;
  }

  DegreeBasis basis_;
  double k_;
};

/// Square matrix stored as sorted (row, col, value) triplets, one per position.
class SparseOperator {
 public:
  struct Entry {
    std::size_t row;
    std::size_t col;
    Complex value;
  };

  explicit SparseOperator(std::size_t dimension, std::vector<Entry> entries = {}) : dim_(dimension) {
    std::map<std::pair<std::size_t, std::size_t>, Complex> merged;
    for (const auto& e : entries) {
      if (e.row >= dim_ || e.col >= dim_) throw PreconditionError("SparseOperator: index out of range");
      merged[{e.row, e.col}] += e.value;
    }
    entries_.reserve(merged.size());
    for (const auto& [key, value] : merged) {
      if (value != Complex{}) entries_.push_back({key.first, key.second, value});
    }
  }

  static SparseOperator identity(std::size_t dimension, Complex scale = 1.0) {
    std::vector<Entry> e;
    e.reserve(dimension);
    for (std::size_t i = 0; i < dimension; ++i) e.push_back({i, i, scale});
    return SparseOperator(dimension, std::move(e));
  }

  std::size_t dimension() const noexcept { return dim_; }
  const std::vector<Entry>& entries() const noexcept { return entries_; }

  Complex at(std::size_t row, std::size_t col) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), std::pair{row, col},
                               [](const Entry& e, const std::pair<std::size_t, std::size_t>& key) {
                                 return std::pair{e.row, e.col} < key;
                               });
    if (it != entries_.end() && it->row == row && it->col == col) return it->value;
    return {};
  }

  bool is_diagonal() const noexcept {
    return std::all_of(entries_.begin(), entries_.end(), [](const Entry& e) { return e.row == e.col; });
  }

  std::vector<Complex> diagonal() const {
    std::vector<Complex> d(dim_);
    for (const auto& e : entries_) {
      if (e.row == e.col) d[e.row] = e.value;
    }
    return d;
  }

  std::vector<Complex> apply(std::span<const Complex> v) const {
    if (v.size() != dim_) throw PreconditionError("SparseOperator::apply: dimension mismatch");
    std::vector<Complex> out(dim_);
    for (const auto& e : entries_) out[e.row] += e.value * v[e.col];
    return out;
  }

  friend SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) {
    if (a.dim_ != b.dim_) throw PreconditionError("SparseOperator: dimension mismatch");
    // b's entries are sorted by row, so each row is a contiguous run.
    std::vector<std::size_t> row_start(b.dim_ + 1, 0);
    for (const auto& e : b.entries_) ++row_start[e.row + 1];
    for (std::size_t i = 0; i < b.dim_; ++i) row_start[i + 1] += row_start[i];
    std::vector<Entry> out;
    for (const auto& ea : a.entries_) {
      for (std::size_t j = row_start[ea.col]; j < row_start[ea.col + 1]; ++j) {
        const auto& eb = b.entries_[j];
        out.push_back({ea.row, eb.col, ea.value * eb.value});
      }
    }
    return SparseOperator(a.dim_, std::move(out));
  }

  friend SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) {
    if (a.dim_ != b.dim_) throw PreconditionError("SparseOperator: dimension mismatch");
    std::vector<Entry> all = a.entries_;
    all.insert(all.end(), b.entries_.begin(), b.entries_.end());
    return SparseOperator(a.dim_, std::move(all));
  }

  friend SparseOperator operator*(Complex s, const SparseOperator& a) {
    std::vector<Entry> scaled = a.entries_;
    for (auto& e : scaled) e.value *= s;
    return SparseOperator(a.dim_, std::move(scaled));
  }

  friend SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) {
    return a + Complex(-1.0) * b;
  }

  /// One "row col re im" line per stored entry, 0-based indices, 17 significant digits.
  void write_triplets(std::ostream& os) const {
    const auto old_precision = os.precision(17);
    for (const auto& e : entries_) {
      os << e.row << ' ' << e.col << ' ' << e.value.real() << ' ' << e.value.imag() << '\n';
    }
    os.precision(old_precision);
  }

 private:
  std::size_t dim_;
  std::vector<Entry> entries_;
};

/// Matrix of E_{alpha beta} (1-based, 1..N+1) in the oscillator realization
///   E_ab = a_a^+ a_b,  E_{a,N+1} = a_a^+ a_{N+1}^+,  E_{N+1,a} = a_{N+1} a_a,
///   E_{N+1,N+1} = a_{N+1}^+ a_{N+1} + 1,
/// with the last occupation fixed to K-1+|n|. Raising components that leave the
/// truncated space are dropped.
inline SparseOperator generator_matrix(const TruncatedRepSpace& space, std::size_t alpha, std::size_t beta) {
  const std::size_t n = space.n_modes();
  if (alpha < 1 || alpha > n + 1 || beta < 1 || beta > n + 1) {
    throw PreconditionError("generator_matrix: indices must lie in 1..N+1");
  }
  const double k = space.k();
  const std::size_t a = alpha - 1;
  const std::size_t b = beta - 1;
  std::vector<SparseOperator::Entry> entries;

  for (std::size_t col = 0; col < space.dimension(); ++col) {
    const MultiIndex& state = space.state(col);
    const double degree = state.degree();
    if (alpha == n + 1 && beta == n + 1) {
      entries.push_back({col, col, k + degree});
    } else if (alpha == n + 1) {
      // a_{N+1} a_b lowers n_b and the last mode; the second factor only matters when
      // n_b > 0, where K-1+|n| >= K > 0.
      if (state[b] == 0) continue;
      const double coeff = std::sqrt(static_cast<double>(state[b])) * std::sqrt(k - 1.0 + degree);
      entries.push_back({*space.index_of(state.lowered(b)), col, coeff});
    } else if (beta == n + 1) {
      const MultiIndex target = state.raised(a);
      const auto row = space.index_of(target);
      if (!row) continue;
      const double coeff = std::sqrt(static_cast<double>(state[a]) + 1.0) * std::sqrt(k + degree);
      entries.push_back({*row, col, coeff});
    } else if (a == b) {
      if (state[a] != 0) entries.push_back({col, col, static_cast<double>(state[a])});
    } else {
      if (state[b] == 0) continue;
      const MultiIndex target = state.lowered(b).raised(a);
      const double coeff = std::sqrt(static_cast<double>(state[b])) * std::sqrt(static_cast<double>(state[a]) + 1.0);
      entries.push_back({*space.index_of(target), col, coeff});
    }
  }
  return SparseOperator(space.dimension(), std::move(entries));
}

/// Largest entry of -sum_a E_aa + E_{N+1,N+1} - K*1 over the whole truncated space.
inline double subsidiary_residual(const TruncatedRepSpace& space) {
  const std::size_t n = space.n_modes();
  SparseOperator op = generator_matrix(space, n + 1, n + 1);
  for (std::size_t a = 1; a <= n; ++a) op = op - generator_matrix(space, a, a);
  op = op - SparseOperator::identity(space.dimension(), space.k());
  double worst = 0.0;
  for (const auto& e : op.entries()) worst = std::max(worst, std::abs(e.value));
  return worst;
}

using GeneratorIndex = std::pair<std::size_t, std::size_t>;

/// max |[E_ab, E_cd] - (eta_bc E_ad - eta_da E_cb)| over rows and columns of degree
/// <= cutoff-2, where truncation cannot reach.
inline double commutator_check(const TruncatedRepSpace& space, GeneratorIndex first, GeneratorIndex second) {
  if (space.cutoff() < 2) throw PreconditionError("commutator_check: cutoff must be at least 2");
  const auto [alpha, beta] = first;
  const auto [gamma, delta] = second;
  const SparseOperator x = generator_matrix(space, alpha, beta);
  const SparseOperator y = generator_matrix(space, gamma, delta);
  const StructureMetric eta = space.metric();

  SparseOperator residual = x * y - y * x;
  if (const int s = eta(beta, gamma); s != 0) {
    residual = residual - Complex(s) * generator_matrix(space, alpha, delta);
  }
  if (const int s = eta(delta, alpha); s != 0) {
    residual = residual + Complex(s) * generator_matrix(space, gamma, beta);
  }

  const int interior = space.cutoff() - 2;
  double worst = 0.0;
  for (const auto& e : residual.entries()) {
    if (space.state(e.row).degree() > interior || space.state(e.col).degree() > interior) continue;
    worst = std::max(worst, std::abs(e.value));
  }
  return worst;
}

}  // namespace bgcs

#endif  // BGCS_FOCK_HPP
