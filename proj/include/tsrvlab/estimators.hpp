#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tsrvlab/error.hpp"

namespace tsrv {

/// [Z1, Z2] over the grid given by strictly increasing `indices`:
/// sum_j (Z1[s_j] - Z1[s_{j-1}]) (Z2[s_j] - Z2[s_{j-1}]). A one-point grid gives 0.
template <typename D1, typename D2>
double grid_qv(const Eigen::DenseBase<D1>& z1, const Eigen::DenseBase<D2>& z2, std::span<const Eigen::Index> indices)
{
  if (z1.size() != z2.size()) {
    throw DomainError("grid_qv: sequences differ in length");
  }
  if (indices.empty()) {
    throw DomainError("grid_qv: grid must hold at least one index");
  }
  for (std::size_t j = 0; j < indices.size(); ++j) {
    if (indices[j] < 0 || indices[j] >= z1.size()) {
      throw DomainError("grid_qv: index " + std::to_string(indices[j]) + " out of range");
    }
    if (j > 0 && indices[j] <= indices[j - 1]) {
      throw DomainError("grid_qv: indices must be strictly increasing");
    }
  }
  double sum = 0.0;
  for (std::size_t j = 1; j < indices.size(); ++j) {
    const Eigen::Index a = indices[j - 1];
    const Eigen::Index b = indices[j];
    sum += (z1.derived().coeff(b) - z1.derived().coeff(a)) * (z2.derived().coeff(b) - z2.derived().coeff(a));
  }
  return sum;
}

/// Regular allocation of {0..n} into K staggered subgrids G^(k) = {k-1, k-1+K, ...}.
class SubgridAllocation
{
public:
  SubgridAllocation(Eigen::Index n, Eigen::Index K) : n_(n), K_(K)
  {
    if (n < 1) {
      throw DomainError("regular_allocation: n must be >= 1");
    }
    if (K < 1 || K > n) {
      throw DomainError("regular_allocation: K = " + std::to_string(K) + " outside [1, " + std::to_string(n) + "]");
    }
  }

  Eigen::Index n() const noexcept { return n_; }
  Eigen::Index K() const noexcept { return K_; }
  /// n_bar = (n - K + 1) / K, kept as the exact ratio of these two integers.
  Eigen::Index n_bar_numerator() const noexcept { return n_ - K_ + 1; }
  Eigen::Index n_bar_denominator() const noexcept { return K_; }
  double n_bar() const noexcept { return static_cast<double>(n_ - K_ + 1) / static_cast<double>(K_); }

  /// Number of points in G^(k), k = 1..K.
  Eigen::Index size(Eigen::Index k) const
  {
    check(k);
    return (n_ - (k - 1)) / K_ + 1;
  }
  /// Number of increments in G^(k); these sum to n + 1 - K.
  Eigen::Index increments(Eigen::Index k) const { return size(k) - 1; }

  std::vector<Eigen::Index> indices(Eigen::Index k) const
  {
    std::vector<Eigen::Index> out(static_cast<std::size_t>(size(k)));
    for (std::size_t j = 0; j < out.size(); ++j) {
      out[j] = k - 1 + static_cast<Eigen::Index>(j) * K_;
    }
    return out;
  }

private:
  void check(Eigen::Index k) const
  {
    if (k < 1 || k > K_) {
      throw DomainError("subgrid index " + std::to_string(k) + " outside [1, K]");
    }
  }

  Eigen::Index n_;
  Eigen::Index K_;
};

inline SubgridAllocation regular_allocation(Eigen::Index n, Eigen::Index K)
{
  return SubgridAllocation(n, K);
}

/// Realized variance over the full grid.
template <typename Derived>
double rv_all(const Eigen::DenseBase<Derived>& y)
{
  const auto& v = y.derived();
  double sum = 0.0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    const double d = v.coeff(i) - v.coeff(i - 1);
    sum += d * d;
  }
  return sum;
}

/// Average of the K subgrid realized variances, summed in k order.
template <typename Derived>
double rv_avg(const Eigen::DenseBase<Derived>& y, const SubgridAllocation& alloc)
{
  const auto& v = y.derived();
  if (v.size() != alloc.n() + 1) {
    throw DomainError("rv_avg: series length " + std::to_string(v.size()) + " does not match n + 1 = " +
                      std::to_string(alloc.n() + 1));
  }
  const Eigen::Index K = alloc.K();
  double total = 0.0;
  for (Eigen::Index k = 0; k < K; ++k) {
    double sub = 0.0;
    for (Eigen::Index i = k + K; i < v.size(); i += K) {
      const double d = v.coeff(i) - v.coeff(i - K);
      sub += d * d;
    }
    total += sub;
  }
  return total / static_cast<double>(K);
}

struct TsrvResult
{
  double rv_all = 0.0;
  double rv_avg = 0.0;
  double tsrv = 0.0;
  Eigen::Index K = 0;
  double n_bar = 0.0;
  /// tsrv / (1 - n_bar / n), present only when requested.
  std::optional<double> adjusted;
};

/// Two scales realized volatility rv_avg - (n_bar / n) rv_all. Negative values are returned as is.
template <typename Derived>
TsrvResult tsrv(const Eigen::DenseBase<Derived>& y, Eigen::Index K, bool adjust = false)
{
  const Eigen::Index n = y.size() - 1;
  const SubgridAllocation alloc(n, K);
  TsrvResult out;
  out.K = K;
  out.n_bar = alloc.n_bar();
  out.rv_all = rv_all(y);
  out.rv_avg = rv_avg(y, alloc);
  const double weight = static_cast<double>(alloc.n_bar_numerator()) /
                        (static_cast<double>(alloc.n_bar_denominator()) * static_cast<double>(n));
  out.tsrv = out.rv_avg - weight * out.rv_all;
  if (adjust) {
    if (!(weight < 1.0)) {
      throw DomainError("tsrv: small-sample adjustment is undefined for K = 1");
    }
    out.adjusted = out.tsrv / (1.0 - weight);
  }
  return out;
}

/// round(c n^(2/3)) clamped to [1, n].
inline Eigen::Index select_K(Eigen::Index n, double c)
{
  if (n < 2) {
    throw DomainError("select_K: n must be >= 2");
  }
  if (!(c > 0.0)) {
    throw DomainError("select_K: c must be positive");
  }
  const double root = std::cbrt(static_cast<double>(n));
  const auto K = static_cast<Eigen::Index>(std::llround(c * root * root));
  return std::clamp<Eigen::Index>(K, 1, n);
}

} // namespace tsrv
