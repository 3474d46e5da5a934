#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "markagg/error.hpp"
#include "markagg/matrix.hpp"

namespace markagg {

inline constexpr double kRowSumTolerance = 1e-9;
inline constexpr double kInputRowSumTolerance = 1e-6;
inline constexpr double kStationaryStepTolerance = 1e-12;
inline constexpr double kStationaryResidualTolerance = 1e-10;
inline constexpr std::size_t kStationaryBudget = 100000;

/// Square, non-negative, row-stochastic matrix. The constructor checks every
/// invariant; derived matrices built elsewhere go through it too.
class StochasticMatrix {
 public:
  StochasticMatrix() = default;

  explicit StochasticMatrix(Matrix m) : m_(std::move(m)) {
    if (!m_.square()) throw Error(Errc::kNotSquare, "transition matrix must be square");
    if (m_.rows() == 0) throw Error(Errc::kNotSquare, "transition matrix must have n >= 1");
    for (std::size_t i = 0; i < m_.rows(); ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < m_.cols(); ++j) {
        const double v = m_(i, j);
        if (!std::isfinite(v))
          throw Error(Errc::kNonFinite, "entry (" + std::to_string(i + 1) + "," +
                                            std::to_string(j + 1) + ") is not finite");
        if (v < 0.0)
          throw Error(Errc::kNegativeEntry, "entry (" + std::to_string(i + 1) + "," +
                                                std::to_string(j + 1) + ") is negative");
        sum += v;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance)
        throw Error(Errc::kRowSumViolation,
                    "row " + std::to_string(i + 1) + " sums to " + std::to_string(sum));
    }
  }

  StochasticMatrix(std::initializer_list<std::initializer_list<double>> init)
      : StochasticMatrix(Matrix(init)) {}

  std::size_t size() const noexcept { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  std::span<const double> row(std::size_t i) const { return m_.row(i); }
  const Matrix& matrix() const noexcept { return m_; }

  friend bool operator==(const StochasticMatrix&, const StochasticMatrix&) = default;

 private:
  Matrix m_;
};

/// Probability vector.
class Distribution {
 public:
  Distribution() = default;

  explicit Distribution(std::vector<double> p) : p_(std::move(p)) {
    if (p_.empty()) throw Error(Errc::kDimensionMismatch, "distribution must be non-empty");
    double sum = 0.0;
    for (std::size_t i = 0; i < p_.size(); ++i) {
      if (!std::isfinite(p_[i]) || p_[i] < 0.0)
        throw Error(Errc::kNegativeEntry,
                    "distribution entry " + std::to_string(i + 1) + " is negative or non-finite");
      sum += p_[i];
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance)
      throw Error(Errc::kRowSumViolation, "distribution sums to " + std::to_string(sum));
  }

  Distribution(std::initializer_list<double> init) : Distribution(std::vector<double>(init)) {}

  static Distribution uniform(std::size_t n) {
    return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  std::span<const double> values() const noexcept { return p_; }

  bool strictly_positive() const {
    for (double v : p_)
      if (!(v > 0.0)) return false;
    return true;
  }

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  std::vector<double> p_;
};

/// Checks a raw matrix and turns it into a StochasticMatrix. With
/// `renormalize` each row is divided by its sum; otherwise rows may deviate
/// from one by at most 1e-6 and are rescaled when the deviation exceeds 1e-9.
inline StochasticMatrix validate_stochastic(const Matrix& raw, bool renormalize) {
  if (!raw.square() || raw.rows() == 0)
    throw Error(Errc::kNotSquare, "transition matrix must be square with n >= 1");
  Matrix m = raw;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      if (!std::isfinite(v))
        throw Error(Errc::kNonFinite, "entry (" + std::to_string(i + 1) + "," +
                                          std::to_string(j + 1) + ") is not finite");
      if (v < 0.0)
        throw Error(Errc::kNegativeEntry, "entry (" + std::to_string(i + 1) + "," +
                                              std::to_string(j + 1) + ") is negative");
      sum += v;
    }
    if (sum == 0.0)
      throw Error(Errc::kZeroRow, "row " + std::to_string(i + 1) + " is all zeros");
    const double dev = std::abs(sum - 1.0);
    if (!renormalize && dev > kInputRowSumTolerance) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", sum);
      throw Error(Errc::kRowSumViolation, "row " + std::to_string(i + 1) + " sums to " + buf);
    }
    if (renormalize || dev > kRowSumTolerance)
      for (double& v : m.row(i)) v /= sum;
  }
  return StochasticMatrix(std::move(m));
}

/// Primitivity test on the zero/nonzero pattern: P is regular iff
/// P^k > 0 entrywise for k = (n-1)^2 + 1. Positivity persists under further
/// multiplication, so repeated squaring up to 2^s >= k suffices.
inline bool is_regular(const StochasticMatrix& p) {
  const std::size_t n = p.size();
  const std::size_t bound = (n - 1) * (n - 1) + 1;
  std::vector<std::uint8_t> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = p(i, j) > 0.0;

  auto all_positive = [&] {
    for (auto v : a)
      if (!v) return false;
    return true;
  };

  std::size_t exponent = 1;
  while (true) {
    if (all_positive()) return true;
    if (exponent >= bound) return false;
    std::vector<std::uint8_t> sq(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        if (!a[i * n + k]) continue;
        for (std::size_t j = 0; j < n; ++j) sq[i * n + j] |= a[k * n + j];
      }
    a = std::move(sq);
    exponent *= 2;
  }
}

/// Left fixed point of P by power iteration started from the uniform vector.
/// If the plain iteration has not settled after half the budget (periodic
/// chains oscillate), the remaining budget runs the lazy kernel (I + P) / 2,
/// which has the same fixed point.
inline Distribution stationary_distribution(const StochasticMatrix& p,
                                            bool check_regular = false) {
  if (check_regular && !is_regular(p))
    throw Error(Errc::kNotRegular, "chain is not irreducible and aperiodic");
  const std::size_t n = p.size();
  std::vector<double> mu(n, 1.0 / static_cast<double>(n));

  auto normalize = [](std::vector<double>& v) {
    const double s = std::accumulate(v.begin(), v.end(), 0.0);
    for (double& x : v) x /= s;
  };

  // Once converged, keep iterating while the steps still shrink.
  bool converged = false;
  double last_step = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < kStationaryBudget; ++it) {
    std::vector<double> next = left_multiply(mu, p.matrix());
    if (it >= kStationaryBudget / 2)
      for (std::size_t i = 0; i < n; ++i) next[i] = 0.5 * (next[i] + mu[i]);
    normalize(next);
    const double step = max_abs_diff(next, mu);
    if (converged && step >= last_step) break;
    mu = std::move(next);
    last_step = step;
    if (step < kStationaryStepTolerance) converged = true;
    if (step == 0.0) break;
  }
  const double residual = max_abs_diff(left_multiply(mu, p.matrix()), mu);
  if (!converged || residual > kStationaryResidualTolerance)
    throw Error(Errc::kNotConverged,
                "power iteration did not converge (residual " + std::to_string(residual) + ")");
  for (double& x : mu) x = std::max(x, 0.0);
  normalize(mu);
  return Distribution(std::move(mu));
}

/// A stationary DTMC: kernel, invariant distribution and regularity flag.
class MarkovChain {
 public:
  /// Computes the stationary distribution; requires a regular chain.
  explicit MarkovChain(StochasticMatrix p)
      : p_(std::move(p)), mu_(stationary_distribution(p_, true)), regular_(true) {}

  /// Uses a caller-supplied invariant distribution. The chain need not be
  /// regular (entropy rates are defined for e.g. the identity kernel).
  MarkovChain(StochasticMatrix p, Distribution mu) : p_(std::move(p)), mu_(std::move(mu)) {
    if (mu_.size() != p_.size())
      throw Error(Errc::kDimensionMismatch, "distribution length does not match chain");
    const auto next = left_multiply(mu_.values(), p_.matrix());
    if (max_abs_diff(next, mu_.values()) > 1e-8)
      throw Error(Errc::kNotConverged, "supplied distribution is not invariant under P");
    regular_ = is_regular(p_);
  }

  std::size_t size() const noexcept { return p_.size(); }
  const StochasticMatrix& P() const noexcept { return p_; }
  const Distribution& mu() const noexcept { return mu_; }
  bool regular() const noexcept { return regular_; }

 private:
  StochasticMatrix p_;
  Distribution mu_;
  bool regular_ = false;
};

}  // namespace markagg
