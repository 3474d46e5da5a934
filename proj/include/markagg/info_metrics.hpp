#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "markagg/aggregation.hpp"
#include "markagg/error.hpp"
#include "markagg/markov_core.hpp"
#include "markagg/partitions.hpp"

// All information quantities are in bits (bits per sample for rates).

namespace markagg {

inline constexpr double kMaxProjectedSequences = 1e6;

namespace detail {

// -p log2 p with 0 log 0 = 0.
inline double neg_plogp(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

// Neumaier-compensated running sum; keeps enumeration sums reproducible and tight.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace detail

inline double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p) h += detail::neg_plogp(v);
  return h;
}

inline double entropy(const Distribution& p) { return entropy(p.values()); }

/// H(X_1 | X_0) = -sum mu_i P_ij log P_ij.
inline double entropy_rate(const MarkovChain& x) {
  double h = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double row = 0.0;
    for (double v : x.P().row(i)) row += detail::neg_plogp(v);
    h += x.mu()[i] * row;
  }
  return h;
}

inline double redundancy_rate(const MarkovChain& x) {
  return std::max(0.0, entropy(x.mu()) - entropy_rate(x));
}

/// Entropy rate of the aggregated chain (nu, Q).
inline double entropy_rate(const AggregatedChain& y) {
  double h = 0.0;
  for (std::size_t k = 0; k < y.Q.size(); ++k) {
    double row = 0.0;
    for (double v : y.Q.row(k)) row += detail::neg_plogp(v);
    h += y.nu[k] * row;
  }
  return h;
}

/// KLDR between the stationary chain X and the chain with kernel `other`.
inline double kldr_markov(const MarkovChain& x, const StochasticMatrix& other) {
  const auto& p = x.P();
  if (other.size() != p.size())
    throw Error(Errc::kDimensionMismatch, "kernels differ in size");
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j)
      if (p(i, j) > 0.0 && other(i, j) == 0.0)
        throw Error(Errc::kAbsoluteContinuityViolation,
                    "P'(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                        ") = 0 while P(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                        ") > 0");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double pij = p(i, j);
      if (pij > 0.0) row += pij * std::log2(pij / other(i, j));
    }
    d += x.mu()[i] * row;
  }
  return std::max(0.0, d);
}

struct RelevantLossX {
  double loss = 0.0;          // H(X_n | Y_{n-1}) - H(X_n | X_{n-1})
  double cond_entropy = 0.0;  // H(X_n | Y_{n-1})
};

/// H(X_n | Y_{n-1}) from the joint mass J(k, j) = sum_{i in k} mu_i P_ij.
inline double conditional_entropy_next_given_class(const MarkovChain& x, const Partition& g) {
  const std::size_t n = x.size();
  Matrix joint(g.m(), n);
  std::vector<double> mass(g.m(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = g.class_of(i);
    mass[k] += x.mu()[i];
    for (std::size_t j = 0; j < n; ++j) joint(k, j) += x.mu()[i] * x.P()(i, j);
  }
  double h = 0.0;
  for (std::size_t k = 0; k < g.m(); ++k)
    for (double v : joint.row(k))
      if (v > 0.0) h -= v * std::log2(v / mass[k]);
  return h;
}

/// Loss I(X_n; X_{n-1}) - I(X_n; Y_{n-1}), accumulated as the mu-weighted
/// divergence of each row of P from its class-conditional next-state law.
/// Singleton classes contribute exactly zero.
inline RelevantLossX relevant_loss_X(const MarkovChain& x, const Partition& g) {
  const std::size_t n = x.size();
  Matrix joint(g.m(), n);
  std::vector<double> mass(g.m(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = g.class_of(i);
    mass[k] += x.mu()[i];
    for (std::size_t j = 0; j < n; ++j) joint(k, j) += x.mu()[i] * x.P()(i, j);
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = g.class_of(i);
    if (g.members(k).size() == 1) continue;
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double pij = x.P()(i, j);
      if (pij > 0.0) row += pij * std::log2(pij * mass[k] / joint(k, j));
    }
    loss += x.mu()[i] * row;
  }
  return {std::max(0.0, loss), conditional_entropy_next_given_class(x, g)};
}

/// H(Y_n | Y_{n-1}) - H(Y_n | X_{n-1}); equals the KLDR to the P-lifting.
inline double relevant_loss_Y(const MarkovChain& x, const Partition& g) {
  const AggregatedChain y = aggregate(x, g);
  const Matrix r = class_row_mass(x.P(), g);
  double h_given_x = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double row = 0.0;
    for (double v : r.row(i)) row += detail::neg_plogp(v);
    h_given_x += x.mu()[i] * row;
  }
  return std::max(0.0, entropy_rate(y) - h_given_x);
}

/// Redundancy-rate difference R(X) - R(Y'); equals the KLDR to the mu-lifting.
inline double mu_lift_bound_identity(const MarkovChain& x, const Partition& g) {
  const AggregatedChain y = aggregate(x, g);
  const double redundancy_y = entropy(y.nu) - entropy_rate(y);
  return std::max(0.0, redundancy_rate(x) - redundancy_y);
}

/// Exact D(Y_1^n || Y'_1^n) by enumerating every projected sequence of
/// length n. p(y) comes from the forward recursion on X, q(y) from (nu, Q).
inline double finite_n_projection_kld(const MarkovChain& x, const Partition& g, std::size_t length) {
  if (length < 2) throw Error(Errc::kBadTarget, "sequence length must be at least 2");
  if (std::pow(static_cast<double>(g.m()), static_cast<double>(length)) > kMaxProjectedSequences)
    throw Error(Errc::kTooManySequences, std::to_string(g.m()) + "^" + std::to_string(length) +
                                             " sequences exceed the 1e6 enumeration bound");
  const AggregatedChain y = aggregate(x, g);
  const auto& p = x.P();
  const std::size_t n = x.size();
  detail::CompensatedSum total;

  std::vector<std::vector<double>> alpha(length, std::vector<double>(n, 0.0));
  std::vector<std::size_t> last_class(length, 0);

  auto descend = [&](auto&& self, std::size_t t, double q) -> void {
    double pmass = 0.0;
    for (double a : alpha[t]) pmass += a;
    if (pmass <= 0.0) return;
    if (t + 1 == length) {
      total.add(pmass * std::log2(pmass / q));
      return;
    }
    const std::size_t k = last_class[t];
    for (std::size_t l = 0; l < g.m(); ++l) {
      auto& next = alpha[t + 1];
      std::fill(next.begin(), next.end(), 0.0);
      for (std::size_t src = 0; src < n; ++src) {
        const double a = alpha[t][src];
        if (a == 0.0) continue;
        for (std::size_t dst : g.members(l)) next[dst] += a * p(src, dst);
      }
      last_class[t + 1] = l;
      self(self, t + 1, q * y.Q(k, l));
    }
  };

  for (std::size_t k = 0; k < g.m(); ++k) {
    std::fill(alpha[0].begin(), alpha[0].end(), 0.0);
    for (std::size_t i : g.members(k)) alpha[0][i] = x.mu()[i];
    last_class[0] = k;
    descend(descend, 0, y.nu[k]);
  }
  return total.value();
}

/// The per-partition metric report.
struct MetricReport {
  double kldr_p = 0.0;
  double kldr_mu = 0.0;
  double loss_x = 0.0;
  double loss_y = 0.0;
  double h_rate = 0.0;
  bool lumpable = false;
  double max_violation = 0.0;
};

inline MetricReport evaluate_partition(const MarkovChain& x, const Partition& g,
                                       double lump_tol = kDefaultLumpTolerance) {
  const AggregatedChain y = aggregate(x, g);
  MetricReport r;
  r.kldr_p = kldr_markov(x, p_lift(x, y, g).Phat);
  r.kldr_mu = kldr_markov(x, pi_lift(y, g, x.mu()).Phat);
  r.loss_x = relevant_loss_X(x, g).loss;
  r.loss_y = relevant_loss_Y(x, g);
  r.h_rate = entropy_rate(x);
  const auto lump = lumpability_check(x.P(), g, lump_tol);
  r.lumpable = lump.lumpable;
  r.max_violation = lump.max_violation;
  return r;
}

inline std::string format_report(const MetricReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "kldr_p=%.12g\nkldr_mu=%.12g\nloss_x=%.12g\nloss_y=%.12g\nh_rate=%.12g\nlumpable=%s\n",
                r.kldr_p, r.kldr_mu, r.loss_x, r.loss_y, r.h_rate, r.lumpable ? "true" : "false");
  return buf;
}

}  // namespace markagg
