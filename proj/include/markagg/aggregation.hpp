#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <string>

#include "markagg/error.hpp"
#include "markagg/markov_core.hpp"
#include "markagg/matrix.hpp"
#include "markagg/partitions.hpp"

namespace markagg {

inline constexpr double kDefaultLumpTolerance = 1e-10;
inline constexpr double kAggregationMatchTolerance = 1e-12;
// Row masses at or below this are treated as structural zeros by p_lift.
inline constexpr double kZeroRowMass = 1e-300;

/// Optimal Markov model of the g-projection: Q = U^mu P V, nu = V^T mu.
struct AggregatedChain {
  StochasticMatrix Q;
  Distribution nu;
  Partition partition;
};

enum class LiftMethod { kPi, kP };

struct LiftedChain {
  StochasticMatrix Phat;
  LiftMethod method;
  std::optional<Distribution> pi_used;
};

struct LumpabilityResult {
  bool lumpable = false;
  double max_violation = 0.0;
};

/// R = P V: the mass each state sends into each class.
inline Matrix class_row_mass(const StochasticMatrix& p, const Partition& g) {
  if (p.size() != g.n()) throw Error(Errc::kDimensionMismatch, "partition size does not match chain");
  Matrix r(g.n(), g.m());
  for (std::size_t i = 0; i < g.n(); ++i)
    for (std::size_t j = 0; j < g.n(); ++j) r(i, g.class_of(j)) += p(i, j);
  return r;
}

inline AggregatedChain aggregate(const MarkovChain& x, const Partition& g) {
  if (x.size() != g.n()) throw Error(Errc::kDimensionMismatch, "partition size does not match chain");
  const auto& mu = x.mu();
  const auto& p = x.P();
  const std::size_t m = g.m();
  Matrix q(m, m);
  std::vector<double> nu(m, 0.0);
  for (std::size_t i = 0; i < g.n(); ++i) {
    const std::size_t k = g.class_of(i);
    nu[k] += mu[i];
    for (std::size_t j = 0; j < g.n(); ++j) q(k, g.class_of(j)) += mu[i] * p(i, j);
  }
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t l = 0; l < m; ++l) q(k, l) /= nu[k];
  return {StochasticMatrix(std::move(q)), Distribution(std::move(nu)), g};
}

/// Strong lumpability: rows of P V must agree within every class.
inline LumpabilityResult lumpability_check(const StochasticMatrix& p, const Partition& g,
                                           double tol = kDefaultLumpTolerance) {
  const Matrix r = class_row_mass(p, g);
  double worst = 0.0;
  for (std::size_t h = 0; h < g.m(); ++h) {
    const auto& members = g.members(h);
    for (std::size_t l = 0; l < g.m(); ++l) {
      double lo = r(members.front(), l), hi = lo;
      for (std::size_t i : members) {
        lo = std::min(lo, r(i, l));
        hi = std::max(hi, r(i, l));
      }
      worst = std::max(worst, hi - lo);
    }
  }
  return {worst <= tol, worst};
}

/// max |V U^zeta P V - P V|; zero for every positive zeta iff P is lumpable.
inline double lumpability_residual(const StochasticMatrix& p, const Partition& g,
                                   const Distribution& zeta) {
  const Matrix v = build_V(g);
  const Matrix pv = p.matrix() * v;
  return max_abs_diff(v * (build_U(g, zeta) * pv), pv);
}

inline std::string format_lumpability(const LumpabilityResult& r) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "lumpable=%s max_violation=%.12g", r.lumpable ? "true" : "false",
                r.max_violation);
  return buf;
}

/// P' = V Q U^pi: split each aggregated transition by pi within the target class.
inline LiftedChain pi_lift(const AggregatedChain& y, const Partition& g, const Distribution& pi) {
  const Matrix u = build_U(g, pi);
  Matrix out(g.n(), g.n());
  for (std::size_t i = 0; i < g.n(); ++i)
    for (std::size_t j = 0; j < g.n(); ++j)
      out(i, j) = y.Q(g.class_of(i), g.class_of(j)) * u(g.class_of(j), j);
  return {StochasticMatrix(std::move(out)), LiftMethod::kPi, pi};
}

/// Splits Q_{g(i)g(j)} over the target class in proportion to P's own row
/// profile; a class the row never reaches gets a uniform split.
inline LiftedChain p_lift(const MarkovChain& x, const AggregatedChain& y, const Partition& g) {
  const AggregatedChain expected = aggregate(x, g);
  if (!(y.partition == g) ||
      max_abs_diff(y.Q.matrix(), expected.Q.matrix()) > kAggregationMatchTolerance)
    throw Error(Errc::kAggregationMismatch,
                "aggregated chain does not match the optimal aggregation of X under g");
  const auto& p = x.P();
  const Matrix r = class_row_mass(p, g);
  Matrix out(g.n(), g.n());
  for (std::size_t i = 0; i < g.n(); ++i)
    for (std::size_t j = 0; j < g.n(); ++j) {
      const std::size_t l = g.class_of(j);
      const double q = y.Q(g.class_of(i), l);
      const double mass = r(i, l);
      out(i, j) = mass > kZeroRowMass ? p(i, j) / mass * q
                                      : q / static_cast<double>(g.members(l).size());
    }
  return {StochasticMatrix(std::move(out)), LiftMethod::kP, std::nullopt};
}

inline LiftedChain p_lift(const MarkovChain& x, const Partition& g) {
  return p_lift(x, aggregate(x, g), g);
}

}  // namespace markagg
