#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "markagg/aggregation.hpp"
#include "markagg/error.hpp"
#include "markagg/info_metrics.hpp"
#include "markagg/markov_core.hpp"
#include "markagg/partitions.hpp"

namespace markagg {

enum class Criterion { kLossX, kPLiftKldr };
enum class SearchMethod { kAib, kExhaustive };

/// How a fixed class takes part in the search. kFrozen keeps it as exactly
/// one final class; kMergeable only pre-merges it.
enum class FixedMode { kFrozen, kMergeable };

struct SearchResult {
  Partition best;
  double value = 0.0;
};

struct SweepRecord {
  std::size_t m = 0;
  Partition partition;
  double kldr_p = 0.0;
  double kldr_mu = 0.0;
  double loss_x = 0.0;
  bool lumpable = false;
  bool local_min = false;  // strict local minimum of kldr_p along the sweep
};

namespace detail {

// Agglomerative state: per class the joint row J_c(j) = sum_{i in c} mu_i P_ij
// and the class mass. Classes are kept in canonical order (by smallest member).
class Agglomeration {
 public:
  Agglomeration(const MarkovChain& x, const std::optional<FixedClass>& fixed, FixedMode mode)
      : n_(x.size()) {
    std::vector<std::size_t> start(n_);
    std::vector<char> in_fixed(n_, 0);
    if (fixed) {
      const FixedClass f = normalize_fixed(*fixed, n_);
      for (std::size_t s : f.states) in_fixed[s] = 1;
    }
    std::size_t fixed_anchor = SIZE_MAX;
    for (std::size_t i = 0; i < n_; ++i) {
      if (in_fixed[i]) {
        if (fixed_anchor == SIZE_MAX) fixed_anchor = i;
        start[i] = fixed_anchor;
      } else {
        start[i] = i;
      }
    }
    for (std::size_t i = 0; i < n_; ++i) {
      if (start[i] != i) {
        auto it = std::find_if(classes_.begin(), classes_.end(),
                               [&](const Cluster& c) { return c.members.front() == start[i]; });
        absorb(*it, x, i);
        continue;
      }
      Cluster c;
      c.joint.assign(n_, 0.0);
      absorb(c, x, i);
      c.frozen = fixed && mode == FixedMode::kFrozen && in_fixed[i];
      classes_.push_back(std::move(c));
    }
  }

  std::size_t size() const { return classes_.size(); }

  std::size_t min_reachable() const {
    const bool any_frozen = std::any_of(classes_.begin(), classes_.end(),
                                        [](const Cluster& c) { return c.frozen; });
    return any_frozen && classes_.size() > 1 ? 2 : 1;
  }

  Partition partition() const {
    std::vector<std::size_t> a(n_);
    for (std::size_t c = 0; c < classes_.size(); ++c)
      for (std::size_t s : classes_[c].members) a[s] = c;
    return Partition::from_canonical(std::move(a), classes_.size());
  }

  /// Performs the cheapest admissible merge. Ties go to the smallest
  /// (a, b) pair in canonical class order.
  void merge_best() {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_a = 0, best_b = 0;
    for (std::size_t a = 0; a < classes_.size(); ++a) {
      if (classes_[a].frozen) continue;
      for (std::size_t b = a + 1; b < classes_.size(); ++b) {
        if (classes_[b].frozen) continue;
        const double cost = merge_cost(classes_[a], classes_[b]);
        if (cost < best) {
          best = cost;
          best_a = a;
          best_b = b;
        }
      }
    }
    if (!std::isfinite(best)) throw Error(Errc::kBadTarget, "no admissible merge left");
    Cluster& dst = classes_[best_a];
    Cluster& src = classes_[best_b];
    for (std::size_t j = 0; j < n_; ++j) dst.joint[j] += src.joint[j];
    dst.mass += src.mass;
    dst.members.insert(dst.members.end(), src.members.begin(), src.members.end());
    std::sort(dst.members.begin(), dst.members.end());
    classes_.erase(classes_.begin() + static_cast<std::ptrdiff_t>(best_b));
    // best_a < best_b and dst keeps its smallest member, so order is preserved.
  }

 private:
  struct Cluster {
    std::vector<std::size_t> members;
    std::vector<double> joint;
    double mass = 0.0;
    bool frozen = false;
  };

  void absorb(Cluster& c, const MarkovChain& x, std::size_t state) {
    c.members.push_back(state);
    c.mass += x.mu()[state];
    for (std::size_t j = 0; j < n_; ++j) c.joint[j] += x.mu()[state] * x.P()(state, j);
  }

  // Increase of H(X_n | Y_{n-1}) when merging a and b: the mass-weighted
  // Jensen-Shannon divergence of their next-state conditionals.
  double merge_cost(const Cluster& a, const Cluster& b) const {
    const double wab = a.mass + b.mass;
    double cost = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      const double ja = a.joint[j], jb = b.joint[j];
      const double merged = (ja + jb) / wab;
      if (ja > 0.0) cost += ja * std::log2((ja / a.mass) / merged);
      if (jb > 0.0) cost += jb * std::log2((jb / b.mass) / merged);
    }
    return std::max(0.0, cost);
  }

  std::size_t n_;
  std::vector<Cluster> classes_;
};

}  // namespace detail

/// Every partition visited by one agglomeration run, from the starting
/// partition (identity, fixed set pre-merged) down to the coarsest reachable.
inline std::vector<Partition> aib_merge_chain(const MarkovChain& x,
                                              const std::optional<FixedClass>& fixed = {},
                                              FixedMode mode = FixedMode::kFrozen,
                                              std::size_t stop_at = 1) {
  detail::Agglomeration agg(x, fixed, mode);
  std::vector<Partition> chain{agg.partition()};
  const std::size_t floor = std::max(stop_at, agg.min_reachable());
  while (agg.size() > floor) {
    agg.merge_best();
    chain.push_back(agg.partition());
  }
  return chain;
}

/// Greedy agglomerative minimisation of the relaxed criterion
/// H(X_n | Y_{n-1}) - H(X_n | X_{n-1}).
inline Partition aib_greedy(const MarkovChain& x, std::size_t target_m,
                            const std::optional<FixedClass>& fixed = {},
                            FixedMode mode = FixedMode::kFrozen) {
  detail::Agglomeration agg(x, fixed, mode);
  if (target_m < agg.min_reachable() || target_m > agg.size())
    throw Error(Errc::kBadTarget, "target m = " + std::to_string(target_m) + " outside " +
                                      std::to_string(agg.min_reachable()) + ".." +
                                      std::to_string(agg.size()));
  while (agg.size() > target_m) agg.merge_best();
  return agg.partition();
}

inline double criterion_value(const MarkovChain& x, const Partition& g, Criterion c) {
  switch (c) {
    case Criterion::kLossX: return relevant_loss_X(x, g).loss;
    case Criterion::kPLiftKldr: return kldr_markov(x, p_lift(x, g).Phat);
  }
  return 0.0;
}

inline SearchResult exhaustive_search(const MarkovChain& x, std::size_t m, Criterion criterion,
                                      const std::optional<FixedClass>& fixed = {}) {
  std::optional<SearchResult> best;
  for_each_partition(x.size(), m, fixed, [&](const Partition& g) {
    const double v = criterion_value(x, g, criterion);
    if (!best || v < best->value) best = SearchResult{g, v};
  });
  if (!best) throw Error(Errc::kBadTarget, "no partition satisfies the constraints");
  return *best;
}

inline SweepRecord make_sweep_record(const MarkovChain& x, const Partition& g) {
  const MetricReport r = evaluate_partition(x, g);
  return {g.m(), g, r.kldr_p, r.kldr_mu, r.loss_x, r.lumpable, false};
}

inline void flag_local_minima(std::vector<SweepRecord>& records) {
  for (std::size_t k = 1; k + 1 < records.size(); ++k)
    records[k].local_min = records[k].kldr_p < records[k - 1].kldr_p &&
                           records[k].kldr_p < records[k + 1].kldr_p;
}

/// One record per m from m_from down to m_to. The AIB sweep reuses a single
/// agglomeration run, so its partitions are nested.
inline std::vector<SweepRecord> sweep(const MarkovChain& x, std::size_t m_from, std::size_t m_to,
                                      SearchMethod method,
                                      const std::optional<FixedClass>& fixed = {},
                                      FixedMode mode = FixedMode::kFrozen,
                                      Criterion criterion = Criterion::kPLiftKldr) {
  if (m_to < 1 || m_to > m_from || m_from > x.size())
    throw Error(Errc::kBadTarget, "need 1 <= to <= from <= n");
  std::vector<SweepRecord> out;
  if (method == SearchMethod::kAib) {
    const auto chain = aib_merge_chain(x, fixed, mode, m_to);
    if (chain.front().m() < m_from || chain.back().m() > m_to)
      throw Error(Errc::kBadTarget, "agglomeration reaches m in " +
                                        std::to_string(chain.back().m()) + ".." +
                                        std::to_string(chain.front().m()) + " only");
    for (const auto& g : chain)
      if (g.m() <= m_from && g.m() >= m_to) out.push_back(make_sweep_record(x, g));
  } else {
    for (std::size_t m = m_from; m >= m_to; --m) {
      out.push_back(make_sweep_record(x, exhaustive_search(x, m, criterion, fixed).best));
      if (m == 1) break;
    }
  }
  flag_local_minima(out);
  return out;
}

inline std::string format_sweep_tsv(const std::vector<SweepRecord>& records) {
  std::string out = "m\tkldr_p\tkldr_mu\tloss_x\tlumpable\tpartition\n";
  char buf[160];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%zu\t%.17g\t%.17g\t%.17g\t%s\t", r.m, r.kldr_p, r.kldr_mu,
                  r.loss_x, r.lumpable ? "true" : "false");
    out += buf;
    const auto labels = r.partition.labels();
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(labels[i]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace markagg
