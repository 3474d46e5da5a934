#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cctype>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "markagg/error.hpp"
#include "markagg/markov_core.hpp"
#include "markagg/matrix.hpp"
#include "markagg/partitions.hpp"

namespace markagg {

using CountVector = std::vector<std::int64_t>;

struct Reaction {
  CountVector consumed;  // substrate coefficients, one per species
  CountVector produced;  // product coefficients
  double rate = 0.0;
};

/// Well-mixed reaction system under mass-action kinetics.
class ReactionNetwork {
 public:
  ReactionNetwork(std::vector<std::string> species, std::vector<Reaction> reactions,
                  CountVector initial)
      : species_(std::move(species)), reactions_(std::move(reactions)), initial_(std::move(initial)) {
    std::set<std::string> unique(species_.begin(), species_.end());
    if (unique.size() != species_.size()) throw Error(Errc::kParse, "species names must be unique");
    if (initial_.size() != species_.size())
      throw Error(Errc::kDimensionMismatch, "initial state needs one count per species");
    for (auto v : initial_)
      if (v < 0) throw Error(Errc::kParse, "initial counts must be non-negative");
    for (std::size_t k = 0; k < reactions_.size(); ++k) {
      const auto& r = reactions_[k];
      if (r.consumed.size() != species_.size() || r.produced.size() != species_.size())
        throw Error(Errc::kDimensionMismatch,
                    "reaction " + std::to_string(k + 1) + " needs one coefficient per species");
      for (std::size_t i = 0; i < species_.size(); ++i)
        if (r.consumed[i] < 0 || r.produced[i] < 0)
          throw Error(Errc::kParse, "stoichiometric coefficients must be non-negative");
      if (!(r.rate > 0.0) || !std::isfinite(r.rate))
        throw Error(Errc::kParse, "rate constant of reaction " + std::to_string(k + 1) +
                                      " must be positive");
    }
  }

  const std::vector<std::string>& species() const noexcept { return species_; }
  const std::vector<Reaction>& reactions() const noexcept { return reactions_; }
  const CountVector& initial_state() const noexcept { return initial_; }

  std::size_t species_index(const std::string& name) const {
    auto it = std::find(species_.begin(), species_.end(), name);
    if (it == species_.end()) throw Error(Errc::kParse, "unknown species '" + name + "'");
    return static_cast<std::size_t>(it - species_.begin());
  }

 private:
  std::vector<std::string> species_;
  std::vector<Reaction> reactions_;
  CountVector initial_;
};

struct Generator {
  std::vector<CountVector> states;
  Matrix R;
};

namespace detail {

// C(n, k) exactly in 64 bits while it fits, otherwise via lgamma.
inline double binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < k) return 0.0;
  k = std::min(k, n - k);
  std::uint64_t acc = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    std::uint64_t next;
    // acc * (n - k + i) / i stays integral at every step
    if (__builtin_mul_overflow(acc, static_cast<std::uint64_t>(n - k + i), &next))
      return std::exp(std::lgamma(static_cast<double>(n) + 1) -
                      std::lgamma(static_cast<double>(k) + 1) -
                      std::lgamma(static_cast<double>(n - k) + 1));
    acc = next / static_cast<std::uint64_t>(i);
  }
  return static_cast<double>(acc);
}

}  // namespace detail

/// lambda_k(x) = c_k prod_i C(x_i, nu_ik).
inline double propensity(const ReactionNetwork& net, const CountVector& state, std::size_t k) {
  const auto& r = net.reactions().at(k);
  if (state.size() != net.species().size())
    throw Error(Errc::kDimensionMismatch, "state needs one count per species");
  double a = r.rate;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (r.consumed[i] == 0) continue;
    if (state[i] < r.consumed[i]) return 0.0;
    a *= detail::binomial(state[i], r.consumed[i]);
  }
  return a;
}

inline CountVector apply_reaction(const Reaction& r, const CountVector& x) {
  CountVector y(x);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += r.produced[i] - r.consumed[i];
  return y;
}

/// Breadth-first closure of the initial state; FIFO frontier, reactions
/// expanded in index order.
inline std::vector<CountVector> enumerate_reachable(const ReactionNetwork& net, std::size_t cap) {
  if (cap < 1) throw Error(Errc::kBadTarget, "state cap must be at least 1");
  std::vector<CountVector> states{net.initial_state()};
  std::map<CountVector, std::size_t> index{{net.initial_state(), 0}};
  std::deque<std::size_t> frontier{0};
  while (!frontier.empty()) {
    const std::size_t s = frontier.front();
    frontier.pop_front();
    for (std::size_t k = 0; k < net.reactions().size(); ++k) {
      if (!(propensity(net, states[s], k) > 0.0)) continue;
      CountVector next = apply_reaction(net.reactions()[k], states[s]);
      if (index.count(next)) continue;
      if (states.size() >= cap)
        throw Error(Errc::kStateSpaceExceeded,
                    "reachable set exceeds cap of " + std::to_string(cap) + " states");
      index.emplace(next, states.size());
      frontier.push_back(states.size());
      states.push_back(std::move(next));
    }
  }
  return states;
}

inline Generator build_generator(const ReactionNetwork& net, std::vector<CountVector> states) {
  std::map<CountVector, std::size_t> index;
  for (std::size_t s = 0; s < states.size(); ++s) index.emplace(states[s], s);
  Matrix r(states.size(), states.size());
  for (std::size_t s = 0; s < states.size(); ++s) {
    for (std::size_t k = 0; k < net.reactions().size(); ++k) {
      const double a = propensity(net, states[s], k);
      if (!(a > 0.0)) continue;
      const CountVector next = apply_reaction(net.reactions()[k], states[s]);
      auto it = index.find(next);
      if (it == index.end())
        throw Error(Errc::kTargetNotInStateList,
                    "reaction " + std::to_string(k + 1) + " leaves the state list from state " +
                        std::to_string(s + 1));
      if (it->second == s) continue;  // zero change vector
      r(s, it->second) += a;
    }
    double out = 0.0;
    for (std::size_t t = 0; t < states.size(); ++t)
      if (t != s) out += r(s, t);
    r(s, s) = -out;
  }
  return {std::move(states), std::move(r)};
}

struct Uniformized {
  StochasticMatrix P;
  double lambda_used = 0.0;
};

/// P = R / lambda + I. Default lambda = max |R_ii| + 1.
inline Uniformized uniformize(const Generator& g, std::optional<double> lambda = {}) {
  double max_exit = 0.0;
  for (std::size_t s = 0; s < g.R.rows(); ++s) max_exit = std::max(max_exit, std::abs(g.R(s, s)));
  const double lam = lambda.value_or(max_exit + 1.0);
  if (!(lam > 0.0) || lam < max_exit)
    throw Error(Errc::kLambdaTooSmall, "uniformization constant must be positive and at least " +
                                           std::to_string(max_exit));
  Matrix p(g.R.rows(), g.R.cols());
  for (std::size_t s = 0; s < p.rows(); ++s)
    for (std::size_t t = 0; t < p.cols(); ++t)
      p(s, t) = g.R(s, t) / lam + (s == t ? 1.0 : 0.0);
  for (std::size_t s = 0; s < p.rows(); ++s) p(s, s) = std::max(p(s, s), 0.0);
  return {StochasticMatrix(std::move(p)), lam};
}

/// G0 <-> G1 (on c1, off c2), G1 + P0 -> G1 + P (c3), P -> P0 (c4), started
/// with the gene on and all n_p proteins present.
inline ReactionNetwork gene_expression_network(std::int64_t n_p, double c1 = 0.01, double c2 = 0.01,
                                               double c3 = 1.0, double c4 = 0.1) {
  // species order: G0 G1 P0 P
  std::vector<Reaction> reactions{
      {{1, 0, 0, 0}, {0, 1, 0, 0}, c1},
      {{0, 1, 0, 0}, {1, 0, 0, 0}, c2},
      {{0, 1, 1, 0}, {0, 1, 0, 1}, c3},
      {{0, 0, 0, 1}, {0, 0, 1, 0}, c4},
  };
  return ReactionNetwork({"G0", "G1", "P0", "P"}, std::move(reactions), {0, 1, 0, n_p});
}

/// State predicate `Name<op>value` with op one of > >= < <= ==, or the
/// alias `gene-on` for `G1>0`.
struct StatePredicate {
  std::size_t species = 0;
  std::string op;
  std::int64_t threshold = 0;

  bool operator()(const CountVector& x) const {
    const auto v = x[species];
    if (op == ">") return v > threshold;
    if (op == ">=") return v >= threshold;
    if (op == "<") return v < threshold;
    if (op == "<=") return v <= threshold;
    return v == threshold;
  }
};

inline StatePredicate parse_predicate(const ReactionNetwork& net, std::string expr) {
  expr.erase(std::remove_if(expr.begin(), expr.end(), [](unsigned char c) { return std::isspace(c); }),
             expr.end());
  if (expr == "gene-on") expr = "G1>0";
  for (const char* op : {">=", "<=", "==", ">", "<"}) {
    const auto pos = expr.find(op);
    if (pos == std::string::npos) continue;
    const std::string name = expr.substr(0, pos);
    const std::string value = expr.substr(pos + std::string(op).size());
    std::size_t used = 0;
    std::int64_t t = 0;
    try {
      t = std::stoll(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (name.empty() || value.empty() || used != value.size())
      throw Error(Errc::kParse, "malformed predicate '" + expr + "'");
    return {net.species_index(name), op, t};
  }
  throw Error(Errc::kParse, "malformed predicate '" + expr + "'");
}

inline FixedClass select_states(const std::vector<CountVector>& states, const StatePredicate& pred) {
  FixedClass f;
  for (std::size_t s = 0; s < states.size(); ++s)
    if (pred(states[s])) f.states.push_back(s);
  if (f.states.empty()) throw Error(Errc::kInvalidFixedSet, "predicate selects no state");
  return f;
}

}  // namespace markagg
