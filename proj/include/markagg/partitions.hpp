#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "markagg/error.hpp"
#include "markagg/markov_core.hpp"
#include "markagg/matrix.hpp"

namespace markagg {

inline constexpr std::size_t kMaxEnumerationStates = 14;

/// Surjective map g from n states onto m classes, held in canonical form:
/// classes are numbered by first occurrence. Class indices are 0-based in
/// memory; labels() gives the 1-based labels used in files.
class Partition {
 public:
  Partition() = default;

  std::size_t n() const noexcept { return assignment_.size(); }
  std::size_t m() const noexcept { return m_; }
  std::size_t class_of(std::size_t state) const { return assignment_[state]; }
  std::span<const std::size_t> assignment() const noexcept { return assignment_; }

  std::vector<int> labels() const {
    std::vector<int> out(assignment_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<int>(assignment_[i]) + 1;
    return out;
  }

  const std::vector<std::size_t>& members(std::size_t cls) const { return members_[cls]; }

  static Partition identity(std::size_t n) {
    std::vector<std::size_t> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = i;
    return Partition(std::move(a), n);
  }

  static Partition single_class(std::size_t n) { return Partition(std::vector<std::size_t>(n, 0), 1); }

  /// Wraps 0-based class indices that are already canonical with m classes.
  static Partition from_canonical(std::vector<std::size_t> a, std::size_t m) {
    std::size_t next = 0;
    for (std::size_t c : a) {
      if (c > next) throw Error(Errc::kParse, "assignment is not in canonical form");
      if (c == next) ++next;
    }
    if (next != m) throw Error(Errc::kEmptyClass, "assignment does not use exactly m classes");
    return Partition(std::move(a), m);
  }

  friend bool operator==(const Partition& a, const Partition& b) {
    return a.assignment_ == b.assignment_;
  }

 private:
  Partition(std::vector<std::size_t> a, std::size_t m) : assignment_(std::move(a)), m_(m) {
    members_.assign(m_, {});
    for (std::size_t i = 0; i < assignment_.size(); ++i) members_[assignment_[i]].push_back(i);
  }

  std::vector<std::size_t> assignment_;
  std::size_t m_ = 0;
  std::vector<std::vector<std::size_t>> members_;
};

/// Relabels classes in order of first occurrence. Labels must be positive
/// and every label between 1 and the largest one used must have members.
/// Relabels by first occurrence. Gaps in the raw labels are compressed away;
/// with `declared_m`, labels must lie in 1..declared_m and each must be used.
inline Partition canonicalize(std::span<const int> raw, std::optional<std::size_t> declared_m = {}) {
  if (raw.empty()) throw Error(Errc::kEmptyClass, "partition has no states");
  for (int l : raw)
    if (l < 1) throw Error(Errc::kParse, "class labels must be positive, got " + std::to_string(l));
  const int max_label = *std::max_element(raw.begin(), raw.end());
  if (declared_m) {
    if (static_cast<std::size_t>(max_label) > *declared_m)
      throw Error(Errc::kParse, "label " + std::to_string(max_label) + " exceeds declared class count " +
                                    std::to_string(*declared_m));
    std::vector<char> seen(*declared_m + 1, 0);
    for (int l : raw) seen[static_cast<std::size_t>(l)] = 1;
    for (std::size_t l = 1; l <= *declared_m; ++l)
      if (!seen[l]) throw Error(Errc::kEmptyClass, "class " + std::to_string(l) + " has no members");
  }

  std::vector<std::size_t> relabel(static_cast<std::size_t>(max_label) + 1, SIZE_MAX);
  std::vector<std::size_t> a(raw.size());
  std::size_t next = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto& r = relabel[static_cast<std::size_t>(raw[i])];
    if (r == SIZE_MAX) r = next++;
    a[i] = r;
  }
  return Partition::from_canonical(std::move(a), next);
}

inline Partition canonicalize(std::initializer_list<int> raw) {
  return canonicalize(std::span<const int>(raw.begin(), raw.size()));
}

/// Builds a partition from 0-based class indices (any labelling).
inline Partition partition_from_classes(std::span<const std::size_t> classes) {
  std::vector<int> raw(classes.size());
  for (std::size_t i = 0; i < classes.size(); ++i) raw[i] = static_cast<int>(classes[i]) + 1;
  return canonicalize(raw);
}

/// V_ij = 1 iff g(i) = j.
inline Matrix build_V(const Partition& g) {
  Matrix v(g.n(), g.m());
  for (std::size_t i = 0; i < g.n(); ++i) v(i, g.class_of(i)) = 1.0;
  return v;
}

/// U_ij = pi_j / pi(class i) for j in class i, zero elsewhere.
inline Matrix build_U(const Partition& g, const Distribution& pi) {
  if (pi.size() != g.n())
    throw Error(Errc::kDimensionMismatch, "pi length does not match partition");
  if (!pi.strictly_positive()) throw Error(Errc::kNonPositivePi, "pi must be strictly positive");
  Matrix u(g.m(), g.n());
  for (std::size_t c = 0; c < g.m(); ++c) {
    double mass = 0.0;
    for (std::size_t j : g.members(c)) mass += pi[j];
    for (std::size_t j : g.members(c)) u(c, j) = pi[j] / mass;
  }
  return u;
}

/// A set of states (0-based) that must form exactly one class.
struct FixedClass {
  std::vector<std::size_t> states;
};

/// Sorts, dedupes and range-checks a fixed class against n states.
inline FixedClass normalize_fixed(FixedClass f, std::size_t n) {
  auto& s = f.states;
  if (s.empty()) throw Error(Errc::kInvalidFixedSet, "fixed class is empty");
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  if (s.back() >= n)
    throw Error(Errc::kInvalidFixedSet, "fixed state " + std::to_string(s.back() + 1) +
                                            " out of range 1.." + std::to_string(n));
  return f;
}

/// Calls `visit` for every canonical partition of n states into exactly m
/// classes, in lexicographic restricted-growth-string order. With `fixed`,
/// only partitions in which the fixed set is exactly one class are visited.
inline void for_each_partition(std::size_t n, std::size_t m,
                               const std::optional<FixedClass>& fixed,
                               const std::function<void(const Partition&)>& visit) {
  if (n > kMaxEnumerationStates)
    throw Error(Errc::kTooLarge, "enumeration is capped at n = " +
                                     std::to_string(kMaxEnumerationStates));
  if (m < 1 || m > n)
    throw Error(Errc::kBadTarget, "need 1 <= m <= n, got m = " + std::to_string(m));

  std::vector<char> in_fixed(n, 0);
  std::size_t first_fixed = SIZE_MAX;
  if (fixed) {
    const FixedClass f = normalize_fixed(*fixed, n);
    for (std::size_t s : f.states) in_fixed[s] = 1;
    first_fixed = f.states.front();
  }

  std::vector<std::size_t> a(n, 0);
  std::size_t fixed_label = SIZE_MAX;

  // used = number of classes opened among positions < i
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t used) {
    if (i == n) {
      if (used == m) visit(Partition::from_canonical(a, m));
      return;
    }
    const std::size_t remaining = n - i;
    for (std::size_t c = 0; c <= used && c < m; ++c) {
      const std::size_t after = c == used ? used + 1 : used;
      if (after + (remaining - 1) < m) continue;
      if (fixed) {
        if (i == first_fixed) {
          if (c != used) continue;
        } else if (in_fixed[i]) {
          if (c != fixed_label) continue;
        } else if (c == fixed_label) {
          continue;
        }
      }
      a[i] = c;
      if (i == first_fixed) fixed_label = c;
      rec(i + 1, after);
      if (i == first_fixed) fixed_label = SIZE_MAX;
    }
  };
  rec(0, 0);
}

inline std::vector<Partition> enumerate_partitions(std::size_t n, std::size_t m,
                                                   const std::optional<FixedClass>& fixed = {}) {
  std::vector<Partition> out;
  for_each_partition(n, m, fixed, [&](const Partition& p) { out.push_back(p); });
  return out;
}

}  // namespace markagg
