// Copyright 2026 The entsum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "entsum/group.hpp"
#include "entsum/rational.hpp"

namespace entsum {

// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double v) noexcept;
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

using Atom = std::pair<GroupElement, Rational>;

/**
 * Finitely supported probability distribution on a GroupSpec with exact
 * rational masses.  Atoms are sorted by element and every stored mass is
 * strictly positive; the masses sum to exactly one.
 */
class Dist {
 public:
  Dist() = default;

  // Reduces coordinates, merges duplicates, drops zero masses.  Throws
  // PreconditionError for negative masses or when the total is not 1.
  static Dist from_atoms(GroupSpec group, std::vector<Atom> atoms);
  // Same, but renormalizes a positive total instead of rejecting it.
  static Dist normalized(GroupSpec group, std::vector<Atom> atoms);

  static Dist point(GroupSpec group, GroupElement x);
  static Dist uniform(GroupSpec group, const std::vector<GroupElement>& support);

  const GroupSpec& group() const noexcept { return group_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  Rational mass(std::span<const std::int64_t> x) const;
  std::vector<GroupElement> support() const;
  bool deterministic() const noexcept { return atoms_.size() == 1; }

  Dist translate(std::span<const std::int64_t> a) const;
  Dist negate() const;

  friend bool operator==(const Dist&, const Dist&) = default;

 private:
  GroupSpec group_;
  std::vector<Atom> atoms_;
};

enum class Sign { kPlus, kMinus };

// Shannon entropy in nats.
double entropy(const Dist& p);

// Law of X + Y (or X - Y) for independent X ~ p, Y ~ q.
Dist convolve(const Dist& p, const Dist& q, Sign sign = Sign::kPlus);
// Law of X_1 + ... + X_k for k >= 1 independent copies.
Dist convolve_power(const Dist& p, int k);

// Sum over x of |p(x) - q(x)|; range [0, 2].
double tv_distance(const Dist& p, const Dist& q);
Rational tv_distance_exact(const Dist& p, const Dist& q);

struct DistComparison {
  bool equal = false;
  bool incompatible = false;
};
DistComparison compare(const Dist& p, const Dist& q);
// Exact equality of laws; false for distributions on different groups.
bool dist_equal(const Dist& p, const Dist& q);

Dist condition_on(const Dist& p, const std::function<bool(std::span<const std::int64_t>)>& event);

// Sum over x of p(x)^2.
Rational collision_mass(const Dist& p);

/**
 * Finitely supported joint law of k >= 1 group-valued coordinates.  Keys are
 * the concatenation of the coordinate vectors; atoms sorted by key.
 */
class JointDist {
 public:
  using Key = std::vector<std::int64_t>;
  using JointAtom = std::pair<Key, Rational>;

  JointDist() = default;

  static JointDist from_atoms(std::vector<GroupSpec> groups, std::vector<JointAtom> atoms);
  static JointDist from_tuples(std::vector<GroupSpec> groups,
                               const std::vector<std::pair<std::vector<GroupElement>, Rational>>& atoms);
  static JointDist from_dist(const Dist& p);
  // Independent coupling of the given laws.
  static JointDist product(const std::vector<Dist>& laws);

  std::size_t arity() const noexcept { return groups_.size(); }
  const std::vector<GroupSpec>& groups() const noexcept { return groups_; }
  const GroupSpec& group(std::size_t i) const { return groups_.at(i); }
  const std::vector<JointAtom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  std::span<const std::int64_t> component(const Key& key, std::size_t i) const;
  Rational mass(const Key& key) const;

  JointDist marginal(const std::vector<std::size_t>& coords) const;
  Dist marginal_dist(std::size_t coord) const;

  // Pushforward under a map producing a concatenated key for `out_groups`.
  JointDist map(std::vector<GroupSpec> out_groups,
                const std::function<Key(const JointDist&, const Key&)>& fn) const;

  // Appends the coordinate  a (+|-) b  (both must share a group).
  JointDist with_sum(std::size_t a, std::size_t b, Sign sign = Sign::kPlus) const;

  friend bool operator==(const JointDist&, const JointDist&) = default;

 private:
  std::vector<GroupSpec> groups_;
  std::vector<std::size_t> offsets_;
  std::vector<JointAtom> atoms_;

  void build_offsets();
};

double joint_entropy(const JointDist& j, const std::vector<std::size_t>& coords);
double joint_entropy(const JointDist& j);

// Ent(target | given) evaluated as  sum_y p(y) Ent(target | given = y).
// Empty `given` yields the marginal entropy of `target`.
double conditional_entropy(const JointDist& j, const std::vector<std::size_t>& target,
                           const std::vector<std::size_t>& given);

// Restricts to the event that coordinate `coord` satisfies `event`.
JointDist condition_on_event(const JointDist& j, std::size_t coord,
                             const std::function<bool(std::span<const std::int64_t>)>& event);

/**
 * Conditionally independent gluing: the result carries every coordinate of
 * `a` followed by the non-shared coordinates of `b`, and its law is
 * a(k) b(k') / P(shared = s).  The shared marginals must agree exactly.
 */
JointDist glue(const JointDist& a, const std::vector<std::size_t>& a_shared, const JointDist& b,
               const std::vector<std::size_t>& b_shared);

// For j over (X, Y) and pivot in {0, 1}: the law of (X1, X2, pivot), two
// conditionally independent trials of the other coordinate.
JointDist ci_trials(const JointDist& j, std::size_t pivot);

// Exact check that coordinates `a` and `b` are conditionally independent
// given `given`.
bool conditionally_independent(const JointDist& j, const std::vector<std::size_t>& a,
                               const std::vector<std::size_t>& b,
                               const std::vector<std::size_t>& given);

// True iff the `from` coordinates determine the `to` coordinates.
bool determines(const JointDist& j, const std::vector<std::size_t>& from,
                const std::vector<std::size_t>& to);

}  // namespace entsum
