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


#include "entsum/progression.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "entsum/errors.hpp"

namespace entsum {

void CosetProgression::validate() const {
  if (subgroup.empty()) throw PreconditionError("H must contain at least the identity");
  if (!belongs(group, base)) throw PreconditionError("base point outside the group");
  if (steps.size() != lengths.size()) throw PreconditionError("steps and lengths differ in count");
  for (const auto& r : steps) {
    if (!belongs(group, r)) throw PreconditionError("step outside the group");
  }
  for (auto n : lengths) {
    if (n <= 0) throw PreconditionError("progression lengths must be positive");
  }
  if (!is_subgroup(group, subgroup)) throw PreconditionError("H is not a subgroup");
}

std::int64_t CosetProgression::nominal_size() const {
  auto n = static_cast<std::int64_t>(subgroup.size());
  for (auto len : lengths) n = checked_mul(n, len);
  return n;
}

namespace {

// Calls fn(h_index, counts, element) for every h in H and 0 <= n_i < limits[i].
template <typename Fn>
void for_each_sum(const CosetProgression& cp, const std::vector<std::int64_t>& limits,
                  std::size_t cap, Fn&& fn) {
  std::int64_t total = static_cast<std::int64_t>(cp.subgroup.size());
  for (auto l : limits) total = checked_mul(total, l);
  if (total > static_cast<std::int64_t>(cap)) {
    throw InstanceTooLargeError("progression enumeration of " + std::to_string(total) +
                                " sums exceeds the cap " + std::to_string(cap));
  }
  const std::size_t d = limits.size();
  std::vector<std::int64_t> counts(d, 0);
  GroupElement offset = cp.base;
  while (true) {
    for (std::size_t h = 0; h < cp.subgroup.size(); ++h) {
      fn(h, counts, add(cp.group, offset, cp.subgroup[h]));
    }
    std::size_t i = d;
    while (i-- > 0) {
      if (++counts[i] < limits[i]) {
        offset = add(cp.group, offset, cp.steps[i]);
        break;
      }
      offset = sub(cp.group, offset, scale(cp.group, counts[i] - 1, cp.steps[i]));
      counts[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) return;
  }
}

}  // namespace

std::vector<GroupElement> enumerate(const CosetProgression& cp, std::size_t cap) {
  cp.validate();
  std::set<GroupElement> out;
  for_each_sum(cp, cp.lengths, cap,
               [&](std::size_t, const std::vector<std::int64_t>&, GroupElement e) {
                 out.insert(std::move(e));
               });
  return {out.begin(), out.end()};
}

bool is_t_proper(const CosetProgression& cp, const Rational& t, std::size_t cap) {
  cp.validate();
  if (t <= 0) throw PreconditionError("t must be positive");
  std::vector<std::int64_t> limits;
  for (auto n : cp.lengths) {
    // number of integers in [0, tN)
    BigInt c;
    const Rational tn = t * Rational(BigInt(static_cast<long>(n)));
    mpz_cdiv_q(c.get_mpz_t(), tn.get_num_mpz_t(), tn.get_den_mpz_t());
    if (!c.fits_slong_p() || c.get_si() > static_cast<long>(cap)) {
      throw InstanceTooLargeError("dilated progression exceeds the cap");
    }
    limits.push_back(c.get_si());
  }
  std::set<GroupElement> seen;
  bool distinct = true;
  for_each_sum(cp, limits, cap, [&](std::size_t, const std::vector<std::int64_t>&, GroupElement e) {
    if (distinct && !seen.insert(std::move(e)).second) distinct = false;
  });
  return distinct;
}

bool is_proper(const CosetProgression& cp, std::size_t cap) { return is_t_proper(cp, 1, cap); }

Dist uniform_on(const CosetProgression& cp, std::size_t cap) {
  return Dist::uniform(cp.group, enumerate(cp, cap));
}

GroupSpec BoxEmbedding::box_group() const {
  auto moduli = cp_.group.moduli();
  moduli.insert(moduli.end(), cp_.rank(), 0);
  return GroupSpec(std::move(moduli));
}

GroupElement BoxEmbedding::forward(const GroupElement& box_point) const {
  const std::size_t r = cp_.group.rank();
  if (box_point.size() != r + cp_.rank()) throw IncompatibleGroupError("box point has wrong rank");
  GroupElement out = add(cp_.group, cp_.base, std::span(box_point).first(r));
  for (std::size_t i = 0; i < cp_.rank(); ++i) {
    out = add(cp_.group, out, scale(cp_.group, box_point[r + i], cp_.steps[i]));
  }
  return out;
}

const GroupElement& BoxEmbedding::backward(const GroupElement& image) const {
  if (!proper_) throw PreconditionError("backward lookup needs a proper progression");
  auto it = preimage_.find(image);
  if (it == preimage_.end()) throw PreconditionError("element outside H + P: " + to_string(image));
  return box_points_[it->second];
}

Dist BoxEmbedding::pullback(const Dist& p) const {
  if (p.group() != cp_.group) throw IncompatibleGroupError("pullback across groups");
  std::vector<Atom> atoms;
  for (const auto& [x, m] : p.atoms()) atoms.emplace_back(backward(x), m);
  return Dist::from_atoms(box_group(), std::move(atoms));
}

Dist BoxEmbedding::pushforward(const Dist& box_dist) const {
  if (box_dist.group() != box_group()) throw IncompatibleGroupError("pushforward across groups");
  std::vector<Atom> atoms;
  for (const auto& [b, m] : box_dist.atoms()) atoms.emplace_back(forward(b), m);
  return Dist::from_atoms(cp_.group, std::move(atoms));
}

BoxEmbedding box_embedding(const CosetProgression& cp, bool proper_required, std::size_t cap) {
  cp.validate();
  BoxEmbedding e;
  e.cp_ = cp;
  e.proper_ = true;
  for_each_sum(cp, cp.lengths, cap,
               [&](std::size_t h, const std::vector<std::int64_t>& counts, GroupElement image) {
                 GroupElement point = cp.subgroup[h];
                 point.insert(point.end(), counts.begin(), counts.end());
                 if (!e.preimage_.emplace(image, e.box_points_.size()).second) e.proper_ = false;
                 e.box_points_.push_back(std::move(point));
                 e.images_.push_back(std::move(image));
               });
  if (proper_required && !e.proper_) {
    throw PreconditionError("coset progression is not proper");
  }
  return e;
}

}  // namespace entsum
