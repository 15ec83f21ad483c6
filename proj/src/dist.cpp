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

#include "entsum/dist.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "entsum/errors.hpp"

namespace entsum {

void CompensatedSum::add(double v) noexcept {
  const double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v)) {
    comp_ += (sum_ - t) + v;
  } else {
    comp_ += (v - t) + sum_;
  }
  sum_ = t;
}

namespace {

std::vector<Atom> canonical_atoms(const GroupSpec& group, std::vector<Atom> atoms) {
  std::map<GroupElement, Rational> acc;
  for (auto& [x, m] : atoms) {
    m.canonicalize();
    if (sgn(m) < 0) throw PreconditionError("negative probability mass");
    if (sgn(m) == 0) continue;
    acc[reduce(group, std::move(x))] += m;
  }
  std::vector<Atom> out;
  out.reserve(acc.size());
  for (auto& [x, m] : acc) out.emplace_back(x, std::move(m));
  return out;
}

void check_same_group(const GroupSpec& a, const GroupSpec& b) {
  if (a != b) {
    throw IncompatibleGroupError("distributions on " + a.to_string() + " and " + b.to_string());
  }
}

}  // namespace

Dist Dist::from_atoms(GroupSpec group, std::vector<Atom> atoms) {
  Dist d;
  d.atoms_ = canonical_atoms(group, std::move(atoms));
  d.group_ = std::move(group);
  Rational total = 0;
  for (const auto& a : d.atoms_) total += a.second;
  if (total != 1) {
    throw PreconditionError("distribution masses sum to " + to_string(total) + ", not 1");
  }
  return d;
}

Dist Dist::normalized(GroupSpec group, std::vector<Atom> atoms) {
  Dist d;
  d.atoms_ = canonical_atoms(group, std::move(atoms));
  d.group_ = std::move(group);
  Rational total = 0;
  for (const auto& a : d.atoms_) total += a.second;
  if (sgn(total) <= 0) throw PreconditionError("cannot normalize zero total mass");
  for (auto& a : d.atoms_) a.second /= total;
  return d;
}

Dist Dist::point(GroupSpec group, GroupElement x) {
  std::vector<Atom> atoms;
  atoms.emplace_back(std::move(x), Rational(1));
  return from_atoms(std::move(group), std::move(atoms));
}

Dist Dist::uniform(GroupSpec group, const std::vector<GroupElement>& support) {
  if (support.empty()) throw PreconditionError("uniform distribution on an empty set");
  std::map<GroupElement, int> distinct;
  for (const auto& x : support) distinct[reduce(group, x)] = 1;
  const Rational w = make_rational(1, static_cast<std::int64_t>(distinct.size()));
  std::vector<Atom> atoms;
  for (const auto& [x, unused] : distinct) atoms.emplace_back(x, w);
  return from_atoms(std::move(group), std::move(atoms));
}

Rational Dist::mass(std::span<const std::int64_t> x) const {
  const GroupElement key(x.begin(), x.end());
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), key,
                             [](const Atom& a, const GroupElement& k) { return a.first < k; });
  if (it != atoms_.end() && it->first == key) return it->second;
  return Rational(0);
}

std::vector<GroupElement> Dist::support() const {
  std::vector<GroupElement> out;
  out.reserve(atoms_.size());
  for (const auto& a : atoms_) out.push_back(a.first);
  return out;
}

Dist Dist::translate(std::span<const std::int64_t> a) const {
  std::vector<Atom> atoms;
  atoms.reserve(atoms_.size());
  for (const auto& [x, m] : atoms_) atoms.emplace_back(add(group_, x, a), m);
  return from_atoms(group_, std::move(atoms));
}

Dist Dist::negate() const {
  std::vector<Atom> atoms;
  atoms.reserve(atoms_.size());
  for (const auto& [x, m] : atoms_) atoms.emplace_back(neg(group_, x), m);
  return from_atoms(group_, std::move(atoms));
}

double entropy(const Dist& p) {
  CompensatedSum s;
  for (const auto& a : p.atoms()) s.add(f_of(a.second));
  return s.value();
}

Dist convolve(const Dist& p, const Dist& q, Sign sign) {
  check_same_group(p.group(), q.group());
  const auto& g = p.group();
  std::map<GroupElement, Rational> acc;
  for (const auto& [x, mx] : p.atoms()) {
    for (const auto& [y, my] : q.atoms()) {
      auto z = sign == Sign::kPlus ? add(g, x, y) : sub(g, x, y);
      acc[std::move(z)] += mx * my;
    }
  }
  std::vector<Atom> atoms;
  atoms.reserve(acc.size());
  for (auto& [z, m] : acc) atoms.emplace_back(z, std::move(m));
  return Dist::from_atoms(g, std::move(atoms));
}

Dist convolve_power(const Dist& p, int k) {
  if (k < 1) throw PreconditionError("convolution power must be at least 1");
  Dist out = p;
  for (int i = 1; i < k; ++i) out = convolve(out, p);
  return out;
}

Rational tv_distance_exact(const Dist& p, const Dist& q) {
  check_same_group(p.group(), q.group());
  Rational total = 0;
  auto i = p.atoms().begin();
  auto j = q.atoms().begin();
  while (i != p.atoms().end() || j != q.atoms().end()) {
    if (j == q.atoms().end() || (i != p.atoms().end() && i->first < j->first)) {
      total += i->second;
      ++i;
    } else if (i == p.atoms().end() || j->first < i->first) {
      total += j->second;
      ++j;
    } else {
      total += abs(Rational(i->second - j->second));
      ++i;
      ++j;
    }
  }
  return total;
}

double tv_distance(const Dist& p, const Dist& q) { return to_double(tv_distance_exact(p, q)); }

DistComparison compare(const Dist& p, const Dist& q) {
  if (p.group() != q.group()) return {false, true};
  return {p.atoms() == q.atoms(), false};
}

bool dist_equal(const Dist& p, const Dist& q) { return compare(p, q).equal; }

Dist condition_on(const Dist& p, const std::function<bool(std::span<const std::int64_t>)>& event) {
  std::vector<Atom> atoms;
  for (const auto& a : p.atoms()) {
    if (event(a.first)) atoms.push_back(a);
  }
  if (atoms.empty()) throw PreconditionError("conditioning on a zero-probability event");
  return Dist::normalized(p.group(), std::move(atoms));
}

Rational collision_mass(const Dist& p) {
  Rational s = 0;
  for (const auto& a : p.atoms()) s += a.second * a.second;
  return s;
}

// ---------------------------------------------------------------------------
// JointDist

void JointDist::build_offsets() {
  offsets_.assign(groups_.size() + 1, 0);
  for (std::size_t i = 0; i < groups_.size(); ++i) offsets_[i + 1] = offsets_[i] + groups_[i].rank();
}

JointDist JointDist::from_atoms(std::vector<GroupSpec> groups, std::vector<JointAtom> atoms) {
  if (groups.empty()) throw PreconditionError("joint distribution needs at least one coordinate");
  JointDist j;
  j.groups_ = std::move(groups);
  j.build_offsets();
  std::map<Key, Rational> acc;
  Rational total = 0;
  for (auto& [k, m] : atoms) {
    if (k.size() != j.offsets_.back()) throw IncompatibleGroupError("joint key has wrong length");
    m.canonicalize();
    if (sgn(m) < 0) throw PreconditionError("negative probability mass");
    if (sgn(m) == 0) continue;
    for (std::size_t i = 0; i < j.groups_.size(); ++i) {
      GroupElement part(k.begin() + j.offsets_[i], k.begin() + j.offsets_[i + 1]);
      part = reduce(j.groups_[i], std::move(part));
      std::copy(part.begin(), part.end(), k.begin() + j.offsets_[i]);
    }
    total += m;
    acc[std::move(k)] += m;
  }
  if (total != 1) throw PreconditionError("joint masses sum to " + to_string(total) + ", not 1");
  j.atoms_.reserve(acc.size());
  for (auto& [k, m] : acc) j.atoms_.emplace_back(k, std::move(m));
  return j;
}

JointDist JointDist::from_tuples(
    std::vector<GroupSpec> groups,
    const std::vector<std::pair<std::vector<GroupElement>, Rational>>& atoms) {
  std::vector<JointAtom> flat;
  flat.reserve(atoms.size());
  for (const auto& [tuple, m] : atoms) {
    if (tuple.size() != groups.size()) throw IncompatibleGroupError("tuple arity mismatch");
    Key k;
    for (const auto& e : tuple) k.insert(k.end(), e.begin(), e.end());
    flat.emplace_back(std::move(k), m);
  }
  return from_atoms(std::move(groups), std::move(flat));
}

JointDist JointDist::from_dist(const Dist& p) {
  JointDist j;
  j.groups_ = {p.group()};
  j.build_offsets();
  j.atoms_.assign(p.atoms().begin(), p.atoms().end());
  return j;
}

JointDist JointDist::product(const std::vector<Dist>& laws) {
  if (laws.empty()) throw PreconditionError("product of no distributions");
  std::vector<JointAtom> cur{{Key{}, Rational(1)}};
  std::vector<GroupSpec> groups;
  for (const auto& law : laws) {
    groups.push_back(law.group());
    std::vector<JointAtom> next;
    next.reserve(cur.size() * law.size());
    for (const auto& [k, m] : cur) {
      for (const auto& [x, mx] : law.atoms()) {
        Key nk = k;
        nk.insert(nk.end(), x.begin(), x.end());
        next.emplace_back(std::move(nk), m * mx);
      }
    }
    cur = std::move(next);
  }
  return from_atoms(std::move(groups), std::move(cur));
}

std::span<const std::int64_t> JointDist::component(const Key& key, std::size_t i) const {
  return std::span<const std::int64_t>(key).subspan(offsets_.at(i), offsets_.at(i + 1) - offsets_[i]);
}

Rational JointDist::mass(const Key& key) const {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), key,
                             [](const JointAtom& a, const Key& k) { return a.first < k; });
  if (it != atoms_.end() && it->first == key) return it->second;
  return Rational(0);
}

JointDist JointDist::marginal(const std::vector<std::size_t>& coords) const {
  if (coords.empty()) throw PreconditionError("marginal on an empty coordinate set");
  std::vector<GroupSpec> out_groups;
  for (auto c : coords) out_groups.push_back(groups_.at(c));
  std::map<Key, Rational> acc;
  for (const auto& [k, m] : atoms_) {
    Key nk;
    for (auto c : coords) {
      auto part = component(k, c);
      nk.insert(nk.end(), part.begin(), part.end());
    }
    acc[std::move(nk)] += m;
  }
  JointDist j;
  j.groups_ = std::move(out_groups);
  j.build_offsets();
  j.atoms_.reserve(acc.size());
  for (auto& [k, m] : acc) j.atoms_.emplace_back(k, std::move(m));
  return j;
}

Dist JointDist::marginal_dist(std::size_t coord) const {
  auto m = marginal({coord});
  std::vector<Atom> atoms(m.atoms_.begin(), m.atoms_.end());
  return Dist::from_atoms(groups_.at(coord), std::move(atoms));
}

JointDist JointDist::map(std::vector<GroupSpec> out_groups,
                         const std::function<Key(const JointDist&, const Key&)>& fn) const {
  std::vector<JointAtom> out;
  out.reserve(atoms_.size());
  for (const auto& [k, m] : atoms_) out.emplace_back(fn(*this, k), m);
  return from_atoms(std::move(out_groups), std::move(out));
}

JointDist JointDist::with_sum(std::size_t a, std::size_t b, Sign sign) const {
  const auto& g = groups_.at(a);
  check_same_group(g, groups_.at(b));
  auto out_groups = groups_;
  out_groups.push_back(g);
  return map(out_groups, [&](const JointDist& self, const Key& k) {
    Key nk = k;
    auto s = sign == Sign::kPlus ? add(g, self.component(k, a), self.component(k, b))
                                 : sub(g, self.component(k, a), self.component(k, b));
    nk.insert(nk.end(), s.begin(), s.end());
    return nk;
  });
}

double joint_entropy(const JointDist& j) {
  CompensatedSum s;
  for (const auto& a : j.atoms()) s.add(f_of(a.second));
  return s.value();
}

double joint_entropy(const JointDist& j, const std::vector<std::size_t>& coords) {
  return joint_entropy(j.marginal(coords));
}

double conditional_entropy(const JointDist& j, const std::vector<std::size_t>& target,
                           const std::vector<std::size_t>& given) {
  if (target.empty()) throw PreconditionError("conditional entropy of an empty target");
  for (auto t : target) {
    if (std::find(given.begin(), given.end(), t) != given.end()) {
      throw PreconditionError("target and given coordinates overlap");
    }
  }
  if (given.empty()) return joint_entropy(j, target);
  std::vector<std::size_t> coords = given;
  coords.insert(coords.end(), target.begin(), target.end());
  const JointDist m = j.marginal(coords);
  std::size_t given_len = 0;
  for (auto c : given) given_len += j.group(c).rank();

  // Atoms are sorted by key, so each fibre {given = y} is contiguous.
  CompensatedSum total;
  const auto& atoms = m.atoms();
  std::size_t i = 0;
  while (i < atoms.size()) {
    std::size_t e = i;
    Rational py = 0;
    auto same_fibre = [&](std::size_t a, std::size_t b) {
      return std::equal(atoms[a].first.begin(), atoms[a].first.begin() + given_len,
                        atoms[b].first.begin());
    };
    while (e < atoms.size() && same_fibre(i, e)) py += atoms[e++].second;
    CompensatedSum fibre;
    for (std::size_t k = i; k < e; ++k) fibre.add(f_of(Rational(atoms[k].second / py)));
    total.add(to_double(py) * fibre.value());
    i = e;
  }
  return total.value();
}

JointDist condition_on_event(const JointDist& j, std::size_t coord,
                             const std::function<bool(std::span<const std::int64_t>)>& event) {
  std::vector<JointDist::JointAtom> kept;
  Rational total = 0;
  for (const auto& a : j.atoms()) {
    if (event(j.component(a.first, coord))) {
      kept.push_back(a);
      total += a.second;
    }
  }
  if (sgn(total) == 0) throw PreconditionError("conditioning on a zero-probability event");
  for (auto& a : kept) a.second /= total;
  return JointDist::from_atoms(j.groups(), std::move(kept));
}

namespace {

JointDist::Key extract(const JointDist& j, const JointDist::Key& k, const std::vector<std::size_t>& coords) {
  JointDist::Key out;
  for (auto c : coords) {
    auto part = j.component(k, c);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace

JointDist glue(const JointDist& a, const std::vector<std::size_t>& a_shared, const JointDist& b,
               const std::vector<std::size_t>& b_shared) {
  if (a_shared.size() != b_shared.size()) throw PreconditionError("glue: shared arity mismatch");
  for (std::size_t i = 0; i < a_shared.size(); ++i) {
    check_same_group(a.group(a_shared[i]), b.group(b_shared[i]));
  }
  std::vector<std::size_t> b_rest;
  for (std::size_t c = 0; c < b.arity(); ++c) {
    if (std::find(b_shared.begin(), b_shared.end(), c) == b_shared.end()) b_rest.push_back(c);
  }
  auto groups = a.groups();
  for (auto c : b_rest) groups.push_back(b.group(c));

  std::map<JointDist::Key, Rational> shared_mass_a;
  std::map<JointDist::Key, std::vector<std::pair<JointDist::Key, Rational>>> b_fibres;
  for (const auto& [k, m] : a.atoms()) shared_mass_a[extract(a, k, a_shared)] += m;
  std::map<JointDist::Key, Rational> shared_mass_b;
  for (const auto& [k, m] : b.atoms()) {
    auto s = extract(b, k, b_shared);
    shared_mass_b[s] += m;
    b_fibres[s].emplace_back(extract(b, k, b_rest), m);
  }
  if (shared_mass_a != shared_mass_b) throw PreconditionError("glue: shared marginals differ");

  std::vector<JointDist::JointAtom> out;
  for (const auto& [k, m] : a.atoms()) {
    const auto s = extract(a, k, a_shared);
    const Rational& ps = shared_mass_a.at(s);
    for (const auto& [rest, mb] : b_fibres.at(s)) {
      JointDist::Key nk = k;
      nk.insert(nk.end(), rest.begin(), rest.end());
      out.emplace_back(std::move(nk), m * mb / ps);
    }
  }
  return JointDist::from_atoms(std::move(groups), std::move(out));
}

JointDist ci_trials(const JointDist& j, std::size_t pivot) {
  if (j.arity() != 2 || pivot > 1) throw PreconditionError("ci_trials expects a pair and a pivot in {0,1}");
  const std::size_t other = 1 - pivot;
  // glue yields (X, pivot, X') in j's coordinate order; reorder to (X1, X2, pivot).
  JointDist g = glue(j, {pivot}, j, {pivot});
  return g.marginal({other, 2, pivot});
}

bool conditionally_independent(const JointDist& j, const std::vector<std::size_t>& a,
                               const std::vector<std::size_t>& b,
                               const std::vector<std::size_t>& given) {
  // p(a,b,c) p(c) == p(a,c) p(b,c) for every (a,b,c) in the product of supports.
  std::map<JointDist::Key, Rational> pc, pac, pbc, pabc;
  for (const auto& [k, m] : j.atoms()) {
    auto kc = extract(j, k, given);
    auto ka = extract(j, k, a);
    auto kb = extract(j, k, b);
    pc[kc] += m;
    JointDist::Key kac = ka;
    kac.insert(kac.end(), kc.begin(), kc.end());
    JointDist::Key kbc = kb;
    kbc.insert(kbc.end(), kc.begin(), kc.end());
    JointDist::Key kabc = ka;
    kabc.insert(kabc.end(), kb.begin(), kb.end());
    kabc.insert(kabc.end(), kc.begin(), kc.end());
    pac[kac] += m;
    pbc[kbc] += m;
    pabc[kabc] += m;
  }
  std::size_t alen = 0, blen = 0;
  for (auto c : a) alen += j.group(c).rank();
  for (auto c : b) blen += j.group(c).rank();
  // Every support pair (a,c), (b,c) must appear with the product mass.
  std::map<JointDist::Key, std::vector<std::pair<JointDist::Key, Rational>>> a_by_c, b_by_c;
  for (const auto& [k, m] : pac) {
    JointDist::Key ka(k.begin(), k.begin() + alen), kc(k.begin() + alen, k.end());
    a_by_c[kc].emplace_back(ka, m);
  }
  for (const auto& [k, m] : pbc) {
    JointDist::Key kb(k.begin(), k.begin() + blen), kc(k.begin() + blen, k.end());
    b_by_c[kc].emplace_back(kb, m);
  }
  std::size_t expected_atoms = 0;
  for (const auto& [kc, mc] : pc) {
    for (const auto& [ka, ma] : a_by_c[kc]) {
      for (const auto& [kb, mb] : b_by_c[kc]) {
        JointDist::Key kabc = ka;
        kabc.insert(kabc.end(), kb.begin(), kb.end());
        kabc.insert(kabc.end(), kc.begin(), kc.end());
        auto it = pabc.find(kabc);
        const Rational lhs = it == pabc.end() ? Rational(0) : Rational(it->second * mc);
        if (lhs != ma * mb) return false;
        ++expected_atoms;
      }
    }
  }
  return expected_atoms == pabc.size();
}

bool determines(const JointDist& j, const std::vector<std::size_t>& from,
                const std::vector<std::size_t>& to) {
  std::map<JointDist::Key, JointDist::Key> image;
  for (const auto& [k, m] : j.atoms()) {
    auto kf = extract(j, k, from);
    auto kt = extract(j, k, to);
    auto [it, inserted] = image.emplace(std::move(kf), kt);
    if (!inserted && it->second != kt) return false;
  }
  return true;
}

}  // namespace entsum
