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


#include "entsum/inverse.hpp"

#include <cmath>
#include <map>
#include <set>

#include "entsum/errors.hpp"
#include "entsum/metrics.hpp"
#include "entsum/transport.hpp"

namespace entsum {

CosetReport detect_coset_uniform(const Dist& p) {
  const auto& g = p.group();
  CosetReport r;
  r.doubling = doubling_constant(p);
  const auto supp = p.support();
  std::set<GroupElement> diffs;
  for (const auto& a : supp) {
    for (const auto& b : supp) {
      diffs.insert(sub(g, a, b));
      // a coset of D has |D| = |supp|
      if (diffs.size() > supp.size()) return r;
    }
  }
  std::vector<GroupElement> d(diffs.begin(), diffs.end());
  if (!is_subgroup(g, d)) return r;
  const Rational& m0 = p.atoms().front().second;
  for (const auto& [x, m] : p.atoms()) {
    if (m != m0) return r;
  }
  r.is_coset_uniform = true;
  r.subgroup = std::move(d);
  r.base = supp.front();
  return r;
}

CoreReport effective_support(const Dist& p, double c) {
  if (!(c >= 1.0)) throw PreconditionError("window constant must be at least 1");
  const double h = entropy(p);
  const double lc = std::log(c);
  CoreReport r;
  r.c = c;
  r.mass = 0;
  for (const auto& [x, m] : p.atoms()) {
    const double lp = log_of(m);
    // small slack so that exactly uniform masses land inside for C = 1
    if (lp >= -h - lc - 1e-12 && lp <= -h + lc + 1e-12) {
      r.core.push_back(x);
      r.mass += m;
    }
  }
  r.c_too_small = r.mass * 2 < 1;
  if (!r.core.empty()) {
    const double n = static_cast<double>(r.core.size());
    r.log_size_gap = std::log(n) - h;
    if (r.core.size() <= kEnergyCap) {
      r.energy_ratio = static_cast<double>(additive_energy(p.group(), r.core)) / (n * n * n);
    }
  } else {
    r.log_size_gap = -h;
  }
  return r;
}

CoreReport effective_support_search(const Dist& p, double c0, int max_doublings) {
  double c = std::max(c0, 1.0);
  CoreReport r = effective_support(p, c);
  for (int i = 0; i < max_doublings && r.c_too_small; ++i) {
    c *= 2.0;
    r = effective_support(p, c);
  }
  return r;
}

std::int64_t additive_energy(const GroupSpec& g, const std::vector<GroupElement>& a) {
  if (a.size() > kEnergyCap) {
    throw InstanceTooLargeError("additive energy limited to sets of size " + std::to_string(kEnergyCap));
  }
  std::set<GroupElement> unique(a.begin(), a.end());
  std::map<GroupElement, std::int64_t> reps;
  for (const auto& x : unique) {
    for (const auto& y : unique) ++reps[add(g, x, y)];
  }
  std::int64_t e = 0;
  for (const auto& [s, r] : reps) e += r * r;
  return e;
}

std::vector<InverseFixtureReport> verify_inverse_fixtures(const std::vector<InverseFixture>& corpus) {
  std::vector<InverseFixtureReport> out;
  for (const auto& f : corpus) {
    if (f.noise.group() != f.progression.group) throw PreconditionError("fixture " + f.name + ": noise in another group");
    const Dist u = uniform_on(f.progression);
    const Dist x = convolve(u, f.noise);
    InverseFixtureReport r;
    r.name = f.name;
    r.noise_entropy = entropy(f.noise);

    const auto cert = reverse(shift_certificate(u, f.noise));
    verify_certificate(cert);
    r.transport_cost = cert.cost;
    r.reports.push_back(make_report("inverse.trans_noise", cert.cost, r.noise_entropy));
    r.reports.push_back(make_report("inverse.trans_lower", entropy(u) - entropy(x), cert.cost));

    if (f.hull) {
      const Dist hull_u = uniform_on(*f.hull);
      const double log_k = std::log(static_cast<double>(hull_u.size())) - entropy(x);
      const auto hc = uniformise_coset_progression(x, *f.hull, std::exp(std::max(log_k, 0.0)));
      r.hull_cost = hc.cost;
      r.reports.push_back(make_report("inverse.trans_hull_lower", entropy(hull_u) - entropy(x), hc.cost));
    }

    r.doubling = doubling_constant(x);
    const double log_sigma = std::log(r.doubling);
    r.reports.push_back(make_report("inverse.pair_self", log_sigma, 4.0 * ruzsa_distance(x, x)));
    if (f.partner) {
      r.reports.push_back(make_report("inverse.pair", log_sigma, 4.0 * ruzsa_distance(x, *f.partner)));
    }

    const auto core = effective_support_search(x);
    r.energy_ratio = core.energy_ratio;
    if (f.curated) r.reports.push_back(make_report("inverse.energy", 1.0 / 16.0, core.energy_ratio));
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<InverseFixture> default_inverse_fixtures() {
  const GroupSpec z = GroupSpec::integers(1);
  const GroupSpec z64 = GroupSpec::cyclic(64);
  const Dist bit = Dist::uniform(z, {{0}, {1}});
  std::vector<InverseFixture> out;

  InverseFixture a;
  a.name = "interval32_plus_bit";
  a.progression = {z, {{0}}, {0}, {{1}}, {32}};
  a.noise = bit;
  a.hull = CosetProgression{z, {{0}}, {0}, {{1}}, {33}};
  a.partner = uniform_on(a.progression);
  a.curated = true;
  out.push_back(a);

  InverseFixture b;
  b.name = "evens16_plus_bit";
  b.progression = {z, {{0}}, {0}, {{2}}, {16}};
  b.noise = bit;
  b.hull = CosetProgression{z, {{0}}, {0}, {{1}}, {32}};
  b.curated = true;
  out.push_back(b);

  InverseFixture c;
  c.name = "coset_z64_plus_noise";
  c.progression = {z64, {{0}, {16}, {32}, {48}}, {3}, {{1}}, {4}};
  c.noise = Dist::from_atoms(z64, {{{0}, Rational(1, 2)}, {{1}, Rational(1, 4)}, {{5}, Rational(1, 4)}});
  c.partner = convolve(uniform_on(c.progression), Dist::uniform(z64, {{0}, {2}}));
  c.curated = true;
  out.push_back(c);

  InverseFixture d;
  d.name = "box3x3_plus_corner";
  const GroupSpec z2 = GroupSpec::integers(2);
  d.progression = {z2, {{0, 0}}, {0, 0}, {{1, 0}, {0, 1}}, {3, 3}};
  d.noise = Dist::uniform(z2, {{0, 0}, {1, 0}, {0, 1}});
  d.hull = CosetProgression{z2, {{0, 0}}, {0, 0}, {{1, 0}, {0, 1}}, {4, 4}};
  out.push_back(d);

  // Paired law on Z/64: X a subgroup-plus-noise, Y = X + noise.
  InverseFixture e;
  e.name = "z64_pair";
  e.progression = {z64, {{0}, {8}, {16}, {24}, {32}, {40}, {48}, {56}}, {0}, {{1}}, {2}};
  e.noise = Dist::from_atoms(z64, {{{0}, Rational(3, 4)}, {{3}, Rational(1, 4)}});
  e.partner = convolve(convolve(uniform_on(e.progression), e.noise),
                       Dist::uniform(z64, {{0}, {4}}));
  out.push_back(e);
  return out;
}

}  // namespace entsum
