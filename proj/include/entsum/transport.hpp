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
#include <limits>
#include <utility>
#include <vector>

#include "entsum/dist.hpp"
#include "entsum/progression.hpp"

namespace entsum {

/**
 * A coupling (X, Z) with X ~ source and X + Z ~ target.  The coupling is a
 * JointDist over (group, group).  cost = Ent(Z).
 */
struct TransportCertificate {
  Dist source;
  Dist target;
  JointDist coupling;
  double cost = 0.0;
  // Upper bound guaranteed by the construction; NaN when none is claimed.
  double bound = std::numeric_limits<double>::quiet_NaN();

  const GroupSpec& group() const noexcept { return source.group(); }
  Dist shift_law() const { return coupling.marginal_dist(1); }
};

// Exact checks of marginals, pushforward and cost; throws InvariantError.
void verify_certificate(const TransportCertificate& c);
bool certificate_valid(const TransportCertificate& c);

// Plan given as (x, y, mass) triples; masses must sum to one.
struct PlanAtom {
  GroupElement x;
  GroupElement y;
  Rational mass;
};
TransportCertificate certificate_from_plan(const GroupSpec& g, const std::vector<PlanAtom>& plan);
std::vector<PlanAtom> plan_of(const TransportCertificate& c);

TransportCertificate identity_certificate(const Dist& p);
// Z independent of X with law `shift`.
TransportCertificate shift_certificate(const Dist& source, const Dist& shift);
// X and Y independent.
TransportCertificate independent_certificate(const Dist& source, const Dist& target);

// Chains p -> q -> r by gluing on the middle variable; a.target must equal
// b.source.  Ent(Z) <= a.cost + b.cost.
TransportCertificate compose(const TransportCertificate& a, const TransportCertificate& b);
// Swaps source and target; Z becomes -Z with the same cost.
TransportCertificate reverse(const TransportCertificate& c);

inline constexpr std::size_t kExactCap = 24;

/**
 * Global minimum of Ent(Z) over couplings of p and q.  Enumerates spanning
 * trees of the bipartite support graph (every vertex of the transportation
 * polytope has such a basis), solves each tree, and re-solves the best
 * candidates exactly.  The cap bounds |supp p| * |supp q|.
 */
TransportCertificate transport_exact(const Dist& p, const Dist& q, std::size_t cap = kExactCap);

// Optimal value only.
double transport_cost_exact(const Dist& p, const Dist& q, std::size_t cap = kExactCap);

/**
 * Mixture of certificates with selector S ~ weights.  The result transports
 * sum w_s source_s to sum w_s target_s; its bound is
 * selector_entropy + sum w_s cost_s.
 */
TransportCertificate transport_split(
    const std::vector<std::pair<Rational, TransportCertificate>>& pieces, double selector_entropy);

struct FlattenTrace {
  std::vector<GroupElement> shifts;
  // norms[0] is the starting l2 distance to uniform; norms[i] follows round i.
  std::vector<double> norms;
  std::vector<Rational> squared_norms;
};

struct FlattenResult {
  Dist result;
  FlattenTrace trace;
  TransportCertificate certificate;
};

/**
 * k rounds of p <- (p + p(. - h)) / 2 with h minimising the l2 distance to
 * uniform by exhaustive scan.  Stops early at the uniform law.  Requires a
 * finite group.
 */
FlattenResult flatten(const Dist& p, int k);

struct UniformiseOptions {
  // Flattening rounds applied before every split.
  int split_rounds = 4;
  // Splits below this accumulated weight are closed by an independent coupling.
  Rational sigma_min = Rational(1, 1 << 20);
  // Largest group order handled with dense exact plans.
  std::size_t max_order = 160;
};

struct UniformiseStats {
  int flatten_rounds = 0;
  int splits = 0;
  int base_cases = 0;
};

/**
 * Certificate transporting p to the uniform law on its (finite) group.
 * Requires Ent(p) >= log|G| - log K, with K below 10 read as 10.
 */
TransportCertificate uniformise_group(const Dist& p, double k, const UniformiseOptions& opts = {},
                                      UniformiseStats* stats = nullptr);

/**
 * Certificate transporting p to the uniform law on the proper coset
 * progression cp.  Works in H x prod Z/2N_i and pushes the plan forward
 * only after checking that no shift wraps around.
 */
TransportCertificate uniformise_coset_progression(const Dist& p, const CosetProgression& cp,
                                                  double k, const UniformiseOptions& opts = {},
                                                  UniformiseStats* stats = nullptr);

}  // namespace entsum
