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
#include <functional>
#include <vector>

#include "entsum/dist.hpp"
#include "entsum/report.hpp"

namespace entsum {

// Ent(X - Y) - Ent(X)/2 - Ent(Y)/2 for independent X ~ p, Y ~ q.
double ruzsa_distance(const Dist& p, const Dist& q);

// exp(Ent(X1 + X2) - Ent(X)) for independent copies.
double doubling_constant(const Dist& p);
double log_doubling(const Dist& p);

// Caps on exact convolution work inside the ese suite.
inline constexpr int kMaxIteratedN = 4;
inline constexpr std::size_t kEseSupportCap = 200000;

/**
 * Sumset inequality suite on (p, q, r) with iteration depth n:
 *   ese.triangle   d(p,r) <= d(p,q) + d(q,r)
 *   ese.condit     d(p,-q) <= 3 d(p,q)
 *   ese.entpm      Ent(p*q) <= 3 Ent(p*(-q)) - Ent p - Ent q
 *   ese.iterated   Ent((p*q)^{*(n+1)}) <= (2n+1) Ent(p*q) - n (Ent p + Ent q)
 *   ese.plunnecke  Ent(p^{*(2n+2)}) <= Ent p + (2n+1) log sigma[p]
 * Throws InstanceTooLargeError rather than truncating when an
 * intermediate support exceeds kEseSupportCap.
 */
std::vector<MetricReport> check_ese_suite(const Dist& p, const Dist& q, const Dist& r, int n);

// Entropy of X_1 + ... + X_n - X'_1 - ... - X'_m divided by
// (n + m) log sigma[X], after subtracting Ent(X); the measured constant.
double plunnecke_constant(const Dist& p, int n, int m);

// Ent(X + Y + Z) <= (Ent(X+Y) + Ent(Y+Z) + Ent(Z+X)) / 2 for independent laws.
MetricReport check_mmt(const Dist& p, const Dist& q, const Dist& r);

// Trivial sumset estimates: Ent(X +- Y) <= Ent X + Ent Y for an arbitrary
// coupling given as a pair law (both signs reported).
std::vector<MetricReport> check_trivial_dependent(const JointDist& pair);
// Independent case: max(Ent p, Ent q) <= Ent(p +- q), and d_R >= 0.
std::vector<MetricReport> check_trivial_independent(const Dist& p, const Dist& q);

using TransportOracle = std::function<double(const Dist&, const Dist&)>;

/**
 * Lipschitz properties of the Ruzsa distance and doubling under transport:
 *   lip.rrt        |d(X',Y') - d(X,Y)| <= 3/2 (T(X,X') + T(Y,Y'))
 *   lip.doubtrans  |log sigma[X] - log sigma[X']| <= 3 T(X,X')
 *   lip.dubdub     log sigma[X] == d(X, -X)
 */
std::vector<MetricReport> check_lipschitz(const Dist& x, const Dist& x2, const Dist& y,
                                          const Dist& y2, const TransportOracle& oracle);

/**
 * Left side of the sumset entropy increase formula:
 *   L = sum_y q(y) sum_z p(z - y) log+( p(z - y) / (p*q)(z) ).
 * |L - (Ent(p*q) - Ent(p))| <= 1 always.
 */
double sumset_increase_lhs(const Dist& p, const Dist& q);
MetricReport check_xysim(const Dist& p, const Dist& q);

struct JensenLevels {
  // levels[k] holds the elements of A_k, k >= 1, with
  // 2^{2^{k-1}} <= p(x)|A| < 2^{2^k};  levels[0] is everything else.
  std::vector<std::vector<GroupElement>> levels;
  std::vector<Rational> level_mass;
  double log_k = 0.0;
  // sum_{k>=1} max(2^{k-1} log 2 - 1, 0) P(A_k); asserted <= log K.
  double sharpened_sum = 0.0;
  // sum_{k>=1} 2^k P(A_k); reported against 8 (1 + log K), not asserted.
  double weighted_sum = 0.0;
  MetricReport report;
};

// `ambient` is the finite set A; p must be supported inside it and satisfy
// Ent(p) >= log|A| - log K.
JensenLevels jensen_level_sets(const Dist& p, const std::vector<GroupElement>& ambient, double log_k);

/**
 * Conditional entropy facts on a triple law (X, Y, Z) over one group:
 *   cond.eident         Ent(X|Y) == Ent(X,Y) - Ent(Y)   (fibre sum vs difference)
 *   cond.ento           Ent(X|Y) <= Ent(X)
 *   cond.ento_equality  equality in ento holds exactly when X, Y are independent
 *   cond.ent_sum        Ent(X,Y) <= Ent(X) + Ent(Y)
 *   cond.entyx          Ent(X+Y) <= Ent(X,Y)
 *   cond.ent0_x/_y      Ent(X), Ent(Y) <= Ent(X,Y)
 *   cond.esob_lower     Ent(X) - Ent(Y) <= Ent(X|Y)
 *   cond.esob_upper     Ent(X|Y) <= Ent(X)
 *   cond.yush           Ent(X|2X) == Ent(X) - Ent(2X)
 *   cond.fsqueeze       Ent(X+Z|Z) <= Ent(X|Z)
 *   cond.ent_subadd     Ent(X,Y|Z) <= Ent(X|Z) + Ent(Y|Z)
 */
std::vector<MetricReport> check_conditional_suite(const JointDist& xyz);

// Joint over (X0, X1, X2, X12).  Checks Ent(X12) + Ent(X0) <= Ent(X1) + Ent(X2)
// after verifying from the joint that X1 and X2 each determine X0 and that
// (X1, X2) determines X12; a failed premise throws PreconditionError.
MetricReport submodularity_check(const JointDist& j);

}  // namespace entsum
