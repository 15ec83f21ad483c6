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
#include <vector>

#include "entsum/dist.hpp"
#include "entsum/report.hpp"

namespace entsum {

inline constexpr std::size_t kBsgSupportCap = 10000;

// Joint law of (X, Y) in one group.  log_k is at least both deficits
//   Ent(X) + Ent(Y) - Ent(X,Y)   and   Ent(X+Y) - Ent(X)/2 - Ent(Y)/2.
struct BsgInstance {
  JointDist joint;
  double log_k = 0.0;
};

// Sets log_k to the larger deficit (and at least 0).
BsgInstance make_bsg_instance(JointDist joint);
// Throws PreconditionError unless log_k dominates both deficits.
void validate(const BsgInstance& inst);

/**
 * (X1, X2, Y, Y') with
 *   mass = p(x1,y) p(x2,y) / p_Y(y) * p(x1,y') / p_X(x1),
 * i.e. two trials of (X,Y) glued on Y, then glued with (X1,Y') on X1.
 */
JointDist build_path_joint(const BsgInstance& inst);

struct BsgReport {
  double h_x2_given_x1y = 0.0;     // Ent(X2 | X1, Y)
  double h_y2_given_x1y = 0.0;     // Ent(Y' | X1, Y)
  double h_sum_given_x1y = 0.0;    // Ent(X2 + Y' | X1, Y)
  double h_diff_given_y = 0.0;     // Ent(X1 - X2 | Y)
  bool conditionally_independent = false;
  std::vector<MetricReport> reports;
};

/**
 * Reports bsg.loga, bsg.logb, bsg.seven, bsg.weak, the identities
 * bsg.ident_x (Ent(X2|X1,Y) = Ent(X|Y)) and bsg.ident_y
 * (Ent(Y'|X1,Y) = Ent(Y|X)), and bsg.ci for the exact factorization.
 */
BsgReport verify_bsg(const BsgInstance& inst);

}  // namespace entsum
