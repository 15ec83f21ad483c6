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


#include "entsum/bsg.hpp"

#include <algorithm>
#include <string>

#include "entsum/errors.hpp"

namespace entsum {

namespace {

struct Deficits {
  double dependence;
  double sum;
};

Deficits deficits(const JointDist& j) {
  const double hx = entropy(j.marginal_dist(0));
  const double hy = entropy(j.marginal_dist(1));
  const double hxy = joint_entropy(j);
  const double hsum = entropy(j.with_sum(0, 1).marginal_dist(2));
  return {hx + hy - hxy, hsum - 0.5 * hx - 0.5 * hy};
}

void check_shape(const JointDist& j) {
  if (j.arity() != 2) throw PreconditionError("a BSG instance is a pair law");
  if (j.group(0) != j.group(1)) throw IncompatibleGroupError("X and Y must share a group");
  if (j.size() > kBsgSupportCap) {
    throw InstanceTooLargeError("BSG joint has " + std::to_string(j.size()) + " atoms, cap " +
                                std::to_string(kBsgSupportCap));
  }
}

}  // namespace

BsgInstance make_bsg_instance(JointDist joint) {
  check_shape(joint);
  const auto d = deficits(joint);
  BsgInstance inst;
  inst.log_k = std::max({d.dependence, d.sum, 0.0});
  inst.joint = std::move(joint);
  return inst;
}

void validate(const BsgInstance& inst) {
  check_shape(inst.joint);
  const auto d = deficits(inst.joint);
  if (inst.log_k < -kEntropyTol || inst.log_k < d.dependence - kEntropyTol ||
      inst.log_k < d.sum - kEntropyTol) {
    throw PreconditionError("log K below the instance deficits");
  }
}

JointDist build_path_joint(const BsgInstance& inst) {
  validate(inst);
  // (X1, X2, Y) from two trials sharing Y, then Y' from a trial sharing X1.
  const JointDist trials = ci_trials(inst.joint, 1);
  return glue(trials, {0}, inst.joint, {0});
}

BsgReport verify_bsg(const BsgInstance& inst) {
  const JointDist path = build_path_joint(inst);
  const double hx = entropy(inst.joint.marginal_dist(0));
  const double hy = entropy(inst.joint.marginal_dist(1));
  const double lk = inst.log_k;

  // coordinates: 0 = X1, 1 = X2, 2 = Y, 3 = Y', 4 = X2 + Y', 5 = X1 - X2
  const JointDist ext = path.with_sum(1, 3, Sign::kPlus).with_sum(0, 1, Sign::kMinus);
  BsgReport r;
  r.h_x2_given_x1y = conditional_entropy(ext, {1}, {0, 2});
  r.h_y2_given_x1y = conditional_entropy(ext, {3}, {0, 2});
  r.h_sum_given_x1y = conditional_entropy(ext, {4}, {0, 2});
  r.h_diff_given_y = conditional_entropy(ext, {5}, {2});
  r.conditionally_independent = conditionally_independent(path, {1}, {3}, {0, 2});

  const double hx_given_y = conditional_entropy(inst.joint, {0}, {1});
  const double hy_given_x = conditional_entropy(inst.joint, {1}, {0});
  r.reports.push_back(make_report("bsg.loga", hx - lk, r.h_x2_given_x1y));
  r.reports.push_back(make_report("bsg.logb", hy - lk, r.h_y2_given_x1y));
  r.reports.push_back(make_report("bsg.seven", r.h_sum_given_x1y, 0.5 * hx + 0.5 * hy + 7.0 * lk));
  r.reports.push_back(make_report("bsg.weak", r.h_diff_given_y, hx + 4.0 * lk));
  r.reports.push_back(make_identity_report("bsg.ident_x", r.h_x2_given_x1y, hx_given_y));
  r.reports.push_back(make_identity_report("bsg.ident_y", r.h_y2_given_x1y, hy_given_x));
  r.reports.push_back(make_report("bsg.ci", r.conditionally_independent ? 0.0 : 1.0, 0.0));
  return r;
}

}  // namespace entsum
