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
#include <map>
#include <vector>

#include "entsum/dist.hpp"
#include "entsum/group.hpp"
#include "entsum/rational.hpp"

namespace entsum {

inline constexpr std::size_t kEnumerationCap = 100000;

/**
 * Coset progression  H + P  with  P = { x + n_1 r_1 + ... + n_d r_d : 0 <= n_i < N_i }
 * and H a finite subgroup given by its full element list.
 */
struct CosetProgression {
  GroupSpec group;
  std::vector<GroupElement> subgroup;
  GroupElement base;
  std::vector<GroupElement> steps;
  std::vector<std::int64_t> lengths;

  std::size_t rank() const noexcept { return steps.size(); }

  // Throws PreconditionError on malformed data (H not a subgroup, shape
  // mismatches, non-positive lengths).
  void validate() const;

  // |H| * prod N_i, overflow-checked.
  std::int64_t nominal_size() const;
};

// Distinct elements of H + P, sorted.  Throws InstanceTooLargeError past cap.
std::vector<GroupElement> enumerate(const CosetProgression& cp, std::size_t cap = kEnumerationCap);

// All sums h + x + sum n_i r_i with 0 <= n_i < t N_i are pairwise distinct.
bool is_t_proper(const CosetProgression& cp, const Rational& t, std::size_t cap = kEnumerationCap);
bool is_proper(const CosetProgression& cp, std::size_t cap = kEnumerationCap);

Dist uniform_on(const CosetProgression& cp, std::size_t cap = kEnumerationCap);

/**
 * Tables between H + P and the box B = H x [0,N_1) x ... x [0,N_d).  A box
 * point is the H-element coordinates followed by (n_1, ..., n_d); it lives in
 * box_group() = ambient moduli followed by d copies of Z.
 */
class BoxEmbedding {
 public:
  const CosetProgression& progression() const noexcept { return cp_; }
  bool proper() const noexcept { return proper_; }
  GroupSpec box_group() const;

  const std::vector<GroupElement>& box_points() const noexcept { return box_points_; }
  // images()[i] is the image of box_points()[i].
  const std::vector<GroupElement>& images() const noexcept { return images_; }

  GroupElement forward(const GroupElement& box_point) const;
  // Unique preimage; requires proper().
  const GroupElement& backward(const GroupElement& image) const;

  // Requires proper(); p must be supported on H + P.
  Dist pullback(const Dist& p) const;
  Dist pushforward(const Dist& box_dist) const;

  friend BoxEmbedding box_embedding(const CosetProgression& cp, bool proper_required,
                                    std::size_t cap);

 private:
  CosetProgression cp_;
  bool proper_ = false;
  std::vector<GroupElement> box_points_;
  std::vector<GroupElement> images_;
  std::map<GroupElement, std::size_t> preimage_;
};

BoxEmbedding box_embedding(const CosetProgression& cp, bool proper_required,
                           std::size_t cap = kEnumerationCap);

}  // namespace entsum
