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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace entsum {

/**
 * Finitely generated abelian group  Z/m_1 x ... x Z/m_d,  where a modulus
 * of 0 stands for an infinite cyclic factor Z.
 */
class GroupSpec {
 public:
  GroupSpec() = default;
  explicit GroupSpec(std::vector<std::int64_t> moduli);

  static GroupSpec integers(std::size_t rank = 1);
  static GroupSpec cyclic(std::int64_t m);

  std::size_t rank() const noexcept { return moduli_.size(); }
  const std::vector<std::int64_t>& moduli() const noexcept { return moduli_; }
  std::int64_t modulus(std::size_t i) const { return moduli_.at(i); }

  bool torsion_free() const noexcept;
  bool finite() const noexcept;
  // Product of the moduli; throws unless finite().
  std::int64_t order() const;

  std::string to_string() const;

  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
  friend auto operator<=>(const GroupSpec&, const GroupSpec&) = default;

 private:
  std::vector<std::int64_t> moduli_;
};

// Coordinates of an element; coordinate i lies in [0, m_i) when m_i > 0.
using GroupElement = std::vector<std::int64_t>;

// Reduces arbitrary integer coordinates into canonical form.
GroupElement reduce(const GroupSpec& g, GroupElement a);
bool belongs(const GroupSpec& g, std::span<const std::int64_t> a);

GroupElement add(const GroupSpec& g, std::span<const std::int64_t> a,
                 std::span<const std::int64_t> b);
GroupElement neg(const GroupSpec& g, std::span<const std::int64_t> a);
GroupElement sub(const GroupSpec& g, std::span<const std::int64_t> a,
                 std::span<const std::int64_t> b);
GroupElement scale(const GroupSpec& g, std::int64_t n,
                   std::span<const std::int64_t> a);
GroupElement zero(const GroupSpec& g);
bool is_zero(std::span<const std::int64_t> a);

// True iff 0 is in s and s is closed under subtraction.  Empty s is not a
// subgroup.
bool is_subgroup(const GroupSpec& g, const std::vector<GroupElement>& s);

// All elements of a finite group in mixed-radix order (last coordinate
// fastest).
std::vector<GroupElement> enumerate_elements(const GroupSpec& g);

// Overflow-checked integer helpers used for Z coordinates.
std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);

std::string to_string(std::span<const std::int64_t> a);

}  // namespace entsum
