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

#include "entsum/group.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "entsum/errors.hpp"

namespace entsum {

GroupSpec::GroupSpec(std::vector<std::int64_t> moduli) : moduli_(std::move(moduli)) {
  for (auto m : moduli_) {
    if (m < 0) throw std::invalid_argument("group modulus must be non-negative");
  }
}

GroupSpec GroupSpec::integers(std::size_t rank) {
  return GroupSpec(std::vector<std::int64_t>(rank, 0));
}

GroupSpec GroupSpec::cyclic(std::int64_t m) { return GroupSpec({m}); }

bool GroupSpec::torsion_free() const noexcept {
  return std::all_of(moduli_.begin(), moduli_.end(), [](auto m) { return m == 0; });
}

bool GroupSpec::finite() const noexcept {
  return std::all_of(moduli_.begin(), moduli_.end(), [](auto m) { return m > 0; });
}

std::int64_t GroupSpec::order() const {
  if (!finite()) throw PreconditionError("order of an infinite group");
  std::int64_t n = 1;
  for (auto m : moduli_) n = checked_mul(n, m);
  return n;
}

std::string GroupSpec::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < moduli_.size(); ++i) os << (i ? "," : "") << moduli_[i];
  os << ']';
  return os.str();
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out)) throw std::overflow_error("integer coordinate overflow");
  return out;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out)) throw std::overflow_error("integer coordinate overflow");
  return out;
}

namespace {

void check_dim(const GroupSpec& g, std::span<const std::int64_t> a) {
  if (a.size() != g.rank()) {
    throw IncompatibleGroupError("element of rank " + std::to_string(a.size()) +
                                 " used in group " + g.to_string());
  }
}

std::int64_t mod(std::int64_t v, std::int64_t m) {
  const std::int64_t r = v % m;
  return r < 0 ? r + m : r;
}

}  // namespace

GroupElement reduce(const GroupSpec& g, GroupElement a) {
  check_dim(g, a);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (g.modulus(i) > 0) a[i] = mod(a[i], g.modulus(i));
  }
  return a;
}

bool belongs(const GroupSpec& g, std::span<const std::int64_t> a) {
  if (a.size() != g.rank()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto m = g.modulus(i);
    if (m > 0 && (a[i] < 0 || a[i] >= m)) return false;
  }
  return true;
}

GroupElement add(const GroupSpec& g, std::span<const std::int64_t> a,
                 std::span<const std::int64_t> b) {
  check_dim(g, a);
  check_dim(g, b);
  GroupElement out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto m = g.modulus(i);
    out[i] = m > 0 ? mod(checked_add(a[i], b[i]), m) : checked_add(a[i], b[i]);
  }
  return out;
}

GroupElement neg(const GroupSpec& g, std::span<const std::int64_t> a) {
  check_dim(g, a);
  GroupElement out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto m = g.modulus(i);
    out[i] = m > 0 ? mod(-a[i], m) : checked_mul(a[i], -1);
  }
  return out;
}

GroupElement sub(const GroupSpec& g, std::span<const std::int64_t> a,
                 std::span<const std::int64_t> b) {
  return add(g, a, neg(g, b));
}

GroupElement scale(const GroupSpec& g, std::int64_t n, std::span<const std::int64_t> a) {
  check_dim(g, a);
  GroupElement out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto m = g.modulus(i);
    out[i] = m > 0 ? mod(checked_mul(mod(n, m), a[i]), m) : checked_mul(n, a[i]);
  }
  return out;
}

GroupElement zero(const GroupSpec& g) { return GroupElement(g.rank(), 0); }

bool is_zero(std::span<const std::int64_t> a) {
  return std::all_of(a.begin(), a.end(), [](auto v) { return v == 0; });
}

bool is_subgroup(const GroupSpec& g, const std::vector<GroupElement>& s) {
  if (s.empty()) return false;
  std::set<GroupElement> members;
  for (const auto& e : s) {
    if (!belongs(g, e)) throw IncompatibleGroupError("subgroup candidate outside group");
    members.insert(e);
  }
  if (!members.count(zero(g))) return false;
  for (const auto& a : members) {
    for (const auto& b : members) {
      if (!members.count(sub(g, a, b))) return false;
    }
  }
  return true;
}

std::vector<GroupElement> enumerate_elements(const GroupSpec& g) {
  const auto n = g.order();
  std::vector<GroupElement> out;
  out.reserve(static_cast<std::size_t>(n));
  GroupElement cur(g.rank(), 0);
  for (std::int64_t k = 0; k < n; ++k) {
    out.push_back(cur);
    for (std::size_t i = g.rank(); i-- > 0;) {
      if (++cur[i] < g.modulus(i)) break;
      cur[i] = 0;
    }
  }
  return out;
}

std::string to_string(std::span<const std::int64_t> a) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < a.size(); ++i) os << (i ? "," : "") << a[i];
  os << ')';
  return os.str();
}

}  // namespace entsum
