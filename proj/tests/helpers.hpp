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
#include <vector>

#include "entsum/dist.hpp"

namespace testing_util {

struct A {
  entsum::GroupElement x;
  std::int64_t num;
  std::int64_t den;
};

inline entsum::Dist make(const entsum::GroupSpec& g, const std::vector<A>& atoms) {
  std::vector<entsum::Atom> out;
  for (const auto& a : atoms) out.emplace_back(a.x, entsum::make_rational(a.num, a.den));
  return entsum::Dist::from_atoms(g, std::move(out));
}

// Uniform on {lo, lo + step, ...} below hi, rank one.
inline entsum::Dist uniform_range(const entsum::GroupSpec& g, std::int64_t lo, std::int64_t hi,
                                  std::int64_t step = 1) {
  std::vector<entsum::GroupElement> pts;
  for (std::int64_t v = lo; v < hi; v += step) pts.push_back({v});
  return entsum::Dist::uniform(g, pts);
}

inline entsum::JointDist pair(const entsum::GroupSpec& g,
                              const std::vector<std::pair<std::pair<std::int64_t, std::int64_t>,
                                                          std::pair<std::int64_t, std::int64_t>>>& atoms) {
  std::vector<std::pair<std::vector<entsum::GroupElement>, entsum::Rational>> t;
  for (const auto& [xy, m] : atoms) {
    t.push_back({{{xy.first}, {xy.second}}, entsum::make_rational(m.first, m.second)});
  }
  return entsum::JointDist::from_tuples({g, g}, t);
}

inline const entsum::GroupSpec Z = entsum::GroupSpec::integers();
inline entsum::GroupSpec Zm(std::int64_t m) { return entsum::GroupSpec::cyclic(m); }

}  // namespace testing_util
