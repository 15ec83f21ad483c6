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
#include <optional>
#include <string>
#include <vector>

#include "entsum/dist.hpp"
#include "entsum/progression.hpp"
#include "entsum/report.hpp"

namespace entsum {

struct CosetReport {
  bool is_coset_uniform = false;
  std::optional<std::vector<GroupElement>> subgroup;
  std::optional<GroupElement> base;
  double doubling = 1.0;
};

// Accepts iff D = supp - supp is a subgroup, supp is one coset of D, and all
// masses are equal.  Exact.
CosetReport detect_coset_uniform(const Dist& p);

struct CoreReport {
  double c = 1.0;
  std::vector<GroupElement> core;  // A
  Rational mass;                   // P(X in A)
  double log_size_gap = 0.0;       // log|A| - Ent(X)
  double energy_ratio = 0.0;       // E(A) / |A|^3, 0 for empty A
  bool c_too_small = true;         // mass < 1/2
};

// A = { x : e^{-Ent}/C <= p(x) <= C e^{-Ent} }.
CoreReport effective_support(const Dist& p, double c);
// Doubles C from `c0` until the window carries mass >= 1/2.
CoreReport effective_support_search(const Dist& p, double c0 = 1.0, int max_doublings = 64);

inline constexpr std::size_t kEnergyCap = 2000;

// #{ (a1,a2,a3,a4) in A^4 : a1 + a2 = a3 + a4 }.
std::int64_t additive_energy(const GroupSpec& g, const std::vector<GroupElement>& a);

// X = U + Z with U uniform on `progression` and Z independent noise.
struct InverseFixture {
  std::string name;
  CosetProgression progression;
  Dist noise;
  // Optional proper progression containing supp X, to run the uniformiser on.
  std::optional<CosetProgression> hull;
  // Optional partner Y for the pair bound sigma[X] <= exp(4 d_R(X,Y)).
  std::optional<Dist> partner;
  // Curated members additionally assert energy_ratio >= 1/16.
  bool curated = false;
};

struct InverseFixtureReport {
  std::string name;
  double noise_entropy = 0.0;
  double transport_cost = 0.0;       // X -> U via reversed noise
  std::optional<double> hull_cost;   // X -> uniform on hull
  double doubling = 1.0;
  double energy_ratio = 0.0;
  std::vector<MetricReport> reports;
};

std::vector<InverseFixtureReport> verify_inverse_fixtures(const std::vector<InverseFixture>& corpus);

// The built-in fixture family.
std::vector<InverseFixture> default_inverse_fixtures();

}  // namespace entsum
