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

#include <vector>

#include "entsum/report.hpp"

// Scalar facts about F(x) = x log(1/x).
namespace entsum::scalar {

double f(double x);
double f_prime(double x);
double log_plus(double x);

// F(x) + F'(x)(y - x) - F(y); non-negative by concavity.
double tangent_gap(double x, double y);

/**
 * Evaluates every scalar inequality on (x, y):
 *   upper      F(x) <= 1/e
 *   sublinear  F(y) <= F(x) + F'(x)(y - x)
 *   subadd     F(x + y) <= F(x) + F(y)        (x + y <= 1 not required)
 *   triangle   |F(x) - F(y)| <= F(|x - y|)    (only when x, y <= 1/e)
 *   fax        F(xy) <= 2 F(x) F(y)           (only when x, y <= 1/e)
 *   sub_bound  tangent_gap(x, y) == y log+(y/x) + (x - y)  for y >= x,
 *              tangent_gap(x, y) in [0, x]                 for y < x
 * Inputs are expected in (0, 1].
 */
std::vector<MetricReport> check_all(double x, double y);

}  // namespace entsum::scalar
