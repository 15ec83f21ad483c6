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

#include <string>
#include <vector>

#include "json.hpp"

namespace entsum {

// Absolute tolerance for entropy comparisons throughout the library.
inline constexpr double kEntropyTol = 1e-9;

/// One inequality evaluation lhs <= rhs; slack = rhs - lhs.
struct MetricReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  nlohmann::json witness;    // serialized inputs, may be null
  std::string witness_path;  // where the inputs live on disk, may be empty

  bool violated(double tol = kEntropyTol) const { return slack < -tol; }
};

MetricReport make_report(std::string name, double lhs, double rhs,
                         nlohmann::json witness = nullptr);

// Reports a two-sided identity |lhs - rhs| <= tol by recording
// slack = -|lhs - rhs| (so it is never positive).
MetricReport make_identity_report(std::string name, double lhs, double rhs,
                                  nlohmann::json witness = nullptr);

nlohmann::json to_json(const MetricReport& r);

bool any_violation(const std::vector<MetricReport>& reports, double tol = kEntropyTol);

}  // namespace entsum
