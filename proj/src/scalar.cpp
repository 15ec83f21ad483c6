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

#include "entsum/scalar.hpp"

#include <cmath>
#include <numbers>

namespace entsum {

MetricReport make_report(std::string name, double lhs, double rhs, nlohmann::json witness) {
  MetricReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.witness = std::move(witness);
  return r;
}

MetricReport make_identity_report(std::string name, double lhs, double rhs,
                                  nlohmann::json witness) {
  MetricReport r = make_report(std::move(name), lhs, rhs, std::move(witness));
  r.slack = -std::abs(rhs - lhs);
  return r;
}

nlohmann::json to_json(const MetricReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["slack"] = r.slack;
  if (r.witness_path.empty()) {
    j["witness_path"] = nullptr;
  } else {
    j["witness_path"] = r.witness_path;
  }
  return j;
}

bool any_violation(const std::vector<MetricReport>& reports, double tol) {
  for (const auto& r : reports) {
    if (r.violated(tol)) return true;
  }
  return false;
}

namespace scalar {

double f(double x) { return x <= 0.0 ? 0.0 : -x * std::log(x); }

double f_prime(double x) { return -std::log(x) - 1.0; }

double log_plus(double x) { return x <= 1.0 ? 0.0 : std::log(x); }

double tangent_gap(double x, double y) { return f(x) + f_prime(x) * (y - x) - f(y); }

std::vector<MetricReport> check_all(double x, double y) {
  // Tolerances scale with magnitudes because these are floating-point facts.
  constexpr double kInvE = 1.0 / std::numbers::e;
  std::vector<MetricReport> out;
  nlohmann::json w = {{"x", x}, {"y", y}};
  out.push_back(make_report("scalar.upper", f(x), kInvE, w));
  out.push_back(make_report("scalar.sublinear", f(y), f(x) + f_prime(x) * (y - x), w));
  out.push_back(make_report("scalar.subadd", f(x + y), f(x) + f(y), w));
  if (x <= kInvE && y <= kInvE) {
    out.push_back(make_report("scalar.triangle", std::abs(f(x) - f(y)), f(std::abs(x - y)), w));
    out.push_back(make_report("scalar.fax", f(x * y), 2.0 * f(x) * f(y), w));
  }
  const double gap = tangent_gap(x, y);
  if (y >= x) {
    out.push_back(make_identity_report("scalar.sub_bound", gap, y * log_plus(y / x) + (x - y), w));
  } else {
    out.push_back(make_report("scalar.sub_bound_lower", 0.0, gap, w));
    out.push_back(make_report("scalar.sub_bound_upper", gap, x, w));
  }
  return out;
}

}  // namespace scalar
}  // namespace entsum
