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
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "entsum/group.hpp"
#include "entsum/report.hpp"
#include "json.hpp"

namespace entsum {

inline constexpr const char* kLibraryVersion = "0.1.0";

struct FuzzConfig {
  std::uint64_t seed = 1;
  std::int64_t instance_count = 1000;
  int support_cap = 6;
  int denominator_cap = 64;
  std::vector<GroupSpec> groups = {GroupSpec::integers(), GroupSpec::cyclic(8)};
  // Family names from fuzz_families(); empty means all of them.
  std::vector<std::string> inequality_set;
  int workers = 1;

  // Throws PreconditionError for out-of-range fields or unknown families.
  void validate() const;
  // Workers are omitted: they never change the output.
  nlohmann::json to_json() const;
  static FuzzConfig from_json(const nlohmann::json& j);
};

const std::vector<std::string>& fuzz_families();

// Reports with this name are compared against this tolerance.
double tolerance_for(const std::string& report_name);

/// Deterministic instance generator: identical (family, cfg, seed) give
/// identical inputs.
nlohmann::json generate_inputs(const std::string& family, const FuzzConfig& cfg, std::uint64_t seed);
// Pure evaluation of a family on serialized inputs.
std::vector<MetricReport> evaluate_inputs(const std::string& family, const nlohmann::json& inputs);

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t instance_seed(std::uint64_t seed, std::int64_t index);
std::uint64_t fnv1a64(const std::string& bytes);

struct SummaryRow {
  std::string name;
  std::int64_t count = 0;
  std::int64_t violations = 0;
  double min_slack = 0.0;
  std::string argmin_witness;
};

// Rows sorted by name; ties on min slack keep the earliest result.
std::vector<SummaryRow> summarize(const std::vector<MetricReport>& results);
// Header plus one row per inequality name.
std::string report_render(const std::vector<MetricReport>& results);
nlohmann::json report_json(const std::vector<MetricReport>& results);

struct InstanceError {
  std::int64_t index = 0;
  std::string family;
  std::string message;
};

struct FuzzRun {
  std::vector<nlohmann::json> instances;  // {"index", "family", "seed", "inputs"}
  std::vector<MetricReport> results;      // instance order, witness_path set
  std::map<std::string, std::int64_t> skipped;  // cap violations per family
  std::vector<InstanceError> errors;
  std::vector<std::string> counterexamples;     // corpus file names
  std::int64_t violations = 0;

  bool ok() const { return violations == 0 && errors.empty(); }
  nlohmann::json summary(const FuzzConfig& cfg) const;
};

/**
 * Runs the campaign.  With a non-empty out_dir it writes instances.jsonl,
 * results.jsonl, summary.json and one corpus/<hash>.json per violation
 * (existing corpus files are never rewritten).  The written bytes depend
 * only on cfg minus workers.
 */
FuzzRun fuzz_run(const FuzzConfig& cfg, const std::filesystem::path& out_dir = {});

struct Counterexample {
  std::string name;
  std::string family;
  nlohmann::json inputs;
  double slack = 0.0;
  std::string version;

  nlohmann::json to_json() const;
  static Counterexample from_json(const nlohmann::json& j);
  std::string file_name() const;  // <fnv1a hex>.json
};

struct ReplayResult {
  std::string name;
  double stored_slack = 0.0;
  MetricReport recomputed;
  bool reproduced = false;
  bool version_mismatch = false;
};

inline constexpr double kReplayTol = 1e-12;

/**
 * Accepts a corpus file, or a witness path "<dir>/instances.jsonl#<idx>" whose
 * stored slacks are read from the sibling results.jsonl.  Throws SchemaError
 * on malformed files.
 */
std::vector<ReplayResult> replay(const std::string& path);

}  // namespace entsum
