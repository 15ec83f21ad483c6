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


#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "entsum/errors.hpp"
#include "entsum/fuzz.hpp"
#include "entsum/serialize.hpp"

using namespace entsum;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("entsum_fuzz_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

MetricReport row(const std::string& name, double slack, const std::string& witness) {
  MetricReport r;
  r.name = name;
  r.lhs = 0.0;
  r.rhs = slack;
  r.slack = slack;
  r.witness_path = witness;
  return r;
}

}  // namespace

TEST(FuzzConfig, Validation) {
  FuzzConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.inequality_set = {"nonsense"};
  EXPECT_THROW(cfg.validate(), PreconditionError);
  cfg = {};
  cfg.instance_count = -1;
  EXPECT_THROW(cfg.validate(), PreconditionError);
  cfg = {};
  cfg.workers = 0;
  EXPECT_THROW(cfg.validate(), PreconditionError);
  cfg = {};
  cfg.groups = {};
  EXPECT_THROW(cfg.validate(), PreconditionError);
}

TEST(FuzzConfig, JsonRoundTrip) {
  FuzzConfig cfg;
  cfg.seed = 99;
  cfg.instance_count = 17;
  cfg.inequality_set = {"ese", "cond"};
  cfg.groups = {GroupSpec::cyclic(5)};
  const auto back = FuzzConfig::from_json(cfg.to_json());
  EXPECT_EQ(back.to_json(), cfg.to_json());
  EXPECT_FALSE(cfg.to_json().contains("workers"));
  EXPECT_THROW(FuzzConfig::from_json({{"seed", 1}, {"bogus", 2}}), SchemaError);
}

TEST(Fuzz, SeedsAreStable) {
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
  EXPECT_NE(instance_seed(1, 0), instance_seed(1, 1));
  EXPECT_EQ(instance_seed(7, 3), splitmix64(splitmix64(7) ^ 3));
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  FuzzConfig cfg;
  for (const auto& fam : fuzz_families()) {
    EXPECT_EQ(generate_inputs(fam, cfg, 42), generate_inputs(fam, cfg, 42)) << fam;
  }
}

TEST(Fuzz, EveryFamilyRunsClean) {
  FuzzConfig cfg;
  cfg.instance_count = 13 * 8;
  const auto run = fuzz_run(cfg);
  EXPECT_TRUE(run.ok());
  EXPECT_EQ(run.instances.size(), 104u);
  std::set<std::string> seen;
  for (const auto& inst : run.instances) seen.insert(inst.at("family").get<std::string>());
  EXPECT_EQ(seen.size(), fuzz_families().size());
}

TEST(Fuzz, ZeroInstances) {
  FuzzConfig cfg;
  cfg.instance_count = 0;
  const auto run = fuzz_run(cfg);
  EXPECT_TRUE(run.ok());
  EXPECT_TRUE(run.results.empty());
  const auto text = report_render(run.results);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
  EXPECT_TRUE(report_json(run.results).empty());
}

TEST(Fuzz, OutputIndependentOfWorkers) {
  FuzzConfig cfg;
  cfg.seed = 5;
  cfg.instance_count = 300;
  const auto a = fresh_dir("w1"), b = fresh_dir("w3");
  fuzz_run(cfg, a);
  cfg.workers = 3;
  fuzz_run(cfg, b);
  for (const char* f : {"instances.jsonl", "results.jsonl", "summary.json"}) {
    EXPECT_FALSE(slurp(a / f).empty()) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Fuzz, WitnessPathReplays) {
  FuzzConfig cfg;
  cfg.instance_count = 40;
  const auto dir = fresh_dir("witness");
  const auto run = fuzz_run(cfg, dir);
  for (std::int64_t i : {0, 7, 39}) {
    const auto rs = replay((dir / "instances.jsonl").string() + "#" + std::to_string(i));
    ASSERT_FALSE(rs.empty());
    for (const auto& r : rs) EXPECT_TRUE(r.reproduced) << r.name;
  }
  EXPECT_THROW(replay((dir / "instances.jsonl").string() + "#400"), SchemaError);
  fs::remove_all(dir);
}

TEST(Fuzz, CorpusReplayDetectsTampering) {
  FuzzConfig cfg;
  const json inputs = generate_inputs("ese", cfg, 3);
  const auto reports = evaluate_inputs("ese", inputs);
  ASSERT_FALSE(reports.empty());
  Counterexample c{reports[0].name, "ese", inputs, reports[0].slack, kLibraryVersion};
  EXPECT_EQ(Counterexample::from_json(c.to_json()).to_json(), c.to_json());
  const auto name = c.file_name();
  EXPECT_EQ(name.size(), 16u + 5u);
  EXPECT_EQ(name.substr(16), ".json");

  const auto dir = fresh_dir("corpus");
  fs::create_directories(dir);
  write_json_file(dir / name, c.to_json());
  auto rs = replay((dir / name).string());
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_TRUE(rs[0].reproduced);
  EXPECT_FALSE(rs[0].version_mismatch);

  c.slack -= 1e-6;
  c.version = "0.0.1";
  write_json_file(dir / "tampered.json", c.to_json());
  rs = replay((dir / "tampered.json").string());
  EXPECT_FALSE(rs[0].reproduced);
  EXPECT_TRUE(rs[0].version_mismatch);
  fs::remove_all(dir);
}

TEST(Report, RenderingAndSummary) {
  EXPECT_EQ(summarize({}).size(), 0u);
  const auto one = report_render({row("b.x", 0.5, "instances.jsonl#0")});
  EXPECT_NE(one.find("5.000000e-01"), std::string::npos);
  EXPECT_NE(one.find("instances.jsonl#0"), std::string::npos);

  const std::vector<MetricReport> rs = {row("b", 0.3, "w0"), row("a", -1.0, "w1"), row("b", 0.1, "w2"),
                                        row("b", 0.1, "w3")};
  const auto rows = summarize(rs);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].name, "a");
  EXPECT_EQ(rows[0].violations, 1);
  EXPECT_EQ(rows[1].count, 3);
  EXPECT_EQ(rows[1].violations, 0);
  EXPECT_DOUBLE_EQ(rows[1].min_slack, 0.1);
  EXPECT_EQ(rows[1].argmin_witness, "w2");
  const auto text = report_render(rs);
  EXPECT_LT(text.find("\na "), text.find("\nb "));
  EXPECT_EQ(report_json(rs)[1]["argmin_witness"], "w2");
}
