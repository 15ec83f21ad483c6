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


#include "entsum/fuzz.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include "entsum/bsg.hpp"
#include "entsum/dist.hpp"
#include "entsum/errors.hpp"
#include "entsum/metrics.hpp"
#include "entsum/scalar.hpp"
#include "entsum/serialize.hpp"
#include "entsum/torsionfree.hpp"
#include "entsum/transport.hpp"

namespace entsum {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Seeds and hashing.

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t instance_seed(std::uint64_t seed, std::int64_t index) {
  return splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(index));
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

// std::uniform_int_distribution is implementation-defined; the modulo draw
// keeps generated instances identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  std::int64_t below(std::int64_t n) { return static_cast<std::int64_t>(gen_() % static_cast<std::uint64_t>(n)); }
  std::int64_t between(std::int64_t lo, std::int64_t hi) { return lo + below(hi - lo + 1); }

 private:
  std::mt19937_64 gen_;
};

// Positive integer composition of `total` into `parts` summands.
std::vector<std::int64_t> composition(Rng& rng, std::int64_t total, std::int64_t parts) {
  std::set<std::int64_t> cuts;
  while (static_cast<std::int64_t>(cuts.size()) < parts - 1) cuts.insert(rng.between(1, total - 1));
  std::vector<std::int64_t> out;
  std::int64_t prev = 0;
  for (auto c : cuts) {
    out.push_back(c - prev);
    prev = c;
  }
  out.push_back(total - prev);
  return out;
}

std::vector<std::int64_t> box_extents(const std::vector<GroupSpec>& groups) {
  std::size_t rank = 0;
  for (const auto& g : groups) rank += g.rank();
  const std::int64_t free_box = rank == 1 ? 8 : 4;
  std::vector<std::int64_t> ext;
  for (const auto& g : groups) {
    for (auto m : g.moduli()) ext.push_back(m == 0 ? free_box : m);
  }
  return ext;
}

// Random law on the product of `groups` with support drawn from a small box
// and masses c_i / D for a random composition of D <= den_cap.
std::vector<std::pair<std::vector<GroupElement>, Rational>> random_tuples(
    Rng& rng, const std::vector<GroupSpec>& groups, int max_support, int den_cap) {
  const auto ext = box_extents(groups);
  std::int64_t points = 1;
  for (auto e : ext) points = std::min<std::int64_t>(points * e, 1 << 20);
  const std::int64_t cap = std::min<std::int64_t>({max_support, points, den_cap});
  const std::int64_t s = rng.between(1, cap);
  std::set<std::vector<std::int64_t>> chosen;
  while (static_cast<std::int64_t>(chosen.size()) < s) {
    std::vector<std::int64_t> pt;
    for (auto e : ext) pt.push_back(rng.below(e));
    chosen.insert(std::move(pt));
  }
  const std::int64_t den = rng.between(s, den_cap);
  const auto parts = composition(rng, den, s);
  std::vector<std::pair<std::vector<GroupElement>, Rational>> out;
  std::size_t i = 0;
  for (const auto& pt : chosen) {
    std::vector<GroupElement> elems;
    std::size_t off = 0;
    for (const auto& g : groups) {
      elems.emplace_back(pt.begin() + off, pt.begin() + off + g.rank());
      off += g.rank();
    }
    out.emplace_back(std::move(elems), make_rational(parts[i++], den));
  }
  return out;
}

Dist random_dist(Rng& rng, const GroupSpec& g, int max_support, int den_cap) {
  std::vector<Atom> atoms;
  for (auto& [elems, m] : random_tuples(rng, {g}, max_support, den_cap)) atoms.emplace_back(elems[0], m);
  return Dist::from_atoms(g, std::move(atoms));
}

JointDist random_joint(Rng& rng, std::vector<GroupSpec> groups, int max_support, int den_cap) {
  auto tuples = random_tuples(rng, groups, max_support, den_cap);
  return JointDist::from_tuples(std::move(groups), tuples);
}

json rational_json(const Rational& r) {
  json j;
  rational_to_json(j, r);
  return j;
}

PiecewiseDensity steps_from_json(const json& j) {
  std::vector<Rational> weights;
  for (const auto& w : j.at("weights")) weights.emplace_back(w.get<std::int64_t>());
  return PiecewiseDensity::steps(rational_from_json(j.at("start"), true), rational_from_json(j.at("width")), weights);
}

json random_steps(Rng& rng) {
  json w = json::array();
  const auto cells = rng.between(1, 5);
  for (std::int64_t i = 0; i < cells; ++i) w.push_back(rng.between(1, 8));
  return {{"start", rational_json(make_rational(rng.between(-3, 3), 1))},
          {"width", rational_json(make_rational(1, rng.between(1, 4)))},
          {"weights", std::move(w)}};
}

// 16- and 256-entry tables over Z/4 used by the submodularity fixtures.
std::vector<std::int64_t> random_table(Rng& rng, std::size_t n) {
  std::vector<std::int64_t> t(n);
  for (auto& v : t) v = rng.below(4);
  return t;
}

const GroupSpec& pick_group(Rng& rng, const FuzzConfig& cfg) {
  return cfg.groups[static_cast<std::size_t>(rng.below(static_cast<std::int64_t>(cfg.groups.size())))];
}

struct Family {
  std::function<json(Rng&, const FuzzConfig&)> generate;
  std::function<std::vector<MetricReport>(const json&)> evaluate;
};

Dist D(const json& j, const char* key) { return dist_from_json(j.at(key)); }

std::map<std::string, Family> build_families() {
  std::map<std::string, Family> f;

  f["ese"] = {[](Rng& rng, const FuzzConfig& cfg) {
                const auto& g = pick_group(rng, cfg);
                return json{{"p", dist_to_json(random_dist(rng, g, cfg.support_cap, cfg.denominator_cap))},
                            {"q", dist_to_json(random_dist(rng, g, cfg.support_cap, cfg.denominator_cap))},
                            {"r", dist_to_json(random_dist(rng, g, cfg.support_cap, cfg.denominator_cap))},
                            {"n", rng.between(1, 3)}};
              },
              [](const json& in) {
                return check_ese_suite(D(in, "p"), D(in, "q"), D(in, "r"), in.at("n").get<int>());
              }};

  f["triv"] = {[](Rng& rng, const FuzzConfig& cfg) {
                 const auto& g = pick_group(rng, cfg);
                 return json{{"pair", joint_to_json(random_joint(rng, {g, g}, cfg.support_cap, cfg.denominator_cap))},
                             {"p", dist_to_json(random_dist(rng, g, cfg.support_cap, cfg.denominator_cap))},
                             {"q", dist_to_json(random_dist(rng, g, cfg.support_cap, cfg.denominator_cap))}};
               },
               [](const json& in) {
                 auto out = check_trivial_dependent(joint_from_json(in.at("pair")));
                 for (auto& r : check_trivial_independent(D(in, "p"), D(in, "q"))) out.push_back(std::move(r));
                 return out;
               }};

  f["cond"] = {[](Rng& rng, const FuzzConfig& cfg) {
                 const auto& g = pick_group(rng, cfg);
                 return json{{"triple", joint_to_json(random_joint(rng, {g, g, g}, 2 * cfg.support_cap,
                                                                   cfg.denominator_cap))}};
               },
               [](const json& in) { return check_conditional_suite(joint_from_json(in.at("triple"))); }};

  f["submodularity"] = {
      [](Rng& rng, const FuzzConfig& cfg) {
        const auto z4 = GroupSpec::cyclic(4);
        return json{{"base", joint_to_json(random_joint(rng, {z4, z4, z4, z4}, 2 * cfg.support_cap,
                                                        cfg.denominator_cap))},
                    {"g", random_table(rng, 16)},
                    {"h", random_table(rng, 256)}};
      },
      [](const json& in) {
        // (A, B, C, D) -> X0 = g(B, D), X1 = (A, B, D), X2 = (B, C, D), X12 = h(A, B, C, D)
        const JointDist base = joint_from_json(in.at("base"));
        const auto g = in.at("g").get<std::vector<std::int64_t>>();
        const auto h = in.at("h").get<std::vector<std::int64_t>>();
        if (g.size() != 16 || h.size() != 256) throw SchemaError("submodularity tables have the wrong size");
        const auto z4 = GroupSpec::cyclic(4);
        const GroupSpec z4_3({4, 4, 4});
        const JointDist j = base.map({z4, z4_3, z4_3, z4}, [&](const JointDist& self, const JointDist::Key& k) {
          auto c = [&](std::size_t i) { return self.component(k, i)[0]; };
          const auto a = c(0), b = c(1), cc = c(2), d = c(3);
          return JointDist::Key{g[static_cast<std::size_t>(4 * b + d)], a, b, d, b, cc, d,
                                h[static_cast<std::size_t>(((a * 4 + b) * 4 + cc) * 4 + d)]};
        });
        return std::vector<MetricReport>{submodularity_check(j)};
      }};

  f["xysim"] = {[](Rng& rng, const FuzzConfig& cfg) {
                  const auto& g = pick_group(rng, cfg);
                  return json{{"p", dist_to_json(random_dist(rng, g, cfg.support_cap, cfg.denominator_cap))},
                              {"q", dist_to_json(random_dist(rng, g, cfg.support_cap, cfg.denominator_cap))}};
                },
                [](const json& in) { return std::vector<MetricReport>{check_xysim(D(in, "p"), D(in, "q"))}; }};

  f["jensen"] = {[](Rng& rng, const FuzzConfig& cfg) {
                   const std::int64_t sizes[] = {8, 16, 32};
                   const std::int64_t n = sizes[rng.below(3)];
                   const auto z = GroupSpec::integers();
                   std::vector<Atom> atoms;
                   for (auto& [e, m] : random_tuples(rng, {GroupSpec::cyclic(n)}, static_cast<int>(n),
                                                     cfg.denominator_cap)) {
                     atoms.emplace_back(e[0], m);
                   }
                   const Dist p = Dist::from_atoms(z, std::move(atoms));
                   const double deficit = std::max(std::log(static_cast<double>(n)) - entropy(p), 0.0);
                   return json{{"p", dist_to_json(p)},
                               {"ambient_size", n},
                               {"log_k", deficit + 0.1 * static_cast<double>(rng.below(6))}};
                 },
                 [](const json& in) {
                   std::vector<GroupElement> ambient;
                   const auto n = in.at("ambient_size").get<std::int64_t>();
                   for (std::int64_t i = 0; i < n; ++i) ambient.push_back({i});
                   return std::vector<MetricReport>{
                       jensen_level_sets(D(in, "p"), ambient, in.at("log_k").get<double>()).report};
                 }};

  f["bsg"] = {[](Rng& rng, const FuzzConfig& cfg) {
                const auto& g = pick_group(rng, cfg);
                return json{{"pair", joint_to_json(random_joint(rng, {g, g}, 2 * cfg.support_cap, cfg.denominator_cap))}};
              },
              [](const json& in) { return verify_bsg(make_bsg_instance(joint_from_json(in.at("pair")))).reports; }};

  f["mmt"] = {[](Rng& rng, const FuzzConfig& cfg) {
                const auto& g = pick_group(rng, cfg);
                return json{{"p", dist_to_json(random_dist(rng, g, cfg.support_cap, cfg.denominator_cap))},
                            {"q", dist_to_json(random_dist(rng, g, cfg.support_cap, cfg.denominator_cap))},
                            {"r", dist_to_json(random_dist(rng, g, cfg.support_cap, cfg.denominator_cap))}};
              },
              [](const json& in) { return std::vector<MetricReport>{check_mmt(D(in, "p"), D(in, "q"), D(in, "r"))}; }};

  f["lipschitz"] = {[](Rng& rng, const FuzzConfig& cfg) {
                      const auto& g = pick_group(rng, cfg);
                      const int s = std::min(cfg.support_cap, 3);
                      return json{{"x", dist_to_json(random_dist(rng, g, s, cfg.denominator_cap))},
                                  {"x2", dist_to_json(random_dist(rng, g, s, cfg.denominator_cap))},
                                  {"y", dist_to_json(random_dist(rng, g, s, cfg.denominator_cap))},
                                  {"y2", dist_to_json(random_dist(rng, g, s, cfg.denominator_cap))}};
                    },
                    [](const json& in) {
                      const TransportOracle oracle = [](const Dist& a, const Dist& b) {
                        return transport_cost_exact(a, b);
                      };
                      return check_lipschitz(D(in, "x"), D(in, "x2"), D(in, "y"), D(in, "y2"), oracle);
                    }};

  f["transport"] = {
      [](Rng& rng, const FuzzConfig& cfg) {
        const auto& g = pick_group(rng, cfg);
        const int sp = std::min(cfg.support_cap, 4);
        const Dist p = random_dist(rng, g, sp, cfg.denominator_cap);
        Dist q;
        if (rng.below(4) == 0) {
          GroupElement a;
          for (auto m : g.moduli()) a.push_back(rng.below(m == 0 ? 5 : m));
          q = p.translate(a);
        } else {
          const auto sq = std::min<std::int64_t>(sp, static_cast<std::int64_t>(kExactCap / p.size()));
          q = random_dist(rng, g, static_cast<int>(sq), cfg.denominator_cap);
        }
        return json{{"p", dist_to_json(p)}, {"q", dist_to_json(q)}};
      },
      [](const json& in) {
        const Dist p = D(in, "p"), q = D(in, "q");
        const TransportCertificate exact = transport_exact(p, q);
        std::vector<MetricReport> out;
        out.push_back(make_identity_report("transport.certificate", certificate_valid(exact) ? 1.0 : 0.0, 1.0));
        out.push_back(make_report("transport.lower", std::max(0.0, entropy(q) - entropy(p)), exact.cost));
        out.push_back(make_report("transport.vs_independent", exact.cost, independent_certificate(p, q).cost));
        // q a translate of p: the point-mass shift is constructive with cost 0.
        const GroupElement a = sub(p.group(), q.atoms().front().first, p.atoms().front().first);
        if (dist_equal(p.translate(a), q)) {
          const auto shift = shift_certificate(p, Dist::point(p.group(), a));
          out.push_back(make_report("transport.vs_shift", exact.cost, shift.cost));
        }
        return out;
      }};

  f["abbn"] = {[](Rng& rng, const FuzzConfig&) { return json{{"f", random_steps(rng)}, {"g", random_steps(rng)}}; },
               [](const json& in) {
                 return std::vector<MetricReport>{abbn_check(steps_from_json(in.at("f")), steps_from_json(in.at("g")))};
               }};

  f["scalar"] = {[](Rng& rng, const FuzzConfig&) {
                   const auto bx = rng.between(1, 1000), by = rng.between(1, 1000);
                   return json{{"x", rational_json(make_rational(rng.between(1, bx), bx))},
                               {"y", rational_json(make_rational(rng.between(1, by), by))}};
                 },
                 [](const json& in) {
                   return scalar::check_all(to_double(rational_from_json(in.at("x"))),
                                            to_double(rational_from_json(in.at("y"))));
                 }};

  f["bridge"] = {[](Rng& rng, const FuzzConfig& cfg) {
                   const Dist p = random_dist(rng, GroupSpec::integers(), cfg.support_cap, cfg.denominator_cap);
                   return json{{"p", dist_to_json(p.translate(GroupElement{-4}))}};
                 },
                 [](const json& in) { return std::vector<MetricReport>{bridge_entropy(D(in, "p")).report}; }};

  return f;
}

const std::map<std::string, Family>& families() {
  static const std::map<std::string, Family> f = build_families();
  return f;
}

const Family& family(const std::string& name) {
  const auto it = families().find(name);
  if (it == families().end()) throw PreconditionError("unknown fuzz family \"" + name + "\"");
  return it->second;
}

}  // namespace

const std::vector<std::string>& fuzz_families() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [k, v] : families()) out.push_back(k);
    return out;
  }();
  return names;
}

double tolerance_for(const std::string& report_name) {
  // The continuous entropies come from quadrature.
  return report_name == "abbn" ? 1e-6 : kEntropyTol;
}

json generate_inputs(const std::string& name, const FuzzConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  return family(name).generate(rng, cfg);
}

std::vector<MetricReport> evaluate_inputs(const std::string& name, const json& inputs) {
  try {
    return family(name).evaluate(inputs);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed ") + name + " inputs: " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Config.

void FuzzConfig::validate() const {
  if (instance_count < 0) throw PreconditionError("instance_count must be non-negative");
  if (support_cap < 1) throw PreconditionError("support_cap must be positive");
  if (denominator_cap < 1 || denominator_cap > 64) throw PreconditionError("denominator_cap must lie in [1, 64]");
  if (groups.empty()) throw PreconditionError("at least one group is required");
  for (const auto& g : groups) {
    if (g.rank() == 0) throw PreconditionError("groups must have positive rank");
  }
  if (workers < 1) throw PreconditionError("workers must be positive");
  for (const auto& n : inequality_set) family(n);
}

json FuzzConfig::to_json() const {
  json g = json::array();
  for (const auto& s : groups) g.push_back(group_to_json(s));
  return {{"seed", seed},
          {"instance_count", instance_count},
          {"support_cap", support_cap},
          {"denominator_cap", denominator_cap},
          {"groups", std::move(g)},
          {"inequality_set", inequality_set.empty() ? fuzz_families() : inequality_set}};
}

FuzzConfig FuzzConfig::from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("fuzz config must be a JSON object");
  static const std::set<std::string> known = {"seed",   "instance_count", "support_cap", "denominator_cap",
                                              "groups", "inequality_set", "workers"};
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) throw SchemaError("unknown fuzz config field \"" + k + "\"");
  }
  FuzzConfig cfg;
  try {
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("instance_count")) cfg.instance_count = j.at("instance_count").get<std::int64_t>();
    if (j.contains("support_cap")) cfg.support_cap = j.at("support_cap").get<int>();
    if (j.contains("denominator_cap")) cfg.denominator_cap = j.at("denominator_cap").get<int>();
    if (j.contains("groups")) {
      cfg.groups.clear();
      for (const auto& g : j.at("groups")) cfg.groups.push_back(group_from_json(g));
    }
    if (j.contains("inequality_set")) cfg.inequality_set = j.at("inequality_set").get<std::vector<std::string>>();
    if (j.contains("workers")) cfg.workers = j.at("workers").get<int>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("fuzz config: ") + e.what());
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Reports.

std::vector<SummaryRow> summarize(const std::vector<MetricReport>& results) {
  std::map<std::string, SummaryRow> rows;
  for (const auto& r : results) {
    auto [it, fresh] = rows.try_emplace(r.name);
    SummaryRow& row = it->second;
    if (fresh || r.slack < row.min_slack) {
      row.min_slack = r.slack;
      row.argmin_witness = r.witness_path;
    }
    row.name = r.name;
    ++row.count;
    if (r.violated(tolerance_for(r.name))) ++row.violations;
  }
  std::vector<SummaryRow> out;
  for (auto& [k, v] : rows) out.push_back(std::move(v));
  return out;
}

std::string report_render(const std::vector<MetricReport>& results) {
  std::ostringstream os;
  os << std::left << std::setw(28) << "inequality" << std::right << std::setw(10) << "count" << std::setw(12)
     << "violations" << std::setw(18) << "min_slack" << "  argmin_witness\n";
  for (const auto& row : summarize(results)) {
    std::ostringstream slack;
    slack << std::scientific << std::setprecision(6) << row.min_slack;
    os << std::left << std::setw(28) << row.name << std::right << std::setw(10) << row.count << std::setw(12)
       << row.violations << std::setw(18) << slack.str() << "  "
       << (row.argmin_witness.empty() ? "-" : row.argmin_witness) << '\n';
  }
  return os.str();
}

json report_json(const std::vector<MetricReport>& results) {
  json rows = json::array();
  for (const auto& row : summarize(results)) {
    rows.push_back({{"name", row.name},
                    {"count", row.count},
                    {"violations", row.violations},
                    {"min_slack", row.min_slack},
                    {"argmin_witness", row.argmin_witness.empty() ? json(nullptr) : json(row.argmin_witness)}});
  }
  return rows;
}

json FuzzRun::summary(const FuzzConfig& cfg) const {
  json errs = json::array();
  for (const auto& e : errors) errs.push_back({{"index", e.index}, {"family", e.family}, {"message", e.message}});
  return {{"version", kLibraryVersion},
          {"config", cfg.to_json()},
          {"instances", instances.size()},
          {"results", results.size()},
          {"violations", violations},
          {"skipped", skipped},
          {"errors", std::move(errs)},
          {"counterexamples", counterexamples},
          {"inequalities", report_json(results)}};
}

// ---------------------------------------------------------------------------
// Counterexamples.

json Counterexample::to_json() const {
  return {{"name", name}, {"family", family}, {"inputs", inputs}, {"slack", slack}, {"version", version}};
}

Counterexample Counterexample::from_json(const json& j) {
  Counterexample c;
  try {
    c.name = j.at("name").get<std::string>();
    c.family = j.at("family").get<std::string>();
    c.inputs = j.at("inputs");
    c.slack = j.at("slack").get<double>();
    c.version = j.at("version").get<std::string>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("counterexample: ") + e.what());
  }
  return c;
}

std::string Counterexample::file_name() const {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(to_json().dump()) << ".json";
  return os.str();
}

namespace {

struct Outcome {
  std::vector<MetricReport> reports;
  bool skipped = false;
  std::string error;
};

Outcome run_instance(const std::string& fam, const json& inputs) {
  Outcome o;
  try {
    o.reports = evaluate_inputs(fam, inputs);
  } catch (const InstanceTooLargeError&) {
    o.skipped = true;
  } catch (const std::exception& e) {
    o.error = e.what();
  }
  return o;
}

void write_lines(const std::filesystem::path& path, const std::vector<json>& lines) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& l : lines) out << l.dump() << '\n';
}

}  // namespace

FuzzRun fuzz_run(const FuzzConfig& cfg, const std::filesystem::path& out_dir) {
  cfg.validate();
  const auto& set = cfg.inequality_set.empty() ? fuzz_families() : cfg.inequality_set;
  const auto n = static_cast<std::size_t>(cfg.instance_count);

  FuzzRun run;
  run.instances.resize(n);
  std::vector<Outcome> outcomes(n);
  auto work = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const std::string& fam = set[i % set.size()];
      const std::uint64_t seed = instance_seed(cfg.seed, static_cast<std::int64_t>(i));
      json inputs = generate_inputs(fam, cfg, seed);
      outcomes[i] = run_instance(fam, inputs);
      run.instances[i] = {{"index", i}, {"family", fam}, {"seed", seed}, {"inputs", std::move(inputs)}};
    }
  };
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, n * w / workers, n * (w + 1) / workers);
    for (auto& t : pool) t.join();
  }

  std::vector<Counterexample> found;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string fam = run.instances[i].at("family");
    if (outcomes[i].skipped) {
      ++run.skipped[fam];
      continue;
    }
    if (!outcomes[i].error.empty()) {
      run.errors.push_back({static_cast<std::int64_t>(i), fam, outcomes[i].error});
      continue;
    }
    for (auto& r : outcomes[i].reports) {
      r.witness_path = "instances.jsonl#" + std::to_string(i);
      if (r.violated(tolerance_for(r.name))) {
        ++run.violations;
        found.push_back({r.name, fam, run.instances[i].at("inputs"), r.slack, kLibraryVersion});
      }
      run.results.push_back(std::move(r));
    }
  }
  for (const auto& c : found) run.counterexamples.push_back(c.file_name());

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_lines(out_dir / "instances.jsonl", run.instances);
    std::vector<json> lines;
    lines.reserve(run.results.size());
    for (const auto& r : run.results) lines.push_back(to_json(r));
    write_lines(out_dir / "results.jsonl", lines);
    write_json_file(out_dir / "summary.json", run.summary(cfg));
    if (!found.empty()) {
      const auto corpus = out_dir / "corpus";
      std::filesystem::create_directories(corpus);
      for (const auto& c : found) {
        const auto path = corpus / c.file_name();
        if (!std::filesystem::exists(path)) write_json_file(path, c.to_json());
      }
    }
  }
  return run;
}

// ---------------------------------------------------------------------------
// Replay.

namespace {

ReplayResult compare(const std::string& name, double stored, const std::vector<MetricReport>& fresh) {
  ReplayResult out;
  out.name = name;
  out.stored_slack = stored;
  for (const auto& r : fresh) {
    if (r.name == name) {
      out.recomputed = r;
      out.reproduced = std::abs(r.slack - stored) <= kReplayTol;
      return out;
    }
  }
  out.recomputed.name = name;
  out.recomputed.slack = std::nan("");
  return out;
}

std::vector<json> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path.string());
  std::vector<json> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw SchemaError(path.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

std::vector<ReplayResult> replay(const std::string& path) {
  const auto hash = path.rfind('#');
  if (hash == std::string::npos) {
    const Counterexample c = Counterexample::from_json(read_json_file(path));
    ReplayResult r = compare(c.name, c.slack, evaluate_inputs(c.family, c.inputs));
    r.version_mismatch = c.version != kLibraryVersion;
    return {r};
  }

  const std::filesystem::path file = path.substr(0, hash);
  const std::string tag = file.filename().string() + path.substr(hash);
  std::size_t index = 0;
  try {
    index = std::stoul(path.substr(hash + 1));
  } catch (const std::exception&) {
    throw SchemaError("bad witness index in " + path);
  }
  const auto instances = read_lines(file);
  if (index >= instances.size()) throw SchemaError("witness index out of range in " + path);
  const json& inst = instances[index];
  std::vector<MetricReport> fresh;
  try {
    fresh = evaluate_inputs(inst.at("family").get<std::string>(), inst.at("inputs"));
  } catch (const json::exception& e) {
    throw SchemaError(std::string("instance record: ") + e.what());
  }

  std::vector<ReplayResult> out;
  for (const auto& row : read_lines(file.parent_path() / "results.jsonl")) {
    if (!row.contains("witness_path") || row.at("witness_path") != tag) continue;
    out.push_back(compare(row.at("name").get<std::string>(), row.at("slack").get<double>(), fresh));
  }
  if (out.empty()) throw SchemaError("no stored results for " + tag);
  return out;
}

}  // namespace entsum
