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


#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "entsum/bsg.hpp"
#include "entsum/errors.hpp"
#include "entsum/fuzz.hpp"
#include "entsum/inverse.hpp"
#include "entsum/metrics.hpp"
#include "entsum/serialize.hpp"
#include "entsum/torsionfree.hpp"
#include "entsum/transport.hpp"

namespace {

using entsum::json;

constexpr int kOk = 0;
constexpr int kViolations = 1;
constexpr int kUsage = 2;

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string out;
};

void emit(const json& j) { std::cout << j.dump() << '\n'; }

int emit_reports(const std::vector<entsum::MetricReport>& reports) {
  bool bad = false;
  for (const auto& r : reports) {
    emit(entsum::to_json(r));
    bad = bad || r.violated(entsum::tolerance_for(r.name));
  }
  return bad ? kViolations : kOk;
}

entsum::Dist load_dist(const std::string& path) { return entsum::dist_from_json(entsum::read_json_file(path)); }

json spectrum_json(const entsum::SpectrumReport& s) {
  return {{"experiment", "smooth-shift"},
          {"box", s.box},
          {"mu", s.mu},
          {"lambda_size", s.lambda.size()},
          {"lambda_bound", s.lambda_bound},
          {"parseval_lhs", s.parseval_lhs},
          {"parseval_rhs", s.parseval_rhs},
          {"search_radius", s.search_radius},
          {"shift", s.shift},
          {"chira_satisfied", s.chira_satisfied},
          {"max_character_defect", s.max_character_defect},
          {"realized_tv", s.realized_tv}};
}

// Cheapest constructive certificate available for (p, q).
entsum::TransportCertificate construct(const entsum::Dist& p, const entsum::Dist& q) {
  using namespace entsum;
  std::vector<TransportCertificate> cands;
  cands.push_back(independent_certificate(p, q));
  const GroupElement a = sub(p.group(), q.atoms().front().first, p.atoms().front().first);
  if (dist_equal(p.translate(a), q)) cands.push_back(shift_certificate(p, Dist::point(p.group(), a)));
  const GroupSpec& g = p.group();
  if (g.finite() && q.size() == static_cast<std::size_t>(g.order()) &&
      dist_equal(q, Dist::uniform(g, enumerate_elements(g)))) {
    const double log_k = std::max(std::log(static_cast<double>(g.order())) - entropy(p), 0.0);
    try {
      cands.push_back(uniformise_group(p, std::exp(log_k)));
    } catch (const PreconditionError&) {
    } catch (const InstanceTooLargeError&) {
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < cands.size(); ++i) {
    if (cands[i].cost < cands[best].cost) best = i;
  }
  return cands[best];
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy sumset toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output directory");

  std::string dist_a, dist_b;
  int exit_code = kOk;
  std::function<int()> action;

  auto* entropy_cmd = app.add_subcommand("entropy", "Shannon entropy of a distribution (nats)");
  entropy_cmd->add_option("dist", dist_a, "Distribution JSON")->required()->check(CLI::ExistingFile);
  entropy_cmd->callback([&] {
    action = [&] {
      emit({{"entropy", entsum::entropy(load_dist(dist_a))}});
      return kOk;
    };
  });

  auto* doubling_cmd = app.add_subcommand("doubling", "Entropic doubling constant");
  doubling_cmd->add_option("dist", dist_a, "Distribution JSON")->required()->check(CLI::ExistingFile);
  doubling_cmd->callback([&] {
    action = [&] {
      const auto p = load_dist(dist_a);
      emit({{"log_doubling", entsum::log_doubling(p)}, {"doubling", entsum::doubling_constant(p)}});
      return kOk;
    };
  });

  auto* ruzsa_cmd = app.add_subcommand("ruzsa", "Entropic Ruzsa distance");
  ruzsa_cmd->add_option("p", dist_a, "First distribution")->required()->check(CLI::ExistingFile);
  ruzsa_cmd->add_option("q", dist_b, "Second distribution")->required()->check(CLI::ExistingFile);
  ruzsa_cmd->callback([&] {
    action = [&] {
      emit({{"ruzsa", entsum::ruzsa_distance(load_dist(dist_a), load_dist(dist_b))}});
      return kOk;
    };
  });

  std::string family, inputs_path;
  auto* check_cmd = app.add_subcommand("check", "Evaluate one inequality family");
  check_cmd->add_option("family", family, "Family name")->required()->check(CLI::IsMember(entsum::fuzz_families()));
  check_cmd->add_option("inputs", inputs_path, "Inputs JSON (random instance from --seed when omitted)")
      ->check(CLI::ExistingFile);
  check_cmd->callback([&] {
    action = [&] {
      json inputs;
      if (inputs_path.empty()) {
        inputs = entsum::generate_inputs(family, entsum::FuzzConfig{}, entsum::instance_seed(g.seed.value_or(1), 0));
      } else {
        inputs = entsum::read_json_file(inputs_path);
      }
      auto reports = entsum::evaluate_inputs(family, inputs);
      if (!inputs_path.empty()) {
        for (auto& r : reports) r.witness_path = inputs_path;
      }
      return emit_reports(reports);
    };
  });

  bool exact = false, constructive = false;
  std::size_t cap = entsum::kExactCap;
  auto* transport_cmd = app.add_subcommand("transport", "Transport certificate from p to q");
  transport_cmd->add_option("p", dist_a, "Source distribution")->required()->check(CLI::ExistingFile);
  transport_cmd->add_option("q", dist_b, "Target distribution")->required()->check(CLI::ExistingFile);
  auto* exact_flag = transport_cmd->add_flag("--exact", exact, "Exhaustive optimum");
  auto* construct_flag = transport_cmd->add_flag("--construct", constructive, "Best constructive certificate");
  exact_flag->excludes(construct_flag);
  transport_cmd->add_option("--cap", cap, "Coupling variable cap for --exact");
  transport_cmd->callback([&] {
    action = [&] {
      const auto p = load_dist(dist_a), q = load_dist(dist_b);
      const auto cert = constructive ? construct(p, q) : entsum::transport_exact(p, q, cap);
      entsum::verify_certificate(cert);
      const json j = entsum::certificate_to_json(cert);
      if (!g.out.empty()) {
        std::filesystem::create_directories(g.out);
        entsum::write_json_file(std::filesystem::path(g.out) / "certificate.json", j);
      }
      emit(j);
      return kOk;
    };
  });

  auto* bsg_cmd = app.add_subcommand("bsg", "Entropic Balog-Szemeredi-Gowers checks on a pair law");
  bsg_cmd->add_option("joint", dist_a, "Joint JSON over (X, Y)")->required()->check(CLI::ExistingFile);
  bsg_cmd->callback([&] {
    action = [&] {
      const auto inst = entsum::make_bsg_instance(entsum::joint_from_json(entsum::read_json_file(dist_a)));
      const auto rep = entsum::verify_bsg(inst);
      emit({{"log_k", inst.log_k},
            {"h_x2_given_x1y", rep.h_x2_given_x1y},
            {"h_y2_given_x1y", rep.h_y2_given_x1y},
            {"h_sum_given_x1y", rep.h_sum_given_x1y},
            {"h_diff_given_y", rep.h_diff_given_y},
            {"conditionally_independent", rep.conditionally_independent}});
      return emit_reports(rep.reports);
    };
  });

  auto* inverse_cmd = app.add_subcommand("inverse", "Coset detection, or the built-in fixture corpus");
  inverse_cmd->add_option("dist", dist_a, "Distribution JSON")->check(CLI::ExistingFile);
  inverse_cmd->callback([&] {
    action = [&] {
      if (!dist_a.empty()) {
        const auto p = load_dist(dist_a);
        const auto rep = entsum::detect_coset_uniform(p);
        json j = {{"is_coset_uniform", rep.is_coset_uniform}, {"doubling", rep.doubling}};
        if (rep.subgroup) j["subgroup"] = *rep.subgroup;
        if (rep.base) j["base"] = *rep.base;
        const auto core = entsum::effective_support_search(p);
        j["core"] = {{"c", core.c},
                     {"size", core.core.size()},
                     {"mass", entsum::to_double(core.mass)},
                     {"log_size_gap", core.log_size_gap},
                     {"energy_ratio", core.energy_ratio}};
        emit(j);
        return kOk;
      }
      int code = kOk;
      for (const auto& f : entsum::verify_inverse_fixtures(entsum::default_inverse_fixtures())) {
        json j = {{"fixture", f.name},
                  {"noise_entropy", f.noise_entropy},
                  {"transport_cost", f.transport_cost},
                  {"doubling", f.doubling},
                  {"energy_ratio", f.energy_ratio}};
        if (f.hull_cost) j["hull_cost"] = *f.hull_cost;
        emit(j);
        if (emit_reports(f.reports) != kOk) code = kViolations;
      }
      return code;
    };
  });

  auto* experiment_cmd = app.add_subcommand("experiment", "Torsion-free experiments");
  experiment_cmd->require_subcommand(1);
  experiment_cmd->fallthrough();
  int n = 1000, k = 2;
  double mu = 0.1;
  auto* binom_cmd = experiment_cmd->add_subcommand("binomial-doubling", "Doubling of the centred binomial");
  binom_cmd->add_option("--n", n, "Number of signs")->check(CLI::Range(1, entsum::kBinomialCap / 2));
  binom_cmd->callback([&] {
    action = [&] {
      emit({{"experiment", "binomial-doubling"},
            {"n", n},
            {"doubling", entsum::doubling_experiment(n)},
            {"sqrt2", std::sqrt(2.0)},
            {"entropy_gap", entsum::binomial_entropy_gap(n)},
            {"lattice_gap", entsum::binomial_lattice_gap(n)}});
      return kOk;
    };
  });
  auto* bridge_cmd = experiment_cmd->add_subcommand("bridge", "Ent(X + U) against Ent(X) for a Z law");
  bridge_cmd->add_option("dist", dist_a, "Distribution JSON on Z")->required()->check(CLI::ExistingFile);
  bridge_cmd->callback([&] {
    action = [&] {
      const auto res = entsum::bridge_entropy(load_dist(dist_a));
      emit({{"experiment", "bridge"}, {"continuous", res.continuous}, {"discrete", res.discrete}});
      return emit_reports({res.report});
    };
  });
  auto* smooth_cmd = experiment_cmd->add_subcommand("smooth-shift", "Fourier smooth-shift search");
  smooth_cmd->add_option("--mu", mu, "Spectrum threshold")->check(CLI::Range(1e-6, 1.0));
  smooth_cmd->add_option("dist", dist_a, "Distribution JSON (uniform on [0,16) when omitted)")
      ->check(CLI::ExistingFile);
  smooth_cmd->callback([&] {
    action = [&] {
      entsum::Dist p;
      if (dist_a.empty()) {
        std::vector<entsum::GroupElement> pts;
        for (std::int64_t i = 0; i < 16; ++i) pts.push_back({i});
        p = entsum::Dist::uniform(entsum::GroupSpec::integers(), pts);
      } else {
        p = load_dist(dist_a);
      }
      emit(spectrum_json(entsum::smooth_shift_search(p, mu)));
      return kOk;
    };
  });
  auto* entxx_cmd = experiment_cmd->add_subcommand("entxx", "Ent(X1 + ... + Xk) - Ent(X) for binomials");
  entxx_cmd->add_option("--n", n, "Number of signs")->check(CLI::PositiveNumber);
  entxx_cmd->add_option("--k", k, "Number of summands")->check(CLI::Range(1, 8));
  entxx_cmd->callback([&] {
    action = [&] {
      emit({{"experiment", "entxx"}, {"n", n}, {"k", k}, {"value", entsum::entxx_explore(n, k)}});
      return kOk;
    };
  });

  std::optional<std::int64_t> count;
  std::vector<std::string> families;
  auto* fuzz_cmd = app.add_subcommand("fuzz", "Seeded property-based campaign");
  fuzz_cmd->add_option("--count", count, "Instance count")->check(CLI::NonNegativeNumber);
  fuzz_cmd->add_option("--family", families, "Restrict to these families")
      ->check(CLI::IsMember(entsum::fuzz_families()));
  fuzz_cmd->callback([&] {
    action = [&] {
      entsum::FuzzConfig cfg;
      if (!g.config.empty()) cfg = entsum::FuzzConfig::from_json(entsum::read_json_file(g.config));
      if (g.seed) cfg.seed = *g.seed;
      if (g.workers) cfg.workers = *g.workers;
      if (count) cfg.instance_count = *count;
      if (!families.empty()) cfg.inequality_set = families;
      const auto run = entsum::fuzz_run(cfg, g.out);
      std::cout << entsum::report_render(run.results);
      std::cout << "instances " << run.instances.size() << ", violations " << run.violations << ", errors "
                << run.errors.size() << '\n';
      for (const auto& [fam, c] : run.skipped) std::cout << "skipped " << c << " " << fam << " (cap)\n";
      for (const auto& e : run.errors) std::cerr << "error at instance " << e.index << ": " << e.message << '\n';
      return run.ok() ? kOk : kViolations;
    };
  });

  std::string replay_path;
  auto* replay_cmd = app.add_subcommand("replay", "Recompute a stored counterexample or witness");
  replay_cmd->add_option("path", replay_path, "Corpus file or <dir>/instances.jsonl#<idx>")->required();
  replay_cmd->callback([&] {
    action = [&] {
      int code = kOk;
      for (const auto& r : entsum::replay(replay_path)) {
        emit({{"name", r.name},
              {"stored_slack", r.stored_slack},
              {"recomputed_slack", r.recomputed.slack},
              {"reproduced", r.reproduced},
              {"version_mismatch", r.version_mismatch}});
        if (r.version_mismatch) std::cerr << "warning: stored under a different library version\n";
        if (!r.reproduced) code = kViolations;
      }
      return code;
    };
  });

  std::string results_path;
  bool as_json = false;
  auto* report_cmd = app.add_subcommand("report", "Summarise a results.jsonl file");
  report_cmd->add_option("results", results_path, "results.jsonl")->required()->check(CLI::ExistingFile);
  report_cmd->add_flag("--json", as_json, "Machine-readable output");
  report_cmd->callback([&] {
    action = [&] {
      std::vector<entsum::MetricReport> results;
      std::ifstream in(results_path);
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        entsum::MetricReport r;
        r.name = j.at("name").get<std::string>();
        r.lhs = j.at("lhs").is_number() ? j.at("lhs").get<double>() : std::nan("");
        r.rhs = j.at("rhs").is_number() ? j.at("rhs").get<double>() : std::nan("");
        r.slack = j.at("slack").get<double>();
        if (j.at("witness_path").is_string()) r.witness_path = j.at("witness_path").get<std::string>();
        results.push_back(std::move(r));
      }
      if (as_json) {
        std::cout << entsum::report_json(results).dump(2) << '\n';
      } else {
        std::cout << entsum::report_render(results);
      }
      for (const auto& row : entsum::summarize(results)) {
        if (row.violations > 0) return kViolations;
      }
      return kOk;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    exit_code = action ? action() : kUsage;
  } catch (const entsum::SchemaError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kUsage;
  } catch (const json::exception& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return exit_code;
}
