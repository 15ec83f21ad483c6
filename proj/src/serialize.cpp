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


#include "entsum/serialize.hpp"

#include <fstream>

#include "entsum/errors.hpp"

namespace entsum {

namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw SchemaError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

std::int64_t as_int(const json& j, const char* what) {
  if (!j.is_number_integer()) throw SchemaError(std::string(what) + " must be an integer");
  return j.get<std::int64_t>();
}

BigInt as_bigint(const json& j, const char* what) {
  if (j.is_number_integer()) return BigInt(std::to_string(j.get<std::int64_t>()));
  if (j.is_string()) {
    BigInt out;
    if (out.set_str(j.get<std::string>(), 10) != 0) throw SchemaError(std::string(what) + " is not a decimal integer");
    return out;
  }
  throw SchemaError(std::string(what) + " must be an integer or a decimal string");
}

json bigint_to_json(const BigInt& z) {
  if (z.fits_slong_p()) return json(static_cast<std::int64_t>(z.get_si()));
  return json(z.get_str());
}

}  // namespace

json group_to_json(const GroupSpec& g) { return json(g.moduli()); }

GroupSpec group_from_json(const json& j) {
  if (!j.is_array()) throw SchemaError("group must be an array of moduli");
  std::vector<std::int64_t> moduli;
  for (const auto& m : j) {
    const auto v = as_int(m, "modulus");
    if (v < 0) throw SchemaError("moduli must be non-negative");
    moduli.push_back(v);
  }
  return GroupSpec(std::move(moduli));
}

json element_to_json(const GroupElement& x) { return json(x); }

GroupElement element_from_json(const json& j, std::size_t rank) {
  if (!j.is_array() || j.size() != rank) throw SchemaError("element has the wrong rank");
  GroupElement x;
  for (const auto& c : j) x.push_back(as_int(c, "coordinate"));
  return x;
}

void rational_to_json(json& atom, const Rational& r) {
  atom["num"] = bigint_to_json(r.get_num());
  atom["den"] = bigint_to_json(r.get_den());
}

Rational rational_from_json(const json& atom, bool allow_negative) {
  const BigInt num = as_bigint(field(atom, "num"), "num");
  const BigInt den = as_bigint(field(atom, "den"), "den");
  if (den <= 0) throw SchemaError("den must be positive");
  if (!allow_negative && num < 0) throw SchemaError("masses must be non-negative");
  return make_rational(num, den);
}

json dist_to_json(const Dist& p) {
  json atoms = json::array();
  for (const auto& [x, m] : p.atoms()) {
    json a;
    a["x"] = element_to_json(x);
    rational_to_json(a, m);
    atoms.push_back(std::move(a));
  }
  return {{"group", group_to_json(p.group())}, {"atoms", std::move(atoms)}};
}

Dist dist_from_json(const json& j) {
  const GroupSpec g = group_from_json(field(j, "group"));
  const json& atoms = field(j, "atoms");
  if (!atoms.is_array() || atoms.empty()) throw SchemaError("atoms must be a non-empty array");
  std::vector<Atom> out;
  Rational total = 0;
  for (const auto& a : atoms) {
    Rational m = rational_from_json(a);
    total += m;
    out.emplace_back(element_from_json(field(a, "x"), g.rank()), std::move(m));
  }
  if (total != 1) throw SchemaError("masses sum to " + to_string(total) + ", not 1");
  return Dist::from_atoms(g, std::move(out));
}

json joint_to_json(const JointDist& j) {
  json groups = json::array();
  for (const auto& g : j.groups()) groups.push_back(group_to_json(g));
  json atoms = json::array();
  for (const auto& [key, m] : j.atoms()) {
    json xs = json::array();
    for (std::size_t i = 0; i < j.arity(); ++i) {
      const auto c = j.component(key, i);
      xs.push_back(GroupElement(c.begin(), c.end()));
    }
    json a;
    a["x"] = std::move(xs);
    rational_to_json(a, m);
    atoms.push_back(std::move(a));
  }
  return {{"groups", std::move(groups)}, {"atoms", std::move(atoms)}};
}

JointDist joint_from_json(const json& j) {
  const json& gj = field(j, "groups");
  if (!gj.is_array() || gj.empty()) throw SchemaError("groups must be a non-empty array");
  std::vector<GroupSpec> groups;
  for (const auto& g : gj) groups.push_back(group_from_json(g));
  const json& atoms = field(j, "atoms");
  if (!atoms.is_array() || atoms.empty()) throw SchemaError("atoms must be a non-empty array");
  std::vector<std::pair<std::vector<GroupElement>, Rational>> tuples;
  Rational total = 0;
  for (const auto& a : atoms) {
    const json& xs = field(a, "x");
    if (!xs.is_array() || xs.size() != groups.size()) throw SchemaError("joint atom has the wrong arity");
    std::vector<GroupElement> parts;
    for (std::size_t i = 0; i < groups.size(); ++i) parts.push_back(element_from_json(xs[i], groups[i].rank()));
    Rational m = rational_from_json(a);
    total += m;
    tuples.emplace_back(std::move(parts), std::move(m));
  }
  if (total != 1) throw SchemaError("masses sum to " + to_string(total) + ", not 1");
  return JointDist::from_tuples(std::move(groups), tuples);
}

json progression_to_json(const CosetProgression& cp) {
  return {{"group", group_to_json(cp.group)},
          {"H", cp.subgroup},
          {"base", cp.base},
          {"steps", cp.steps},
          {"lengths", cp.lengths}};
}

CosetProgression progression_from_json(const json& j) {
  CosetProgression cp;
  cp.group = group_from_json(field(j, "group"));
  const std::size_t r = cp.group.rank();
  const json& h = field(j, "H");
  if (!h.is_array()) throw SchemaError("H must be an array of elements");
  for (const auto& e : h) cp.subgroup.push_back(element_from_json(e, r));
  cp.base = element_from_json(field(j, "base"), r);
  const json& steps = field(j, "steps");
  const json& lengths = field(j, "lengths");
  if (!steps.is_array() || !lengths.is_array() || steps.size() != lengths.size()) {
    throw SchemaError("steps and lengths must be arrays of equal length");
  }
  for (const auto& s : steps) cp.steps.push_back(element_from_json(s, r));
  for (const auto& n : lengths) cp.lengths.push_back(as_int(n, "length"));
  try {
    cp.validate();
  } catch (const PreconditionError& e) {
    throw SchemaError(std::string("invalid progression: ") + e.what());
  }
  return cp;
}

json certificate_to_json(const TransportCertificate& c) {
  json coupling = json::array();
  for (const auto& [key, m] : c.coupling.atoms()) {
    const auto x = c.coupling.component(key, 0);
    const auto z = c.coupling.component(key, 1);
    json a;
    a["x"] = GroupElement(x.begin(), x.end());
    a["z"] = GroupElement(z.begin(), z.end());
    rational_to_json(a, m);
    coupling.push_back(std::move(a));
  }
  json out = {{"group", group_to_json(c.group())},
              {"source", dist_to_json(c.source)},
              {"target", dist_to_json(c.target)},
              {"coupling", std::move(coupling)},
              {"cost", c.cost}};
  if (!std::isnan(c.bound)) out["bound"] = c.bound;
  return out;
}

TransportCertificate certificate_from_json(const json& j) {
  const GroupSpec g = group_from_json(field(j, "group"));
  const json& coupling = field(j, "coupling");
  if (!coupling.is_array() || coupling.empty()) throw SchemaError("coupling must be a non-empty array");
  std::vector<PlanAtom> plan;
  for (const auto& a : coupling) {
    auto x = element_from_json(field(a, "x"), g.rank());
    auto z = element_from_json(field(a, "z"), g.rank());
    auto y = add(g, x, z);
    plan.push_back({std::move(x), std::move(y), rational_from_json(a)});
  }
  TransportCertificate c = certificate_from_plan(g, plan);
  if (!dist_equal(c.source, dist_from_json(field(j, "source"))) ||
      !dist_equal(c.target, dist_from_json(field(j, "target")))) {
    throw SchemaError("certificate marginals disagree with the stored source and target");
  }
  if (j.contains("bound")) c.bound = j.at("bound").get<double>();
  return c;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace entsum
