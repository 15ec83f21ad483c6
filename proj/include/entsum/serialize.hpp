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

#include <filesystem>
#include <string>

#include "entsum/dist.hpp"
#include "entsum/progression.hpp"
#include "entsum/transport.hpp"
#include "json.hpp"

namespace entsum {

using nlohmann::json;

// All loaders throw SchemaError on malformed input.  Masses are exact:
// "num"/"den" are integers or decimal strings (for values beyond 64 bits).

json group_to_json(const GroupSpec& g);
GroupSpec group_from_json(const json& j);

json element_to_json(const GroupElement& x);
GroupElement element_from_json(const json& j, std::size_t rank);

void rational_to_json(json& atom, const Rational& r);
Rational rational_from_json(const json& atom, bool allow_negative = false);

// {"group": [...], "atoms": [{"x": [..], "num": .., "den": ..}, ...]}
json dist_to_json(const Dist& p);
// Rejects input whose masses do not sum to exactly one.
Dist dist_from_json(const json& j);

// {"groups": [[..], ..], "atoms": [{"x": [[..], [..]], "num": .., "den": ..}]}
json joint_to_json(const JointDist& j);
JointDist joint_from_json(const json& j);

// {"group": [..], "H": [[..]..], "base": [..], "steps": [[..]..], "lengths": [..]}
json progression_to_json(const CosetProgression& cp);
CosetProgression progression_from_json(const json& j);

// {"group", "source", "target", "coupling": [{"x", "z", "num", "den"}], "cost"}
json certificate_to_json(const TransportCertificate& c);
TransportCertificate certificate_from_json(const json& j);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

}  // namespace entsum
