// Copyright 2026 The dexcore Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>

#include "dexcore/errors.hpp"
#include "dexcore/instances.hpp"

namespace dexcore {

namespace {

constexpr const char* kFormatName = "dexcore-instance";

template <typename T>
T required(const nlohmann::json& params, const char* key) {
  if (!params.contains(key))
    throw InvalidArgument(std::string("instance params lack '") + key + "'");
  try {
    return params.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("instance param '") + key +
                          "' is malformed: " + e.what());
  }
}

}  // namespace

Instance instance_from_document(const nlohmann::json& doc) {
  if (!doc.is_object()) throw InvalidArgument("instance document must be an object");
  if (doc.value("format", std::string{}) != kFormatName)
    throw InvalidArgument("not a dexcore instance document");
  if (doc.value("version", 0) != kInstanceFormatVersion)
    throw InvalidArgument("unsupported instance format version");
  const std::string family = doc.value("family", std::string{});
  if (!doc.contains("params")) throw InvalidArgument("instance lacks params");
  const auto& p = doc.at("params");

  if (family == "counterexample") {
    CounterexampleParams cp;
    cp.epsilon = required<double>(p, "epsilon");
    cp.payoff = required<std::array<std::array<double, 3>, 3>>(p, "payoff");
    cp.cost = required<std::array<std::array<double, 3>, 3>>(p, "cost");
    return make_counterexample(cp);
  }
  if (family == "concave-cost")
    return make_concave_cost_counterexample(required<double>(p, "epsilon"),
                                            required<double>(p, "cap"));
  if (family == "convex-convex")
    return make_convex_convex_counterexample(required<double>(p, "epsilon"));
  if (family == "linear")
    return make_linear_instance(
        required<std::vector<std::vector<double>>>(p, "weight"),
        required<std::vector<std::vector<double>>>(p, "cost"));
  if (family == "road") {
    RoadInstanceParams rp;
    rp.node_count = required<std::size_t>(p, "node_count");
    rp.edges =
        required<std::vector<std::pair<std::size_t, std::size_t>>>(p, "edges");
    rp.variance = required<std::vector<double>>(p, "variance");
    rp.share_cost = required<std::vector<double>>(p, "share_cost");
    rp.paths = required<std::vector<std::vector<std::size_t>>>(p, "paths");
    rp.samples = required<std::vector<std::vector<std::int64_t>>>(p, "samples");
    rp.agent_cost_scale = required<std::vector<double>>(p, "agent_cost_scale");
    rp.seed = required<std::uint64_t>(p, "seed");
    return make_road_instance(rp);
  }
  if (family == "gadget") {
    Hypergraph h;
    h.vertex_count = required<std::size_t>(p, "vertices");
    h.edges = required<std::vector<std::array<std::size_t, 3>>>(p, "edges");
    h.preferences =
        required<std::vector<std::vector<std::size_t>>>(p, "preferences");
    return make_hypergraph_gadget(h, required<double>(p, "epsilon"));
  }
  throw InvalidArgument("unknown instance family '" + family + "'");
}

void write_instance(const Instance& inst, const std::filesystem::path& path) {
  nlohmann::json doc = inst.document();
  doc["format"] = kFormatName;
  doc["version"] = kInstanceFormatVersion;
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write instance " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw InvalidArgument("failed writing instance " + path.string());
}

Instance read_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open instance " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("instance " + path.string() + " is not valid JSON: " +
                          e.what());
  }
  return instance_from_document(doc);
}

}  // namespace dexcore
