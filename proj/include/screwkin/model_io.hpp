#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "screwkin/chain.hpp"

namespace screwkin {

// One loop of a mechanism: the 1-based indices of the traversed joints in
// the expanded chain and the traversal sign of each (-1 walks the joint
// backwards).
struct LoopSpec {
  std::vector<int> joint_indices;
  std::vector<int> signs;
};

// A mechanism model loaded from JSON. Cylindric pairs are expanded into a
// revolute plus a prismatic joint on the same axis; source_joint maps each
// expanded joint back to the 1-based index in the input file.
struct Model {
  std::string name;
  Chain chain;
  std::vector<LoopSpec> loops;
  std::map<std::string, VecX> configs;
  std::vector<int> source_joint;
  std::vector<std::string> warnings;
};

Model parse_model(const nlohmann::json& j);
Model load_model(const std::string& path);

// Chain realizing one loop: joints in traversal order with signs folded into
// the screws. Falls back to the whole chain (all joints, forward) when the
// model declares no loops.
Chain loop_chain(const Model& m, const LoopSpec& loop);
std::vector<Chain> loop_chains(const Model& m);

// Configuration lookup: named config from the model, or a zero vector for
// the reserved name "zero". Throws std::invalid_argument if missing or of
// wrong length.
VecX model_config(const Model& m, const std::string& label);

}  // namespace screwkin
