#include "screwkin/model_io.hpp"

#include <fstream>
#include <stdexcept>

namespace screwkin {

namespace {

using nlohmann::json;

Vec3 parse_vec3(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) {
    throw std::invalid_argument(what + " must be an array of 3 numbers");
  }
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[static_cast<size_t>(i)].is_number()) {
      throw std::invalid_argument(what + " must be an array of 3 numbers");
    }
    v[i] = j[static_cast<size_t>(i)].get<double>();
  }
  return v;
}

Mat4 parse_mat4(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 4) {
    throw std::invalid_argument(what + " must be a 4x4 nested array");
  }
  Mat4 m;
  for (int r = 0; r < 4; ++r) {
    const json& row = j[static_cast<size_t>(r)];
    if (!row.is_array() || row.size() != 4) {
      throw std::invalid_argument(what + " must be a 4x4 nested array");
    }
    for (int c = 0; c < 4; ++c) {
      if (!row[static_cast<size_t>(c)].is_number()) {
        throw std::invalid_argument(what + " must contain numbers only");
      }
      m(r, c) = row[static_cast<size_t>(c)].get<double>();
    }
  }
  return m;
}

}  // namespace

Model parse_model(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("model must be a JSON object");
  Model m;
  m.name = j.value("name", std::string("unnamed"));
  m.chain.name = m.name;

  if (!j.contains("joints") || !j.at("joints").is_array() || j.at("joints").empty()) {
    throw std::invalid_argument("model needs a nonempty \"joints\" array");
  }
  const json& joints = j.at("joints");

  // First expanded-joint index of each file joint, for loop remapping.
  std::vector<int> first_of;
  std::vector<bool> is_pair;
  int jf = 0;
  for (const json& joint : joints) {
    ++jf;
    const std::string where = "joint " + std::to_string(jf);
    if (!joint.is_object()) throw std::invalid_argument(where + " must be an object");
    const std::string type = joint.value("type", std::string());
    Vec3 e = parse_vec3(joint.at("axis"), where + " axis");
    const double en = e.norm();
    if (!(en > 0.0)) throw std::invalid_argument(where + " axis must be nonzero");
    if (std::abs(en - 1.0) > 1e-6) {
      m.warnings.push_back(where + ": axis renormalized (norm was " + std::to_string(en) +
                           ")");
    }
    e /= en;
    const Vec3 p = joint.contains("point") ? parse_vec3(joint.at("point"), where + " point")
                                           : Vec3::Zero();
    const bool has_pitch = joint.contains("pitch");
    if (type == "helical") {
      if (!has_pitch || !joint.at("pitch").is_number()) {
        throw std::invalid_argument(where + ": helical joints need a numeric pitch");
      }
    } else if (has_pitch) {
      throw std::invalid_argument(where + ": pitch is only meaningful for helical joints");
    }

    first_of.push_back(m.chain.n() + 1);
    if (type == "revolute") {
      m.chain.joints.push_back(UnitScrew{e, p, PitchClass::Revolute, 0.0});
      is_pair.push_back(false);
    } else if (type == "prismatic") {
      m.chain.joints.push_back(UnitScrew{e, p, PitchClass::Prismatic, 0.0});
      is_pair.push_back(false);
    } else if (type == "helical") {
      m.chain.joints.push_back(
          UnitScrew{e, p, PitchClass::Helical, joint.at("pitch").get<double>()});
      is_pair.push_back(false);
    } else if (type == "cylindric") {
      // Turn and slide about one axis commute, so the pair order is free;
      // rotation first keeps the revolute variable adjacent to its axis point.
      m.chain.joints.push_back(UnitScrew{e, p, PitchClass::Revolute, 0.0});
      m.chain.joints.push_back(UnitScrew{e, p, PitchClass::Prismatic, 0.0});
      is_pair.push_back(true);
    } else {
      throw std::invalid_argument(where + ": unknown type \"" + type + "\"");
    }
    m.source_joint.push_back(jf);
    if (is_pair.back()) m.source_joint.push_back(jf);
  }
  const int n = m.chain.n();

  if (j.contains("loops")) {
    if (!j.at("loops").is_array()) throw std::invalid_argument("\"loops\" must be an array");
    int lf = 0;
    for (const json& loop : j.at("loops")) {
      ++lf;
      const std::string where = "loop " + std::to_string(lf);
      if (!loop.is_object() || !loop.contains("joint_indices") ||
          !loop.at("joint_indices").is_array()) {
        throw std::invalid_argument(where + " needs a \"joint_indices\" array");
      }
      const json& idx = loop.at("joint_indices");
      std::vector<int> signs(idx.size(), 1);
      if (loop.contains("signs")) {
        const json& sj = loop.at("signs");
        if (!sj.is_array() || sj.size() != idx.size()) {
          throw std::invalid_argument(where + ": \"signs\" must match \"joints\" in length");
        }
        for (size_t t = 0; t < sj.size(); ++t) {
          if (!sj[t].is_number_integer() || std::abs(sj[t].get<int>()) != 1) {
            throw std::invalid_argument(where + ": signs must be 1 or -1");
          }
          signs[t] = sj[t].get<int>();
        }
      }
      LoopSpec spec;
      for (size_t t = 0; t < idx.size(); ++t) {
        if (!idx[t].is_number_integer()) {
          throw std::invalid_argument(where + ": joint indices must be integers");
        }
        const int o = idx[t].get<int>();
        if (o < 1 || o > static_cast<int>(first_of.size())) {
          throw std::invalid_argument(where + ": joint index " + std::to_string(o) +
                                      " out of range");
        }
        const int b = first_of[static_cast<size_t>(o) - 1];
        if (!is_pair[static_cast<size_t>(o) - 1]) {
          spec.joint_indices.push_back(b);
          spec.signs.push_back(signs[t]);
        } else if (signs[t] > 0) {
          spec.joint_indices.push_back(b);
          spec.joint_indices.push_back(b + 1);
          spec.signs.push_back(1);
          spec.signs.push_back(1);
        } else {
          // A backwards pair is traversed slide first, both reversed.
          spec.joint_indices.push_back(b + 1);
          spec.joint_indices.push_back(b);
          spec.signs.push_back(-1);
          spec.signs.push_back(-1);
        }
      }
      m.loops.push_back(std::move(spec));
    }
  }

  if (j.contains("body_frames")) {
    const json& bf = j.at("body_frames");
    if (!bf.is_array() || static_cast<int>(bf.size()) != n) {
      throw std::invalid_argument("\"body_frames\" must list one 4x4 matrix per joint of the expanded chain (" +
                                  std::to_string(n) + ")");
    }
    for (size_t t = 0; t < bf.size(); ++t) {
      const std::string where = "body frame " + std::to_string(t + 1);
      try {
        m.chain.body_frames.push_back(Pose::from_matrix(parse_mat4(bf[t], where)));
      } catch (const std::invalid_argument& ex) {
        throw std::invalid_argument(where + ": " + ex.what());
      }
    }
  }

  if (j.contains("configs")) {
    const json& cfgs = j.at("configs");
    if (!cfgs.is_object()) throw std::invalid_argument("\"configs\" must be an object");
    for (auto it = cfgs.begin(); it != cfgs.end(); ++it) {
      if (it.key() == "zero") {
        throw std::invalid_argument("config name \"zero\" is reserved");
      }
      const json& arr = it.value();
      if (!arr.is_array() || static_cast<int>(arr.size()) != n) {
        throw std::invalid_argument("config \"" + it.key() + "\" must have " +
                                    std::to_string(n) +
                                    " entries (one per expanded joint)");
      }
      VecX q(n);
      for (int t = 0; t < n; ++t) {
        if (!arr[static_cast<size_t>(t)].is_number()) {
          throw std::invalid_argument("config \"" + it.key() + "\" must contain numbers");
        }
        q[t] = arr[static_cast<size_t>(t)].get<double>();
      }
      m.configs.emplace(it.key(), std::move(q));
    }
  }
  return m;
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open model file: " + path);
  const nlohmann::json j = nlohmann::json::parse(in);
  return parse_model(j);
}

Chain loop_chain(const Model& m, const LoopSpec& loop) {
  if (loop.joint_indices.size() != loop.signs.size()) {
    throw std::invalid_argument("loop joint and sign lists differ in length");
  }
  Chain c;
  c.name = m.chain.name;
  for (size_t t = 0; t < loop.joint_indices.size(); ++t) {
    const int idx = loop.joint_indices[t];
    if (idx < 1 || idx > m.chain.n()) {
      throw std::invalid_argument("loop joint index out of range");
    }
    UnitScrew s = m.chain.joints[static_cast<size_t>(idx) - 1];
    if (loop.signs[t] < 0) s.e = -s.e;
    c.joints.push_back(s);
  }
  return c;
}

std::vector<Chain> loop_chains(const Model& m) {
  std::vector<Chain> out;
  if (m.loops.empty()) {
    out.push_back(m.chain);
    return out;
  }
  out.reserve(m.loops.size());
  for (const auto& loop : m.loops) out.push_back(loop_chain(m, loop));
  return out;
}

VecX model_config(const Model& m, const std::string& label) {
  if (label == "zero") return VecX::Zero(m.chain.n());
  const auto it = m.configs.find(label);
  if (it == m.configs.end()) {
    throw std::invalid_argument("model has no config named \"" + label + "\"");
  }
  return it->second;
}

}  // namespace screwkin
