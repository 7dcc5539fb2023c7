#include "screwkin/chain.hpp"

#include <stdexcept>

namespace screwkin {

namespace {

void check_link_index(const Chain& c, int i, bool allow_zero = false) {
  const int lo = allow_zero ? 0 : 1;
  if (i < lo || i > c.n()) {
    throw std::invalid_argument("link index " + std::to_string(i) +
                                " out of range for chain of " +
                                std::to_string(c.n()) + " joints");
  }
}

void check_vector_size(const VecX& v, int n, const char* what) {
  if (static_cast<int>(v.size()) != n) {
    throw std::invalid_argument(std::string(what) + " has size " +
                                std::to_string(v.size()) + ", expected " +
                                std::to_string(n));
  }
}

}  // namespace

ScrewVec Chain::reference_screw(int j) const {
  check_link_index(*this, j);
  return joints[static_cast<size_t>(j) - 1].to_screwvec();
}

Pose Chain::body_frame(int i) const {
  check_link_index(*this, i);
  if (body_frames.empty()) return Pose::identity();
  return body_frames.at(static_cast<size_t>(i) - 1);
}

double Chain::characteristic_length() const {
  double len = 1.0;
  for (const auto& j : joints) len = std::max(len, j.p.norm());
  return len;
}

Pose kinematic_map(const Chain& c, const VecX& q, int i) {
  check_link_index(c, i, true);
  check_vector_size(q, c.n(), "q");
  Pose f = Pose::identity();
  for (int j = 1; j <= i; ++j) {
    f = f * exp_screw(c.joints[static_cast<size_t>(j) - 1], q[j - 1]);
  }
  return f;
}

Pose link_pose(const Chain& c, const VecX& q, int i) {
  return kinematic_map(c, q, i) * c.body_frame(i);
}

std::vector<ScrewVec> joint_screws_spatial(const Chain& c, const VecX& q) {
  check_vector_size(q, c.n(), "q");
  std::vector<ScrewVec> S(static_cast<size_t>(c.n()));
  Pose f = Pose::identity();  // kinematic map of the preceding joints
  for (int j = 1; j <= c.n(); ++j) {
    S[static_cast<size_t>(j) - 1] = adjoint_apply(f, c.reference_screw(j));
    f = f * exp_screw(c.joints[static_cast<size_t>(j) - 1], q[j - 1]);
  }
  return S;
}

MatX jacobian_spatial(const Chain& c, const VecX& q, int i) {
  check_link_index(c, i);
  const auto S = joint_screws_spatial(c, q);
  MatX J = MatX::Zero(6, c.n());
  for (int j = 1; j <= i; ++j) J.col(j - 1) = S[static_cast<size_t>(j) - 1];
  return J;
}

ScrewVec spatial_twist(const Chain& c, const VecX& q, const VecX& qdot, int i) {
  check_link_index(c, i);
  check_vector_size(qdot, c.n(), "qdot");
  const auto S = joint_screws_spatial(c, q);
  ScrewVec v = ScrewVec::Zero();
  for (int j = 1; j <= i; ++j) v += S[static_cast<size_t>(j) - 1] * qdot[j - 1];
  return v;
}

}  // namespace screwkin
