#include "docubits/spatial.hpp"

#include <numbers>

#include "docubits/session.hpp"

namespace docubits {

std::optional<Pose> Pose::make(Vec3 position, Vec3 forward, Vec3 up) {
  if (!position.finite() || !forward.finite() || !up.finite()) return std::nullopt;
  if (std::abs(forward.norm() - 1.0) > kPoseTolerance) return std::nullopt;
  if (std::abs(up.norm() - 1.0) > kPoseTolerance) return std::nullopt;
  if (std::abs(Vec3::dot(forward, up)) > kPoseTolerance) return std::nullopt;
  return Pose(position, forward, up);
}

bool in_frustum(const Pose& pose, const Frustum& frustum, Vec3 point) {
  const Vec3 d = point - pose.position();
  const double z = Vec3::dot(d, pose.forward());
  const double x = Vec3::dot(d, pose.right());
  const double y = Vec3::dot(d, pose.up());
  if (z < frustum.near || z > frustum.far) return false;
  constexpr double kDegToRad = std::numbers::pi / 180.0;
  const double tan_h = std::tan(frustum.h_fov_deg * kDegToRad / 2.0);
  const double tan_v = std::tan(frustum.v_fov_deg * kDegToRad / 2.0);
  return std::abs(x) <= z * tan_h && std::abs(y) <= z * tan_v;
}

Vec3 tag_along_anchor(const Pose& pose, int slot) {
  return pose.position() + 0.6 * pose.forward() - 0.15 * pose.up() -
         (0.08 * static_cast<double>(slot)) * pose.up();
}

std::set<CloneDirective> required_clones(const SessionState& state, const CloneRule& rule) {
  std::set<CloneDirective> out;
  for (const auto& [id, bit] : state.bits) {
    const auto* placed = std::get_if<Placed>(&bit.placement);
    if (placed == nullptr) continue;
    const bool eligible = bit.status == Status::InProgress ||
                          (rule.include_blocked && bit.status == Status::Blocked);
    if (!eligible) continue;
    auto user = state.users.find(bit.owner);
    if (user == state.users.end()) continue;
    if (!in_frustum(user->second.pose, rule.frustum, placed->position)) {
      out.insert({bit.owner, id});
    }
  }
  return out;
}

}  // namespace docubits
