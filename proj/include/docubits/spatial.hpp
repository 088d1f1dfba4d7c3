#pragma once

#include <cmath>
#include <compare>
#include <optional>
#include <set>
#include <string>

namespace docubits {

// Right-handed, y-up, meters.
struct Vec3 {
  double x = 0;
  double y = 0;
  double z = 0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
  friend bool operator==(const Vec3&, const Vec3&) = default;

  double norm() const { return std::sqrt(dot(*this, *this)); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }

  static double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
  static Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
  }
};

inline constexpr double kPoseTolerance = 1e-9;

// Avatar frame. Construct through make() so that forward/up are orthonormal.
class Pose {
 public:
  Pose() = default;

  static std::optional<Pose> make(Vec3 position, Vec3 forward, Vec3 up);

  const Vec3& position() const { return position_; }
  const Vec3& forward() const { return forward_; }
  const Vec3& up() const { return up_; }
  Vec3 right() const { return Vec3::cross(forward_, up_); }

  friend bool operator==(const Pose&, const Pose&) = default;

 private:
  Pose(Vec3 p, Vec3 f, Vec3 u) : position_(p), forward_(f), up_(u) {}

  Vec3 position_{0, 0, 0};
  Vec3 forward_{0, 0, 1};
  Vec3 up_{0, 1, 0};
};

struct Frustum {
  double h_fov_deg = 90.0;
  double v_fov_deg = 90.0;
  double near = 0.1;
  double far = 20.0;

  bool valid() const {
    return h_fov_deg > 0 && h_fov_deg < 180 && v_fov_deg > 0 && v_fov_deg < 180 && near > 0 &&
           near < far;
  }
  friend bool operator==(const Frustum&, const Frustum&) = default;
};

bool in_frustum(const Pose& pose, const Frustum& frustum, Vec3 point);

// Stack slot `slot` hangs 0.6 m ahead of the avatar, 0.15 m below eye line,
// with 0.08 m between consecutive slots.
Vec3 tag_along_anchor(const Pose& pose, int slot);

struct CloneDirective {
  std::string user;
  std::string bit_id;

  friend auto operator<=>(const CloneDirective&, const CloneDirective&) = default;
};

struct SessionState;

struct CloneRule {
  Frustum frustum;
  // Blocked placed bits clone too when set.
  bool include_blocked = false;
};

/// Clones are derived state: a placed, in-progress bit that has left its
/// owner's view gets a tag-along copy. Recomputed from scratch every call.
std::set<CloneDirective> required_clones(const SessionState& state, const CloneRule& rule = {});

}  // namespace docubits
