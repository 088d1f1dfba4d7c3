#include "docubits/config.hpp"

#include <fstream>

#include "docubits/persist.hpp"

namespace docubits {
namespace {

void read_number(const Json& obj, const char* key, double& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_number()) throw DecodeError(std::string("config key '") + key + "' must be a number");
  out = it->get<double>();
}

}  // namespace

EngineConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw DecodeError("config must be a JSON object");
  EngineConfig c;
  if (auto f = j.find("frustum"); f != j.end()) {
    read_number(*f, "h_fov_deg", c.clones.frustum.h_fov_deg);
    read_number(*f, "v_fov_deg", c.clones.frustum.v_fov_deg);
    read_number(*f, "near", c.clones.frustum.near);
    read_number(*f, "far", c.clones.frustum.far);
    if (!c.clones.frustum.valid()) throw DecodeError("config frustum out of range");
  }
  if (auto b = j.find("clone_blocked"); b != j.end()) {
    if (!b->is_boolean()) throw DecodeError("config key 'clone_blocked' must be a boolean");
    c.clones.include_blocked = b->get<bool>();
  }
  if (auto a = j.find("anim"); a != j.end()) {
    read_number(*a, "rise_rate", c.anim.rise_rate);
    read_number(*a, "rise_cap", c.anim.rise_cap);
    read_number(*a, "fade_rate", c.anim.fade_rate);
    read_number(*a, "opacity_floor", c.anim.opacity_floor);
    read_number(*a, "bounce_amplitude", c.anim.bounce_amplitude);
    read_number(*a, "bounce_hz", c.anim.bounce_hz);
  }
  if (auto p = j.find("palette"); p != j.end()) {
    if (!p->is_array() || p->empty()) throw DecodeError("config palette must be a non-empty list");
    c.palette.clear();
    for (const Json& rgb : *p) {
      if (!rgb.is_array() || rgb.size() != 3) throw DecodeError("palette entries are [r, g, b]");
      c.palette.push_back({rgb[0].get<std::uint8_t>(), rgb[1].get<std::uint8_t>(), rgb[2].get<std::uint8_t>()});
    }
  }
  return c;
}

EngineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoFailure("cannot open config " + path.string());
  const Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded()) throw DecodeError("config " + path.string() + " is not JSON");
  return config_from_json(j);
}

Json to_json(const EngineConfig& c) {
  Json palette = Json::array();
  for (const auto& rgb : c.palette) palette.push_back({rgb.r, rgb.g, rgb.b});
  return {{"frustum",
           {{"h_fov_deg", c.clones.frustum.h_fov_deg},
            {"v_fov_deg", c.clones.frustum.v_fov_deg},
            {"near", c.clones.frustum.near},
            {"far", c.clones.frustum.far}}},
          {"clone_blocked", c.clones.include_blocked},
          {"anim",
           {{"rise_rate", c.anim.rise_rate},
            {"rise_cap", c.anim.rise_cap},
            {"fade_rate", c.anim.fade_rate},
            {"opacity_floor", c.anim.opacity_floor},
            {"bounce_amplitude", c.anim.bounce_amplitude},
            {"bounce_hz", c.anim.bounce_hz}}},
          {"palette", std::move(palette)}};
}

Json derived_view(const SessionState& state, const EngineConfig& c, std::int64_t now_ms) {
  Json clones = Json::array();
  for (const auto& d : required_clones(state, c.clones)) {
    clones.push_back({{"user", d.user}, {"bit_id", d.bit_id}});
  }
  Json anchors = Json::object();
  for (const auto& [id, user] : state.users) {
    Json slots = Json::array();
    for (std::size_t i = 0; i < user.stack.size(); ++i) {
      slots.push_back({{"bit_id", user.stack[i]},
                       {"position", to_json(tag_along_anchor(user.pose, static_cast<int>(i)))}});
    }
    anchors[id] = std::move(slots);
  }
  Json looks = Json::object();
  static constexpr const char* kTint[] = {"White", "Gray"};
  static constexpr const char* kIndicator[] = {"NoneLit", "Green", "Red", "Amber"};
  for (const auto& [id, bit] : state.bits) {
    const double t = static_cast<double>(now_ms - state.started_at - bit.status_changed_at) / 1000.0;
    const Appearance a = appearance(bit.status, t, c.anim);
    looks[id] = {{"vertical_offset", a.vertical_offset},
                 {"opacity", a.opacity},
                 {"body_tint", kTint[static_cast<int>(a.body_tint)]},
                 {"indicator", kIndicator[static_cast<int>(a.indicator)]}};
  }
  return {{"clones", std::move(clones)}, {"anchors", std::move(anchors)}, {"appearance", std::move(looks)}};
}

}  // namespace docubits
