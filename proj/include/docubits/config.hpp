#pragma once

#include <filesystem>
#include <vector>

#include "docubits/anim.hpp"
#include "docubits/bit_state.hpp"
#include "docubits/codec.hpp"
#include "docubits/spatial.hpp"

namespace docubits {

// Tunables read from the JSON config file. Every key is optional:
//   {"frustum": {"h_fov_deg", "v_fov_deg", "near", "far"},
//    "clone_blocked": bool,
//    "anim": {"rise_rate", "rise_cap", "fade_rate", "opacity_floor",
//             "bounce_amplitude", "bounce_hz"},
//    "palette": [[r, g, b], ...]}
struct EngineConfig {
  CloneRule clones;
  AnimConfig anim;
  std::vector<Rgb> palette{kDefaultPalette.begin(), kDefaultPalette.end()};
};

// Throws DecodeError on wrong types or an invalid frustum.
EngineConfig config_from_json(const Json& j);
EngineConfig load_config(const std::filesystem::path& path);
Json to_json(const EngineConfig& c);

// Derived, non-authoritative view of a state at wall time `now_ms`: the
// required clones, each stack slot's tag-along anchor, and every bit's
// appearance. Never hashed or replicated.
Json derived_view(const SessionState& state, const EngineConfig& c, std::int64_t now_ms);

}  // namespace docubits
