#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "docubits/session.hpp"

namespace docubits::net {

struct ScriptStep {
  std::int64_t at_ms = 0;  // offset from script start
  SessionEvent event;
};

using ActionScript = std::vector<ScriptStep>;

// JSON-lines, one {"at_ms":..,"event":{..}} per line; blank lines skipped.
// Throws DecodeError on bad lines or decreasing at_ms.
ActionScript parse_script(std::string_view text);
ActionScript load_script(const std::filesystem::path& path);

// *.jsonl files of a directory in name order.
std::vector<ActionScript> load_script_dir(const std::filesystem::path& dir);

}  // namespace docubits::net
