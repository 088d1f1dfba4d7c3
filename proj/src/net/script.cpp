#include "docubits/net/script.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "docubits/codec.hpp"
#include "docubits/persist.hpp"

namespace docubits::net {

ActionScript parse_script(std::string_view text) {
  ActionScript out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("at_ms") || !j["at_ms"].is_number_integer() ||
        !j.contains("event")) {
      throw DecodeError("script line " + std::to_string(lineno) + ": expected {at_ms, event}");
    }
    ScriptStep step{j["at_ms"].get<std::int64_t>(), event_from_json(j["event"])};
    if (step.at_ms < 0 || (!out.empty() && step.at_ms < out.back().at_ms)) {
      throw DecodeError("script line " + std::to_string(lineno) + ": at_ms must be non-decreasing");
    }
    out.push_back(std::move(step));
  }
  return out;
}

ActionScript load_script(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open script " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_script(buf.str());
}

std::vector<ActionScript> load_script_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
  }
  if (ec) throw IoFailure("cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());
  std::vector<ActionScript> out;
  for (const auto& f : files) out.push_back(load_script(f));
  return out;
}

}  // namespace docubits::net
