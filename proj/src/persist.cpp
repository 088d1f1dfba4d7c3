#include "docubits/persist.hpp"

#include <sstream>
#include <string>

#include "docubits/codec.hpp"

namespace docubits {

void save_snapshot(const SessionState& state, const std::filesystem::path& path,
                   std::int64_t saved_at) {
  const Json doc{{"version", kSnapshotVersion}, {"saved_at", saved_at}, {"state", to_json(state)}};
  const std::string bytes = canonical_dump(doc) + "\n";

  // Write-then-rename so a crash never leaves a half-written snapshot.
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out.flush()) throw IoFailure("write failed on " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoFailure("cannot move snapshot into " + path.string() + ": " + ec.message());
}

SessionState load_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  Json doc;
  try {
    doc = Json::parse(buf.str());
  } catch (const Json::exception& e) {
    throw IoFailure("snapshot " + path.string() + " is not JSON: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("version") || !doc["version"].is_number_integer()) {
    throw VersionMismatch("snapshot " + path.string() + " carries no version");
  }
  if (doc["version"].get<int>() != kSnapshotVersion) {
    throw VersionMismatch("snapshot version " + doc["version"].dump() + " is not supported");
  }
  if (!doc.contains("state")) throw IoFailure("snapshot " + path.string() + " has no state");
  try {
    return state_from_json(doc["state"]);
  } catch (const DecodeError& e) {
    throw IoFailure("snapshot " + path.string() + ": " + e.what());
  }
}

EventLog::EventLog(const std::filesystem::path& path) : path_(path) {
  if (std::filesystem::exists(path)) {
    auto existing = read_log(path);
    if (!existing.empty()) last_seq_ = existing.back().seq;
  }
  out_.open(path, std::ios::binary | std::ios::app);
  if (!out_) throw IoFailure("cannot open log " + path.string());
}

void EventLog::append(const CommittedEvent& ev) {
  if (last_seq_ != 0 && ev.seq != last_seq_ + 1) {
    throw CorruptLog("append of seq " + std::to_string(ev.seq) + " after " + std::to_string(last_seq_));
  }
  out_ << canonical_dump(to_json(ev)) << '\n';
  if (!out_.flush()) throw IoFailure("write failed on " + path_.string());
  last_seq_ = ev.seq;
}

std::vector<CommittedEvent> read_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path.string());
  std::vector<CommittedEvent> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    CommittedEvent ev;
    try {
      ev = committed_from_json(Json::parse(line));
    } catch (const std::exception& e) {
      throw CorruptLog(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!out.empty() && ev.seq != out.back().seq + 1) {
      throw CorruptLog(path.string() + ":" + std::to_string(lineno) + ": seq " +
                       std::to_string(ev.seq) + " does not follow " + std::to_string(out.back().seq));
    }
    out.push_back(std::move(ev));
  }
  return out;
}

SessionState replay_file(const std::filesystem::path& path, SessionState base) {
  return replay(read_log(path), std::move(base));
}

}  // namespace docubits
