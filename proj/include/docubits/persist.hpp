#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "docubits/session.hpp"

namespace docubits {

class IoFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class VersionMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kSnapshotVersion = 1;

// {"saved_at":ms,"state":{...},"version":1}, canonical bytes plus a newline.
void save_snapshot(const SessionState& state, const std::filesystem::path& path,
                   std::int64_t saved_at);
SessionState load_snapshot(const std::filesystem::path& path);

// Append-only JSON-lines log; line i holds committed event seq i.
class EventLog {
 public:
  // Opens for append. An existing file is scanned so the next append must
  // continue its seq run.
  explicit EventLog(const std::filesystem::path& path);

  void append(const CommittedEvent& ev);
  std::uint64_t last_seq() const { return last_seq_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::uint64_t last_seq_ = 0;
};

// Parses a log file; seq gaps or undecodable lines throw CorruptLog.
std::vector<CommittedEvent> read_log(const std::filesystem::path& path);

SessionState replay_file(const std::filesystem::path& path, SessionState base = empty_state());

}  // namespace docubits
