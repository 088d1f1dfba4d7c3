#include "docubits/metrics.hpp"

#include <algorithm>
#include <sstream>

namespace docubits {
namespace {

std::string csv_field(const std::string& v) {
  if (v.find_first_of(",\"\n\r") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

MetricsReport compute_metrics(const std::vector<CommittedEvent>& log) {
  SessionState state = empty_state();
  std::map<std::string, std::int64_t> created_ts;
  std::map<std::string, std::int64_t> completed_ts;
  std::optional<std::int64_t> first_ts;
  std::optional<std::int64_t> last_completion_ts;

  for (const auto& ev : log) {
    if (ev.seq != state.last_seq + 1) {
      throw CorruptLog("seq " + std::to_string(ev.seq) + " does not follow " +
                       std::to_string(state.last_seq));
    }
    if (auto reason = apply_in_place(state, ev)) {
      throw CorruptLog("seq " + std::to_string(ev.seq) + " rejected: " + std::string(to_string(*reason)));
    }
    if (!first_ts) first_ts = ev.ts;
    for (const auto& [id, bit] : state.bits) {
      created_ts.try_emplace(id, ev.ts);
      if (bit.status == Status::Completed && completed_ts.try_emplace(id, ev.ts).second) {
        last_completion_ts = ev.ts;
      }
    }
  }

  MetricsReport r;
  for (const auto& user : state.join_order) {
    r.per_user[user];
    r.names[user] = state.users.at(user).name;
  }
  for (const auto& [id, bit] : state.bits) {
    BitMetrics& bm = r.per_bit[id];
    bm.owners = static_cast<int>(bit.owner_history.size());
    if (bit.status != Status::Completed) continue;
    bm.time_to_complete_ms = completed_ts.at(id) - created_ts.at(id);
    UserMetrics& um = r.per_user[bit.owner];
    if (bit.owner_history.size() == 1) {
      ++um.completed_solo;
    } else {
      ++um.completed_collaborative;
    }
    ++um.total_completed;
  }
  if (!r.per_user.empty()) {
    auto [lo, hi] = std::minmax_element(r.per_user.begin(), r.per_user.end(), [](const auto& a, const auto& b) {
      return a.second.total_completed < b.second.total_completed;
    });
    r.distribution_gap = hi->second.total_completed - lo->second.total_completed;
  }
  if (last_completion_ts) r.session_duration_ms = *last_completion_ts - *first_ts;
  return r;
}

Json to_json(const MetricsReport& r) {
  Json users = Json::object();
  for (const auto& [id, u] : r.per_user) {
    auto name = r.names.find(id);
    users[id] = {{"name", name == r.names.end() ? "" : name->second},
                 {"completed_solo", u.completed_solo},
                 {"completed_collaborative", u.completed_collaborative},
                 {"total_completed", u.total_completed}};
  }
  Json bits = Json::object();
  for (const auto& [id, b] : r.per_bit) {
    bits[id] = {{"owners", b.owners},
                {"time_to_complete_ms", b.time_to_complete_ms ? Json(*b.time_to_complete_ms) : Json(nullptr)}};
  }
  return {{"per_user", std::move(users)},
          {"distribution_gap", r.distribution_gap},
          {"session_duration_ms", r.session_duration_ms ? Json(*r.session_duration_ms) : Json(nullptr)},
          {"per_bit", std::move(bits)}};
}

std::string to_csv(const MetricsReport& r) {
  std::ostringstream out;
  out << "user,name,completed_solo,completed_collaborative,total_completed,distribution_gap,session_duration_ms\n";
  UserMetrics sum;
  for (const auto& [id, u] : r.per_user) {
    auto name = r.names.find(id);
    out << csv_field(id) << ',' << csv_field(name == r.names.end() ? "" : name->second) << ','
        << u.completed_solo << ',' << u.completed_collaborative << ',' << u.total_completed
        << ",,\n";
    sum.completed_solo += u.completed_solo;
    sum.completed_collaborative += u.completed_collaborative;
    sum.total_completed += u.total_completed;
  }
  out << "TOTAL,," << sum.completed_solo << ',' << sum.completed_collaborative << ',' << sum.total_completed
      << ',' << r.distribution_gap << ',';
  if (r.session_duration_ms) out << *r.session_duration_ms;
  out << '\n';
  return out.str();
}

}  // namespace docubits
