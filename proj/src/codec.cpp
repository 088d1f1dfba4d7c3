#include "docubits/codec.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>

namespace docubits {
namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

void dump_into(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::null: out += "null"; return;
    case Json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; return;
    case Json::value_t::number_integer: out += std::to_string(j.get<std::int64_t>()); return;
    case Json::value_t::number_unsigned: out += std::to_string(j.get<std::uint64_t>()); return;
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) throw DecodeError("non-finite number in canonical form");
      if (v == 0.0) {
        out += '0';
        return;
      }
      std::array<char, 32> buf{};
      auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
      out.append(buf.data(), end);
      return;
    }
    case Json::value_t::string:
      out += j.dump(-1, ' ', false, Json::error_handler_t::strict);
      return;
    case Json::value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += ',';
        first = false;
        dump_into(e, out);
      }
      out += ']';
      return;
    }
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += Json(it.key()).dump(-1, ' ', false, Json::error_handler_t::strict);
        out += ':';
        dump_into(it.value(), out);
      }
      out += '}';
      return;
    }
    case Json::value_t::binary:
    case Json::value_t::discarded:
      break;
  }
  throw DecodeError("value has no canonical form");
}

// Runs a decoder, converting library exceptions into DecodeError.
template <class F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const DecodeError&) {
    throw;
  } catch (const std::exception& e) {
    throw DecodeError(std::string(what) + ": " + e.what());
  }
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw DecodeError(std::string("expected object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) throw DecodeError(std::string("missing field '") + key + "'");
  return *it;
}

std::string get_string(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_string()) throw DecodeError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

template <class Int>
Int get_int(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) throw DecodeError(std::string("field '") + key + "' must be an integer");
  if constexpr (std::is_unsigned_v<Int>) {
    if (v.is_number_unsigned()) return static_cast<Int>(v.get<std::uint64_t>());
    if (v.get<std::int64_t>() < 0) throw DecodeError(std::string("field '") + key + "' is negative");
  }
  return v.get<Int>();
}

double get_number(const Json& v) {
  if (!v.is_number()) throw DecodeError("expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw DecodeError("non-finite number");
  return d;
}

Json span_json(const Span& s) { return Json::array({s.start, s.end}); }

Span span_from(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_unsigned() || !j[1].is_number_unsigned()) {
    throw DecodeError("span must be [start, end] with non-negative integers");
  }
  return {j[0].get<std::size_t>(), j[1].get<std::size_t>()};
}

Json placement_json(const Placement& p) {
  return std::visit(Overloaded{
                        [](const InStack& s) {
                          return Json{{"kind", "InStack"}, {"stack_position", s.stack_position}};
                        },
                        [](const Placed& s) {
                          return Json{{"kind", "Placed"}, {"position", to_json(s.position)}};
                        },
                    },
                    p);
}

Placement placement_from(const Json& j) {
  const std::string kind = get_string(j, "kind");
  if (kind == "InStack") return InStack{get_int<int>(j, "stack_position")};
  if (kind == "Placed") return Placed{vec3_from_json(field(j, "position"))};
  throw DecodeError("unknown placement kind '" + kind + "'");
}

Status status_from(const Json& j, const char* key) {
  auto s = status_from_string(get_string(j, key));
  if (!s) throw DecodeError("unknown status");
  return *s;
}

DocuBit bit_from(const Json& j) {
  DocuBit b;
  b.bit_id = get_string(j, "bit_id");
  b.doc_id = get_string(j, "doc_id");
  b.span = span_from(field(j, "span"));
  b.text = get_string(j, "text");
  if (const Json& o = field(j, "ordinal"); !o.is_null()) b.ordinal = get_int<int>(j, "ordinal");
  b.owner = get_string(j, "owner");
  for (const Json& h : field(j, "owner_history")) {
    b.owner_history.push_back({get_string(h, "user"), get_int<std::uint64_t>(h, "seq")});
  }
  b.status = status_from(j, "status");
  b.placement = placement_from(field(j, "placement"));
  b.status_changed_at = get_int<std::int64_t>(j, "status_changed_at");
  b.created_by = get_string(j, "created_by");
  return b;
}

}  // namespace

std::string canonical_dump(const Json& j) {
  std::string out;
  dump_into(j, out);
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 0xF];
  }
  return out;
}

Json to_json(const Vec3& v) { return Json::array({v.x, v.y, v.z}); }

Json to_json(const Pose& p) {
  return {{"position", to_json(p.position())}, {"forward", to_json(p.forward())}, {"up", to_json(p.up())}};
}

Json to_json(const SourceDocument& d) {
  Json j{{"doc_id", d.doc_id}, {"title", d.title}, {"body", d.body}};
  j["cohesion"] = d.cohesion ? Json(*d.cohesion) : Json(nullptr);
  return j;
}

Json to_json(const StepSegment& s) {
  return {{"ordinal", s.ordinal}, {"span", span_json(s.span)}, {"text", s.text}};
}

Json to_json(const HighlightSegment& s) {
  return {{"span", span_json(s.span)}, {"text", s.text}, {"creator", s.creator}};
}

Json to_json(const DocuBit& b) {
  Json history = Json::array();
  for (const auto& h : b.owner_history) history.push_back({{"user", h.user}, {"seq", h.seq}});
  return {
      {"bit_id", b.bit_id},
      {"doc_id", b.doc_id},
      {"span", span_json(b.span)},
      {"text", b.text},
      {"ordinal", b.ordinal ? Json(*b.ordinal) : Json(nullptr)},
      {"owner", b.owner},
      {"owner_history", std::move(history)},
      {"status", to_string(b.status)},
      {"placement", placement_json(b.placement)},
      {"status_changed_at", b.status_changed_at},
      {"created_by", b.created_by},
  };
}

Json to_json(const SessionEvent& e) {
  Json j = std::visit(
      Overloaded{
          [](const event::Join& v) { return Json{{"name", v.name}}; },
          [](const event::Leave&) { return Json::object(); },
          [](const event::LoadDocument& v) { return Json{{"document", to_json(v.document)}}; },
          [](const event::FragmentSteps& v) { return Json{{"user_count", v.user_count}}; },
          [](const event::FragmentHighlight& v) { return Json{{"span", span_json(v.span)}}; },
          [](const event::Claim& v) { return Json{{"bit_id", v.bit_id}}; },
          [](const event::Place& v) {
            return Json{{"bit_id", v.bit_id}, {"position", to_json(v.position)}};
          },
          [](const event::ReturnToStack& v) { return Json{{"bit_id", v.bit_id}}; },
          [](const event::SetStatus& v) {
            return Json{{"bit_id", v.bit_id}, {"status", to_string(v.status)}};
          },
          [](const event::MovePose& v) { return Json{{"pose", to_json(v.pose)}}; },
          [](const event::ReorderStack& v) { return Json{{"bit_ids", v.bit_ids}}; },
      },
      e);
  j["type"] = event_type(e);
  return j;
}

Json to_json(const CommittedEvent& e) {
  return {{"seq", e.seq}, {"actor", e.actor}, {"ts", e.ts}, {"event", to_json(e.event)}};
}

Json to_json(const SessionState& s) {
  Json users = Json::object();
  for (const auto& [id, u] : s.users) {
    users[id] = {
        {"name", u.name},
        {"color", {{"index", u.color.index}, {"badge", u.color.badge}}},
        {"pose", to_json(u.pose)},
        {"stack", u.stack},
        {"present", u.present},
    };
  }
  Json bits = Json::object();
  for (const auto& [id, b] : s.bits) bits[id] = to_json(b);
  return {
      {"session_id", s.session_id},
      {"document", s.document ? to_json(*s.document) : Json(nullptr)},
      {"users", std::move(users)},
      {"join_order", s.join_order},
      {"bits", std::move(bits)},
      {"last_seq", s.last_seq},
      {"next_bit", s.next_bit},
      {"started_at", s.started_at},
  };
}

Vec3 vec3_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw DecodeError("vector must be [x, y, z]");
  return {get_number(j[0]), get_number(j[1]), get_number(j[2])};
}

Pose pose_from_json(const Json& j) {
  return guarded("pose", [&] {
    auto pose = Pose::make(vec3_from_json(field(j, "position")), vec3_from_json(field(j, "forward")),
                           vec3_from_json(field(j, "up")));
    if (!pose) throw DecodeError("pose axes are not orthonormal");
    return *pose;
  });
}

CohesionGroups cohesion_from_json(const Json& j) {
  return guarded("cohesion", [&] {
    if (!j.is_array()) throw DecodeError("cohesion must be a list of lists");
    CohesionGroups out;
    for (const Json& g : j) {
      if (!g.is_array()) throw DecodeError("cohesion group must be a list");
      auto& group = out.emplace_back();
      for (const Json& o : g) {
        if (!o.is_number_integer()) throw DecodeError("cohesion ordinals must be integers");
        group.push_back(o.get<int>());
      }
    }
    return out;
  });
}

SourceDocument document_from_json(const Json& j) {
  return guarded("document", [&] {
    SourceDocument d;
    d.doc_id = get_string(j, "doc_id");
    d.title = get_string(j, "title");
    d.body = get_string(j, "body");
    if (auto it = j.find("cohesion"); it != j.end() && !it->is_null()) {
      d.cohesion = cohesion_from_json(*it);
    }
    return d;
  });
}

SessionEvent event_from_json(const Json& j) {
  return guarded("event", [&]() -> SessionEvent {
    const std::string type = get_string(j, "type");
    if (type == "Join") return event::Join{get_string(j, "name")};
    if (type == "Leave") return event::Leave{};
    if (type == "LoadDocument") return event::LoadDocument{document_from_json(field(j, "document"))};
    if (type == "FragmentSteps") return event::FragmentSteps{get_int<int>(j, "user_count")};
    if (type == "FragmentHighlight") return event::FragmentHighlight{span_from(field(j, "span"))};
    if (type == "Claim") return event::Claim{get_string(j, "bit_id")};
    if (type == "Place") {
      return event::Place{get_string(j, "bit_id"), vec3_from_json(field(j, "position"))};
    }
    if (type == "ReturnToStack") return event::ReturnToStack{get_string(j, "bit_id")};
    if (type == "SetStatus") return event::SetStatus{get_string(j, "bit_id"), status_from(j, "status")};
    if (type == "MovePose") return event::MovePose{pose_from_json(field(j, "pose"))};
    if (type == "ReorderStack") {
      const Json& ids = field(j, "bit_ids");
      if (!ids.is_array()) throw DecodeError("bit_ids must be a list");
      std::vector<std::string> out;
      for (const Json& id : ids) {
        if (!id.is_string()) throw DecodeError("bit_ids must hold strings");
        out.push_back(id.get<std::string>());
      }
      return event::ReorderStack{std::move(out)};
    }
    throw DecodeError("unknown event type '" + type + "'");
  });
}

CommittedEvent committed_from_json(const Json& j) {
  return guarded("committed event", [&] {
    CommittedEvent e;
    e.seq = get_int<std::uint64_t>(j, "seq");
    e.actor = get_string(j, "actor");
    e.ts = get_int<std::int64_t>(j, "ts");
    e.event = event_from_json(field(j, "event"));
    return e;
  });
}

SessionState state_from_json(const Json& j) {
  return guarded("state", [&] {
    SessionState s;
    s.session_id = get_string(j, "session_id");
    if (const Json& d = field(j, "document"); !d.is_null()) s.document = document_from_json(d);
    for (const auto& [id, u] : field(j, "users").items()) {
      UserRecord rec;
      rec.name = get_string(u, "name");
      const Json& color = field(u, "color");
      rec.color = {get_int<int>(color, "index"), get_int<int>(color, "badge")};
      rec.pose = pose_from_json(field(u, "pose"));
      rec.stack = field(u, "stack").get<std::vector<std::string>>();
      rec.present = field(u, "present").get<bool>();
      s.users.emplace(id, std::move(rec));
    }
    s.join_order = field(j, "join_order").get<std::vector<std::string>>();
    for (const auto& [id, b] : field(j, "bits").items()) s.bits.emplace(id, bit_from(b));
    s.last_seq = get_int<std::uint64_t>(j, "last_seq");
    s.next_bit = get_int<std::uint64_t>(j, "next_bit");
    s.started_at = get_int<std::int64_t>(j, "started_at");
    return s;
  });
}

std::string canonical_state(const SessionState& s) { return canonical_dump(to_json(s)); }

std::string snapshot_hash(const SessionState& s) { return sha256_hex(canonical_state(s)); }

}  // namespace docubits
