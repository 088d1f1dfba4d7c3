#include "docubits/net/simulate.hpp"

#include <algorithm>
#include <set>
#include <cmath>
#include <numbers>
#include <queue>
#include <random>
#include <variant>

#include "docubits/net/mirror.hpp"
#include "docubits/net/server_core.hpp"

namespace docubits::net {
namespace {

struct ToServer {
  ConnId conn;
  std::string line;
};
struct ToClient {
  int client;
  std::uint64_t epoch;
  std::string line;
};
struct Tick {
  int client;
  std::uint64_t epoch;
};
struct Reconnect {
  int client;
};

using Action = std::variant<ToServer, ToClient, Tick, Reconnect>;

struct Scheduled {
  std::int64_t at_us;
  std::uint64_t order;
  Action action;
};

struct Later {
  bool operator()(const Scheduled& a, const Scheduled& b) const {
    return a.at_us != b.at_us ? a.at_us > b.at_us : a.order > b.order;
  }
};

struct SimClient {
  std::string name;
  Mirror mirror;
  bool connected = false;
  ConnId conn = 0;
  std::uint64_t epoch = 0;
  std::int64_t next_pid = 1;
  std::size_t script_pos = 0;
  bool script_started = false;
  bool ticking = false;
  bool draining = false;  // about to drop; waits for outstanding outcomes first
  // Bit targeted by each proposal, and which proposals change membership or
  // the document; used to keep a client's own proposals from colliding.
  std::map<std::int64_t, std::string> pid_bit;
  std::set<std::int64_t> structural_pids;
  std::uint64_t proposals = 0;
  int reconnects = 0;
};

class Simulation {
 public:
  explicit Simulation(const SimConfig& cfg)
      : cfg_(cfg),
        rng_(cfg.seed),
        server_(cfg.initial, ServerCore::Options{cfg.validate, [this] { return now_us_ / 1000; },
                                                  [this](const CommittedEvent& ev) { log_.push_back(ev); }}),
        document_(cfg.document ? *cfg.document : default_lab_document()),
        budget_(cfg.random_proposals) {
    clients_.reserve(static_cast<std::size_t>(cfg.clients));
    for (int i = 0; i < cfg.clients; ++i) {
      SimClient& c = clients_.emplace_back();
      c.name = "client" + std::to_string(i + 1);
      c.mirror = Mirror(cfg.validate);
    }
  }

  ConvergenceReport run() {
    for (int i = 0; i < cfg_.clients; ++i) open_connection(i, std::nullopt);

    while (!queue_.empty()) {
      Scheduled next = queue_.top();
      queue_.pop();
      now_us_ = next.at_us;
      std::visit([this](auto& a) { dispatch(a); }, next.action);
    }
    return report();
  }

 private:
  double uniform01() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(uniform01() * static_cast<double>(n)); }

  std::int64_t delay_us() {
    const double ms = std::max(0.0, cfg_.latency_ms + uniform(-cfg_.jitter_ms, cfg_.jitter_ms));
    return static_cast<std::int64_t>(std::llround(ms * 1000.0));
  }

  void schedule(std::int64_t at_us, Action a) { queue_.push({at_us, order_++, std::move(a)}); }

  void send_to_server(int client, const Json& msg) {
    schedule(now_us_ + delay_us(), ToServer{clients_[client].conn, encode(msg)});
  }

  void open_connection(int i, std::optional<std::string> resume) {
    SimClient& c = clients_[i];
    c.conn = next_conn_++;
    c.connected = true;
    server_.connect(c.conn);
    send_to_server(i, make_hello(c.name, std::move(resume)));
    if (c.mirror.welcomed()) send_to_server(i, make_resync());
  }

  void dispatch(const ToServer& m) {
    for (auto& out : server_.handle(m.conn, m.line)) {
      for (std::size_t i = 0; i < clients_.size(); ++i) {
        if (clients_[i].connected && clients_[i].conn == out.to) {
          schedule(now_us_ + delay_us(), ToClient{static_cast<int>(i), clients_[i].epoch, out.line});
        }
      }
    }
  }

  void dispatch(const ToClient& m) {
    SimClient& c = clients_[m.client];
    if (!c.connected || m.epoch != c.epoch) return;
    auto msg = decode(m.line);
    if (!msg) return;
    c.mirror.on_message(*msg);
    if (msg->value("t", std::string()) == "welcome" && !c.ticking) start_ticking(m.client);
  }

  void start_ticking(int i) {
    SimClient& c = clients_[i];
    c.ticking = true;
    if (!cfg_.scripts.empty()) {
      if (c.script_started || static_cast<std::size_t>(i) >= cfg_.scripts.size()) return;
      c.script_started = true;
      for (std::size_t k = 0; k < cfg_.scripts[i].size(); ++k) {
        schedule(now_us_ + cfg_.scripts[i][k].at_ms * 1000, Tick{i, c.epoch});
      }
      return;
    }
    if (budget_ > 0) schedule(now_us_ + static_cast<std::int64_t>(uniform(1.0, 20.0) * 1000), Tick{i, c.epoch});
  }

  void propose(int i, SessionEvent event) {
    SimClient& c = clients_[i];
    const std::int64_t pid = c.next_pid++;
    c.mirror.note_proposed(pid);
    std::visit(
        [&](const auto& e) {
          using E = std::decay_t<decltype(e)>;
          if constexpr (requires { e.bit_id; }) c.pid_bit[pid] = e.bit_id;
          if constexpr (std::is_same_v<E, event::Join> || std::is_same_v<E, event::Leave> ||
                        std::is_same_v<E, event::LoadDocument> || std::is_same_v<E, event::FragmentSteps>) {
            c.structural_pids.insert(pid);
          }
        },
        event);
    ++c.proposals;
    send_to_server(i, make_propose(pid, event));
  }

  void dispatch(const Tick& t) {
    SimClient& c = clients_[t.client];
    if (!cfg_.scripts.empty()) {
      const auto& script = cfg_.scripts[t.client];
      if (c.script_pos < script.size()) propose(t.client, script[c.script_pos++].event);
      return;
    }
    if (!c.connected || t.epoch != c.epoch) return;
    if (budget_ <= 0) {
      c.ticking = false;
      return;
    }
    // A dropping client first lets its outstanding proposals settle, so the
    // fate of every proposal stays observable.
    if (!c.draining && cfg_.drop_probability > 0 && uniform01() < cfg_.drop_probability) c.draining = true;
    if (c.draining) {
      if (c.mirror.pending().empty()) {
        c.draining = false;
        drop(t.client);
      } else {
        schedule(now_us_ + 20'000, Tick{t.client, c.epoch});
      }
      return;
    }
    if (auto ev = random_event(t.client)) {
      --budget_;
      propose(t.client, std::move(*ev));
    }
    schedule(now_us_ + static_cast<std::int64_t>(uniform(10.0, 60.0) * 1000), Tick{t.client, c.epoch});
  }

  void dispatch(const Reconnect& r) {
    SimClient& c = clients_[r.client];
    ++c.reconnects;
    c.ticking = false;
    open_connection(r.client, c.mirror.user());
  }

  void drop(int i) {
    SimClient& c = clients_[i];
    c.connected = false;
    ++c.epoch;
    server_.disconnect(c.conn);
    schedule(now_us_ + static_cast<std::int64_t>(uniform(100.0, 500.0) * 1000), Reconnect{i});
  }

  Pose random_pose() {
    const double yaw = uniform(0.0, 2.0 * std::numbers::pi);
    auto pose = Pose::make({uniform(-4, 4), 1.6, uniform(-4, 4)}, {std::sin(yaw), 0.0, std::cos(yaw)}, {0, 1, 0});
    return pose ? *pose : Pose{};
  }

  // A proposal that is valid against the client's current view, or nothing
  // when the client should wait for its own outstanding proposals.
  std::optional<SessionEvent> random_event(int i) {
    SimClient& c = clients_[i];
    const auto& pending = c.mirror.pending();
    std::set<std::string> busy;
    for (auto it = c.pid_bit.begin(); it != c.pid_bit.end();) {
      if (!pending.contains(it->first)) {
        it = c.pid_bit.erase(it);
      } else {
        busy.insert(it->second);
        ++it;
      }
    }
    std::erase_if(c.structural_pids, [&](std::int64_t pid) { return !pending.contains(pid); });
    if (!c.structural_pids.empty()) return std::nullopt;

    const SessionState& view = c.mirror.state();
    const std::string me = c.mirror.user().value_or("");
    auto self = view.users.find(me);
    const bool quiet = pending.empty();
    if (self == view.users.end() || !self->second.present) {
      return quiet ? std::optional<SessionEvent>(event::Join{c.name}) : std::nullopt;
    }
    if (!view.document) return quiet ? std::optional<SessionEvent>(event::LoadDocument{document_}) : std::nullopt;
    if (view.bits.empty()) {
      if (!quiet) return std::nullopt;
      const auto present = std::count_if(view.users.begin(), view.users.end(),
                                         [](const auto& u) { return u.second.present; });
      return event::FragmentSteps{static_cast<int>(present)};
    }

    std::vector<std::string> own_open, own_placed, others_open, all;
    for (const auto& [id, bit] : view.bits) {
      if (busy.contains(id)) continue;
      all.push_back(id);
      if (bit.status == Status::Completed) continue;
      if (bit.owner == me) {
        own_open.push_back(id);
        if (std::holds_alternative<Placed>(bit.placement)) own_placed.push_back(id);
      } else {
        others_open.push_back(id);
      }
    }

    const double r = uniform01();
    if (r < 0.24 && !others_open.empty()) return event::Claim{others_open[pick(others_open.size())]};
    if (r < 0.25 && !all.empty()) return event::Claim{all[pick(all.size())]};  // may hit a completed bit
    if (r < 0.50 && !own_open.empty()) {
      const std::string& id = own_open[pick(own_open.size())];
      std::vector<Status> options;
      for (Status st : {Status::NotAttempted, Status::InProgress, Status::Blocked, Status::Completed}) {
        if (st != view.bits.at(id).status) options.push_back(st);
      }
      return event::SetStatus{id, options[pick(options.size())]};
    }
    if (r < 0.65 && !own_open.empty()) {
      return event::Place{own_open[pick(own_open.size())], {uniform(-5, 5), uniform(0, 2), uniform(-5, 5)}};
    }
    if (r < 0.72 && !own_placed.empty()) return event::ReturnToStack{own_placed[pick(own_placed.size())]};
    if (r < 0.80 && self->second.stack.size() > 1 && busy.empty()) {
      auto order = self->second.stack;
      for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[pick(k)]);
      if (order != self->second.stack) return event::ReorderStack{std::move(order)};
    }
    if (r < 0.85) {
      if (auto span = free_highlight(view)) return event::FragmentHighlight{*span};
    }
    if (r < 0.87 && quiet) return event::Leave{};
    return event::MovePose{random_pose()};
  }

  // A random span inside text no bit covers yet, containing a non-space byte.
  std::optional<Span> free_highlight(const SessionState& view) {
    const std::string& body = view.document->body;
    std::vector<Span> taken;
    for (const auto& [id, bit] : view.bits) taken.push_back(bit.span);
    std::sort(taken.begin(), taken.end(), [](const Span& x, const Span& y) { return x.start < y.start; });
    std::vector<Span> gaps;
    std::size_t at = 0;
    for (const Span& t : taken) {
      if (t.start > at) gaps.push_back({at, t.start});
      at = std::max(at, t.end);
    }
    if (at < body.size()) gaps.push_back({at, body.size()});
    std::erase_if(gaps, [&](const Span& g) {
      return body.find_first_not_of(" \t\r\n\v\f", g.start) >= g.end;
    });
    if (gaps.empty()) return std::nullopt;
    const Span g = gaps[pick(gaps.size())];
    const std::size_t first = body.find_first_not_of(" \t\r\n\v\f", g.start);
    const std::size_t start = first + pick(std::min<std::size_t>(g.end - first, 20));
    const std::size_t len = 1 + pick(std::min<std::size_t>(g.end - start, 40));
    const Span s{start, start + len};
    if (body.find_first_not_of(" \t\r\n\v\f", s.start) >= s.end) return Span{first, first + 1};
    return s;
  }

  ConvergenceReport report() {
    ConvergenceReport r;
    r.server_hash = snapshot_hash(server_.state());
    r.server_seq = server_.state().last_seq;
    r.server_proposals = server_.stats().proposals;
    r.server_commits = server_.stats().commits;
    r.server_rejects = server_.stats().rejects;
    r.server_violation = server_.violation();
    r.quiesced_at_ms = now_us_ / 1000;

    bool convergent = !r.server_violation.has_value();
    bool exactly_once = r.server_proposals == r.server_commits + r.server_rejects &&
                        r.server_commits == log_.size();
    for (std::size_t k = 0; k < log_.size(); ++k) {
      if (log_[k].seq != cfg_.initial.last_seq + k + 1) exactly_once = false;
    }

    for (std::size_t i = 0; i < clients_.size(); ++i) {
      const SimClient& c = clients_[i];
      SimClientReport cr;
      cr.user = c.mirror.user().value_or("");
      cr.hash = snapshot_hash(c.mirror.state());
      cr.seq = c.mirror.state().last_seq;
      cr.proposals = c.proposals;
      cr.commits = c.mirror.own_commits();
      cr.rejects = c.mirror.own_rejects();
      cr.reconnects = c.reconnects;
      cr.reject_reasons = c.mirror.reject_reasons();
      cr.fault = c.mirror.fault();
      if (cr.fault || cr.hash != r.server_hash || c.mirror.buffered() != 0) convergent = false;
      if (!c.mirror.pending().empty() || c.mirror.duplicate_outcomes() != 0 ||
          cr.commits + cr.rejects != cr.proposals) {
        exactly_once = false;
      }
      r.clients.push_back(std::move(cr));
    }
    r.convergent = convergent;
    r.exactly_once = exactly_once;
    r.log = log_;
    r.final_state = server_.state();
    return r;
  }

  const SimConfig& cfg_;
  std::mt19937_64 rng_;
  std::int64_t now_us_ = 0;
  std::uint64_t order_ = 0;
  std::vector<CommittedEvent> log_;
  ServerCore server_;
  SourceDocument document_;
  int budget_;
  ConnId next_conn_ = 1;
  std::vector<SimClient> clients_;
  std::priority_queue<Scheduled, std::vector<Scheduled>, Later> queue_;
};

}  // namespace

ConvergenceReport simulate(const SimConfig& config) {
  if (config.clients < 1) throw std::invalid_argument("simulate needs at least one client");
  return Simulation(config).run();
}

Json to_json(const ConvergenceReport& r) {
  Json clients = Json::array();
  for (const auto& c : r.clients) {
    clients.push_back({{"user", c.user},
                       {"hash", c.hash},
                       {"seq", c.seq},
                       {"proposals", c.proposals},
                       {"commits", c.commits},
                       {"rejects", c.rejects},
                       {"reconnects", c.reconnects},
                       {"reject_reasons", c.reject_reasons},
                       {"fault", c.fault ? Json(*c.fault) : Json(nullptr)}});
  }
  return {{"clients", std::move(clients)},
          {"server",
           {{"hash", r.server_hash},
            {"seq", r.server_seq},
            {"proposals", r.server_proposals},
            {"commits", r.server_commits},
            {"rejects", r.server_rejects},
            {"violation", r.server_violation ? Json(*r.server_violation) : Json(nullptr)}}},
          {"convergent", r.convergent},
          {"exactly_once", r.exactly_once},
          {"quiesced_at_ms", r.quiesced_at_ms}};
}

SourceDocument default_lab_document() {
  SourceDocument d;
  d.doc_id = "distillation-lab";
  d.title = "Simple distillation";
  d.body =
      "Simple distillation of a salt water sample.\n"
      "Wear goggles and gloves for the whole procedure.\n"
      "\n"
      "1. Clamp the round-bottom flask to the ring stand.\n"
      "2. Pour 50 mL of the salt water sample into the flask.\n"
      "3. Add two boiling chips to the flask.\n"
      "4. Fit the thermometer so the bulb sits just below the side arm.\n"
      "5. Connect the condenser and start a slow flow of cold water.\n"
      "6. Place a clean beaker under the condenser outlet.\n"
      "7. Heat the flask gently until the liquid boils steadily.\n"
      "8. Stop heating when about 10 mL remains in the flask.\n";
  d.cohesion = CohesionGroups{{1, 2, 3}, {4, 5}, {6}, {7, 8}};
  return d;
}

}  // namespace docubits::net
