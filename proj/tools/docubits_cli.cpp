// docubits: operator entry points for the session engine.
//
//   serve     run the authoritative server (TCP + WebSocket/HTTP)
//   client    play an action script against a server
//   segment   fragment a text document into steps or highlight spans
//   replay    fold an event log into a snapshot (or its hash)
//   metrics   collaboration measures from an event log
//   simulate  in-process convergence run with simulated latency
//
// Exit codes: 0 ok, 1 usage, 2 I/O or protocol, 3 invariant or convergence
// failure (including corrupt logs and rejected segmentation).

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <boost/asio.hpp>

#include "CLI11.hpp"
#include "docubits/codec.hpp"
#include "docubits/config.hpp"
#include "docubits/doc_model.hpp"
#include "docubits/metrics.hpp"
#include "docubits/net/client.hpp"
#include "docubits/net/server.hpp"
#include "docubits/net/simulate.hpp"
#include "docubits/persist.hpp"

namespace {

using namespace docubits;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kIo = 2;
constexpr int kInvariant = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct FrustumFlags {
  std::optional<double> h_fov, v_fov, near, far;
  bool clone_blocked = false;

  void add(CLI::App* app) {
    app->add_option("--h-fov", h_fov, "Horizontal field of view, degrees");
    app->add_option("--v-fov", v_fov, "Vertical field of view, degrees");
    app->add_option("--near", near, "Near plane, meters");
    app->add_option("--far", far, "Far plane, meters");
    app->add_flag("--clone-blocked", clone_blocked, "Blocked placed bits clone too");
  }

  EngineConfig resolve(const std::string& config_path) const {
    EngineConfig c = config_path.empty() ? EngineConfig{} : load_config(config_path);
    if (h_fov) c.clones.frustum.h_fov_deg = *h_fov;
    if (v_fov) c.clones.frustum.v_fov_deg = *v_fov;
    if (near) c.clones.frustum.near = *near;
    if (far) c.clones.frustum.far = *far;
    if (clone_blocked) c.clones.include_blocked = true;
    if (!c.clones.frustum.valid()) throw DecodeError("frustum out of range");
    return c;
  }
};

// ---- serve ---------------------------------------------------------------

int run_serve(std::uint16_t port, std::uint16_t ws_port, const std::string& bind, const std::string& snapshot,
              const std::string& log, const std::string& config, const std::string& save_snapshot,
              const std::string& static_dir, const std::string& session_id, bool validate,
              const FrustumFlags& frustum) {
  net::ServerConfig cfg;
  cfg.bind_address = bind;
  cfg.port = port;
  cfg.ws_port = ws_port;
  if (!log.empty()) cfg.log_path = log;
  if (!save_snapshot.empty()) cfg.snapshot_out = save_snapshot;
  if (!static_dir.empty()) cfg.static_dir = static_dir;
  cfg.validate_each_commit = validate;
  cfg.engine = frustum.resolve(config);

  SessionState initial = snapshot.empty() ? empty_state(session_id) : load_snapshot(snapshot);

  boost::asio::io_context io;
  std::optional<net::Server> server;
  try {
    server.emplace(io, cfg, std::move(initial));
  } catch (const std::exception& e) {
    std::cerr << "bind failed: " << e.what() << '\n';
    return kIo;
  }
  boost::asio::signal_set signals(io, SIGINT, SIGTERM);
  signals.async_wait([&](const boost::system::error_code& ec, int) {
    if (!ec) server->stop();
  });
  std::cerr << "serving tcp://" << bind << ':' << server->tcp_port() << " ws://" << bind << ':'
            << server->ws_port() << '\n';
  io.run();
  return kOk;
}

// ---- client --------------------------------------------------------------

int run_client(const std::string& connect, const std::string& name, const std::string& script,
               std::optional<std::uint64_t> seed, double jitter_ms, std::int64_t timeout_ms) {
  net::ClientOptions opts;
  const auto colon = connect.rfind(':');
  if (colon == std::string::npos) {
    std::cerr << "--connect expects HOST:PORT\n";
    return kUsage;
  }
  opts.host = connect.substr(0, colon);
  try {
    opts.port = static_cast<std::uint16_t>(std::stoul(connect.substr(colon + 1)));
  } catch (const std::exception&) {
    std::cerr << "--connect expects HOST:PORT\n";
    return kUsage;
  }
  opts.name = name;
  opts.script = net::load_script(script);
  opts.seed = seed.value_or(1);
  if (!seed) std::cerr << "seed=" << opts.seed << '\n';
  opts.jitter_ms = jitter_ms;
  opts.timeout_ms = timeout_ms;

  const auto out = net::run_client(opts);
  Json reasons = Json::object();
  for (const auto& [r, n] : out.reject_reasons) reasons[r] = n;
  Json summary{{"user", out.user}, {"seq", out.seq},         {"hash", out.hash},
               {"commits", out.commits}, {"rejects", out.rejects}, {"reject_reasons", reasons}};
  if (out.error) summary["error"] = *out.error;
  std::cout << canonical_dump(summary) << '\n';
  return out.exit_code;
}

// ---- segment -------------------------------------------------------------

std::vector<Span> parse_span_list(const std::string& spec) {
  std::vector<Span> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw CLI::ValidationError("--spans", "expected a:b pairs");
    try {
      out.push_back({std::stoull(item.substr(0, colon)), std::stoull(item.substr(colon + 1))});
    } catch (const std::exception&) {
      throw CLI::ValidationError("--spans", "expected a:b pairs");
    }
  }
  return out;
}

int run_segment(const std::string& file, const std::string& mode, const std::string& spans,
                const std::string& cohesion, const std::string& creator) {
  SourceDocument doc;
  doc.doc_id = std::filesystem::path(file).stem().string();
  doc.title = doc.doc_id;
  doc.body = read_file(file);
  if (!cohesion.empty()) {
    const Json j = Json::parse(read_file(cohesion), nullptr, false);
    if (j.is_discarded()) throw DecodeError("cohesion file is not JSON");
    doc.cohesion = cohesion_from_json(j);
  }
  if (!document_well_formed(doc)) {
    std::cerr << "document is empty or its cohesion groups are malformed\n";
    return kInvariant;
  }

  Json out = Json::array();
  if (mode == "steps") {
    auto steps = parse_steps(doc);
    if (!steps) {
      std::cerr << to_string(steps.error()) << '\n';
      return kInvariant;
    }
    if (doc.cohesion && !resolve_cohesion(doc.cohesion, *steps)) {
      std::cerr << "cohesion groups do not match the parsed steps\n";
      return kInvariant;
    }
    for (const auto& s : *steps) out.push_back(to_json(s));
  } else {
    if (spans.empty()) throw CLI::ValidationError("--spans", "required in highlight mode");
    std::vector<Span> taken;
    for (const Span& raw : parse_span_list(spans)) {
      auto seg = segment_by_highlight(doc, raw, taken, creator);
      if (!seg) {
        std::cerr << to_string(seg.error()) << " for span " << raw.start << ':' << raw.end << '\n';
        return kInvariant;
      }
      taken.push_back(seg->span);
      out.push_back(to_json(*seg));
    }
  }
  std::cout << canonical_dump(out) << '\n';
  return kOk;
}

// ---- replay / metrics ----------------------------------------------------

int run_replay(const std::string& log, bool hash_only, const std::string& base, const std::string& session_id,
               const std::string& save, bool derived, const std::string& config, const FrustumFlags& frustum) {
  SessionState start = base.empty() ? empty_state(session_id) : load_snapshot(base);
  const auto events = read_log(log);
  const SessionState state = replay(events, std::move(start));
  if (!save.empty()) save_snapshot(state, save, events.empty() ? 0 : events.back().ts);
  if (hash_only) {
    std::cout << snapshot_hash(state) << '\n';
  } else if (derived) {
    const std::int64_t at = events.empty() ? 0 : events.back().ts;
    std::cout << canonical_dump(derived_view(state, frustum.resolve(config), at)) << '\n';
  } else {
    std::cout << canonical_state(state) << '\n';
  }
  return kOk;
}

int run_metrics(const std::string& log, const std::string& format) {
  const auto report = compute_metrics(read_log(log));
  if (format == "csv") {
    std::cout << to_csv(report);
  } else {
    std::cout << canonical_dump(to_json(report)) << '\n';
  }
  return kOk;
}

// ---- simulate ------------------------------------------------------------

int run_simulate(int clients, const std::string& script_dir, double latency, double jitter,
                 std::optional<std::uint64_t> seed, int proposals, double drop, const std::string& snapshot,
                 const std::string& log_out) {
  net::SimConfig cfg;
  cfg.clients = clients;
  cfg.latency_ms = latency;
  cfg.jitter_ms = jitter;
  cfg.seed = seed.value_or(42);
  if (!seed) std::cerr << "seed=" << cfg.seed << '\n';
  if (!script_dir.empty()) cfg.scripts = net::load_script_dir(script_dir);
  cfg.random_proposals = cfg.scripts.empty() ? proposals : 0;
  cfg.drop_probability = drop;
  cfg.validate = true;
  if (!snapshot.empty()) cfg.initial = load_snapshot(snapshot);

  const auto report = net::simulate(cfg);
  if (!log_out.empty()) {
    std::filesystem::remove(log_out);
    EventLog log(log_out);
    for (const auto& ev : report.log) log.append(ev);
  }
  std::cout << canonical_dump(net::to_json(report)) << '\n';
  return report.convergent && report.exactly_once ? kOk : kInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DocuBits session engine"};
  app.require_subcommand(1);

  // serve
  auto* serve = app.add_subcommand("serve", "Run the authoritative server");
  std::uint16_t port = 7400, ws_port = 7401;
  std::string bind = "127.0.0.1", snapshot, log, config, save_snapshot, static_dir, session_id = "main";
  bool validate = false;
  FrustumFlags serve_frustum;
  serve->add_option("--port", port, "TCP port (newline-delimited JSON)");
  serve->add_option("--ws-port", ws_port, "WebSocket/HTTP port");
  serve->add_option("--bind", bind, "Bind address");
  serve->add_option("--snapshot", snapshot, "Restore state from a snapshot file")->check(CLI::ExistingFile);
  serve->add_option("--log", log, "Append committed events to this log");
  serve->add_option("--config", config, "JSON config file")->check(CLI::ExistingFile);
  serve->add_option("--save-snapshot", save_snapshot, "Rewrite this snapshot after every commit");
  serve->add_option("--static-dir", static_dir, "Serve files from this directory over HTTP");
  serve->add_option("--session-id", session_id, "Session id for a fresh session");
  serve->add_flag("--validate", validate, "Check invariants after every commit");
  serve_frustum.add(serve);

  // client
  auto* client = app.add_subcommand("client", "Play an action script against a server");
  std::string connect, name, script;
  std::optional<std::uint64_t> client_seed;
  double client_jitter = 0;
  std::int64_t timeout_ms = 30000;
  client->add_option("--connect", connect, "HOST:PORT of the TCP endpoint")->required();
  client->add_option("--name", name, "Display name")->required();
  client->add_option("--script", script, "Action script (JSON lines)")->required()->check(CLI::ExistingFile);
  client->add_option("--seed", client_seed, "Seed for step jitter");
  client->add_option("--jitter-ms", client_jitter, "Uniform extra delay per step");
  client->add_option("--timeout-ms", timeout_ms, "Give up after this long");

  // segment
  auto* segment = app.add_subcommand("segment", "Fragment a document");
  std::string seg_file, mode = "steps", spans, cohesion, creator = "cli";
  segment->add_option("file", seg_file, "UTF-8 text document")->required()->check(CLI::ExistingFile);
  segment->add_option("--mode", mode, "steps or highlight")->check(CLI::IsMember({"steps", "highlight"}));
  segment->add_option("--spans", spans, "Highlight byte spans a:b[,c:d...]");
  segment->add_option("--cohesion", cohesion, "Cohesion sidecar JSON")->check(CLI::ExistingFile);
  segment->add_option("--creator", creator, "Creator recorded on highlight segments");

  // replay
  auto* replay_cmd = app.add_subcommand("replay", "Replay an event log");
  std::string replay_log, replay_base, replay_save, replay_config, replay_session = "main";
  bool hash_only = false, derived = false;
  FrustumFlags replay_frustum;
  replay_cmd->add_option("log", replay_log, "Event log (JSON lines)")->required()->check(CLI::ExistingFile);
  replay_cmd->add_flag("--hash", hash_only, "Print only the snapshot hash");
  replay_cmd->add_option("--snapshot", replay_base, "Start from this snapshot")->check(CLI::ExistingFile);
  replay_cmd->add_option("--session-id", replay_session, "Session id of a fresh session");
  replay_cmd->add_option("--save-snapshot", replay_save, "Write the final state as a snapshot");
  replay_cmd->add_flag("--derived", derived, "Print clones, anchors and appearances instead");
  replay_cmd->add_option("--config", replay_config, "JSON config file")->check(CLI::ExistingFile);
  replay_frustum.add(replay_cmd);

  // metrics
  auto* metrics = app.add_subcommand("metrics", "Collaboration measures from a log");
  std::string metrics_log, format = "json";
  metrics->add_option("log", metrics_log, "Event log (JSON lines)")->required()->check(CLI::ExistingFile);
  metrics->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Seeded in-process convergence run");
  int sim_clients = 2, proposals = 500;
  std::string script_dir, sim_snapshot, sim_log;
  double latency = 50, jitter = 0, drop = 0;
  std::optional<std::uint64_t> sim_seed;
  simulate->add_option("--clients", sim_clients, "Number of clients")->check(CLI::PositiveNumber);
  simulate->add_option("--script-dir", script_dir, "Directory of *.jsonl action scripts")
      ->check(CLI::ExistingDirectory);
  simulate->add_option("--latency-ms", latency, "Mean one-way latency")->check(CLI::NonNegativeNumber);
  simulate->add_option("--jitter-ms", jitter, "Uniform +- jitter")->check(CLI::NonNegativeNumber);
  simulate->add_option("--seed", sim_seed, "RNG seed");
  simulate->add_option("--proposals", proposals, "Random proposals when no scripts are given");
  simulate->add_option("--drop-prob", drop, "Per-tick disconnect chance in random mode")
      ->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--snapshot", sim_snapshot, "Initial snapshot")->check(CLI::ExistingFile);
  simulate->add_option("--log-out", sim_log, "Write the committed log here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*serve) {
      return run_serve(port, ws_port, bind, snapshot, log, config, save_snapshot, static_dir, session_id,
                       validate, serve_frustum);
    }
    if (*client) return run_client(connect, name, script, client_seed, client_jitter, timeout_ms);
    if (*segment) return run_segment(seg_file, mode, spans, cohesion, creator);
    if (*replay_cmd) {
      return run_replay(replay_log, hash_only, replay_base, replay_session, replay_save, derived, replay_config,
                        replay_frustum);
    }
    if (*metrics) return run_metrics(metrics_log, format);
    if (*simulate) {
      return run_simulate(sim_clients, script_dir, latency, jitter, sim_seed, proposals, drop, sim_snapshot,
                          sim_log);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  } catch (const CorruptLog& e) {
    std::cerr << "corrupt log: " << e.what() << '\n';
    return kInvariant;
  } catch (const DecodeError& e) {
    std::cerr << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kIo;
  }
  return kUsage;
}
