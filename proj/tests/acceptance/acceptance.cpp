// Acceptance run: one PASS/FAIL line per criterion, exit 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include "docubits/anim.hpp"
#include "docubits/bit_state.hpp"
#include "docubits/codec.hpp"
#include "docubits/doc_model.hpp"
#include "docubits/metrics.hpp"
#include "docubits/net/script.hpp"
#include "docubits/net/simulate.hpp"
#include "docubits/persist.hpp"
#include "docubits/session.hpp"
#include "docubits/spatial.hpp"
#include "docubits/validate.hpp"
#include "oracles.hpp"

using namespace docubits;
namespace fs = std::filesystem;

namespace {

const fs::path kData = DOCUBITS_DATA_DIR;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void fail(const std::string& why) {
    if (pass) detail << "first failure: " << why << "; ";
    pass = false;
  }
  void expect(bool cond, const std::string& why) {
    if (!cond) fail(why);
  }
};

int g_failed = 0;

void criterion(const char* name, double limit_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.fail(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && secs >= limit_s) o.fail("runtime over limit");
  if (!o.pass) ++g_failed;
  char timing[64];
  if (limit_s > 0) {
    std::snprintf(timing, sizeof timing, "%.2f s (limit %.0f s)", secs, limit_s);
  } else {
    std::snprintf(timing, sizeof timing, "%.2f s", secs);
  }
  std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << ": " << o.detail.str() << timing << std::endl;
}

SourceDocument doc_of(std::string body) { return {"d", "t", std::move(body), std::nullopt}; }

// ---- segmentation ---------------------------------------------------------

void segmentation(Outcome& o) {
  {
    auto r = parse_steps(doc_of("1. Heat the flask\n2. Add solution"));
    o.expect(r.ok() && r->size() == 2 && (*r)[0].ordinal == 1 && (*r)[1].ordinal == 2 &&
                 (*r)[0].text == "1. Heat the flask" && (*r)[1].text == "2. Add solution",
             "example 1");
    auto none = parse_steps(doc_of("Intro text only, no numbers"));
    o.expect(!none.ok() && none.error() == Reason::NoSteps, "example 2");
    auto dec = parse_steps(doc_of("1. A\n2.1 is a ratio\n3. B"));
    o.expect(dec.ok() && dec->size() == 2 && (*dec)[0].ordinal == 1 && (*dec)[1].ordinal == 3 &&
                 (*dec)[0].text == "1. A\n2.1 is a ratio",
             "example 3");
  }
  testing::Rng rng(20240501);
  const int docs = 500;
  std::size_t segments = 0;
  for (int i = 0; i < docs; ++i) {
    const auto g = testing::generate_steps_doc(rng, 20);
    const auto r = parse_steps(doc_of(g.body));
    if (!r.ok() || r->size() != g.texts.size()) {
      o.fail("doc " + std::to_string(i) + " segment count");
      continue;
    }
    for (std::size_t k = 0; k < r->size(); ++k) {
      const StepSegment& s = (*r)[k];
      ++segments;
      o.expect(s.span.end <= g.body.size() && s.text == g.body.substr(s.span.start, s.span.size()),
               "text is not the byte slice");
      o.expect(s.text == g.texts[k] && s.ordinal == g.ordinals[k], "segment differs from construction");
      if (k > 0) {
        o.expect((*r)[k - 1].span.end <= s.span.start, "overlapping spans");
        o.expect((*r)[k - 1].ordinal < s.ordinal, "ordinals not increasing");
      }
    }
  }
  o.detail << docs << " generated docs, " << segments << " segments, 3 examples; ";
}

// ---- split optimality -------------------------------------------------------

void split_optimality(Outcome& o) {
  std::size_t instances = 0;
  for (int n = 1; n <= 10; ++n) {
    std::vector<StepSegment> steps;
    for (int i = 1; i <= n; ++i) steps.push_back({i, {}, ""});
    // every grouping of n steps into contiguous cohesion runs
    for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask) {
      CohesionGroups groups{{1}};
      for (int i = 2; i <= n; ++i) {
        if (mask & (1u << (i - 2))) {
          groups.push_back({i});
        } else {
          groups.back().push_back(i);
        }
      }
      std::vector<std::size_t> sizes;
      for (const auto& g : groups) sizes.push_back(g.size());

      for (std::size_t users = 1; users <= 4; ++users) {
        ++instances;
        std::vector<std::string> ids;
        for (std::size_t u = 0; u < users; ++u) ids.push_back("u" + std::to_string(u + 1));
        const auto got = assign_split(steps, groups, ids);
        const auto best = testing::brute_force_split(sizes, users);
        if (!best) {
          o.expect(!got.ok() && got.error() == Reason::MoreUsersThanGroups, "expected MoreUsersThanGroups");
          continue;
        }
        if (!got.ok()) {
          o.fail("rejected a feasible instance");
          continue;
        }
        std::size_t worst = 0;
        std::size_t begin = 0;
        for (std::size_t u = 0; u < users; ++u) {
          const std::size_t end = u + 1 < users ? best->cuts[u] : groups.size();
          std::vector<int> expected;
          for (std::size_t g = begin; g < end; ++g) expected.insert(expected.end(), groups[g].begin(), groups[g].end());
          const auto& mine = got->at(ids[u]);
          o.expect(mine == expected, "assignment differs from brute force (n=" + std::to_string(n) + ")");
          worst = std::max(worst, mine.size());
          begin = end;
        }
        o.expect(worst == best->max_load, "max load is not optimal");
      }
    }
  }
  o.detail << instances << " instances (n<=10 steps, all cohesion groupings, 1-4 users); ";
}

// ---- frustum oracle ---------------------------------------------------------

void frustum_oracle(Outcome& o) {
  testing::Rng rng(77);
  int compared = 0, excluded = 0, inside = 0;
  while (compared < 10000) {
    testing::P3 fwd, up;
    testing::random_frame(rng, fwd, up);
    const testing::P3 eye{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)};
    const Frustum fr{rng.uniform(10, 170), rng.uniform(10, 170), rng.uniform(0.01, 1), rng.uniform(1.5, 40)};
    const auto pose = Pose::make({eye.x, eye.y, eye.z}, {fwd.x, fwd.y, fwd.z}, {up.x, up.y, up.z});
    if (!pose) {
      o.fail("random frame rejected by Pose::make");
      return;
    }
    testing::P3 p;
    if (rng.chance(0.25)) {
      p = {rng.uniform(-40, 40), rng.uniform(-40, 40), rng.uniform(-40, 40)};
    } else {
      const testing::P3 right = testing::crossp(fwd, up);
      const double lz = rng.uniform(-0.5, fr.far * 1.1);
      const double lx = rng.uniform(-1.3, 1.3) * std::abs(lz) * std::tan(fr.h_fov_deg * std::numbers::pi / 360);
      const double ly = rng.uniform(-1.3, 1.3) * std::abs(lz) * std::tan(fr.v_fov_deg * std::numbers::pi / 360);
      p = testing::add(eye, testing::add(testing::scale(lx, right),
                                         testing::add(testing::scale(ly, up), testing::scale(lz, fwd))));
    }
    const auto v = testing::plane_oracle(eye, fwd, up, fr.h_fov_deg, fr.v_fov_deg, fr.near, fr.far, p);
    if (v.min_abs_distance < 1e-9) {
      ++excluded;
      continue;
    }
    ++compared;
    inside += v.inside ? 1 : 0;
    o.expect(in_frustum(*pose, fr, {p.x, p.y, p.z}) == v.inside, "disagreement with the six-plane oracle");
  }
  o.detail << compared << " pairs agree (" << inside << " inside, " << excluded << " within 1e-9 excluded); ";
}

// ---- state machine fuzz -----------------------------------------------------

void state_machine_fuzz(Outcome& o) {
  SourceDocument grouped = net::default_lab_document();
  const std::vector<SourceDocument> docs{
      grouped,
      {"buf", "Buffer", "Prep.\n1. Weigh salt\n2. Dissolve\n3. Stir\n4. Check pH\n5. Adjust\n6. Label\n",
       std::nullopt},
      {"two", "Two", "1. one\n2. two\n", std::nullopt},
  };
  std::uint64_t events = 0, accepted = 0, completed_claims = 0, completed_claims_nonmember = 0;
  for (int session = 0; session < 100; ++session) {
    testing::Rng rng(1000 + static_cast<std::uint64_t>(session));
    const SourceDocument& doc = docs[static_cast<std::size_t>(session) % docs.size()];
    SessionState s = empty_state();
    for (int i = 0; i < 150; ++i) {
      const CommittedEvent ev = testing::random_proposal(rng, s, doc, 10 * i);
      const SessionState before = s;
      const auto reason = apply_in_place(s, ev);
      ++events;
      if (reason) {
        o.expect(s == before, "rejected event mutated state");
        o.expect(s.last_seq == before.last_seq, "seq moved on rejection");
      } else {
        ++accepted;
        o.expect(s.last_seq == before.last_seq + 1, "seq not dense");
        if (auto v = check_invariants(s)) o.fail(*v);
        if (auto v = check_transition(before, s)) o.fail(*v);
      }
      if (const auto* c = std::get_if<event::Claim>(&ev.event)) {
        const auto bit = before.bits.find(c->bit_id);
        if (bit == before.bits.end() || bit->second.status != Status::Completed) continue;
        o.expect(reason.has_value(), "claim on a completed bit committed");
        const auto actor = before.users.find(ev.actor);
        if (actor != before.users.end() && actor->second.present) {
          ++completed_claims;
          o.expect(reason == Reason::AlreadyCompleted, "claim on a completed bit not rejected AlreadyCompleted");
        } else {
          ++completed_claims_nonmember;
          o.expect(reason == Reason::UnknownUser, "non-member claim not rejected UnknownUser");
        }
      }
    }
  }
  o.expect(events >= 10000, "too few events");
  o.expect(completed_claims >= 100, "too few claims on completed bits exercised");
  o.detail << events << " events (" << accepted << " committed), " << completed_claims
           << " member claims on completed bits all AlreadyCompleted, " << completed_claims_nonmember
           << " non-member ones rejected UnknownUser; ";
}

// ---- convergence ------------------------------------------------------------

void convergence(Outcome& o) {
  int runs = 0;
  std::uint64_t commits = 0, rejects = 0;
  for (int k : {2, 3, 4}) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      net::SimConfig cfg;
      cfg.clients = k;
      cfg.latency_ms = 100;
      cfg.jitter_ms = 100;  // per-message delay uniform in [0, 200] ms
      cfg.seed = seed;
      cfg.random_proposals = 500;
      const auto r = net::simulate(cfg);
      ++runs;
      commits += r.server_commits;
      rejects += r.server_rejects;
      const std::string tag = " (k=" + std::to_string(k) + ", seed=" + std::to_string(seed) + ")";
      o.expect(r.convergent, "hash mismatch" + tag);
      o.expect(r.exactly_once, "exactly-once accounting broken" + tag);
      o.expect(r.server_proposals == 500, "proposal count" + tag);
      for (const auto& c : r.clients) o.expect(c.hash == r.server_hash, "client hash differs" + tag);
    }
  }
  o.detail << runs << " runs x 500 proposals, all client hashes equal the server's (" << commits << " commits, "
           << rejects << " rejects); ";
}

// ---- replay & persistence ---------------------------------------------------

void replay_persistence(Outcome& o) {
  net::SimConfig cfg;
  cfg.scripts = net::load_script_dir(kData / "sessions/paired_lab");
  cfg.latency_ms = 100;
  cfg.jitter_ms = 100;
  cfg.validate = true;
  const auto live = net::simulate(cfg);
  o.expect(live.convergent && live.exactly_once, "live run did not converge");
  o.expect(live.final_state.bits.size() == 8 && live.final_state.users.size() == 2, "not an 8-step two-user session");

  const fs::path dir = fs::temp_directory_path() / "docubits_acceptance";
  fs::create_directories(dir);
  const fs::path log_path = dir / "paired_lab.jsonl";
  const fs::path snap_path = dir / "paired_lab.snapshot.json";
  fs::remove(log_path);
  {
    EventLog log(log_path);
    for (const auto& e : live.log) log.append(e);
  }
  const std::string replay_hash = snapshot_hash(replay_file(log_path));
  save_snapshot(live.final_state, snap_path, 0);
  const std::string loaded_hash = snapshot_hash(load_snapshot(snap_path));
  o.expect(live.server_hash == replay_hash, "replay hash differs");
  o.expect(live.server_hash == loaded_hash, "save/load hash differs");
  o.detail << "live == replay == save/load = " << live.server_hash.substr(0, 16) << "... over " << live.log.size()
           << " commits; ";
}

// ---- metrics hand trace -----------------------------------------------------

void metrics_hand_trace(Outcome& o) {
  net::SimConfig cfg;
  cfg.scripts = net::load_script_dir(kData / "sessions/paired_lab");
  cfg.latency_ms = 100;
  cfg.jitter_ms = 100;
  const auto live = net::simulate(cfg);
  const MetricsReport r = compute_metrics(live.log);
  std::string a, b;
  for (const auto& [id, name] : r.names) {
    if (name == "Alex") a = id;
    if (name == "Blair") b = id;
  }
  if (a.empty() || b.empty()) {
    o.fail("users not found");
    return;
  }
  const UserMetrics& ma = r.per_user.at(a);
  const UserMetrics& mb = r.per_user.at(b);
  o.expect(ma.completed_solo == 2 && ma.completed_collaborative == 0, "A counts");
  o.expect(mb.completed_solo == 0 && mb.completed_collaborative == 1, "B counts");
  o.expect(r.distribution_gap == 1, "gap");
  o.detail << "A{solo " << ma.completed_solo << ", collab " << ma.completed_collaborative << "} B{solo "
           << mb.completed_solo << ", collab " << mb.completed_collaborative << "} gap " << r.distribution_gap << "; ";
}

// ---- animation --------------------------------------------------------------

void animation(Outcome& o) {
  const AnimConfig c;
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12; };
  const auto d0 = appearance(Status::Completed, 0.0, c);
  o.expect(close(d0.vertical_offset, 0) && close(d0.opacity, 1) && d0.body_tint == Tint::Gray &&
               d0.indicator == Indicator::Green,
           "Completed t=0");
  const auto d10 = appearance(Status::Completed, 10.0, c);
  o.expect(close(d10.vertical_offset, 0.5) && close(d10.opacity, 0.35), "Completed t=10");
  o.expect(close(appearance(Status::Blocked, 0.25, c).vertical_offset, 0.05), "Blocked t=0.25");
  const auto d1 = appearance(Status::Completed, 1.0, c);
  o.expect(close(d1.vertical_offset, 0.15) && close(d1.opacity, 0.8), "Completed t=1");
  o.expect(close(appearance(Status::Blocked, 1.0 / 12.0, c).vertical_offset, 0.025), "Blocked t=1/12");
  const auto na = appearance(Status::NotAttempted, 4.0, c);
  o.expect(na.vertical_offset == 0 && na.opacity == 1 && na.body_tint == Tint::White &&
               na.indicator == Indicator::NoneLit,
           "NotAttempted");
  const auto ip = appearance(Status::InProgress, 4.0, c);
  o.expect(ip.opacity == 1 && ip.indicator == Indicator::Amber, "InProgress");

  double prev_off = -1, prev_op = 2, max_bounce = 0;
  const double clamp_t = 10.0 / 3.0;
  for (int i = 0; i <= 200000; ++i) {
    const double t = i * 1e-4;  // 0 .. 20 s
    const auto a = appearance(Status::Completed, t, c);
    o.expect(a.vertical_offset >= prev_off && a.opacity <= prev_op, "Completed not monotone");
    if (t >= clamp_t) o.expect(close(a.vertical_offset, 0.5) && close(a.opacity, 0.35), "not clamped past 10/3 s");
    prev_off = a.vertical_offset;
    prev_op = a.opacity;
    const double bounce = appearance(Status::Blocked, t * 5, c).vertical_offset;
    o.expect(bounce >= 0 && bounce <= 0.05, "Blocked offset out of [0, 0.05]");
    max_bounce = std::max(max_bounce, bounce);
  }
  o.detail << "spot checks within 1e-12, monotone over 200001 samples, max bounce " << max_bounce << " m; ";
}

}  // namespace

int main() {
  criterion("segmentation", 5, segmentation);
  criterion("split optimality", 10, split_optimality);
  criterion("frustum oracle", 2, frustum_oracle);
  criterion("state-machine invariants", 0, state_machine_fuzz);
  criterion("convergence", 60, convergence);
  criterion("replay & persistence", 0, replay_persistence);
  criterion("metrics hand-trace", 0, metrics_hand_trace);
  criterion("animation", 0, animation);
  std::cout << (g_failed == 0 ? "ALL PASS" : std::to_string(g_failed) + " FAILED") << std::endl;
  return g_failed == 0 ? 0 : 1;
}
