// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "support.hpp"

using namespace cog;
using namespace cogtest;

namespace {

const std::string kWalkthroughDigest = "7dbd645e583e9184a2637f237bd81ad195a6ed3af422091efbf4c23a1e97c76a";

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Failure {
  std::string what;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const RuntimeConfig& config() {
  static const RuntimeConfig c = bundled_config();
  return c;
}

SessionArchive walkthrough() { return load_archive(COG_FIXTURE_DIR "/walkthrough.jsonl"); }

std::vector<SessionState> prefix_states(const SessionArchive& a) {
  std::vector<SessionState> out;
  for (const auto& e : a.events) {
    ReplayOptions o;
    o.until = e.seq;
    o.verify_digest = false;
    out.push_back(replay(a, o));
  }
  return out;
}

// ---- backbone safety ---------------------------------------------------------

Outcome backbone_safety() {
  const auto t0 = Clock::now();
  std::mt19937 rng(1001);
  long commits = 0;
  int sequences = 0;
  for (; sequences < 10000; ++sequences) {
    SessionState last;
    random_session(rng, config(), 12, 30, [&](const SessionState& s) {
      auto r = validate_backbone(s.cognitive.graph);
      require(r.ok, "validate_backbone failed in sequence " + std::to_string(sequences));
      require(static_cast<int>(s.cognitive.graph.concepts.size()) <= 30, "generator exceeded 30 concepts");
      last = s;
      ++commits;
    });
    require(validate_backbone(last.cognitive.graph).ok, "final state invalid");
  }
  const double secs = seconds_since(t0);
  require(secs < 60.0, "runtime " + std::to_string(secs) + " s");
  std::ostringstream d;
  d << sequences << " sequences, " << commits << " commits, 0 violations, " << secs << " s";
  return {true, d.str()};
}

// ---- cycle repair ------------------------------------------------------------

Outcome cycle_repair() {
  std::mt19937 rng(1002);
  int graphs = 0, cyclic = 0;
  for (; graphs < 6000; ++graphs) {
    const int n = 2 + graphs % 5;
    CognitiveGraph g = random_digraph(rng, n, 0.2 + 0.1 * (graphs % 5));
    auto result = repair_cycles(g);
    cyclic += !result.removed.empty();
    require(scc_oracle(result.graph).empty(), "output still cyclic");
    require(result.removed == repair_oracle(g), "differs from removal-search oracle");
    // Each removal is the weakest edge of its component at that point.
    CognitiveGraph work = g;
    for (const auto& id : result.removed) {
      const auto& e = work.edges.at(id);
      std::set<ConceptId> comp;
      for (const auto& c : scc_oracle(work))
        if (std::count(c.begin(), c.end(), e.source)) comp.insert(c.begin(), c.end());
      require(comp.count(e.target) > 0, id + " was not inside a cycle");
      for (const auto& [oid, o] : work.edges)
        if (is_live(o.status) && comp.count(o.source) && comp.count(o.target))
          require(e.strength <= o.strength, id + " is not minimum-strength");
      work.edges.at(id).status = ItemStatus::cancelled;
    }
  }
  return {true, std::to_string(graphs) + " graphs (" + std::to_string(cyclic) + " cyclic), 0 discrepancies"};
}

// ---- motif matching ----------------------------------------------------------

Outcome motif_oracle() {
  std::mt19937 rng(1003);
  int graphs = 0;
  long instances = 0;
  for (; graphs < 1500; ++graphs) {
    CognitiveGraph g = random_motif_graph(rng, 2 + graphs % 9, 0.25 + 0.05 * (graphs % 4));
    int grounded = 0;
    for (const auto& [id, c] : g.concepts) grounded += c.status == ItemStatus::grounded;
    require(grounded <= 10, "graph exceeds 10 grounded concepts");
    auto got = match_motifs(g, config().vocabulary);
    auto want = match_oracle(g, config().vocabulary);
    require(same_matches(got, want), "graph " + std::to_string(graphs) + " differs from enumeration");
    instances += static_cast<long>(want.size());
  }
  return {true, std::to_string(graphs) + " graphs, " + std::to_string(instances) + " instances, 0 discrepancies"};
}

// ---- generated sessions --------------------------------------------------------

const std::vector<std::string> kUserLines{
    "I prefer budget hotels",
    "I usually prefer affordable options, but I'd pay more for verified reviews",
    "We must stay under 200 dollars.",
    "I think it will rain.",
    "We want outdoor hiking.",
    "My kids love the aquarium.",
    "We need a place that allows dogs.",
};
const char* kSlots[] = {"budget", "accommodation_type", "weather", "activity_type", "review_quality"};

Json random_extraction(std::mt19937& rng, const SessionState& s, const std::string& tag) {
  static const char* kinds[] = {"belief", "constraint", "preference", "factual"};
  static const char* causal[] = {"direct", "mediated", "confounding", "intervention"};
  std::vector<std::string> ids;
  Json concepts = Json::array();
  const int n = 1 + static_cast<int>(rng() % 3);
  for (int i = 1; i <= n; ++i) {
    Json c{{"id", "n" + std::to_string(i)},
           {"kind", kinds[rng() % 4]},
           {"label", tag + " item " + std::to_string(rng() % 1000)},
           {"confidence", (3 + rng() % 7) / 10.0},
           {"provenance", "user_confirmed"}};
    if (rng() % 3) c["slot"] = kSlots[rng() % 5];
    concepts.push_back(Json{{"concept", c}, {"extractor", "external"}});
    ids.push_back("n" + std::to_string(i));
  }
  for (const auto& [id, c] : s.cognitive.graph.concepts)
    if (c.status == ItemStatus::grounded && rng() % 4 == 0) ids.push_back(id);
  Json deps = Json::array();
  const int m = static_cast<int>(rng() % 4);
  for (int k = 0; k < m && ids.size() >= 2; ++k) {
    const auto& a = ids[rng() % ids.size()];
    const auto& b = ids[rng() % ids.size()];
    if (a == b || (a[0] != 'n' && b[0] != 'n')) continue;
    auto kind = parse_enum<CausalKind>(causal[rng() % 4]);
    Json e{{"id", a + ">" + b}, {"source", a}, {"target", b}, {"relation", relation_for(kind)},
           {"strength", (1 + rng() % 9) / 10.0}};
    deps.push_back(Json{{"edge", e}, {"causal_kind", kind}});
  }
  return Json{{"concepts", concepts}, {"dependencies", deps}};
}

struct Generated {
  SessionArchive archive;
  std::map<int, std::string> promoted_tokens;  // seq of a user promotion -> token of its item
  int refused = 0;
};

// Random event log: user turns (rule-extracted or explicit), assistant turns
// whose content carries a unique token, promotions by user or system, probe
// answers, reviews, edits and task switches.
Generated generate_log(std::mt19937& rng, int index, int steps) {
  Generated out;
  Session s("g" + std::to_string(index), config(), nullptr, [] { return std::string("2026-01-01T00:00:00Z"); });
  s.submit(EventKind::task_start, {{"task_id", "task-1"}});
  int tasks = 1, token = 0;
  auto attempt = [&](EventKind kind, Json payload) {
    try {
      return s.submit(kind, std::move(payload));
    } catch (const Error& e) {
      if (e.code() == "invariant-violation" || e.code() == "nondeterminism-detected") throw;
      if (e.code() == "promotion-gate") ++out.refused;
      return std::vector<EventRecord>{};
    }
  };
  for (int step = 0; step < steps; ++step) {
    const SessionState st = s.state();
    const int roll = static_cast<int>(rng() % 12);
    if (st.pending_review && roll < 6) {
      const auto& pid = st.pending_review->patch.id;
      if (rng() % 3)
        attempt(EventKind::patch_approved, {{"patch", pid}, {"exclude", Json::array()}});
      else
        attempt(EventKind::patch_rejected, {{"patch", pid}});
    } else if (roll < 3) {
      attempt(EventKind::utterance, {{"speaker", "user"}, {"text", kUserLines[rng() % kUserLines.size()]}});
    } else if (roll < 6) {
      Json payload{{"speaker", "user"}, {"text", "user turn"}, {"extraction", random_extraction(rng, st, "user")}};
      attempt(rng() % 4 ? EventKind::utterance : EventKind::text_correction, std::move(payload));
    } else if (roll < 8) {
      const std::string tag = "zq" + std::to_string(++token);
      Json items = Json::array({Json{{"kind", "draft"}, {"text", "I'd like the " + tag + " cabin near the lake"}}});
      Json payload{{"speaker", "assistant"}, {"text", "How about the " + tag + " cabin?"}, {"plan_items", items}};
      if (rng() % 2) payload["extraction"] = random_extraction(rng, st, tag);
      attempt(EventKind::utterance, std::move(payload));
    } else if (roll < 10) {
      std::vector<const PlanItem*> open;
      for (const auto& item : st.plan.drafts)
        if (!item.promoted) open.push_back(&item);
      if (open.empty()) continue;
      const PlanItem* item = open[rng() % open.size()];
      const bool user = rng() % 3 != 0;
      auto appended = attempt(EventKind::promotion, {{"item", item->id}, {"origin", user ? "user" : "system"}});
      if (!appended.empty()) {
        const auto at = item->text.find("zq");
        out.promoted_tokens[appended.front().seq] = item->text.substr(at, item->text.find(' ', at) - at);
      }
    } else if (roll == 10) {
      std::vector<ProbeId> open;
      for (const auto& [pid, p] : st.cognitive.probes)
        if (!p.answered) open.push_back(pid);
      if (open.empty()) continue;
      static const char* verdicts[] = {"confirm", "weaken", "refine", "defer"};
      const std::string verdict = verdicts[rng() % 4];
      Json payload{{"probe", open[rng() % open.size()]}, {"verdict", verdict}};
      if (verdict == "refine") payload["detail"] = kUserLines[rng() % kUserLines.size()];
      attempt(EventKind::probe_answered, std::move(payload));
    } else {
      std::vector<ConceptId> live;
      for (const auto& [id, c] : st.cognitive.graph.concepts)
        if (is_live(c.status)) live.push_back(id);
      if (rng() % 4 == 0 && !st.pending_review) {
        attempt(EventKind::task_end, Json::object());
        attempt(EventKind::task_start, {{"task_id", "task-" + std::to_string(++tasks)}});
        if (!s.state().cognitive.transfer_candidates.empty() && rng() % 2) {
          for (const auto& [tid, t] : s.state().cognitive.transfer_candidates)
            if (t.status == TransferStatus::uncertain) {
              attempt(EventKind::transfer_uptake, {{"candidate", tid}, {"adopt", rng() % 2 == 0}});
              break;
            }
        }
      } else if (!live.empty()) {
        attempt(EventKind::concept_edit,
                {{"kind", "confidence"}, {"target", live[rng() % live.size()]}, {"value", (rng() % 11) / 10.0}});
      }
    }
  }
  out.archive = s.archive();
  return out;
}

// Probe budget and the promotion gate, checked on every replayed prefix.
struct GateStats {
  int logs = 0;
  long states = 0, probes = 0, promoted_concepts = 0, refused = 0, assistant_turns = 0;
  int max_probes_per_turn = 0;
};

void check_probe_budget(const SessionArchive& a, GateStats& stats) {
  std::map<int, int> per_turn;
  for (const auto& e : a.events)
    if (e.kind == EventKind::probe_issued) {
      stats.probes += 1;
      stats.max_probes_per_turn = std::max(stats.max_probes_per_turn, ++per_turn[e.turn]);
    }
  for (const auto& [turn, n] : per_turn) require(n <= 1, a.session_id + ": " + std::to_string(n) + " probes in turn " + std::to_string(turn));
}

void check_gate(const Generated& g, GateStats& stats) {
  const auto& a = g.archive;
  std::set<std::string> confirmed;
  for (const auto& e : a.events) {
    ReplayOptions o;
    o.until = e.seq;
    o.verify_digest = false;
    const SessionState s = replay(a, o);
    ++stats.states;
    if (e.kind == EventKind::promotion && e.payload.value("origin", std::string("user")) == "user")
      if (auto it = g.promoted_tokens.find(e.seq); it != g.promoted_tokens.end()) confirmed.insert(it->second);
    stats.assistant_turns += e.kind == EventKind::utterance && e.payload.value("speaker", "") == "assistant";
    const auto& graph = s.cognitive.graph;
    for (const auto& [id, c] : graph.concepts) {
      require(c.provenance != Provenance::assistant_proposed, a.session_id + ": concept " + id + " is assistant-proposed");
      const auto at = c.label.find("zq");
      if (at == std::string::npos) continue;
      const auto tok = c.label.substr(at, c.label.find(' ', at) - at);
      require(confirmed.count(tok) > 0,
              a.session_id + ": " + id + " carries assistant content without a user promotion");
    }
    for (const auto& [id, e2] : graph.edges)
      require(e2.provenance != Provenance::assistant_proposed, a.session_id + ": edge " + id + " is assistant-proposed");
    for (const auto& [id, m] : s.cognitive.motifs)
      require(m.provenance != Provenance::assistant_proposed, a.session_id + ": motif " + id + " is assistant-proposed");
  }
  for (const auto& [id, c] : replay(a).cognitive.graph.concepts)
    stats.promoted_concepts += c.label.find("zq") != std::string::npos;
}

std::vector<Generated>& generated_logs(std::mt19937& rng, int count) {
  static std::vector<Generated> logs;
  while (static_cast<int>(logs.size()) < count) logs.push_back(generate_log(rng, static_cast<int>(logs.size()), 10));
  return logs;
}

std::mt19937& session_rng() {
  static std::mt19937 rng(1005);
  return rng;
}

Outcome clarification() {
  ClarificationConfig cfg;
  // Hand-computed values through the formula and through scored motifs.
  require(std::abs(impact_value(1, 1, 0, 1, cfg) - 1.0) <= 1e-12, "I(m)=1.0 case");
  require(std::abs(impact_value(0, 0.5, 1, 0, cfg) - 0.125) <= 1e-12, "I(m)=0.125 case");
  {
    CognitiveGraph g;
    for (auto id : {"c0001", "c0002"}) {
      Concept c = make_concept(id, id[4] == '1' ? ConceptKind::preference : ConceptKind::belief);
      c.provenance = Provenance::transfer_based;
      put_concept(g, c);
    }
    put_edge(g, make_edge("e0001", "c0001", "c0002", Relation::enable, 0.0));
    MotifInstance m;
    m.id = "m0001";
    m.pattern = "generic-preference";
    m.bindings = {{"preference", "c0001"}, {"choice", "c0002"}};
    m.edges = {"e0001"};
    m.provenance = Provenance::transfer_based;
    require(std::abs(score_impact(m, g, 1, cfg).value - 1.0) <= 1e-12, "scored 1.0 case");
    g.edges.at("e0001").strength = 1.0;
    for (auto id : {"c0001", "c0002"}) g.concepts.at(id).provenance = Provenance::user_confirmed;
    for (auto id : {"c0003", "c0004", "c0005"}) put_concept(g, make_concept(id));
    put_edge(g, make_edge("e0002", "c0003", "c0004"));
    put_edge(g, make_edge("e0003", "c0003", "c0005"));
    m.provenance = Provenance::user_confirmed;
    require(std::abs(score_impact(m, g, 1, cfg).value - 0.125) <= 1e-12, "scored 0.125 case");
  }
  std::mt19937 rng(1004);
  int scored = 0;
  for (int i = 0; i < 1000; ++i) {
    auto [g, found] = random_scored_graph(rng, config().vocabulary);
    for (const auto& m : found) {
      const double got = score_impact(m, g, 2, config().clarification).value;
      const double want = hand_impact(m, g, 2, config().clarification).value;
      require(std::abs(got - want) <= 1e-12, "score_impact differs from hand computation");
      ++scored;
    }
  }
  // Argmax under common positive scaling of the weights.
  std::uniform_real_distribution<double> unit(0.0, 1.0), scale(0.01, 100.0);
  for (int round = 0; round < 1000; ++round) {
    ClarificationConfig base, scaled;
    const double k = scale(rng);
    scaled.alpha_u *= k;
    scaled.alpha_s *= k;
    scaled.alpha_c *= k;
    scaled.alpha_t *= k;
    base.tau = scaled.tau = -1.0;
    std::vector<ImpactScore> a, b;
    for (int i = 0, n = 1 + static_cast<int>(rng() % 10); i < n; ++i) {
      ImpactScore s;
      s.motif = nid("m", i + 1);
      s.unc = unit(rng);
      s.cent = unit(rng);
      s.cov = unit(rng);
      s.risk = rng() % 2;
      ImpactScore t = s;
      s.value = impact_value(s.unc, s.cent, s.cov, s.risk, base);
      t.value = impact_value(t.unc, t.cent, t.cov, t.risk, scaled);
      a.push_back(s);
      b.push_back(t);
    }
    ProbeBudget x, y;
    require(select_probe(a, base, 1, x)->motif == select_probe(b, scaled, 1, y)->motif, "argmax changed under scaling");
  }
  // At most one probe per turn, on the fixture and on generated sessions.
  GateStats stats;
  auto fixture = walkthrough();
  replay(fixture);
  check_probe_budget(fixture, stats);
  for (const auto& g : generated_logs(session_rng(), 2000)) {
    replay(g.archive);
    check_probe_budget(g.archive, stats);
  }
  require(stats.probes > 0, "no probes were issued; the check is vacuous");
  std::ostringstream d;
  d << "1.0/0.125 exact, " << scored << " motifs within 1e-12, 1000 scaled sets, " << stats.probes
    << " probes over 2001 replayed sessions, max " << stats.max_probes_per_turn << " per turn";
  return {true, d.str()};
}

Outcome promotion_gate() {
  const auto t0 = Clock::now();
  GateStats stats;
  for (auto& g : generated_logs(session_rng(), 10000)) {
    check_gate(g, stats);
    stats.refused += g.refused;
    ++stats.logs;
  }
  require(stats.promoted_concepts > 0, "no promotions happened; the check is vacuous");
  std::ostringstream d;
  d << stats.logs << " logs, " << stats.states << " replayed states, " << stats.assistant_turns
    << " assistant turns, " << stats.promoted_concepts << " promoted concepts, " << stats.refused
    << " non-user promotions refused, 0 violations, " << seconds_since(t0) << " s";
  return {true, d.str()};
}

// ---- replay determinism --------------------------------------------------------

const Concept* live_label(const CognitiveGraph& g, const std::string& label) {
  for (const auto& [id, c] : g.concepts)
    if (c.label == label && is_live(c.status)) return &c;
  return nullptr;
}

Outcome replay_determinism() {
  auto a = walkthrough();
  require(a.final_state_digest == kWalkthroughDigest, "archive footer digest " + a.final_state_digest);
  const std::string first = serialize_state(replay(a));
  const std::string second = serialize_state(replay(walkthrough()));
  require(first == second, "serializations differ between runs");
  require(sha256_hex(first) == kWalkthroughDigest, "digest " + sha256_hex(first));
  const SessionState s = deserialize_state(first);
  const auto& g = s.cognitive.graph;
  const Concept* injury = live_label(g, "back_injury");
  const Concept* hotel = live_label(g, "hotel_accommodation");
  require(injury && hotel, "back_injury or hotel_accommodation missing");
  const DependencyEdge* det = g.find_live_edge(injury->id, hotel->id, Relation::determine);
  require(det != nullptr && det->status == ItemStatus::grounded, "no grounded back_injury -> hotel determine edge");
  bool motif_active = false;
  for (const auto& [id, m] : s.cognitive.motifs)
    motif_active |= m.status == MotifStatus::active && std::count(m.edges.begin(), m.edges.end(), det->id) > 0;
  require(motif_active, "no active motif over the determine edge");
  for (auto label : {"outdoor_activities", "hiking", "picnic"}) {
    const Concept* c = live_label(g, label);
    require(c && c->status == ItemStatus::deprecated, std::string(label) + " is not deprecated");
  }
  require(s.cognitive.transfer_candidates.size() == 1, "expected exactly one transfer candidate");
  const auto& t = s.cognitive.transfer_candidates.begin()->second;
  require(t.source_task == "family-trip" && t.task_id == "team-building" && s.task_id == "team-building",
          "transfer candidate is not in the follow-on task");
  return {true, "digest " + kWalkthroughDigest.substr(0, 16) + "..., two byte-identical runs, final graph checks hold"};
}

// ---- layout stability ----------------------------------------------------------

// New live concepts and endpoints of added or removed backbone edges, with
// everything reachable below them.
std::set<ConceptId> changed_region(const CognitiveGraph& before, const CognitiveGraph& after) {
  std::set<ConceptId> seeds;
  for (const auto& [id, c] : after.concepts)
    if (is_live(c.status) && !(before.concepts.count(id) && is_live(before.concepts.at(id).status))) seeds.insert(id);
  auto edges = [](const CognitiveGraph& g) {
    std::set<std::tuple<EdgeId, ConceptId, ConceptId>> out;
    for (const auto& [id, e] : g.edges)
      if (is_live(e.status) && is_live(g.concepts.at(e.source).status) && is_live(g.concepts.at(e.target).status))
        out.insert({id, e.source, e.target});
    return out;
  };
  auto e0 = edges(before), e1 = edges(after);
  for (const auto& t : e0)
    if (!e1.count(t)) seeds.insert({std::get<1>(t), std::get<2>(t)});
  for (const auto& t : e1)
    if (!e0.count(t)) seeds.insert({std::get<1>(t), std::get<2>(t)});
  std::map<ConceptId, std::vector<ConceptId>> succ;
  for (const auto& t : e1) succ[std::get<1>(t)].push_back(std::get<2>(t));
  std::set<ConceptId> out;
  std::vector<ConceptId> stack;
  for (const auto& id : seeds)
    if (after.concepts.count(id) && is_live(after.concepts.at(id).status)) stack.push_back(id);
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    if (!out.insert(v).second) continue;
    for (const auto& w : succ[v]) stack.push_back(w);
  }
  return out;
}

void check_layout_run(const SessionArchive& a, long& turns) {
  auto states = prefix_states(a);
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& s = states[i];
    if (!s.layout) continue;
    for (const auto& [id, e] : s.cognitive.graph.edges) {
      if (!is_live(e.status)) continue;
      auto ps = s.layout->positions.find(e.source), pt = s.layout->positions.find(e.target);
      if (ps == s.layout->positions.end() || pt == s.layout->positions.end()) continue;
      require(ps->second.layer < pt->second.layer, a.session_id + ": edge " + id + " does not point down");
    }
    if (i > 0 && states[i - 1].layout) {
      auto r = stability_report(*states[i - 1].layout, *s.layout,
                                changed_region(states[i - 1].cognitive.graph, s.cognitive.graph));
      require(r.layer_preserved == 1.0 && r.order_preserved == 1.0,
              a.session_id + ": unstable at seq " + std::to_string(a.events[i].seq));
    }
    ++turns;
  }
}

Outcome layout_stability() {
  long turns = 0;
  check_layout_run(walkthrough(), turns);
  const long fixture_turns = turns;
  int sessions = 1;
  for (const auto& g : generated_logs(session_rng(), 500)) {
    if (sessions > 500) break;
    check_layout_run(g.archive, turns);
    ++sessions;
  }
  return {true, std::to_string(fixture_turns) + " fixture states and " + std::to_string(turns - fixture_turns) +
                    " states from " + std::to_string(sessions - 1) + " generated sessions at (1.0, 1.0)"};
}

// ---- extraction determinism ----------------------------------------------------

Outcome extraction_determinism() {
  const std::string c1 = "I usually prefer affordable options, but I'd pay more for verified reviews";
  const std::string c2 = "I prefer budget hotels";
  for (int run = 0; run < 100; ++run) {
    RuleBasedExtractor rule;
    auto a = extract_candidates(Utterance{1, Speaker::user, c1}, {}, rule);
    require(a.concepts.size() == 2 && a.dependencies.size() == 1, "C1 shape");
    const auto& p = a.concepts[0].node;
    const auto& q = a.concepts[1].node;
    require(p.kind == ConceptKind::preference && q.kind == ConceptKind::preference, "C1 kinds");
    require(p.label == "prefer affordable options" && p.slot == "budget" && p.value == "low", "C1 first concept");
    require(q.label == "pay more for verified reviews" && q.slot == "review_quality", "C1 second concept");
    const auto& d = a.dependencies[0];
    require(d.edge.source == q.id && d.edge.target == p.id && d.causal_kind == CausalKind::confounding &&
                d.edge.relation == Relation::constraint,
            "C1 conditional dependency");
    auto b = extract_candidates(Utterance{1, Speaker::user, c2}, {}, rule);
    require(b.concepts.size() == 1 && b.dependencies.empty(), "C2 shape");
    require(b.concepts[0].node.kind == ConceptKind::preference && b.concepts[0].node.slot == "accommodation_type",
            "C2 concept");
    static const std::string first_a = Json(a).dump(), first_b = Json(b).dump();
    require(Json(a).dump() == first_a && Json(b).dump() == first_b, "output changed between runs");
  }
  return {true, "C1 and C2 identical across 100 runs"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"backbone-safety", backbone_safety},
      {"cycle-repair-oracle", cycle_repair},
      {"motif-matching-oracle", motif_oracle},
      {"clarification-budget-and-formula", clarification},
      {"promotion-gate", promotion_gate},
      {"replay-determinism", replay_determinism},
      {"layout-stability", layout_stability},
      {"extraction-determinism", extraction_determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const Failure& f) {
      o = {false, f.what};
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
