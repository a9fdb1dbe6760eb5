#pragma once

// Builders, random generators and brute-force oracles shared by the unit
// tests and the acceptance runner. Oracles here deliberately avoid the
// library's own algorithms (no Tarjan, no backtracking matcher).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "cog/session.hpp"

namespace cogtest {

using namespace cog;

inline std::string nid(const char* prefix, int n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%04d", prefix, n);
  return buf;
}

inline Concept make_concept(const std::string& id, ConceptKind kind = ConceptKind::belief,
                            ItemStatus status = ItemStatus::grounded, std::optional<std::string> slot = std::nullopt,
                            std::string label = {}) {
  Concept c;
  c.id = id;
  c.kind = kind;
  c.label = label.empty() ? id : label;
  c.slot = std::move(slot);
  c.confidence = 0.8;
  c.status = status;
  return c;
}

inline DependencyEdge make_edge(const std::string& id, const std::string& source, const std::string& target,
                                Relation relation = Relation::enable, double strength = 0.5,
                                ItemStatus status = ItemStatus::grounded, int turn = 0) {
  DependencyEdge e;
  e.id = id;
  e.source = source;
  e.target = target;
  e.relation = relation;
  e.strength = strength;
  e.status = status;
  e.created_turn = turn;
  return e;
}

/// Adds a concept with one evidence record so that grounded status is legal.
inline void put_concept(CognitiveGraph& g, Concept c) {
  if (c.status == ItemStatus::grounded && c.evidence.empty()) {
    EvidenceRecord r{"v-" + c.id, c.id, 0, EvidenceSource::user_statement, 1.0};
    g.evidence[r.id] = r;
    c.evidence.push_back(r.id);
  }
  g.concepts[c.id] = std::move(c);
}

inline void put_edge(CognitiveGraph& g, DependencyEdge e) { g.edges[e.id] = std::move(e); }

// ---- brute-force graph oracles ---------------------------------------------

/// Transitive closure over the live backbone by repeated relaxation.
inline std::map<ConceptId, std::set<ConceptId>> closure(const CognitiveGraph& g) {
  std::map<ConceptId, std::set<ConceptId>> reach;
  for (const auto& [id, c] : g.concepts)
    if (is_live(c.status)) reach[id];
  for (const auto& [id, e] : g.edges) {
    if (!is_live(e.status) || e.source == e.target) continue;
    if (!reach.count(e.source) || !reach.count(e.target)) continue;
    reach[e.source].insert(e.target);
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (auto& [v, out] : reach) {
      std::set<ConceptId> next = out;
      for (const auto& w : out) next.insert(reach[w].begin(), reach[w].end());
      if (next.size() != out.size()) {
        out = std::move(next);
        changed = true;
      }
    }
  }
  return reach;
}

inline bool has_cycle_oracle(const CognitiveGraph& g) {
  for (const auto& [v, out] : closure(g))
    if (out.count(v)) return true;
  return false;
}

/// Components of mutual reachability with at least two members.
inline std::vector<std::vector<ConceptId>> scc_oracle(const CognitiveGraph& g) {
  auto reach = closure(g);
  std::vector<std::vector<ConceptId>> out;
  std::set<ConceptId> seen;
  for (const auto& [v, rv] : reach) {
    if (seen.count(v)) continue;
    std::vector<ConceptId> comp{v};
    for (const auto& [w, rw] : reach)
      if (w != v && rv.count(w) && rw.count(v)) comp.push_back(w);
    for (const auto& w : comp) seen.insert(w);
    if (comp.size() >= 2) {
      std::sort(comp.begin(), comp.end());
      out.push_back(comp);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Round-based removal search: in every round each cyclic component gives up
/// its weakest internal edge (strength, then newest turn, then largest id).
inline std::vector<EdgeId> repair_oracle(CognitiveGraph g) {
  std::vector<EdgeId> removed;
  for (auto comps = scc_oracle(g); !comps.empty(); comps = scc_oracle(g)) {
    for (const auto& comp : comps) {
      std::set<ConceptId> members(comp.begin(), comp.end());
      std::vector<const DependencyEdge*> internal;
      for (const auto& [id, e] : g.edges)
        if (is_live(e.status) && members.count(e.source) && members.count(e.target)) internal.push_back(&e);
      auto key = [](const DependencyEdge* e) { return std::make_tuple(e->strength, -e->created_turn, e->id); };
      const DependencyEdge* weakest = internal.front();
      for (const auto* e : internal) {
        auto a = key(e), b = key(weakest);
        if (std::get<0>(a) < std::get<0>(b) ||
            (std::get<0>(a) == std::get<0>(b) &&
             (std::get<1>(a) < std::get<1>(b) || (std::get<1>(a) == std::get<1>(b) && std::get<2>(a) > std::get<2>(b)))))
          weakest = e;
      }
      removed.push_back(weakest->id);
      g.edges.at(weakest->id).status = ItemStatus::cancelled;
    }
  }
  return removed;
}

/// Random digraph over c0001..c000n; each ordered pair gets an edge with
/// probability p. Strengths are drawn from a small grid so ties happen.
inline CognitiveGraph random_digraph(std::mt19937& rng, int n, double p, bool allow_cycles = true) {
  CognitiveGraph g;
  for (int i = 1; i <= n; ++i) put_concept(g, make_concept(nid("c", i)));
  std::bernoulli_distribution coin(p);
  std::uniform_int_distribution<int> grid(1, 9), turn(0, 3), rel(0, 2);
  int e = 0;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      if (i == j || (!allow_cycles && j < i) || !coin(rng)) continue;
      put_edge(g, make_edge(nid("e", ++e), nid("c", i), nid("c", j), static_cast<Relation>(rel(rng)),
                            grid(rng) / 10.0, ItemStatus::grounded, turn(rng)));
    }
  return g;
}

// ---- brute-force motif oracle ------------------------------------------------

/// Enumerates every injective role assignment, keeps those whose filters and
/// edge templates hold, and dedups per concept set by the smallest binding in
/// role-declaration order.
inline std::vector<MotifInstance> match_oracle(const CognitiveGraph& g, const std::vector<MotifPattern>& vocabulary) {
  std::vector<ConceptId> grounded;
  for (const auto& [id, c] : g.concepts)
    if (c.status == ItemStatus::grounded) grounded.push_back(id);
  auto grounded_edge = [&](const ConceptId& a, const ConceptId& b, Relation r) -> const DependencyEdge* {
    for (const auto& [id, e] : g.edges)
      if (e.status == ItemStatus::grounded && e.source == a && e.target == b && e.relation == r) return &e;
    return nullptr;
  };
  std::vector<const MotifPattern*> sorted;
  for (const auto& p : vocabulary) sorted.push_back(&p);
  std::stable_sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->name < b->name; });

  std::vector<MotifInstance> out;
  for (const MotifPattern* p : sorted) {
    const std::size_t k = p->roles.size();
    std::map<std::vector<ConceptId>, std::pair<std::vector<ConceptId>, MotifInstance>> best;
    std::vector<std::size_t> pick(k, 0);
    if (grounded.size() < k) continue;
    // Odometer over grounded^k.
    while (true) {
      std::vector<ConceptId> assign(k);
      for (std::size_t i = 0; i < k; ++i) assign[i] = grounded[pick[i]];
      std::set<ConceptId> distinct(assign.begin(), assign.end());
      bool ok = distinct.size() == k;
      for (std::size_t i = 0; ok && i < k; ++i) {
        const Concept& c = g.concepts.at(assign[i]);
        if (p->roles[i].kind && c.kind != *p->roles[i].kind) ok = false;
        if (p->roles[i].slot && c.slot != p->roles[i].slot) ok = false;
      }
      MotifInstance inst;
      if (ok) {
        std::map<std::string, ConceptId> bind;
        for (std::size_t i = 0; i < k; ++i) bind[p->roles[i].role] = assign[i];
        for (const auto& t : p->edges) {
          const DependencyEdge* e = grounded_edge(bind.at(t.from), bind.at(t.to), t.relation);
          if (e == nullptr) {
            ok = false;
            break;
          }
          inst.edges.push_back(e->id);
        }
        inst.bindings = bind;
      }
      if (ok) {
        inst.pattern = p->name;
        std::vector<ConceptId> key(distinct.begin(), distinct.end());
        auto it = best.find(key);
        if (it == best.end() || assign < it->second.first) best[key] = {assign, inst};
      }
      std::size_t pos = 0;
      while (pos < k && ++pick[pos] == grounded.size()) pick[pos++] = 0;
      if (pos == k) break;
    }
    for (auto& [key, entry] : best) out.push_back(entry.second);
  }
  return out;
}

/// Random typed graph for matching: up to `n` concepts with random kinds and
/// slots (mostly grounded), random relations, some candidate items mixed in.
inline CognitiveGraph random_motif_graph(std::mt19937& rng, int n, double p) {
  static const char* slots[] = {"budget", "accommodation_type", "weather", "activity_type", "review_quality"};
  CognitiveGraph g;
  for (int i = 1; i <= n; ++i) {
    Concept c = make_concept(nid("c", i), static_cast<ConceptKind>(rng() % 4),
                             rng() % 6 == 0 ? ItemStatus::candidate : ItemStatus::grounded);
    if (rng() % 3 != 0) c.slot = slots[rng() % 5];
    put_concept(g, c);
  }
  std::bernoulli_distribution coin(p);
  int e = 0;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      if (i == j || !coin(rng)) continue;
      put_edge(g, make_edge(nid("e", ++e), nid("c", i), nid("c", j), static_cast<Relation>(rng() % 3), 0.5,
                            rng() % 8 == 0 ? ItemStatus::candidate : ItemStatus::grounded));
    }
  return g;
}

/// Compares matcher output with the oracle on pattern, bindings and edges.
inline bool same_matches(const std::vector<MotifInstance>& a, const std::vector<MotifInstance>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].pattern != b[i].pattern || a[i].bindings != b[i].bindings || a[i].edges != b[i].edges) return false;
  return true;
}

// ---- impact oracle -----------------------------------------------------------

/// Impact of a motif computed directly from its definition: mean edge
/// uncertainty, mean normalized degree, share of user-backed concepts and the
/// unsupported-transfer flag.
inline ImpactScore hand_impact(const MotifInstance& m, const CognitiveGraph& g, int task_start,
                               const ClarificationConfig& a) {
  ImpactScore s;
  s.motif = m.id;
  std::map<ConceptId, int> degree;
  for (const auto& [id, c] : g.concepts)
    if (c.status != ItemStatus::cancelled) degree[id] = 0;
  for (const auto& [id, e] : g.edges)
    if (e.status != ItemStatus::cancelled && e.source != e.target && degree.count(e.source) && degree.count(e.target)) {
      degree[e.source] += 1;
      degree[e.target] += 1;
    }
  int dmax = 0;
  for (const auto& [id, d] : degree) dmax = std::max(dmax, d);
  double strength = 0;
  for (const auto& e : m.edges) strength += g.edges.at(e).strength;
  s.unc = 1.0 - strength / static_cast<double>(m.edges.size());
  std::set<ConceptId> ids;
  for (const auto& [role, id] : m.bindings) ids.insert(id);
  double cent = 0;
  int covered = 0;
  for (const auto& id : ids) {
    if (dmax > 0) cent += static_cast<double>(degree[id]) / dmax;
    auto p = g.concepts.at(id).provenance;
    covered += p == Provenance::user_confirmed || p == Provenance::co_authored;
  }
  s.cent = cent / static_cast<double>(ids.size());
  s.cov = static_cast<double>(covered) / static_cast<double>(ids.size());
  if (m.provenance == Provenance::transfer_based) {
    s.risk = 1.0;
    for (const auto& [vid, r] : g.evidence)
      if (r.turn >= task_start && (ids.count(r.target) || std::count(m.edges.begin(), m.edges.end(), r.target)))
        s.risk = 0.0;
  }
  s.value = a.alpha_u * s.unc + a.alpha_s * s.cent + a.alpha_c * (1.0 - s.cov) + a.alpha_t * s.risk;
  return s;
}

/// A random graph with one motif per matched instance, provenance and
/// evidence turns randomized so every impact component varies.
inline std::pair<CognitiveGraph, std::vector<MotifInstance>> random_scored_graph(std::mt19937& rng,
                                                                                 const Vocabulary& vocabulary) {
  CognitiveGraph g = random_motif_graph(rng, 3 + static_cast<int>(rng() % 7), 0.3);
  std::uniform_int_distribution<int> tenth(0, 10);
  for (auto& [id, e] : g.edges) e.strength = tenth(rng) / 10.0;
  for (auto& [id, c] : g.concepts) c.provenance = static_cast<Provenance>(rng() % 4);
  for (auto& [id, r] : g.evidence) r.turn = static_cast<int>(rng() % 4);
  auto found = match_motifs(g, vocabulary);
  int n = 0;
  for (auto& m : found) {
    m.id = nid("m", ++n);
    if (rng() % 3 == 0) m.provenance = Provenance::transfer_based;
  }
  return {std::move(g), std::move(found)};
}

// ---- random sessions ---------------------------------------------------------

inline RuntimeConfig bundled_config() { return default_runtime_config(COG_DATA_DIR); }

/// Lowest free "<prefix>NNNN" id, skipping both existing and reserved ones.
template <typename Map>
std::string fresh_id(const Map& taken, std::set<std::string>& reserved, const char* prefix) {
  for (int n = 1;; ++n) {
    std::string id = nid(prefix, n);
    if (!taken.count(id) && reserved.insert(id).second) return id;
  }
}

/// A random patch against the current state: new concepts with evidence,
/// edges between live concepts (cycles allowed; the pipeline repairs them),
/// strength changes, deprecations, cancellations, merges and conflicts.
inline GraphPatch random_patch(std::mt19937& rng, const SessionState& s, int max_concepts = 30) {
  const auto& g = s.cognitive.graph;
  GraphPatch patch;
  patch.id = nid("pt", s.patch_counter + 1);
  patch.turn = s.turn;
  patch.origin = PatchOrigin::user_edit;
  std::vector<ConceptId> live;
  for (const auto& [id, c] : g.concepts)
    if (is_live(c.status)) live.push_back(id);
  std::vector<EdgeId> live_edges;
  for (const auto& [id, e] : g.edges)
    if (is_live(e.status)) live_edges.push_back(id);
  std::set<std::tuple<ConceptId, ConceptId, Relation>> triples;
  for (const auto& [id, e] : g.edges)
    if (is_live(e.status)) triples.insert({e.source, e.target, e.relation});

  std::set<std::string> reserved, touched;
  auto tenth = [&] { return std::uniform_int_distribution<int>(0, 10)(rng) / 10.0; };
  auto pick = [&](const std::vector<std::string>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  static const char* slots[] = {"budget", "accommodation_type", "weather", "activity_type"};
  static const char* values[] = {"low", "hotel", "rain", "museum", "camping"};
  int concepts = static_cast<int>(g.concepts.size());

  const int n_ops = std::uniform_int_distribution<int>(1, 4)(rng);
  for (int k = 0; k < n_ops; ++k) {
    const int roll = std::uniform_int_distribution<int>(0, 9)(rng);
    if ((roll <= 2 || live.size() < 2) && concepts < max_concepts) {
      Concept c = make_concept(fresh_id(g.concepts, reserved, "c"), static_cast<ConceptKind>(rng() % 4),
                               ItemStatus::candidate);
      c.confidence = tenth();
      c.created_turn = s.turn;
      if (rng() % 2) {
        c.slot = slots[rng() % 4];
        c.value = values[rng() % 5];
      }
      patch.ops.push_back(AddConcept{c});
      patch.ops.push_back(
          AddEvidence{{fresh_id(g.evidence, reserved, "v"), c.id, s.turn, EvidenceSource::user_statement, tenth()}});
      live.push_back(c.id);
      touched.insert(c.id);
      ++concepts;
    } else if (roll <= 5 && live.size() >= 2) {
      ConceptId a = pick(live), b = pick(live);
      Relation r = static_cast<Relation>(rng() % 3);
      if (a == b || triples.count({a, b, r})) continue;
      triples.insert({a, b, r});
      DependencyEdge e = make_edge(fresh_id(g.edges, reserved, "e"), a, b, r, tenth(), ItemStatus::candidate, s.turn);
      patch.ops.push_back(AddEdge{e});
      if (rng() % 2)
        patch.ops.push_back(
            AddEvidence{{fresh_id(g.evidence, reserved, "v"), e.id, s.turn, EvidenceSource::user_statement, 0.5}});
    } else if (roll == 6 && !live_edges.empty()) {
      EdgeId e = pick(live_edges);
      if (touched.insert(e).second) patch.ops.push_back(SetStrength{e, tenth()});
    } else if (roll == 7 && !live.empty()) {
      ConceptId c = pick(live);
      if (!touched.insert(c).second) continue;
      patch.ops.push_back(SetStatus{c, rng() % 3 == 0 ? ItemStatus::cancelled : ItemStatus::deprecated});
    } else if (roll == 8 && live.size() >= 3) {
      ConceptId a = pick(live), b = pick(live);
      if (a == b || touched.count(a) || touched.count(b)) continue;
      touched.insert(a);
      touched.insert(b);
      patch.ops.push_back(MergeConcepts{a, b});
    } else if (roll == 9 && live.size() >= 2) {
      ConceptId a = pick(live), b = pick(live);
      if (a == b) continue;
      patch.ops.push_back(AddConflict{{fresh_id(g.conflicts, reserved, "x"), a, b, "random tension", ConflictStatus::open}});
    }
  }
  return patch;
}

/// Drives `steps` random patches through the full commit pipeline. Patches
/// the applier rejects are skipped; `after_commit` sees every committed state.
inline void random_session(std::mt19937& rng, const RuntimeConfig& config, int steps, int max_concepts,
                           const std::function<void(const SessionState&)>& after_commit) {
  SessionState s;
  start_task(s, "random");
  for (int i = 0; i < steps; ++i) {
    ++s.turn;
    GraphPatch p = random_patch(rng, s, max_concepts);
    try {
      commit_patch(s, p, config, std::string("review"));
    } catch (const Error& e) {
      if (e.code() == "invariant-violation") throw;
      continue;
    }
    after_commit(s);
  }
}

}  // namespace cogtest
