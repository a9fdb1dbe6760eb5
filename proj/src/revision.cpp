#include "cog/revision.hpp"

#include <algorithm>
#include <array>
#include <cstdio>

#include "cog/serialization.hpp"

namespace cog {

// ---- plan state -------------------------------------------------------------

std::vector<PlanItem>& TaskPlanState::list(PlanItemKind kind) {
  switch (kind) {
    case PlanItemKind::draft: return drafts;
    case PlanItemKind::comparison: return comparisons;
    case PlanItemKind::note: return notes;
    case PlanItemKind::open_question: return open_questions;
  }
  return drafts;
}

const std::vector<PlanItem>& TaskPlanState::list(PlanItemKind kind) const {
  return const_cast<TaskPlanState*>(this)->list(kind);
}

PlanItem* TaskPlanState::find(const PlanItemId& id) {
  for (auto* items : {&drafts, &comparisons, &notes, &open_questions})
    for (auto& item : *items)
      if (item.id == id) return &item;
  return nullptr;
}

const PlanItem* TaskPlanState::find(const PlanItemId& id) const {
  return const_cast<TaskPlanState*>(this)->find(id);
}

std::size_t TaskPlanState::size() const {
  return drafts.size() + comparisons.size() + notes.size() + open_questions.size();
}

namespace {

constexpr std::array<std::string_view, 8> kEntityKind{"concept", "edge",      "conflict", "evidence",
                                                      "motif",   "plan_item", "probe",    "transfer"};

}  // namespace

std::string_view to_string(EntityKind v) { return kEntityKind.at(static_cast<std::size_t>(v)); }

template <>
EntityKind parse_enum<EntityKind>(std::string_view text) {
  for (std::size_t i = 0; i < kEntityKind.size(); ++i)
    if (kEntityKind[i] == text) return static_cast<EntityKind>(i);
  throw Error("parse-failure", "unknown entity kind '" + std::string(text) + "'");
}

// ---- ops --------------------------------------------------------------------

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::string_view op_name(const PatchOp& op) {
  static constexpr std::array<std::string_view, 17> names{
      "add_concept",    "add_edge",      "add_conflict",   "add_evidence",     "set_confidence", "set_strength",
      "set_status",     "set_label",     "merge_concepts", "bind_motif",       "set_motif_status",
      "add_plan_item",  "retag_plan_item", "answer_probe", "set_transfer_status", "set_provenance",  "restore"};
  return names.at(op.index());
}

std::vector<std::string> referenced_ids(const PatchOp& op) {
  return std::visit(
      Overloaded{
          [](const AddConcept& o) { return std::vector<std::string>{o.node.id}; },
          [](const AddEdge& o) { return std::vector<std::string>{o.edge.id, o.edge.source, o.edge.target}; },
          [](const AddConflict& o) { return std::vector<std::string>{o.conflict.id, o.conflict.a, o.conflict.b}; },
          [](const AddEvidence& o) { return std::vector<std::string>{o.record.id, o.record.target}; },
          [](const SetConfidence& o) { return std::vector<std::string>{o.target}; },
          [](const SetStrength& o) { return std::vector<std::string>{o.target}; },
          [](const SetStatus& o) { return std::vector<std::string>{o.target}; },
          [](const SetLabel& o) { return std::vector<std::string>{o.target}; },
          [](const MergeConcepts& o) { return std::vector<std::string>{o.keep, o.drop}; },
          [](const BindMotif& o) {
            std::vector<std::string> ids{o.instance.id};
            for (const auto& c : o.instance.concept_ids()) ids.push_back(c);
            for (const auto& e : o.instance.edges) ids.push_back(e);
            return ids;
          },
          [](const SetMotifStatus& o) { return std::vector<std::string>{o.target}; },
          [](const AddPlanItem& o) { return std::vector<std::string>{o.item.id}; },
          [](const RetagPlanItem& o) { return std::vector<std::string>{o.target}; },
          [](const AnswerProbe& o) { return std::vector<std::string>{o.target}; },
          [](const SetTransferStatus& o) { return std::vector<std::string>{o.target}; },
          [](const SetProvenance& o) { return std::vector<std::string>{o.target}; },
          [](const Restore& o) { return std::vector<std::string>{o.id}; },
      },
      op);
}

namespace {

bool in_range(double v) { return v >= 0.0 && v <= 1.0; }

struct Applier {
  SessionState& s;
  const GroundingConfig& grounding;
  int turn;
  std::vector<PatchOp> inverse;
  std::set<std::pair<EntityKind, std::string>> saved;

  CognitiveGraph& g() { return s.cognitive.graph; }

  EntityImage image(EntityKind kind, const std::string& id) {
    auto look = [&](const auto& map) -> EntityImage {
      auto it = map.find(id);
      if (it == map.end()) return std::monostate{};
      return it->second;
    };
    switch (kind) {
      case EntityKind::node: return look(g().concepts);
      case EntityKind::edge: return look(g().edges);
      case EntityKind::conflict: return look(g().conflicts);
      case EntityKind::evidence: return look(g().evidence);
      case EntityKind::motif: return look(s.cognitive.motifs);
      case EntityKind::probe: return look(s.cognitive.probes);
      case EntityKind::transfer: return look(s.cognitive.transfer_candidates);
      case EntityKind::plan_item: {
        const PlanItem* item = s.plan.find(id);
        if (item == nullptr) return std::monostate{};
        return *item;
      }
    }
    return std::monostate{};
  }

  void save(EntityKind kind, const std::string& id) {
    if (!saved.insert({kind, id}).second) return;
    inverse.push_back(Restore{kind, id, image(kind, id)});
  }

  template <typename T, typename Map>
  void put(Map& map, const std::string& id, const EntityImage& before) {
    if (std::holds_alternative<std::monostate>(before)) {
      map.erase(id);
      return;
    }
    const T* value = std::get_if<T>(&before);
    if (value == nullptr) throw Error("bad-value", "restore image does not match entity kind");
    map[id] = *value;
  }

  void restore(const Restore& r) {
    switch (r.entity) {
      case EntityKind::node: put<Concept>(g().concepts, r.id, r.before); break;
      case EntityKind::edge: put<DependencyEdge>(g().edges, r.id, r.before); break;
      case EntityKind::conflict: put<ConflictEdge>(g().conflicts, r.id, r.before); break;
      case EntityKind::evidence: put<EvidenceRecord>(g().evidence, r.id, r.before); break;
      case EntityKind::motif: put<MotifInstance>(s.cognitive.motifs, r.id, r.before); break;
      case EntityKind::probe: put<Probe>(s.cognitive.probes, r.id, r.before); break;
      case EntityKind::transfer: put<TransferCandidate>(s.cognitive.transfer_candidates, r.id, r.before); break;
      case EntityKind::plan_item: {
        PlanItem* existing = s.plan.find(r.id);
        if (std::holds_alternative<std::monostate>(r.before)) {
          if (existing != nullptr) {
            auto& items = s.plan.list(existing->kind);
            items.erase(std::remove_if(items.begin(), items.end(),
                                       [&](const PlanItem& p) { return p.id == r.id; }),
                        items.end());
          }
          break;
        }
        const PlanItem* value = std::get_if<PlanItem>(&r.before);
        if (value == nullptr) throw Error("bad-value", "restore image does not match entity kind");
        if (existing != nullptr && existing->kind == value->kind) {
          *existing = *value;
        } else {
          if (existing != nullptr) restore(Restore{EntityKind::plan_item, r.id, std::monostate{}});
          s.plan.list(value->kind).push_back(*value);
        }
        break;
      }
    }
  }

  Concept& live_concept(const ConceptId& id) {
    Concept* c = g().find_concept(id);
    if (c == nullptr || !is_live(c->status)) throw Error("unknown-target", id);
    return *c;
  }

  DependencyEdge& live_edge(const EdgeId& id) {
    DependencyEdge* e = g().find_edge(id);
    if (e == nullptr || !is_live(e->status)) throw Error("unknown-target", id);
    return *e;
  }

  void operator()(const AddConcept& o) {
    const Concept& c = o.node;
    if (c.id.empty() || g().concepts.count(c.id)) throw Error("duplicate-id", c.id);
    if (!in_range(c.confidence)) throw Error("bad-value", c.id + " confidence");
    save(EntityKind::node, c.id);
    g().concepts.emplace(c.id, c);
  }

  void operator()(const AddEdge& o) {
    const DependencyEdge& e = o.edge;
    if (e.id.empty() || g().edges.count(e.id)) throw Error("duplicate-id", e.id);
    live_concept(e.source);
    live_concept(e.target);
    if (e.source == e.target) throw Error("self-loop", e.id);
    if (!in_range(e.strength)) throw Error("bad-value", e.id + " strength");
    if (is_live(e.status) && g().find_live_edge(e.source, e.target, e.relation) != nullptr)
      throw Error("duplicate-edge", e.id);
    save(EntityKind::edge, e.id);
    g().edges.emplace(e.id, e);
  }

  void operator()(const AddConflict& o) {
    const ConflictEdge& x = o.conflict;
    if (x.id.empty() || g().conflicts.count(x.id)) throw Error("duplicate-id", x.id);
    if (!g().concepts.count(x.a) || !g().concepts.count(x.b)) throw Error("unknown-target", x.id);
    save(EntityKind::conflict, x.id);
    g().conflicts.emplace(x.id, x);
  }

  void operator()(const AddEvidence& o) {
    const EvidenceRecord& r = o.record;
    if (r.id.empty() || g().evidence.count(r.id)) throw Error("duplicate-id", r.id);
    if (Concept* c = g().find_concept(r.target); c != nullptr && is_live(c->status)) {
      double fused = fuse_evidence(c->confidence, r, grounding);
      save(EntityKind::evidence, r.id);
      save(EntityKind::node, c->id);
      c->confidence = fused;
      c->evidence.insert(std::upper_bound(c->evidence.begin(), c->evidence.end(), r.id), r.id);
    } else if (DependencyEdge* e = g().find_edge(r.target); e != nullptr && is_live(e->status)) {
      double fused = fuse_evidence(e->strength, r, grounding);
      save(EntityKind::evidence, r.id);
      save(EntityKind::edge, e->id);
      e->strength = fused;
    } else {
      throw Error("unknown-target", r.target);
    }
    g().evidence.emplace(r.id, r);
  }

  void operator()(const SetConfidence& o) {
    Concept& c = live_concept(o.target);
    if (!in_range(o.value)) throw Error("bad-value", o.target);
    save(EntityKind::node, c.id);
    c.confidence = o.value;
  }

  void operator()(const SetStrength& o) {
    DependencyEdge& e = live_edge(o.target);
    if (!in_range(o.value)) throw Error("bad-value", o.target);
    save(EntityKind::edge, e.id);
    e.strength = o.value;
  }

  void operator()(const SetStatus& o) {
    if (Concept* c = g().find_concept(o.target)) {
      if (c->status == ItemStatus::cancelled && o.status != ItemStatus::cancelled)
        throw Error("invalid-transition", o.target + " is cancelled");
      if (o.status == ItemStatus::grounded && c->evidence.empty())
        throw Error("invalid-transition", o.target + " has no evidence");
      save(EntityKind::node, c->id);
      c->status = o.status;
      return;
    }
    if (DependencyEdge* e = g().find_edge(o.target)) {
      if (e->status == ItemStatus::cancelled && o.status != ItemStatus::cancelled)
        throw Error("invalid-transition", o.target + " is cancelled");
      if (is_live(o.status) && !is_live(e->status) &&
          g().find_live_edge(e->source, e->target, e->relation) != nullptr)
        throw Error("duplicate-edge", o.target);
      save(EntityKind::edge, e->id);
      e->status = o.status;
      return;
    }
    throw Error("unknown-target", o.target);
  }

  void operator()(const SetLabel& o) {
    Concept& c = live_concept(o.target);
    save(EntityKind::node, c.id);
    c.label = o.label;
    if (o.slot) c.slot = o.slot->empty() ? std::nullopt : o.slot;
    if (o.value) c.value = o.value->empty() ? std::nullopt : o.value;
  }

  void operator()(const MergeConcepts& o) {
    live_concept(o.keep);
    Concept& drop = live_concept(o.drop);
    if (o.keep == o.drop) throw Error("bad-value", "merge of a concept into itself");
    save(EntityKind::node, o.keep);
    save(EntityKind::node, o.drop);
    for (const auto& ev : drop.evidence) save(EntityKind::evidence, ev);
    for (const auto& [id, e] : g().edges)
      if (e.source == o.keep || e.target == o.keep || e.source == o.drop || e.target == o.drop)
        save(EntityKind::edge, id);
    for (const auto& [id, x] : g().conflicts)
      if (x.a == o.drop || x.b == o.drop) save(EntityKind::conflict, id);
    merge_concepts(g(), o.keep, o.drop);
  }

  void operator()(const BindMotif& o) {
    const MotifInstance& m = o.instance;
    if (m.id.empty() || s.cognitive.motifs.count(m.id)) throw Error("duplicate-id", m.id);
    if (m.concept_ids().size() < 2 || m.edges.empty()) throw Error("bad-value", m.id + " binds too little");
    for (const auto& c : m.concept_ids()) live_concept(c);
    for (const auto& e : m.edges) live_edge(e);
    save(EntityKind::motif, m.id);
    s.cognitive.motifs.emplace(m.id, m);
  }

  void operator()(const SetMotifStatus& o) {
    auto it = s.cognitive.motifs.find(o.target);
    if (it == s.cognitive.motifs.end()) throw Error("unknown-target", o.target);
    MotifInstance next = update_motif_status(it->second, o.event, o.origin, turn);
    save(EntityKind::motif, o.target);
    it->second = std::move(next);
  }

  void operator()(const AddPlanItem& o) {
    if (o.item.id.empty() || s.plan.find(o.item.id) != nullptr) throw Error("duplicate-id", o.item.id);
    save(EntityKind::plan_item, o.item.id);
    s.plan.list(o.item.kind).push_back(o.item);
  }

  void operator()(const RetagPlanItem& o) {
    PlanItem* item = s.plan.find(o.target);
    if (item == nullptr) throw Error("unknown-target", o.target);
    save(EntityKind::plan_item, o.target);
    item->provenance = o.provenance;
    item->promoted = o.promoted;
  }

  void operator()(const AnswerProbe& o) {
    auto it = s.cognitive.probes.find(o.target);
    if (it == s.cognitive.probes.end()) throw Error("unknown-probe", o.target);
    if (it->second.answered) throw Error("duplicate-answer", o.target);
    if (o.verdict == Verdict::refine && (!o.detail || o.detail->empty()))
      throw Error("missing-detail", "refine must carry detail");
    save(EntityKind::probe, o.target);
    it->second.answered = true;
    it->second.verdict = o.verdict;
    it->second.detail = o.detail;
  }

  void operator()(const SetTransferStatus& o) {
    auto it = s.cognitive.transfer_candidates.find(o.target);
    if (it == s.cognitive.transfer_candidates.end()) throw Error("unknown-target", o.target);
    if (it->second.status != TransferStatus::uncertain || o.status == TransferStatus::uncertain)
      throw Error("invalid-transition", o.target);
    save(EntityKind::transfer, o.target);
    it->second.status = o.status;
  }

  void operator()(const SetProvenance& o) {
    if (Concept* c = g().find_concept(o.target); c != nullptr && is_live(c->status)) {
      save(EntityKind::node, c->id);
      c->provenance = o.provenance;
      return;
    }
    if (DependencyEdge* e = g().find_edge(o.target); e != nullptr && is_live(e->status)) {
      save(EntityKind::edge, e->id);
      e->provenance = o.provenance;
      return;
    }
    throw Error("unknown-target", o.target);
  }

  void operator()(const Restore& o) {
    save(o.entity, o.id);
    restore(o);
  }
};

class IdPool {
 public:
  template <typename Map>
  IdPool(const Map& map, std::string prefix) : prefix_(std::move(prefix)), next_(map.size() + 1) {
    for (const auto& [id, v] : map) taken_.insert(id);
  }
  IdPool(std::set<std::string> taken, std::size_t count, std::string prefix)
      : taken_(std::move(taken)), prefix_(std::move(prefix)), next_(count + 1) {}

  std::string next() {
    for (;; ++next_) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%04zu", next_);
      std::string id = prefix_ + buf;
      if (taken_.insert(id).second) {
        ++next_;
        return id;
      }
    }
  }

 private:
  std::set<std::string> taken_;
  std::string prefix_;
  std::size_t next_;
};

IdPool plan_item_pool(const TaskPlanState& plan) {
  std::set<std::string> taken;
  for (auto kind : {PlanItemKind::draft, PlanItemKind::comparison, PlanItemKind::note, PlanItemKind::open_question})
    for (const auto& item : plan.list(kind)) taken.insert(item.id);
  return IdPool(taken, taken.size(), "d");
}

std::string patch_id(int n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "pt%04d", n);
  return buf;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

GraphPatch apply_patch(SessionState& state, const GraphPatch& patch, const GroundingConfig& grounding) {
  SessionState work = state;
  Applier applier{work, grounding, patch.turn, {}, {}};
  for (const auto& op : patch.ops) std::visit(applier, op);
  state = std::move(work);
  GraphPatch inverse;
  inverse.id = patch.id;
  inverse.ops = std::move(applier.inverse);
  std::reverse(inverse.ops.begin(), inverse.ops.end());
  inverse.origin = PatchOrigin::system_consistency;
  inverse.turn = patch.turn;
  return inverse;
}

// ---- compilation ------------------------------------------------------------

namespace {

struct Compiler {
  const SessionState& state;
  const RuntimeConfig& config;
  int turn;
  IdPool concepts, edges, conflicts, evidence;
  std::vector<PatchOp> ops;
  std::set<std::tuple<ConceptId, ConceptId, Relation>> new_triples;

  Compiler(const SessionState& s, const RuntimeConfig& c)
      : state(s), config(c), turn(s.turn),
        concepts(s.cognitive.graph.concepts, "c"), edges(s.cognitive.graph.edges, "e"),
        conflicts(s.cognitive.graph.conflicts, "x"), evidence(s.cognitive.graph.evidence, "v") {}

  const CognitiveGraph& g() const { return state.cognitive.graph; }

  const Concept* existing_match(const Concept& c) const {
    if (const Concept* byid = g().find_concept(c.id); byid != nullptr && is_live(byid->status)) return byid;
    for (const auto& [id, other] : g().concepts)
      if (is_live(other.status) && other.status != ItemStatus::deprecated && lower(other.label) == lower(c.label))
        return &other;
    return nullptr;
  }

  void evidence_on(const std::string& target, EvidenceSource source, double weight) {
    EvidenceRecord r;
    r.id = evidence.next();
    r.target = target;
    r.turn = turn;
    r.source = source;
    r.weight = weight;
    ops.push_back(AddEvidence{r});
  }

  // User-side candidates become concepts and edges; `source`/`weight` label
  // the evidence each new or reinforced concept receives.
  void user_extraction(const ExtractionResult& result, EvidenceSource source, double weight) {
    std::map<ConceptId, ConceptId> local;
    for (const auto& cand : result.concepts) {
      if (const Concept* hit = existing_match(cand.node)) {
        local[cand.node.id] = hit->id;
        evidence_on(hit->id, source, weight);
        continue;
      }
      Concept c = cand.node;
      c.id = concepts.next();
      c.status = ItemStatus::candidate;
      c.created_turn = turn;
      c.evidence.clear();
      c.confidence = std::clamp(c.confidence, 0.0, 1.0);
      if (c.provenance != Provenance::transfer_based) c.provenance = Provenance::user_confirmed;
      local[cand.node.id] = c.id;
      ops.push_back(AddConcept{c});
      evidence_on(c.id, source, weight);
    }
    auto resolve = [&](const ConceptId& id) -> std::optional<ConceptId> {
      if (auto it = local.find(id); it != local.end()) return it->second;
      if (const Concept* c = g().find_concept(id); c != nullptr && is_live(c->status)) return id;
      return std::nullopt;
    };
    for (const auto& dep : result.dependencies) {
      auto src = resolve(dep.edge.source), dst = resolve(dep.edge.target);
      if (!src || !dst || *src == *dst) continue;
      const Relation rel = dep.edge.relation;
      if (const DependencyEdge* live = g().find_live_edge(*src, *dst, rel)) {
        if (dep.edge.strength > live->strength) ops.push_back(SetStrength{live->id, dep.edge.strength});
        continue;
      }
      if (!new_triples.insert({*src, *dst, rel}).second) continue;
      DependencyEdge e = dep.edge;
      e.id = edges.next();
      e.source = *src;
      e.target = *dst;
      e.status = ItemStatus::candidate;
      e.strength = std::clamp(e.strength, 0.0, 1.0);
      e.provenance = Provenance::user_confirmed;
      e.created_turn = turn;
      ops.push_back(AddEdge{e});
    }
    for (const auto& hint : result.conflicts) {
      auto a = resolve(hint.a), b = resolve(hint.b);
      if (!a || !b || *a == *b) continue;
      bool open = false;
      for (const auto& [id, x] : g().conflicts)
        if (x.status == ConflictStatus::open && ((x.a == *a && x.b == *b) || (x.a == *b && x.b == *a))) open = true;
      if (open) continue;
      ConflictEdge x;
      x.id = conflicts.next();
      x.a = *a;
      x.b = *b;
      x.description = hint.description;
      ops.push_back(AddConflict{x});
    }
    for (const auto& id : result.deprecations) {
      auto target = resolve(id);
      if (!target) continue;
      const Concept* c = g().find_concept(*target);
      if (c != nullptr && (c->status == ItemStatus::candidate || c->status == ItemStatus::grounded))
        ops.push_back(SetStatus{*target, ItemStatus::deprecated});
    }
  }

  // Assistant content: plan items, plus downweighted evidence on concepts the
  // user already holds.
  void assistant_turn(const Utterance& u, const std::optional<ExtractionResult>& result,
                      const std::vector<PlanItem>& items) {
    std::vector<ConceptId> cites;
    if (result)
      for (const auto& cand : result->concepts)
        if (const Concept* hit = existing_match(cand.node)) {
          evidence_on(hit->id, EvidenceSource::assistant_statement, config.grounding.extraction_evidence_weight);
          cites.push_back(hit->id);
        }
    std::sort(cites.begin(), cites.end());
    cites.erase(std::unique(cites.begin(), cites.end()), cites.end());
    IdPool pool = plan_item_pool(state.plan);
    std::vector<PlanItem> drafted = items;
    if (drafted.empty() && !u.text.empty()) {
      PlanItem item;
      item.kind = PlanItemKind::draft;
      item.text = u.text;
      item.cites = cites;
      drafted.push_back(item);
    }
    for (auto item : drafted) {
      if (item.id.empty()) item.id = pool.next();
      item.provenance = Provenance::assistant_proposed;
      item.promoted = false;
      item.turn = turn;
      ops.push_back(AddPlanItem{item});
    }
  }

  void response(const ProbeResponse& r) {
    auto it = state.cognitive.probes.find(r.probe);
    if (it == state.cognitive.probes.end()) throw Error("unknown-probe", r.probe);
    if (it->second.answered) throw Error("duplicate-answer", r.probe);
    if (r.verdict == Verdict::refine && (!r.detail || r.detail->empty()))
      throw Error("missing-detail", "refine must carry detail");
    ops.push_back(AnswerProbe{r.probe, r.verdict, r.detail});
    auto m = state.cognitive.motifs.find(it->second.motif);
    if (m == state.cognitive.motifs.end()) return;
    const MotifInstance& motif = m->second;
    if (r.verdict == Verdict::confirm) {
      for (const auto& c : motif.concept_ids()) {
        evidence_on(c, EvidenceSource::clarification_answer, 1.0);
        const Concept* bound = g().find_concept(c);
        if (bound != nullptr && bound->provenance == Provenance::transfer_based)
          ops.push_back(SetProvenance{c, Provenance::co_authored});
      }
      for (const auto& e : motif.edges) {
        evidence_on(e, EvidenceSource::clarification_answer, 1.0);
        const DependencyEdge* bound = g().find_edge(e);
        if (bound != nullptr && bound->provenance == Provenance::transfer_based)
          ops.push_back(SetProvenance{e, Provenance::co_authored});
      }
      ops.push_back(SetMotifStatus{motif.id, MotifEvent::confirm, EventOrigin::user});
    } else if (r.verdict == Verdict::weaken) {
      for (const auto& eid : motif.edges)
        if (const DependencyEdge* e = g().find_edge(eid); e != nullptr && is_live(e->status))
          ops.push_back(SetStrength{eid, e->strength * config.clarification.weaken_factor});
      ops.push_back(SetMotifStatus{motif.id, MotifEvent::weaken, EventOrigin::user});
    }
  }
};

}  // namespace

GraphPatch compile_turn_to_patch(const TurnInputs& inputs, const SessionState& state, const RuntimeConfig& config) {
  Compiler c(state, config);
  GraphPatch patch;
  patch.id = patch_id(state.patch_counter + 1);
  patch.turn = state.turn;
  if (!inputs.edits.empty())
    patch.origin = PatchOrigin::user_edit;
  else if (inputs.response)
    patch.origin = PatchOrigin::clarification;
  else
    patch.origin = PatchOrigin::extraction;

  c.ops = inputs.edits;
  if (inputs.response) c.response(*inputs.response);
  const bool assistant = inputs.utterance && inputs.utterance->speaker == Speaker::assistant;
  if (assistant) {
    c.assistant_turn(*inputs.utterance, inputs.extraction, inputs.plan_items);
  } else if (inputs.extraction) {
    const bool refine = inputs.response && inputs.response->verdict == Verdict::refine;
    if (refine)
      c.user_extraction(*inputs.extraction, EvidenceSource::clarification_answer, 1.0);
    else
      c.user_extraction(*inputs.extraction, EvidenceSource::user_statement,
                        config.grounding.extraction_evidence_weight);
  }
  patch.ops = std::move(c.ops);

  // Dry run: unknown targets and other op errors reject the whole patch.
  SessionState probe = state;
  apply_patch(probe, patch, config.grounding);
  return patch;
}

// ---- diff -------------------------------------------------------------------

namespace {

bool motif_degraded(const MotifInstance& m, const CognitiveGraph& before, const CognitiveGraph& after) {
  auto bad_concept = [](const CognitiveGraph& g, const ConceptId& id) {
    const Concept* c = g.find_concept(id);
    return c == nullptr || c->status == ItemStatus::deprecated || c->status == ItemStatus::cancelled;
  };
  auto bad_edge = [](const CognitiveGraph& g, const EdgeId& id) {
    const DependencyEdge* e = g.find_edge(id);
    return e == nullptr || e->status == ItemStatus::deprecated || e->status == ItemStatus::cancelled;
  };
  for (const auto& c : m.concept_ids())
    if (bad_concept(after, c) && !bad_concept(before, c)) return true;
  for (const auto& e : m.edges)
    if (bad_edge(after, e) && !bad_edge(before, e)) return true;
  return false;
}

}  // namespace

PatchDiff compute_diff(const GraphPatch& patch, const SessionState& state, const RuntimeConfig& config) {
  PatchDiff diff;
  if (patch.ops.empty()) return diff;
  SessionState after = state;
  apply_patch(after, patch, config.grounding);
  const CognitiveGraph& g0 = state.cognitive.graph;
  const CognitiveGraph& g1 = after.cognitive.graph;

  std::set<ConceptId> new_concepts;
  std::set<EdgeId> new_edges;
  std::set<ConceptId> edge_sources;
  auto concept_or_edge = [&](const std::string& id) {
    if (g1.concepts.count(id) || g0.concepts.count(id))
      diff.affected_concepts.insert(id);
    else if (g1.edges.count(id) || g0.edges.count(id))
      diff.affected_edges.insert(id);
  };
  auto edge_changed = [&](const EdgeId& id) {
    diff.affected_edges.insert(id);
    for (const auto* g : {&g0, &g1})
      if (const DependencyEdge* e = g->find_edge(id)) edge_sources.insert(e->source);
  };

  for (const auto& op : patch.ops) {
    std::visit(Overloaded{
                   [&](const AddConcept& o) {
                     new_concepts.insert(o.node.id);
                     diff.affected_concepts.insert(o.node.id);
                   },
                   [&](const AddEdge& o) {
                     new_edges.insert(o.edge.id);
                     edge_changed(o.edge.id);
                   },
                   [&](const AddConflict& o) {
                     diff.affected_concepts.insert(o.conflict.a);
                     diff.affected_concepts.insert(o.conflict.b);
                   },
                   [&](const AddEvidence& o) { concept_or_edge(o.record.target); },
                   [&](const SetConfidence& o) { diff.affected_concepts.insert(o.target); },
                   [&](const SetStrength& o) { edge_changed(o.target); },
                   [&](const SetStatus& o) {
                     if (g0.concepts.count(o.target))
                       diff.affected_concepts.insert(o.target);
                     else
                       edge_changed(o.target);
                   },
                   [&](const SetLabel& o) { diff.affected_concepts.insert(o.target); },
                   [&](const MergeConcepts& o) {
                     diff.affected_concepts.insert(o.keep);
                     diff.affected_concepts.insert(o.drop);
                   },
                   [&](const BindMotif& o) { diff.affected_motifs.insert(o.instance.id); },
                   [&](const SetMotifStatus& o) { diff.affected_motifs.insert(o.target); },
                   [](const AddPlanItem&) {},
                   [](const RetagPlanItem&) {},
                   [](const AnswerProbe&) {},
                   [](const SetTransferStatus&) {},
                   [&](const SetProvenance& o) { concept_or_edge(o.target); },
                   [&](const Restore& o) {
                     if (o.entity == EntityKind::node) diff.affected_concepts.insert(o.id);
                     if (o.entity == EntityKind::edge) edge_changed(o.id);
                     if (o.entity == EntityKind::motif) diff.affected_motifs.insert(o.id);
                   },
               },
               op);
  }
  for (const auto& src : edge_sources)
    for (const auto* g : {&g0, &g1})
      if (g->concepts.count(src))
        for (const auto& d : backbone_descendants(*g, src)) diff.affected_concepts.insert(d);

  bool active_change = false;
  for (const auto& [id, m] : state.cognitive.motifs) {
    bool touched = diff.affected_motifs.count(id) > 0;
    for (const auto& c : m.concept_ids()) touched = touched || diff.affected_concepts.count(c);
    for (const auto& e : m.edges) touched = touched || diff.affected_edges.count(e);
    if (touched) diff.affected_motifs.insert(id);
    if (m.status != MotifStatus::active) continue;
    const MotifInstance& next = after.cognitive.motifs.at(id);
    if (next.status != MotifStatus::active || motif_degraded(m, g0, g1)) active_change = true;
  }
  for (auto kind : {PlanItemKind::draft, PlanItemKind::comparison, PlanItemKind::note, PlanItemKind::open_question})
    for (const auto& item : after.plan.list(kind))
      for (const auto& c : item.cites)
        if (diff.affected_concepts.count(c)) diff.downstream_plan_items.insert(item.id);

  bool determine = false;
  for (const auto& id : diff.affected_edges)
    for (const auto* g : {&g0, &g1})
      if (const DependencyEdge* e = g->find_edge(id); e != nullptr && e->relation == Relation::determine)
        determine = true;

  std::size_t counted = 0;
  for (const auto& c : diff.affected_concepts) counted += !new_concepts.count(c);
  for (const auto& e : diff.affected_edges) counted += !new_edges.count(e);

  const bool local = counted <= static_cast<std::size_t>(config.scope.max_local_items) &&
                     !(config.scope.determine_veto && determine) &&
                     !(config.scope.active_motif_veto && active_change);
  diff.scope = local ? PatchScope::local : PatchScope::non_local;
  return diff;
}

// ---- commit pipeline --------------------------------------------------------

namespace {

std::set<ConceptId> structural_touch(const CognitiveGraph& before, const CognitiveGraph& after) {
  std::set<ConceptId> touched;
  auto live_ids = [](const CognitiveGraph& g) {
    std::set<ConceptId> ids;
    for (const auto& [id, c] : g.concepts)
      if (is_live(c.status)) ids.insert(id);
    return ids;
  };
  auto edge_set = [](const CognitiveGraph& g) {
    std::set<std::tuple<EdgeId, ConceptId, ConceptId>> out;
    for (const DependencyEdge* e : backbone_edges(g)) out.insert({e->id, e->source, e->target});
    return out;
  };
  auto c0 = live_ids(before), c1 = live_ids(after);
  for (const auto& id : c1)
    if (!c0.count(id)) touched.insert(id);
  auto e0 = edge_set(before), e1 = edge_set(after);
  for (const auto& t : e0)
    if (!e1.count(t)) {
      touched.insert(std::get<1>(t));
      touched.insert(std::get<2>(t));
    }
  for (const auto& t : e1)
    if (!e0.count(t)) {
      touched.insert(std::get<1>(t));
      touched.insert(std::get<2>(t));
    }
  std::set<ConceptId> closure;
  for (const auto& id : touched) {
    if (!c1.count(id)) continue;
    closure.insert(id);
    for (const auto& d : backbone_descendants(after, id)) closure.insert(d);
  }
  return closure;
}

void remap_after_merges(SessionState& s, const std::vector<Merge>& merges) {
  if (merges.empty()) return;
  auto& g = s.cognitive.graph;
  for (auto& [id, m] : s.cognitive.motifs) {
    bool changed = false;
    for (auto& [role, cid] : m.bindings)
      for (const auto& merge : merges)
        if (cid == merge.drop) {
          cid = merge.keep;
          changed = true;
        }
    if (!changed) continue;
    for (auto& eid : m.edges) {
      const DependencyEdge* e = g.find_edge(eid);
      if (e == nullptr || is_live(e->status)) continue;
      if (const DependencyEdge* alt = g.find_live_edge(e->source, e->target, e->relation)) eid = alt->id;
    }
  }
}

void record_change(CommitEffects& fx, const MotifInstance& before, const MotifInstance& after, MotifEvent ev) {
  fx.motif_changes.push_back({before.id, ev, before.status, after.status});
}

bool refine_patch(const GraphPatch& patch) {
  for (const auto& op : patch.ops)
    if (const auto* a = std::get_if<AnswerProbe>(&op); a != nullptr && a->verdict == Verdict::refine) return true;
  return false;
}

CommitEffects run_pipeline(SessionState& s, const GraphPatch& patch, const RuntimeConfig& config) {
  CommitEffects fx;
  auto& g = s.cognitive.graph;
  g.turn_counter = s.turn;

  for (auto& [id, e] : g.edges) {
    if (!is_live(e.status)) continue;
    const Concept* a = g.find_concept(e.source);
    const Concept* b = g.find_concept(e.target);
    if (a == nullptr || b == nullptr || !is_live(a->status) || !is_live(b->status)) {
      e.status = ItemStatus::cancelled;
      fx.cascaded_edges.push_back(id);
    }
  }

  std::vector<Merge> merges;
  for (const auto& op : patch.ops)
    if (const auto* m = std::get_if<MergeConcepts>(&op)) merges.push_back({m->keep, m->drop});
  fx.merges = compact_singletons_in_place(g);
  merges.insert(merges.end(), fx.merges.begin(), fx.merges.end());
  remap_after_merges(s, merges);

  auto grounding = ground_candidates(g, config.grounding);
  fx.grounded = grounding.promoted;
  fx.conflicts_opened = grounding.conflicts_opened;

  // Grounded slot-mates of the current task holding different values stay
  // side by side as an explicit conflict.
  std::map<std::string, std::vector<const Concept*>> by_slot;
  for (const auto& [id, c] : g.concepts)
    if (c.slot && c.value && c.status == ItemStatus::grounded && c.created_turn >= s.task_start_turn)
      by_slot[*c.slot].push_back(&c);
  std::vector<ConflictEdge> slot_conflicts;
  for (const auto& [slot, members] : by_slot)
    for (std::size_t i = 0; i < members.size(); ++i)
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        const Concept *a = members[i], *b = members[j];
        if (lower(*a->value) == lower(*b->value)) continue;
        bool known = false;
        for (const auto& [xid, x] : g.conflicts)
          if ((x.a == a->id && x.b == b->id) || (x.a == b->id && x.b == a->id)) known = true;
        if (known) continue;
        ConflictEdge x;
        x.a = a->id;
        x.b = b->id;
        x.description = "slot " + slot + ": " + *a->value + " vs " + *b->value;
        slot_conflicts.push_back(x);
      }
  for (auto& x : slot_conflicts) {
    x.id = next_free_id(g.conflicts, "x");
    g.conflicts.emplace(x.id, x);
    fx.conflicts_opened.push_back(x.id);
  }

  fx.removed_edges = repair_cycles_in_place(g);

  // Motif maintenance.
  for (auto& [id, m] : s.cognitive.motifs) {
    if (m.status != MotifStatus::active && m.status != MotifStatus::uncertain) continue;
    std::optional<MotifEvent> event;
    if (m.concept_ids().size() < 2) event = MotifEvent::cancel;
    for (const auto& eid : m.edges) {
      const DependencyEdge* e = g.find_edge(eid);
      if (!event && (e == nullptr || !is_live(e->status))) event = MotifEvent::edge_cancelled;
    }
    if (!event) {
      for (const auto& cid : m.concept_ids()) {
        const Concept* c = g.find_concept(cid);
        if (c == nullptr || !is_live(c->status) || c->status == ItemStatus::deprecated) event = MotifEvent::deprecate;
      }
      for (const auto& eid : m.edges)
        if (g.edges.at(eid).status == ItemStatus::deprecated) event = MotifEvent::deprecate;
    }
    if (!event) continue;
    MotifInstance next = update_motif_status(m, *event, EventOrigin::system, s.turn);
    record_change(fx, m, next, *event);
    m = std::move(next);
  }

  if (!s.task_id.empty()) {
    std::set<EdgeId> patch_edges;
    for (const auto& op : patch.ops)
      if (const auto* a = std::get_if<AddEdge>(&op)) patch_edges.insert(a->edge.id);
    const bool refine = patch.origin == PatchOrigin::clarification && refine_patch(patch);

    std::set<std::pair<std::string, std::vector<ConceptId>>> known;
    for (const auto& [id, m] : s.cognitive.motifs)
      if (m.task_id == s.task_id) known.insert({m.pattern, m.concept_ids()});
    for (auto& inst : match_motifs(g, config.vocabulary)) {
      bool current = true;
      for (const auto& cid : inst.concept_ids()) current = current && g.concepts.at(cid).created_turn >= s.task_start_turn;
      if (!current || !known.insert({inst.pattern, inst.concept_ids()}).second) continue;
      inst.id = next_free_id(s.cognitive.motifs, "m");
      inst.task_id = s.task_id;
      fx.motifs_bound.push_back(inst.id);
      const bool from_refine =
          refine && std::all_of(inst.edges.begin(), inst.edges.end(),
                                [&](const EdgeId& e) { return patch_edges.count(e) > 0; });
      if (from_refine) {
        MotifInstance next = update_motif_status(inst, MotifEvent::confirm, EventOrigin::user, s.turn);
        record_change(fx, inst, next, MotifEvent::confirm);
        inst = std::move(next);
      }
      s.cognitive.motifs.emplace(inst.id, std::move(inst));
    }

    auto context = task_context(s);
    if (!context.empty()) {
      std::set<std::string> offered;
      for (const auto& [id, t] : s.cognitive.transfer_candidates)
        if (t.task_id == s.task_id) offered.insert(t.pattern);
      for (auto& cand : retrieve_transfer_candidates(s.cognitive.library, context)) {
        if (cand.source_task == s.task_id || offered.count(cand.pattern)) continue;
        cand.id = next_free_id(s.cognitive.transfer_candidates, "t");
        cand.task_id = s.task_id;
        offered.insert(cand.pattern);
        fx.transfer_candidates.push_back(cand.id);
        s.cognitive.transfer_candidates.emplace(cand.id, std::move(cand));
      }
    }
  }
  return fx;
}

CommitRecord commit_internal(SessionState& state, const GraphPatch& patch, const PatchDiff& diff,
                             const RuntimeConfig& config, const std::string& approval, bool count_patch) {
  SessionState work = state;
  apply_patch(work, patch, config.grounding);
  CommitEffects fx = run_pipeline(work, patch, config);

  auto report = validate_backbone(work.cognitive.graph);
  if (!report.ok) {
    std::string detail;
    for (const auto& v : report.violations) {
      detail += v.invariant;
      for (const auto& id : v.ids) detail += " " + id;
      detail += "; ";
    }
    throw Error("invariant-violation", detail);
  }

  fx.layout_touched = structural_touch(state.cognitive.graph, work.cognitive.graph);
  work.layout = compute_layout(work.cognitive.graph, state.layout, fx.layout_touched);
  if (count_patch) ++work.patch_counter;
  state = std::move(work);
  return {patch, diff, approval, std::move(fx)};
}

}  // namespace

CommitRecord commit_patch(SessionState& state, const GraphPatch& patch, const RuntimeConfig& config,
                          const std::optional<std::string>& approval) {
  PatchDiff diff = compute_diff(patch, state, config);
  if (diff.scope == PatchScope::non_local && !approval) throw Error("approval-required", patch.id);
  return commit_internal(state, patch, diff, config, approval.value_or("auto"), true);
}

void surface_patch(SessionState& state, const GraphPatch& patch, const PatchDiff& diff) {
  if (state.pending_review) throw Error("review-in-progress", state.pending_review->patch.id);
  if (diff.scope != PatchScope::non_local) throw Error("scope-mismatch", "only non-local patches are surfaced");
  state.pending_review = PendingReview{patch, diff};
  ++state.patch_counter;
}

namespace {

std::optional<std::string> created_id(const PatchOp& op) {
  if (const auto* o = std::get_if<AddConcept>(&op)) return o->node.id;
  if (const auto* o = std::get_if<AddEdge>(&op)) return o->edge.id;
  if (const auto* o = std::get_if<AddConflict>(&op)) return o->conflict.id;
  if (const auto* o = std::get_if<AddEvidence>(&op)) return o->record.id;
  if (const auto* o = std::get_if<AddPlanItem>(&op)) return o->item.id;
  if (const auto* o = std::get_if<BindMotif>(&op)) return o->instance.id;
  return std::nullopt;
}

}  // namespace

CommitRecord approve_pending(SessionState& state, const PatchId& patch_id, const std::set<std::string>& exclude,
                             const RuntimeConfig& config) {
  if (!state.pending_review) throw Error("no-pending-review", patch_id);
  if (state.pending_review->patch.id != patch_id) throw Error("unknown-patch", patch_id);
  GraphPatch patch = state.pending_review->patch;
  if (!exclude.empty()) {
    std::set<std::string> dropped = exclude;
    std::vector<PatchOp> kept;
    // Ops that depend on an excluded item go too, and so does anything they create.
    for (bool again = true; again;) {
      again = false;
      kept.clear();
      for (const auto& op : patch.ops) {
        auto ids = referenced_ids(op);
        bool hit = std::any_of(ids.begin(), ids.end(), [&](const std::string& id) { return dropped.count(id) > 0; });
        if (!hit) {
          kept.push_back(op);
          continue;
        }
        if (auto made = created_id(op); made && dropped.insert(*made).second) again = true;
      }
    }
    patch.ops = std::move(kept);
  }
  SessionState work = state;
  work.pending_review.reset();
  PatchDiff diff = compute_diff(patch, work, config);
  CommitRecord record = commit_internal(work, patch, diff, config, "review", false);
  state = std::move(work);
  return record;
}

void reject_pending(SessionState& state, const PatchId& patch_id) {
  if (!state.pending_review) throw Error("no-pending-review", patch_id);
  if (state.pending_review->patch.id != patch_id) throw Error("unknown-patch", patch_id);
  state.pending_review.reset();
}

RouteOutcome route_patch(SessionState& state, const GraphPatch& patch, const RuntimeConfig& config,
                         const std::optional<std::string>& approval) {
  PatchDiff diff = compute_diff(patch, state, config);
  RouteOutcome out;
  if (diff.scope == PatchScope::local || approval) {
    out.committed = commit_internal(state, patch, diff, config, approval.value_or("auto"), true);
  } else {
    surface_patch(state, patch, diff);
    out.surfaced = state.pending_review;
  }
  return out;
}

// ---- revision ---------------------------------------------------------------

GraphPatch revise(const SessionState& state, RevisionKind kind, const RevisionPayload& payload) {
  const CognitiveGraph& g = state.cognitive.graph;
  GraphPatch patch;
  patch.id = patch_id(state.patch_counter + 1);
  patch.turn = state.turn;
  patch.origin = PatchOrigin::user_edit;

  auto live_concept = [&](const ConceptId& id) -> const Concept& {
    const Concept* c = g.find_concept(id);
    if (c == nullptr || !is_live(c->status)) throw Error("unknown-target", id);
    return *c;
  };
  auto live_edge = [&](const EdgeId& id) -> const DependencyEdge& {
    const DependencyEdge* e = g.find_edge(id);
    if (e == nullptr || !is_live(e->status)) throw Error("unknown-target", id);
    return *e;
  };

  switch (kind) {
    case RevisionKind::node: {
      const auto* p = std::get_if<ConceptRevision>(&payload);
      if (p == nullptr) throw Error("bad-value", "payload does not match revision kind");
      const Concept& c = live_concept(p->target);
      if (p->scoped_condition) {
        if (p->scoped_condition->empty()) throw Error("bad-value", "empty condition");
        IdPool concepts(g.concepts, "c"), edges(g.edges, "e"), evidence(g.evidence, "v");
        Concept scoped;
        scoped.id = concepts.next();
        scoped.kind = ConceptKind::constraint;
        scoped.label = lower(*p->scoped_condition);
        scoped.provenance = Provenance::user_confirmed;
        scoped.created_turn = state.turn;
        patch.ops.push_back(AddConcept{scoped});
        patch.ops.push_back(AddEvidence{{evidence.next(), scoped.id, state.turn, EvidenceSource::user_statement, 1.0}});
        DependencyEdge e;
        e.id = edges.next();
        e.source = scoped.id;
        e.target = c.id;
        e.relation = Relation::constraint;
        e.strength = 0.5;
        e.provenance = Provenance::user_confirmed;
        e.rationale = "context-bounded qualification of " + c.label;
        e.created_turn = state.turn;
        patch.ops.push_back(AddEdge{e});
        return patch;
      }
      if (p->status) {
        if (*p->status != ItemStatus::deprecated && *p->status != ItemStatus::cancelled)
          throw Error("bad-value", "concept revisions only deprecate or cancel");
        if (*p->status == c.status) throw Error("no-op-revision", c.id);
        patch.ops.push_back(SetStatus{c.id, *p->status});
        if (*p->status == ItemStatus::cancelled)
          for (const auto& [id, e] : g.edges)
            if (is_live(e.status) && (e.source == c.id || e.target == c.id))
              patch.ops.push_back(SetStatus{id, ItemStatus::cancelled});
        return patch;
      }
      SetLabel op;
      op.target = c.id;
      op.label = p->label.value_or(c.label);
      op.slot = p->slot;
      op.value = p->value;
      const bool same = op.label == c.label && (!p->slot || (p->slot->empty() ? !c.slot : c.slot == p->slot)) &&
                        (!p->value || (p->value->empty() ? !c.value : c.value == p->value));
      if (same) throw Error("no-op-revision", c.id);
      op.rationale = "was: label=\"" + c.label + "\" slot=" + c.slot.value_or("-") + " value=" + c.value.value_or("-");
      patch.ops.push_back(op);
      return patch;
    }
    case RevisionKind::confidence: {
      const auto* p = std::get_if<ConfidenceRevision>(&payload);
      if (p == nullptr) throw Error("bad-value", "payload does not match revision kind");
      const Concept& c = live_concept(p->target);
      if (!in_range(p->value)) throw Error("bad-value", "confidence outside [0,1]");
      if (p->value == c.confidence) throw Error("no-op-revision", c.id);
      patch.ops.push_back(SetConfidence{c.id, p->value});
      return patch;
    }
    case RevisionKind::structure: {
      const auto* p = std::get_if<StructureRevision>(&payload);
      if (p == nullptr) throw Error("bad-value", "payload does not match revision kind");
      using A = StructureRevision::Action;
      IdPool edges(g.edges, "e");
      switch (p->action) {
        case A::add: {
          if (!p->source || !p->target || !p->relation) throw Error("bad-value", "add needs source, target, relation");
          live_concept(*p->source);
          live_concept(*p->target);
          const double strength = p->strength.value_or(0.5);
          if (!in_range(strength)) throw Error("bad-value", "strength outside [0,1]");
          if (const DependencyEdge* e = g.find_live_edge(*p->source, *p->target, *p->relation)) {
            if (strength <= e->strength) throw Error("no-op-revision", e->id);
            patch.ops.push_back(SetStrength{e->id, strength});
            return patch;
          }
          DependencyEdge e;
          e.id = edges.next();
          e.source = *p->source;
          e.target = *p->target;
          e.relation = *p->relation;
          e.strength = strength;
          e.provenance = Provenance::user_confirmed;
          e.rationale = p->rationale;
          e.created_turn = state.turn;
          patch.ops.push_back(AddEdge{e});
          return patch;
        }
        case A::cancel: {
          if (!p->edge) throw Error("bad-value", "cancel needs an edge");
          const DependencyEdge* e = g.find_edge(*p->edge);
          if (e == nullptr) throw Error("unknown-target", *p->edge);
          if (!is_live(e->status)) throw Error("no-op-revision", *p->edge);
          patch.ops.push_back(SetStatus{e->id, ItemStatus::cancelled});
          return patch;
        }
        case A::retype: {
          if (!p->edge || !p->relation) throw Error("bad-value", "retype needs an edge and a relation");
          const DependencyEdge& old = live_edge(*p->edge);
          if (old.relation == *p->relation) throw Error("no-op-revision", old.id);
          if (g.find_live_edge(old.source, old.target, *p->relation) != nullptr)
            throw Error("duplicate-edge", old.id);
          DependencyEdge e = old;
          e.id = edges.next();
          e.relation = *p->relation;
          e.status = ItemStatus::candidate;
          e.provenance = Provenance::user_confirmed;
          e.created_turn = state.turn;
          e.rationale = old.rationale.value_or("") + (old.rationale ? " " : "") + "(retyped from " +
                        std::string(to_string(old.relation)) + ", was " + old.id + ")";
          patch.ops.push_back(SetStatus{old.id, ItemStatus::cancelled});
          patch.ops.push_back(AddEdge{e});
          return patch;
        }
        case A::strength: {
          if (!p->edge || !p->strength) throw Error("bad-value", "strength revision needs an edge and a value");
          const DependencyEdge& e = live_edge(*p->edge);
          if (!in_range(*p->strength)) throw Error("bad-value", "strength outside [0,1]");
          if (*p->strength == e.strength) throw Error("no-op-revision", e.id);
          patch.ops.push_back(SetStrength{e.id, *p->strength});
          return patch;
        }
      }
    }
  }
  throw Error("bad-value", "unknown revision kind");
}

// ---- clarification in session context ---------------------------------------

ImpactScore score_impact(const MotifInstance& motif, const SessionState& state, const ClarificationConfig& config) {
  return score_impact(motif, state.cognitive.graph, state.task_start_turn, config);
}

ResponseOutcome apply_response(SessionState& state, const ProbeResponse& response, const RuntimeConfig& config,
                               const std::optional<ExtractionResult>& detail_extraction) {
  TurnInputs inputs;
  inputs.response = response;
  if (response.verdict == Verdict::refine) inputs.extraction = detail_extraction;
  GraphPatch patch = compile_turn_to_patch(inputs, state, config);
  std::optional<std::string> approval;
  if (response.verdict != Verdict::refine) approval = "clarification_answer";
  RouteOutcome routed = route_patch(state, patch, config, approval);
  return {std::move(routed.committed), std::move(routed.surfaced)};
}

std::optional<Probe> maybe_issue_probe(SessionState& state, const RuntimeConfig& config) {
  if (state.probe_budget_used || state.task_id.empty()) return std::nullopt;
  std::set<MotifId> probed;
  for (const auto& [id, p] : state.cognitive.probes) probed.insert(p.motif);
  std::vector<ImpactScore> scores;
  for (const auto& [id, m] : state.cognitive.motifs) {
    if (m.task_id != state.task_id || probed.count(id)) continue;
    if (m.status != MotifStatus::uncertain && m.status != MotifStatus::active) continue;
    try {
      scores.push_back(score_impact(m, state, config.clarification));
    } catch (const Error&) {
    }
  }
  ProbeBudget budget;
  const auto& graph = state.cognitive.graph;
  const auto& motifs = state.cognitive.motifs;
  auto probe = select_probe(scores, config.clarification, state.turn, budget, [&](const ImpactScore& s, ProbeKind k) {
    return render_probe_text(config.templates, k, motifs.at(s.motif), graph);
  });
  if (!probe) return std::nullopt;
  probe->id = next_free_id(state.cognitive.probes, "p");
  state.cognitive.probes.emplace(probe->id, *probe);
  state.probe_budget_used = true;
  return probe;
}

// ---- promotion and transfer --------------------------------------------------

ExtractionResult extract_plan_item(const PlanItem& item, int turn) {
  RuleBasedExtractor rule;
  ExtractionResult result = rule.extract({turn, Speaker::user, item.text}, {});
  if (!result.concepts.empty()) return result;
  // A confirmed suggestion with no cue reads as something the user wants.
  result = rule.extract({turn, Speaker::user, "want " + item.text}, {});
  for (auto& cand : result.concepts) {
    cand.node.kind = ConceptKind::preference;
    if (cand.node.label.rfind("want ", 0) == 0) cand.node.label.erase(0, 5);
  }
  return result;
}

std::optional<CommitRecord> promote_to_cognitive(SessionState& state, const PlanItemId& item_id,
                                                 const std::optional<Confirmation>& confirmation,
                                                 const RuntimeConfig& config,
                                                 const std::optional<ExtractionResult>& extraction) {
  const PlanItem* item = state.plan.find(item_id);
  if (item == nullptr) throw Error("unknown-target", item_id);
  if (!confirmation || confirmation->origin != EventOrigin::user || confirmation->item != item_id)
    throw Error("promotion-gate", item_id);
  if (item->promoted) return std::nullopt;

  Compiler c(state, config);
  c.user_extraction(extraction.value_or(extract_plan_item(*item, state.turn)), EvidenceSource::user_statement, 1.0);
  c.ops.push_back(RetagPlanItem{item_id, Provenance::co_authored, true});
  GraphPatch patch;
  patch.id = patch_id(state.patch_counter + 1);
  patch.turn = state.turn;
  patch.origin = PatchOrigin::user_edit;
  patch.ops = std::move(c.ops);
  return commit_patch(state, patch, config, "promotion");
}

CommitRecord decide_transfer(SessionState& state, const std::string& candidate, bool adopt,
                             const RuntimeConfig& config) {
  auto it = state.cognitive.transfer_candidates.find(candidate);
  if (it == state.cognitive.transfer_candidates.end()) throw Error("unknown-target", candidate);
  const TransferCandidate& cand = it->second;
  if (cand.status != TransferStatus::uncertain) throw Error("invalid-transition", candidate);
  if (cand.task_id != state.task_id) throw Error("stale-transfer", candidate);

  GraphPatch patch;
  patch.id = patch_id(state.patch_counter + 1);
  patch.turn = state.turn;
  patch.origin = PatchOrigin::transfer;
  if (!adopt) {
    patch.ops.push_back(SetTransferStatus{candidate, TransferStatus::rejected});
    return commit_patch(state, patch, config, "transfer_uptake");
  }

  auto pit = state.cognitive.library.patterns.find(cand.pattern);
  if (pit == state.cognitive.library.patterns.end()) throw Error("unknown-target", cand.pattern);
  const MotifPattern pattern = pit->second;
  const CognitiveGraph& g = state.cognitive.graph;
  IdPool concepts(g.concepts, "c"), edges(g.edges, "e");

  MotifInstance inst;
  inst.pattern = pattern.name;
  inst.taxonomy_class = pattern.taxonomy_class;
  inst.reasoning_function = pattern.reasoning_function;
  inst.status = MotifStatus::uncertain;
  inst.provenance = Provenance::transfer_based;
  inst.task_id = state.task_id;
  inst.rationale = "transferred from " + cand.source_task;
  for (const auto& role : pattern.roles) {
    auto bound = cand.proposed_bindings.find(role.role);
    if (bound != cand.proposed_bindings.end()) {
      const Concept* c = g.find_concept(bound->second);
      if (c != nullptr && is_live(c->status)) {
        inst.bindings[role.role] = c->id;
        continue;
      }
    }
    Concept placeholder;
    placeholder.id = concepts.next();
    placeholder.kind = role.kind.value_or(ConceptKind::belief);
    placeholder.label = role.role;
    std::replace(placeholder.label.begin(), placeholder.label.end(), '_', ' ');
    placeholder.slot = role.slot;
    placeholder.confidence = 0.0;
    placeholder.provenance = Provenance::transfer_based;
    placeholder.status = ItemStatus::candidate;
    placeholder.created_turn = state.turn;
    inst.bindings[role.role] = placeholder.id;
    patch.ops.push_back(AddConcept{placeholder});
  }
  for (const auto& t : pattern.edges) {
    const auto& from = inst.bindings.at(t.from);
    const auto& to = inst.bindings.at(t.to);
    if (const DependencyEdge* e = g.find_live_edge(from, to, t.relation)) {
      inst.edges.push_back(e->id);
      continue;
    }
    DependencyEdge e;
    e.id = edges.next();
    e.source = from;
    e.target = to;
    e.relation = t.relation;
    e.strength = 0.5;
    e.status = ItemStatus::candidate;
    e.provenance = Provenance::transfer_based;
    e.rationale = "transferred " + pattern.name;
    e.created_turn = state.turn;
    inst.edges.push_back(e.id);
    patch.ops.push_back(AddEdge{e});
  }
  inst.id = next_free_id(state.cognitive.motifs, "m");
  patch.ops.push_back(BindMotif{inst});
  patch.ops.push_back(SetTransferStatus{candidate, TransferStatus::adopted});
  CommitRecord record = commit_patch(state, patch, config, "transfer_uptake");
  store_pattern(state.cognitive.library, pattern, state.task_id, true);
  return record;
}

void start_task(SessionState& state, const TaskId& task_id) {
  if (task_id.empty()) throw Error("bad-value", "empty task id");
  if (!state.task_id.empty()) throw Error("task-open", state.task_id);
  for (const auto& t : state.cognitive.task_history)
    if (t.task_id == task_id) throw Error("duplicate-task", task_id);
  ++state.turn;
  state.probe_budget_used = false;
  state.task_id = task_id;
  state.task_start_turn = state.turn;
  state.cognitive.task_history.push_back({task_id, state.turn, std::nullopt});
}

std::vector<std::string> end_task(SessionState& state) {
  if (state.task_id.empty()) throw Error("no-open-task");
  std::vector<std::string> stored;
  for (const auto& [id, m] : state.cognitive.motifs) {
    if (m.task_id != state.task_id || m.status != MotifStatus::active) continue;
    store_pattern(state.cognitive.library, abstract_motif(m, state.cognitive.graph), state.task_id);
    stored.push_back(m.pattern);
  }
  for (auto& t : state.cognitive.task_history)
    if (t.task_id == state.task_id) t.end_turn = state.turn;
  state.task_id.clear();
  return stored;
}

std::vector<Concept> task_context(const SessionState& state) {
  std::vector<Concept> out;
  if (state.task_id.empty()) return out;
  for (const auto& [id, c] : state.cognitive.graph.concepts)
    if (is_live(c.status) && c.status != ItemStatus::deprecated && c.created_turn >= state.task_start_turn &&
        c.provenance != Provenance::transfer_based)
      out.push_back(c);
  return out;
}

}  // namespace cog
