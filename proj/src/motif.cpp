#include "cog/motif.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "cog/serialization.hpp"

namespace cog {

std::vector<ConceptId> MotifInstance::concept_ids() const {
  std::set<ConceptId> ids;
  for (const auto& [role, id] : bindings) ids.insert(id);
  return {ids.begin(), ids.end()};
}

void validate_pattern(const MotifPattern& pattern) {
  if (pattern.name.empty()) throw Error("bad-pattern", "unnamed pattern");
  if (pattern.roles.size() < 2) throw Error("bad-pattern", pattern.name + ": fewer than two roles");
  if (pattern.edges.empty()) throw Error("bad-pattern", pattern.name + ": no edge template");
  std::set<std::string> roles;
  for (const auto& r : pattern.roles)
    if (!roles.insert(r.role).second) throw Error("bad-pattern", pattern.name + ": duplicate role " + r.role);
  for (const auto& e : pattern.edges) {
    if (!roles.count(e.from) || !roles.count(e.to))
      throw Error("bad-pattern", pattern.name + ": edge names an undeclared role");
    if (e.from == e.to) throw Error("bad-pattern", pattern.name + ": self-loop template");
  }
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("parse-failure", "cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Json doc = parse_json(text);
  Vocabulary vocabulary;
  try {
    vocabulary = doc.get<Vocabulary>();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error("parse-failure", e.what());
  }
  for (const auto& p : vocabulary) validate_pattern(p);
  return vocabulary;
}

namespace {

Provenance instance_provenance(const CognitiveGraph& graph, const MotifInstance& inst) {
  bool all_user = true;
  for (const auto& id : inst.concept_ids()) {
    const Concept& c = graph.concepts.at(id);
    if (c.provenance == Provenance::transfer_based) return Provenance::transfer_based;
    if (c.provenance != Provenance::user_confirmed) all_user = false;
  }
  return all_user ? Provenance::user_confirmed : Provenance::co_authored;
}

struct Matcher {
  const CognitiveGraph& graph;
  const MotifPattern& pattern;
  std::vector<std::vector<ConceptId>> options;  // per role
  std::vector<ConceptId> assigned;
  std::map<std::vector<ConceptId>, MotifInstance> found;  // concept set → smallest binding

  const DependencyEdge* edge_for(const EdgeTemplate& t, const std::map<std::string, std::size_t>& index) const {
    const auto& from = assigned[index.at(t.from)];
    const auto& to = assigned[index.at(t.to)];
    const DependencyEdge* e = graph.find_live_edge(from, to, t.relation);
    return e != nullptr && e->status == ItemStatus::grounded ? e : nullptr;
  }

  void run() {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < pattern.roles.size(); ++i) index[pattern.roles[i].role] = i;
    for (const auto& role : pattern.roles) {
      std::vector<ConceptId> ids;
      for (const auto& [id, c] : graph.concepts) {
        if (c.status != ItemStatus::grounded) continue;
        if (role.kind && c.kind != *role.kind) continue;
        if (role.slot && c.slot != role.slot) continue;
        ids.push_back(id);
      }
      options.push_back(std::move(ids));
    }
    assigned.assign(pattern.roles.size(), {});
    extend(0, index);
  }

  void extend(std::size_t depth, const std::map<std::string, std::size_t>& index) {
    if (depth == pattern.roles.size()) {
      record(index);
      return;
    }
    for (const auto& id : options[depth]) {
      if (std::find(assigned.begin(), assigned.begin() + static_cast<long>(depth), id) !=
          assigned.begin() + static_cast<long>(depth))
        continue;
      assigned[depth] = id;
      bool ok = true;
      for (const auto& t : pattern.edges) {
        std::size_t a = index.at(t.from), b = index.at(t.to);
        if (std::max(a, b) != depth) continue;
        if (edge_for(t, index) == nullptr) {
          ok = false;
          break;
        }
      }
      if (ok) extend(depth + 1, index);
    }
    assigned[depth].clear();
  }

  void record(const std::map<std::string, std::size_t>& index) {
    MotifInstance inst;
    inst.pattern = pattern.name;
    inst.taxonomy_class = pattern.taxonomy_class;
    inst.reasoning_function = pattern.reasoning_function;
    for (std::size_t i = 0; i < pattern.roles.size(); ++i) inst.bindings[pattern.roles[i].role] = assigned[i];
    for (const auto& t : pattern.edges) inst.edges.push_back(edge_for(t, index)->id);
    inst.status = MotifStatus::uncertain;
    inst.provenance = instance_provenance(graph, inst);
    inst.rationale = "matched " + pattern.name;
    auto key = inst.concept_ids();
    auto it = found.find(key);
    if (it == found.end() || assigned_order(inst) < assigned_order(it->second)) found[key] = std::move(inst);
  }

  std::vector<ConceptId> assigned_order(const MotifInstance& inst) const {
    std::vector<ConceptId> out;
    for (const auto& role : pattern.roles) out.push_back(inst.bindings.at(role.role));
    return out;
  }
};

}  // namespace

std::vector<MotifInstance> match_motifs(const CognitiveGraph& graph, std::span<const MotifPattern> vocabulary) {
  std::vector<const MotifPattern*> patterns;
  for (const auto& p : vocabulary) patterns.push_back(&p);
  std::stable_sort(patterns.begin(), patterns.end(),
                   [](const MotifPattern* a, const MotifPattern* b) { return a->name < b->name; });

  std::vector<MotifInstance> out;
  for (const MotifPattern* p : patterns) {
    if (p->roles.size() < 2 || p->edges.empty()) continue;
    Matcher m{graph, *p, {}, {}, {}};
    m.run();
    for (auto& [key, inst] : m.found) out.push_back(std::move(inst));
  }
  return out;
}

std::optional<MotifStatus> next_motif_status(MotifStatus from, MotifEvent event, EventOrigin origin) {
  using S = MotifStatus;
  switch (event) {
    case MotifEvent::confirm:
      if (origin != EventOrigin::user) return std::nullopt;
      if (from == S::uncertain || from == S::active) return S::active;
      return std::nullopt;
    case MotifEvent::weaken:
      if (from == S::active || from == S::uncertain) return S::uncertain;
      return std::nullopt;
    case MotifEvent::deprecate:
      if (from == S::active || from == S::uncertain) return S::deprecated;
      return std::nullopt;
    case MotifEvent::cancel:
      return S::cancelled;
    case MotifEvent::edge_cancelled:
      if (from == S::cancelled) return S::cancelled;
      return S::deprecated;
  }
  return std::nullopt;
}

MotifInstance update_motif_status(MotifInstance instance, MotifEvent event, EventOrigin origin, int turn) {
  auto next = next_motif_status(instance.status, event, origin);
  if (!next)
    throw Error("invalid-transition", std::string(to_string(instance.status)) + " + " +
                                          std::string(to_string(event)) + " (" +
                                          std::string(to_string(origin)) + ")");
  if (*next == instance.status && instance.status == MotifStatus::cancelled) return instance;
  instance.history.push_back({event, origin, instance.status, *next, turn});
  instance.status = *next;
  return instance;
}

MotifPattern abstract_motif(const MotifInstance& instance, const CognitiveGraph& graph) {
  if (instance.status != MotifStatus::active)
    throw Error("not-validated", instance.id + " is " + std::string(to_string(instance.status)));
  std::map<ConceptId, std::string> role_of;
  MotifPattern pattern;
  pattern.name = instance.pattern;
  pattern.taxonomy_class = instance.taxonomy_class;
  pattern.reasoning_function = instance.reasoning_function;
  for (const auto& [role, id] : instance.bindings) {
    const Concept* c = graph.find_concept(id);
    if (c == nullptr) throw Error("not-validated", "missing concept " + id);
    pattern.roles.push_back({role, c->kind, c->slot});
    role_of[id] = role;
  }
  for (const auto& eid : instance.edges) {
    const DependencyEdge* e = graph.find_edge(eid);
    if (e == nullptr || !is_live(e->status) || !role_of.count(e->source) || !role_of.count(e->target))
      throw Error("not-validated", "edge " + eid + " no longer binds the instance");
    pattern.edges.push_back({role_of.at(e->source), role_of.at(e->target), e->relation});
  }
  validate_pattern(pattern);
  return pattern;
}

void store_pattern(MotifLibrary& library, const MotifPattern& pattern, const TaskId& source_task, bool adopted) {
  validate_pattern(pattern);
  auto it = library.patterns.find(pattern.name);
  if (it == library.patterns.end()) {
    MotifPattern stored = pattern;
    stored.usage_count = 1;
    library.patterns.emplace(stored.name, std::move(stored));
  } else {
    ++it->second.usage_count;
  }
  library.pattern_history.push_back({pattern.name, source_task, adopted});
}

int slot_overlap(const MotifPattern& pattern, std::span<const Concept> task_context) {
  std::set<std::string> slots;
  for (const auto& c : task_context)
    if (c.slot) slots.insert(*c.slot);
  int overlap = 0;
  for (const auto& r : pattern.roles)
    if (r.slot && slots.count(*r.slot)) ++overlap;
  return overlap;
}

std::vector<TransferCandidate> retrieve_transfer_candidates(const MotifLibrary& library,
                                                            std::span<const Concept> task_context) {
  std::vector<TransferCandidate> out;
  for (const auto& [name, pattern] : library.patterns) {
    int overlap = slot_overlap(pattern, task_context);
    if (overlap < 1) continue;
    TransferCandidate cand;
    cand.pattern = name;
    cand.status = TransferStatus::uncertain;
    cand.provenance = Provenance::transfer_based;
    cand.score = overlap + 0.1 * std::log(1.0 + pattern.usage_count);
    for (auto it = library.pattern_history.rbegin(); it != library.pattern_history.rend(); ++it)
      if (it->pattern == name) {
        cand.source_task = it->source_task;
        break;
      }
    std::set<ConceptId> used;
    for (const auto& role : pattern.roles) {
      if (!role.slot) continue;
      const Concept* best = nullptr;
      for (const auto& c : task_context)
        if (c.slot == role.slot && (!role.kind || c.kind == *role.kind) && !used.count(c.id) &&
            (best == nullptr || c.id < best->id))
          best = &c;
      if (best != nullptr) {
        cand.proposed_bindings[role.role] = best->id;
        used.insert(best->id);
      }
    }
    out.push_back(std::move(cand));
  }
  std::stable_sort(out.begin(), out.end(), [](const TransferCandidate& a, const TransferCandidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.pattern < b.pattern;
  });
  return out;
}

}  // namespace cog
