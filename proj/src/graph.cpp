#include "cog/graph.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>
#include <tuple>

namespace cog {

const Concept* CognitiveGraph::find_concept(const ConceptId& id) const {
  auto it = concepts.find(id);
  return it == concepts.end() ? nullptr : &it->second;
}

Concept* CognitiveGraph::find_concept(const ConceptId& id) {
  auto it = concepts.find(id);
  return it == concepts.end() ? nullptr : &it->second;
}

const DependencyEdge* CognitiveGraph::find_edge(const EdgeId& id) const {
  auto it = edges.find(id);
  return it == edges.end() ? nullptr : &it->second;
}

DependencyEdge* CognitiveGraph::find_edge(const EdgeId& id) {
  auto it = edges.find(id);
  return it == edges.end() ? nullptr : &it->second;
}

const DependencyEdge* CognitiveGraph::find_live_edge(const ConceptId& source,
                                                     const ConceptId& target,
                                                     Relation relation) const {
  for (const auto& [id, e] : edges)
    if (is_live(e.status) && e.source == source && e.target == target && e.relation == relation)
      return &e;
  return nullptr;
}

namespace {

bool live_concept(const CognitiveGraph& g, const ConceptId& id) {
  const Concept* c = g.find_concept(id);
  return c != nullptr && is_live(c->status);
}

// Dense index over the live concepts, with successor lists in edge-id order.
struct Backbone {
  std::vector<ConceptId> ids;
  std::map<ConceptId, int> index;
  std::vector<std::vector<int>> succ;

  explicit Backbone(const CognitiveGraph& g) {
    for (const auto& [id, c] : g.concepts)
      if (is_live(c.status)) {
        index[id] = static_cast<int>(ids.size());
        ids.push_back(id);
      }
    succ.resize(ids.size());
    for (const DependencyEdge* e : backbone_edges(g))
      succ[index.at(e->source)].push_back(index.at(e->target));
  }
};

struct Tarjan {
  const Backbone& bb;
  std::vector<int> order, low;
  std::vector<bool> on_stack;
  std::vector<int> stack;
  int counter = 0;
  std::vector<std::vector<int>> components;

  explicit Tarjan(const Backbone& b)
      : bb(b), order(b.ids.size(), -1), low(b.ids.size(), 0), on_stack(b.ids.size(), false) {
    for (int v = 0; v < static_cast<int>(bb.ids.size()); ++v)
      if (order[v] == -1) visit(v);
  }

  void visit(int v) {
    order[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (int w : bb.succ[v]) {
      if (order[w] == -1) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], order[w]);
      }
    }
    if (low[v] == order[v]) {
      std::vector<int> comp;
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      components.push_back(std::move(comp));
    }
  }
};

bool weaker(const DependencyEdge& a, const DependencyEdge& b) {
  if (a.strength != b.strength) return a.strength < b.strength;
  if (a.created_turn != b.created_turn) return a.created_turn > b.created_turn;
  return a.id > b.id;
}

std::vector<std::string> tokens(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    std::transform(tok.begin(), tok.end(), tok.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    out.push_back(tok);
  }
  return out;
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

}  // namespace

std::vector<const DependencyEdge*> backbone_edges(const CognitiveGraph& graph) {
  std::vector<const DependencyEdge*> out;
  for (const auto& [id, e] : graph.edges)
    if (is_live(e.status) && e.source != e.target && live_concept(graph, e.source) &&
        live_concept(graph, e.target))
      out.push_back(&e);
  return out;
}

std::map<ConceptId, int> backbone_degree(const CognitiveGraph& graph) {
  std::map<ConceptId, int> degree;
  for (const auto& [id, c] : graph.concepts)
    if (is_live(c.status)) degree[id] = 0;
  for (const DependencyEdge* e : backbone_edges(graph)) {
    ++degree[e->source];
    ++degree[e->target];
  }
  return degree;
}

std::set<ConceptId> backbone_descendants(const CognitiveGraph& graph, const ConceptId& from) {
  std::map<ConceptId, std::vector<ConceptId>> succ;
  for (const DependencyEdge* e : backbone_edges(graph)) succ[e->source].push_back(e->target);
  std::set<ConceptId> seen;
  std::vector<ConceptId> todo{from};
  while (!todo.empty()) {
    ConceptId v = todo.back();
    todo.pop_back();
    for (const auto& w : succ[v])
      if (seen.insert(w).second) todo.push_back(w);
  }
  return seen;
}

double label_similarity(const std::string& a, const std::string& b) {
  auto ta = tokens(a), tb = tokens(b);
  std::set<std::string> sa(ta.begin(), ta.end()), sb(tb.begin(), tb.end());
  std::set<std::string> all = sa;
  all.insert(sb.begin(), sb.end());
  if (all.empty()) return 0.0;
  std::size_t common = 0;
  for (const auto& t : sa) common += sb.count(t);
  return static_cast<double>(common) / static_cast<double>(all.size());
}

ValidationReport validate_backbone(const CognitiveGraph& graph) {
  ValidationReport report;
  auto flag = [&](std::string name, std::vector<std::string> ids) {
    report.violations.push_back({std::move(name), std::move(ids)});
  };

  for (const auto& [id, c] : graph.concepts) {
    if (!(c.confidence >= 0.0 && c.confidence <= 1.0)) flag("confidence-range", {id});
    if (c.status == ItemStatus::grounded && c.evidence.empty())
      flag("grounded-without-evidence", {id});
    for (const auto& ev : c.evidence)
      if (!graph.evidence.count(ev)) flag("unknown-evidence", {id, ev});
  }
  for (const auto& [id, rec] : graph.evidence)
    if (!(rec.weight >= 0.0 && rec.weight <= 1.0)) flag("weight-range", {id});

  std::map<std::tuple<ConceptId, ConceptId, Relation>, std::vector<EdgeId>> triples;
  for (const auto& [id, e] : graph.edges) {
    for (const auto* endpoint : {&e.source, &e.target})
      if (!graph.concepts.count(*endpoint)) flag("dangling-endpoint", {id, *endpoint});
    if (!(e.strength >= 0.0 && e.strength <= 1.0)) flag("strength-range", {id});
    if (!is_live(e.status)) continue;
    if (e.source == e.target) flag("self-loop", {id});
    triples[{e.source, e.target, e.relation}].push_back(id);
    for (const auto* endpoint : {&e.source, &e.target}) {
      const Concept* c = graph.find_concept(*endpoint);
      if (c != nullptr && !is_live(c->status)) flag("cancelled-endpoint", {id, *endpoint});
    }
  }
  for (auto& [key, ids] : triples)
    if (ids.size() > 1) flag("duplicate-edge", ids);

  for (const auto& component : detect_cycles(graph)) {
    std::set<ConceptId> members(component.begin(), component.end());
    std::vector<std::string> ids;
    for (const DependencyEdge* e : backbone_edges(graph))
      if (members.count(e->source) && members.count(e->target)) ids.push_back(e->id);
    flag("backbone-cycle", ids);
  }

  report.ok = report.violations.empty();
  return report;
}

std::vector<std::vector<ConceptId>> detect_cycles(const CognitiveGraph& graph) {
  Backbone bb(graph);
  Tarjan tarjan(bb);
  std::vector<std::vector<ConceptId>> out;
  for (const auto& comp : tarjan.components) {
    if (comp.size() < 2) continue;
    std::vector<ConceptId> ids;
    for (int v : comp) ids.push_back(bb.ids[v]);
    std::sort(ids.begin(), ids.end());
    out.push_back(std::move(ids));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

std::vector<EdgeId> repair_cycles_in_place(CognitiveGraph& graph) {
  std::vector<EdgeId> removed;
  for (auto components = detect_cycles(graph); !components.empty();
       components = detect_cycles(graph)) {
    for (const auto& component : components) {
      std::set<ConceptId> members(component.begin(), component.end());
      const DependencyEdge* weakest = nullptr;
      for (const DependencyEdge* e : backbone_edges(graph))
        if (members.count(e->source) && members.count(e->target) &&
            (weakest == nullptr || weaker(*e, *weakest)))
          weakest = e;
      DependencyEdge& victim = graph.edges.at(weakest->id);
      victim.status = ItemStatus::cancelled;
      victim.rationale = victim.rationale.value_or("") +
                         (victim.rationale ? " " : "") + "[system: cancelled by cycle repair]";
      removed.push_back(victim.id);
    }
  }
  return removed;
}

RepairResult repair_cycles(CognitiveGraph graph) {
  auto removed = repair_cycles_in_place(graph);
  return {std::move(graph), std::move(removed)};
}

DependencyEdge attach_concept(const CognitiveGraph& graph, const Concept& incoming,
                              const ConceptId& focus) {
  auto eligible = [&](const ConceptId& id) { return id != incoming.id && live_concept(graph, id); };

  bool any = false;
  for (const auto& [id, c] : graph.concepts) any = any || eligible(id);
  if (!any) throw Error("no-anchor", "graph has no concept to anchor to");
  if (!eligible(focus)) throw Error("unknown-focus", focus);

  std::map<ConceptId, std::vector<ConceptId>> adj;
  for (const DependencyEdge* e : backbone_edges(graph)) {
    if (!eligible(e->source) || !eligible(e->target)) continue;
    adj[e->source].push_back(e->target);
    adj[e->target].push_back(e->source);
  }
  auto heuristic = [&](const ConceptId& id) {
    double h = 1.0 - label_similarity(graph.concepts.at(id).label, incoming.label);
    return std::clamp(h, 0.0, 1.0);
  };

  ConceptId anchor;
  if (incoming.slot) {
    // Slot-mates denote the same decision variable and always win.
    for (const auto& [id, c] : graph.concepts)
      if (eligible(id) && c.slot == incoming.slot) {
        anchor = id;
        break;
      }
  }

  if (anchor.empty()) {
    // A* towards a virtual goal joined to every node n with cost h(n); the
    // first goal popped is argmin(hops + h). Expansions sort before goals at
    // equal f so ties resolve to the smallest id.
    using Entry = std::tuple<double, int, ConceptId, int>;  // f, is_goal, id, g
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    std::set<ConceptId> closed;
    open.emplace(heuristic(focus), 0, focus, 0);
    while (!open.empty()) {
      auto [f, is_goal, id, g] = open.top();
      open.pop();
      if (is_goal) {
        anchor = id;
        break;
      }
      if (!closed.insert(id).second) continue;
      open.emplace(static_cast<double>(g) + heuristic(id), 1, id, g);
      for (const auto& next : adj[id])
        if (!closed.count(next))
          open.emplace(static_cast<double>(g + 1) + heuristic(next), 0, next, g + 1);
    }
  }

  DependencyEdge edge;
  edge.source = anchor;
  edge.target = incoming.id;
  edge.relation = Relation::enable;
  edge.strength = 0.5;
  edge.status = ItemStatus::candidate;
  edge.provenance = incoming.provenance;
  edge.created_turn = graph.turn_counter;
  edge.rationale = "anchored near " + focus;
  return edge;
}

void merge_concepts(CognitiveGraph& graph, const ConceptId& keep_id, const ConceptId& drop_id) {
  Concept* keep_ptr = graph.find_concept(keep_id);
  Concept* drop_ptr = graph.find_concept(drop_id);
  if (keep_ptr == nullptr || drop_ptr == nullptr || keep_id == drop_id ||
      !is_live(keep_ptr->status) || !is_live(drop_ptr->status))
    throw Error("unknown-target", keep_id + " <- " + drop_id);
  Concept& keep = *keep_ptr;
  Concept& drop = *drop_ptr;

  keep.confidence = std::max(keep.confidence, drop.confidence);
  std::set<EvidenceId> ev(keep.evidence.begin(), keep.evidence.end());
  ev.insert(drop.evidence.begin(), drop.evidence.end());
  keep.evidence.assign(ev.begin(), ev.end());
  for (const auto& ev_id : drop.evidence) {
    auto it = graph.evidence.find(ev_id);
    if (it != graph.evidence.end()) it->second.target = keep.id;
  }
  drop.evidence.clear();
  drop.status = ItemStatus::cancelled;

  for (auto& [eid, e] : graph.edges) {
    if (!is_live(e.status) || (e.source != drop.id && e.target != drop.id)) continue;
    if (e.source == drop.id) e.source = keep.id;
    if (e.target == drop.id) e.target = keep.id;
    if (e.source == e.target) {
      e.status = ItemStatus::cancelled;
      continue;
    }
    for (auto& [oid, other] : graph.edges) {
      if (oid == eid || !is_live(other.status) || other.source != e.source ||
          other.target != e.target || other.relation != e.relation)
        continue;
      other.strength = std::max(other.strength, e.strength);
      e.status = ItemStatus::cancelled;
      break;
    }
  }
  for (auto& [xid, x] : graph.conflicts) {
    if (x.a == drop.id) x.a = keep.id;
    if (x.b == drop.id) x.b = keep.id;
    if (x.a == x.b && x.status == ConflictStatus::open) x.status = ConflictStatus::resolved;
  }
}

std::vector<Merge> compact_singletons_in_place(CognitiveGraph& graph) {
  std::map<std::string, std::vector<ConceptId>> candidates, grounded;
  for (const auto& [id, c] : graph.concepts) {
    if (!c.slot) continue;
    if (c.status == ItemStatus::candidate && c.provenance != Provenance::transfer_based)
      candidates[*c.slot].push_back(id);
    if (c.status == ItemStatus::grounded) grounded[*c.slot].push_back(id);
  }

  std::vector<Merge> merges;
  for (const auto& [slot, cands] : candidates) {
    auto g = grounded.find(slot);
    if (cands.size() != 1 || g == grounded.end() || g->second.size() != 1) continue;
    const Concept& keep = graph.concepts.at(g->second.front());
    const Concept& drop = graph.concepts.at(cands.front());
    if (drop.value && keep.value && lowercase(*drop.value) != lowercase(*keep.value)) continue;
    if (drop.value && !keep.value) continue;
    merges.push_back({keep.id, drop.id});
    merge_concepts(graph, keep.id, drop.id);
  }
  return merges;
}

CognitiveGraph compact_singletons(CognitiveGraph graph) {
  compact_singletons_in_place(graph);
  return graph;
}

std::vector<ConceptId> topological_order(const CognitiveGraph& graph) {
  std::map<ConceptId, int> indegree;
  std::map<ConceptId, std::vector<ConceptId>> succ;
  for (const auto& [id, c] : graph.concepts)
    if (is_live(c.status)) indegree[id] = 0;
  for (const DependencyEdge* e : backbone_edges(graph)) {
    succ[e->source].push_back(e->target);
    ++indegree[e->target];
  }
  std::set<ConceptId> ready;
  for (const auto& [id, d] : indegree)
    if (d == 0) ready.insert(id);
  std::vector<ConceptId> order;
  while (!ready.empty()) {
    ConceptId v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(v);
    for (const auto& w : succ[v])
      if (--indegree[w] == 0) ready.insert(w);
  }
  if (order.size() != indegree.size()) throw Error("cyclic-backbone");
  return order;
}

}  // namespace cog
