#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cog/types.hpp"

namespace cog {

/// Minimal typed semantic unit of the reasoning graph.
struct Concept {
  ConceptId id;
  ConceptKind kind = ConceptKind::belief;
  std::string label;
  std::optional<std::string> slot;
  std::optional<std::string> value;
  double confidence = 0.0;
  Provenance provenance = Provenance::user_confirmed;
  ItemStatus status = ItemStatus::candidate;
  int created_turn = 0;
  std::vector<EvidenceId> evidence;  // kept sorted

  bool operator==(const Concept&) const = default;
};

/// Directed typed causal link. Non-cancelled edges form the backbone.
struct DependencyEdge {
  EdgeId id;
  ConceptId source;
  ConceptId target;
  Relation relation = Relation::enable;
  double strength = 0.5;
  ItemStatus status = ItemStatus::candidate;
  Provenance provenance = Provenance::user_confirmed;
  std::optional<std::string> rationale;
  int created_turn = 0;

  bool operator==(const DependencyEdge&) const = default;
};

/// Undirected tension record; never part of the backbone.
struct ConflictEdge {
  ConflictId id;
  ConceptId a;
  ConceptId b;
  std::string description;
  ConflictStatus status = ConflictStatus::open;

  bool operator==(const ConflictEdge&) const = default;
};

struct EvidenceRecord {
  EvidenceId id;
  std::string target;  // concept or edge id
  int turn = 0;
  EvidenceSource source = EvidenceSource::user_statement;
  double weight = 0.0;

  bool operator==(const EvidenceRecord&) const = default;
};

struct CognitiveGraph {
  std::map<ConceptId, Concept> concepts;
  std::map<EdgeId, DependencyEdge> edges;
  std::map<ConflictId, ConflictEdge> conflicts;
  std::map<EvidenceId, EvidenceRecord> evidence;
  int turn_counter = 0;

  bool operator==(const CognitiveGraph&) const = default;

  const Concept* find_concept(const ConceptId& id) const;
  Concept* find_concept(const ConceptId& id);
  const DependencyEdge* find_edge(const EdgeId& id) const;
  DependencyEdge* find_edge(const EdgeId& id);

  /// Non-cancelled edge with the given typed endpoints, if any.
  const DependencyEdge* find_live_edge(const ConceptId& source, const ConceptId& target,
                                       Relation relation) const;
};

struct Violation {
  std::string invariant;
  std::vector<std::string> ids;

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
};

inline bool is_live(ItemStatus s) { return s != ItemStatus::cancelled; }

/// Edges of the backbone: non-cancelled, both endpoints present.
std::vector<const DependencyEdge*> backbone_edges(const CognitiveGraph& graph);

/// Undirected backbone degree of each non-cancelled concept.
std::map<ConceptId, int> backbone_degree(const CognitiveGraph& graph);

/// All concepts reachable from `from` along backbone edges, excluding `from`
/// unless it lies on a cycle.
std::set<ConceptId> backbone_descendants(const CognitiveGraph& graph, const ConceptId& from);

/// Jaccard overlap of lowercased whitespace tokens; 0 when both are empty.
double label_similarity(const std::string& a, const std::string& b);

ValidationReport validate_backbone(const CognitiveGraph& graph);

/// Strongly connected components of the backbone with at least two members,
/// each sorted, ordered by smallest member.
std::vector<std::vector<ConceptId>> detect_cycles(const CognitiveGraph& graph);

struct RepairResult {
  CognitiveGraph graph;
  std::vector<EdgeId> removed;
};

/// Cancels the weakest edge inside each cyclic component until the backbone
/// is acyclic. Weakest = minimum strength, then latest created_turn, then
/// largest id.
RepairResult repair_cycles(CognitiveGraph graph);
std::vector<EdgeId> repair_cycles_in_place(CognitiveGraph& graph);

/// Proposes the anchor edge for a concept that has no backbone edges yet.
/// Does not mutate the graph.
DependencyEdge attach_concept(const CognitiveGraph& graph, const Concept& incoming,
                              const ConceptId& focus);

struct Merge {
  ConceptId keep;
  ConceptId drop;

  bool operator==(const Merge&) const = default;
};

/// Folds `drop` into `keep`: evidence and incident edges move over, the
/// resulting self-loops and duplicate triples are cancelled (duplicates boost
/// the surviving strength), and `drop` is left as a cancelled tombstone.
void merge_concepts(CognitiveGraph& graph, const ConceptId& keep, const ConceptId& drop);

/// Merges a lone candidate into the lone grounded concept of the same slot.
/// Transfer placeholders are never merged.
CognitiveGraph compact_singletons(CognitiveGraph graph);
std::vector<Merge> compact_singletons_in_place(CognitiveGraph& graph);

/// Kahn order over non-cancelled concepts, ties by id. Throws
/// Error("cyclic-backbone") when the backbone has a cycle.
std::vector<ConceptId> topological_order(const CognitiveGraph& graph);

}  // namespace cog
