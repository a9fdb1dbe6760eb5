#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cog/graph.hpp"

namespace cog {

struct RoleSpec {
  std::string role;
  std::optional<ConceptKind> kind;
  std::optional<std::string> slot;

  bool operator==(const RoleSpec&) const = default;
};

struct EdgeTemplate {
  std::string from;
  std::string to;
  Relation relation = Relation::enable;

  bool operator==(const EdgeTemplate&) const = default;
};

/// Reusable, task-independent reasoning pattern: roles, typed edges between
/// roles and the reasoning function they express.
struct MotifPattern {
  std::string name;
  TaxonomyClass taxonomy_class = TaxonomyClass::constraint;
  std::vector<RoleSpec> roles;
  std::vector<EdgeTemplate> edges;
  std::string reasoning_function;
  int usage_count = 0;

  bool operator==(const MotifPattern&) const = default;
};

using Vocabulary = std::vector<MotifPattern>;

struct MotifTransition {
  MotifEvent event = MotifEvent::confirm;
  EventOrigin origin = EventOrigin::system;
  MotifStatus from = MotifStatus::uncertain;
  MotifStatus to = MotifStatus::uncertain;
  int turn = 0;

  bool operator==(const MotifTransition&) const = default;
};

/// A pattern bound to concrete concepts of one task.
struct MotifInstance {
  MotifId id;
  std::string pattern;
  TaxonomyClass taxonomy_class = TaxonomyClass::constraint;
  std::string reasoning_function;
  std::map<std::string, ConceptId> bindings;  // role → concept
  std::vector<EdgeId> edges;                  // one per edge template, in template order
  MotifStatus status = MotifStatus::uncertain;
  Provenance provenance = Provenance::user_confirmed;
  TaskId task_id;
  std::string rationale;
  std::vector<MotifTransition> history;

  std::vector<ConceptId> concept_ids() const;  // sorted, distinct
  bool operator==(const MotifInstance&) const = default;
};

struct PatternUse {
  std::string pattern;
  TaskId source_task;
  bool adopted = false;

  bool operator==(const PatternUse&) const = default;
};

struct MotifLibrary {
  std::map<std::string, MotifPattern> patterns;
  std::vector<PatternUse> pattern_history;

  bool operator==(const MotifLibrary&) const = default;
};

struct TransferCandidate {
  std::string id;
  std::string pattern;
  std::map<std::string, ConceptId> proposed_bindings;
  TransferStatus status = TransferStatus::uncertain;
  Provenance provenance = Provenance::transfer_based;
  TaskId source_task;
  TaskId task_id;
  double score = 0.0;

  bool operator==(const TransferCandidate&) const = default;
};

/// Throws Error("bad-pattern") unless the pattern has ≥2 roles, ≥1 edge
/// template, and every template names declared roles.
void validate_pattern(const MotifPattern& pattern);

Vocabulary load_vocabulary(const std::filesystem::path& path);

/// Every maximal binding of each pattern onto grounded concepts joined by
/// grounded edges of the required relations. Returned instances are
/// uncertain, unnamed (empty id) and not yet task-bound.
std::vector<MotifInstance> match_motifs(const CognitiveGraph& graph, std::span<const MotifPattern> vocabulary);

/// Applies one lifecycle event. Throws Error("invalid-transition").
MotifInstance update_motif_status(MotifInstance instance, MotifEvent event,
                                  EventOrigin origin = EventOrigin::system, int turn = 0);

/// Status after `event`, or nullopt when the transition is illegal.
std::optional<MotifStatus> next_motif_status(MotifStatus from, MotifEvent event, EventOrigin origin);

/// Lifts an active instance to a pattern with kind/slot filters and no
/// task-specific content. Throws Error("not-validated") otherwise.
MotifPattern abstract_motif(const MotifInstance& instance, const CognitiveGraph& graph);

/// Adds the pattern (or bumps its usage count) and records where it came from.
void store_pattern(MotifLibrary& library, const MotifPattern& pattern, const TaskId& source_task,
                   bool adopted = false);

/// Number of roles whose slot filter appears among the context slots.
int slot_overlap(const MotifPattern& pattern, std::span<const Concept> task_context);

/// Patterns with slot overlap ≥ 1, ranked by overlap + 0.1·log(1 + usage).
std::vector<TransferCandidate> retrieve_transfer_candidates(const MotifLibrary& library,
                                                            std::span<const Concept> task_context);

}  // namespace cog
