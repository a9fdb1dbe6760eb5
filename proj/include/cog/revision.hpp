#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "cog/clarification.hpp"
#include "cog/extraction.hpp"
#include "cog/graph.hpp"
#include "cog/layout.hpp"
#include "cog/motif.hpp"

namespace cog {

/// Assistant-authored or co-authored planning artifact. Opaque text with
/// concept citations.
struct PlanItem {
  PlanItemId id;
  PlanItemKind kind = PlanItemKind::draft;
  std::string text;
  std::vector<ConceptId> cites;
  Provenance provenance = Provenance::assistant_proposed;
  bool promoted = false;
  int turn = 0;

  bool operator==(const PlanItem&) const = default;
};

struct TaskPlanState {
  std::vector<PlanItem> drafts;
  std::vector<PlanItem> comparisons;
  std::vector<PlanItem> notes;
  std::vector<PlanItem> open_questions;

  std::vector<PlanItem>& list(PlanItemKind kind);
  const std::vector<PlanItem>& list(PlanItemKind kind) const;
  const PlanItem* find(const PlanItemId& id) const;
  PlanItem* find(const PlanItemId& id);
  std::size_t size() const;
  bool operator==(const TaskPlanState&) const = default;
};

struct TaskRecord {
  TaskId task_id;
  int start_turn = 0;
  std::optional<int> end_turn;

  bool operator==(const TaskRecord&) const = default;
};

/// User-grounded layer.
struct CognitiveState {
  CognitiveGraph graph;
  std::map<MotifId, MotifInstance> motifs;
  std::map<std::string, TransferCandidate> transfer_candidates;
  std::map<ProbeId, Probe> probes;
  std::vector<TaskRecord> task_history;
  MotifLibrary library;

  bool operator==(const CognitiveState&) const = default;
};

// ---- patch operations -------------------------------------------------------

struct AddConcept { Concept node; bool operator==(const AddConcept&) const = default; };
struct AddEdge { DependencyEdge edge; bool operator==(const AddEdge&) const = default; };
struct AddConflict { ConflictEdge conflict; bool operator==(const AddConflict&) const = default; };
/// Stores the record and fuses it into the target's confidence (concept) or strength (edge).
struct AddEvidence { EvidenceRecord record; bool operator==(const AddEvidence&) const = default; };
struct SetConfidence { ConceptId target; double value = 0.0; bool operator==(const SetConfidence&) const = default; };
struct SetStrength { EdgeId target; double value = 0.0; bool operator==(const SetStrength&) const = default; };
/// Concept or edge status.
struct SetStatus { std::string target; ItemStatus status = ItemStatus::candidate; bool operator==(const SetStatus&) const = default; };
struct SetLabel {
  ConceptId target;
  std::string label;
  std::optional<std::string> slot;
  std::optional<std::string> value;
  std::string rationale;  // previous values, kept for traceability
  bool operator==(const SetLabel&) const = default;
};
struct MergeConcepts { ConceptId keep; ConceptId drop; bool operator==(const MergeConcepts&) const = default; };
struct BindMotif { MotifInstance instance; bool operator==(const BindMotif&) const = default; };
struct SetMotifStatus {
  MotifId target;
  MotifEvent event = MotifEvent::confirm;
  EventOrigin origin = EventOrigin::user;
  bool operator==(const SetMotifStatus&) const = default;
};
struct AddPlanItem { PlanItem item; bool operator==(const AddPlanItem&) const = default; };
struct RetagPlanItem {
  PlanItemId target;
  Provenance provenance = Provenance::co_authored;
  bool promoted = true;
  bool operator==(const RetagPlanItem&) const = default;
};
struct AnswerProbe {
  ProbeId target;
  Verdict verdict = Verdict::defer;
  std::optional<std::string> detail;
  bool operator==(const AnswerProbe&) const = default;
};
struct SetTransferStatus {
  std::string target;
  TransferStatus status = TransferStatus::uncertain;
  bool operator==(const SetTransferStatus&) const = default;
};

/// Confirmation of transferred content: the item becomes co-authored.
struct SetProvenance {
  std::string target;
  Provenance provenance = Provenance::co_authored;
  bool operator==(const SetProvenance&) const = default;
};

enum class EntityKind { node, edge, conflict, evidence, motif, plan_item, probe, transfer };
std::string_view to_string(EntityKind v);

using EntityImage = std::variant<std::monostate, Concept, DependencyEdge, ConflictEdge, EvidenceRecord,
                                 MotifInstance, PlanItem, Probe, TransferCandidate>;

/// Inverse-only op: puts an entity back to a before-image (monostate erases it).
struct Restore {
  EntityKind entity = EntityKind::node;
  std::string id;
  EntityImage before;
  bool operator==(const Restore&) const = default;
};

using PatchOp = std::variant<AddConcept, AddEdge, AddConflict, AddEvidence, SetConfidence, SetStrength,
                             SetStatus, SetLabel, MergeConcepts, BindMotif, SetMotifStatus, AddPlanItem,
                             RetagPlanItem, AnswerProbe, SetTransferStatus, SetProvenance, Restore>;

std::string_view op_name(const PatchOp& op);

/// Ids an op creates or modifies, plus ids it depends on (edge endpoints,
/// evidence targets).
std::vector<std::string> referenced_ids(const PatchOp& op);

struct GraphPatch {
  PatchId id;
  std::vector<PatchOp> ops;
  PatchOrigin origin = PatchOrigin::user_edit;
  int turn = 0;

  bool operator==(const GraphPatch&) const = default;
};

struct PatchDiff {
  std::set<ConceptId> affected_concepts;
  std::set<EdgeId> affected_edges;
  std::set<MotifId> affected_motifs;
  std::set<PlanItemId> downstream_plan_items;
  PatchScope scope = PatchScope::local;

  bool operator==(const PatchDiff&) const = default;
};

struct PendingReview {
  GraphPatch patch;
  PatchDiff diff;

  bool operator==(const PendingReview&) const = default;
};

struct SessionState {
  CognitiveState cognitive;
  TaskPlanState plan;
  TaskId task_id;
  int task_start_turn = 0;
  int turn = 0;
  std::optional<PendingReview> pending_review;
  bool probe_budget_used = false;
  int patch_counter = 0;
  std::optional<LayoutSnapshot> layout;

  bool operator==(const SessionState&) const = default;
};

struct ScopeConfig {
  int max_local_items = 2;
  bool determine_veto = true;
  bool active_motif_veto = true;

  bool operator==(const ScopeConfig&) const = default;
};

struct RuntimeConfig {
  ClarificationConfig clarification;
  GroundingConfig grounding;
  ScopeConfig scope;
  Vocabulary vocabulary;
  ProbeTemplates templates = ProbeTemplates::defaults();
  std::string vocabulary_version = "seed-1";

  bool operator==(const RuntimeConfig&) const = default;
};

// ---- patch application ------------------------------------------------------

/// Applies all ops or none. Returns the inverse patch (Restore ops).
GraphPatch apply_patch(SessionState& state, const GraphPatch& patch, const GroundingConfig& grounding = {});

// ---- compilation ------------------------------------------------------------

struct TurnInputs {
  std::optional<Utterance> utterance;
  /// Logged extractor output for the utterance, or for a refine detail when
  /// there is no utterance.
  std::optional<ExtractionResult> extraction;
  std::optional<ProbeResponse> response;
  std::vector<PatchOp> edits;
  /// Assistant plan artifacts; when empty an assistant utterance becomes one draft.
  std::vector<PlanItem> plan_items;
};

/// Merges one turn's inputs into a single ordered patch: direct edits, then
/// clarification effects, then extraction candidates. Assistant content only
/// reaches the task-plan layer (plus evidence on existing concepts).
GraphPatch compile_turn_to_patch(const TurnInputs& inputs, const SessionState& state,
                                 const RuntimeConfig& config);

PatchDiff compute_diff(const GraphPatch& patch, const SessionState& state, const RuntimeConfig& config = {});

// ---- commit / review --------------------------------------------------------

struct MotifChange {
  MotifId motif;
  MotifEvent event = MotifEvent::confirm;
  MotifStatus from = MotifStatus::uncertain;
  MotifStatus to = MotifStatus::uncertain;

  bool operator==(const MotifChange&) const = default;
};

/// What the commit pipeline derived from a patch beyond its own ops.
struct CommitEffects {
  std::vector<EdgeId> cascaded_edges;
  std::vector<Merge> merges;
  std::vector<std::string> grounded;
  std::vector<ConflictId> conflicts_opened;
  std::vector<EdgeId> removed_edges;
  std::vector<MotifId> motifs_bound;
  std::vector<MotifChange> motif_changes;
  std::vector<std::string> transfer_candidates;
  std::set<ConceptId> layout_touched;

  bool operator==(const CommitEffects&) const = default;
};

struct CommitRecord {
  GraphPatch patch;
  PatchDiff diff;
  std::string approval;  // auto | review | clarification_answer | promotion | transfer_uptake
  CommitEffects effects;

  bool operator==(const CommitRecord&) const = default;
};

/// Applies the patch then runs singleton compaction, grounding, cycle repair
/// and motif maintenance. Non-local patches need an approval label, otherwise
/// Error("approval-required").
CommitRecord commit_patch(SessionState& state, const GraphPatch& patch, const RuntimeConfig& config,
                          const std::optional<std::string>& approval = std::nullopt);

/// Parks a non-local patch for review. Error("review-in-progress") when one is pending.
void surface_patch(SessionState& state, const GraphPatch& patch, const PatchDiff& diff);

/// Commits the pending patch minus ops that reference any excluded id.
CommitRecord approve_pending(SessionState& state, const PatchId& patch_id, const std::set<std::string>& exclude,
                             const RuntimeConfig& config);
void reject_pending(SessionState& state, const PatchId& patch_id);

/// Commits local patches, surfaces the rest.
struct RouteOutcome {
  std::optional<CommitRecord> committed;
  std::optional<PendingReview> surfaced;
};
RouteOutcome route_patch(SessionState& state, const GraphPatch& patch, const RuntimeConfig& config,
                         const std::optional<std::string>& approval = std::nullopt);

// ---- revision ---------------------------------------------------------------

enum class RevisionKind { node, confidence, structure };

struct ConceptRevision {
  ConceptId target;
  std::optional<std::string> label;
  std::optional<std::string> slot;
  std::optional<std::string> value;
  std::optional<ItemStatus> status;              // deprecated or cancelled
  std::optional<std::string> scoped_condition;   // context-bounded qualification
};

struct ConfidenceRevision {
  ConceptId target;
  double value = 0.0;
};

struct StructureRevision {
  enum class Action { add, cancel, retype, strength };
  Action action = Action::add;
  std::optional<EdgeId> edge;
  std::optional<ConceptId> source;
  std::optional<ConceptId> target;
  std::optional<Relation> relation;
  std::optional<double> strength;
  std::optional<std::string> rationale;
};

using RevisionPayload = std::variant<ConceptRevision, ConfidenceRevision, StructureRevision>;

/// Drafts (does not commit) a revision patch. Error("no-op-revision") when
/// nothing would change, Error("unknown-target") for missing ids.
GraphPatch revise(const SessionState& state, RevisionKind kind, const RevisionPayload& payload);

// ---- clarification in session context ---------------------------------------

ImpactScore score_impact(const MotifInstance& motif, const SessionState& state, const ClarificationConfig& config);

struct ResponseOutcome {
  std::optional<CommitRecord> committed;
  std::optional<PendingReview> surfaced;
};

/// confirm → motif confirmed plus clarification evidence on bound items;
/// weaken → bound strengths scaled by the weaken factor; refine → structure
/// patch drafted from the detail's extraction; defer → probe marked answered.
ResponseOutcome apply_response(SessionState& state, const ProbeResponse& response, const RuntimeConfig& config,
                               const std::optional<ExtractionResult>& detail_extraction = std::nullopt);

/// Issues at most one probe for the current turn.
std::optional<Probe> maybe_issue_probe(SessionState& state, const RuntimeConfig& config);

// ---- layer promotion and transfer -------------------------------------------

struct Confirmation {
  PlanItemId item;
  EventOrigin origin = EventOrigin::user;
};

/// Rule-based reading of a confirmed plan item; a cue-less text still yields
/// one preference concept.
ExtractionResult extract_plan_item(const PlanItem& item, int turn);

/// Re-extracts the plan item into the cognitive layer as user-confirmed
/// content. Returns nothing when the item was already promoted.
std::optional<CommitRecord> promote_to_cognitive(SessionState& state, const PlanItemId& item,
                                                 const std::optional<Confirmation>& confirmation,
                                                 const RuntimeConfig& config,
                                                 const std::optional<ExtractionResult>& extraction = std::nullopt);

/// Adopt: binds the pattern in the current task (placeholders for unbound
/// roles), status uncertain, provenance transfer_based. Reject: marks it rejected.
CommitRecord decide_transfer(SessionState& state, const std::string& candidate, bool adopt,
                             const RuntimeConfig& config);

/// Opens a new task; the turn advances.
void start_task(SessionState& state, const TaskId& task_id);

/// Closes the current task and abstracts its active motifs into the library.
std::vector<std::string> end_task(SessionState& state);

/// Live concepts created in the current task, excluding transfer placeholders.
std::vector<Concept> task_context(const SessionState& state);

}  // namespace cog
