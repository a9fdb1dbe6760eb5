#include "cog/serialization.hpp"

#include <openssl/evp.h>

#include <array>

namespace cog {

namespace {

template <typename T>
void put_opt(Json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename T>
void read(const Json& j, const char* key, T& out) {
  if (!j.is_object()) throw Error("parse-failure", std::string("expected object holding '") + key + "'");
  auto it = j.find(key);
  if (it != j.end() && !it->is_null()) it->get_to(out);
}

template <typename T>
void read_opt(const Json& j, const char* key, std::optional<T>& out) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    out.reset();
    return;
  }
  out = it->get<T>();
}

template <typename T>
void require(const Json& j, const char* key, T& out) {
  if (!j.is_object() || !j.contains(key)) throw Error("parse-failure", std::string("missing field '") + key + "'");
  j.at(key).get_to(out);
}

}  // namespace

// ---- graph ------------------------------------------------------------------

void to_json(Json& j, const Concept& v) {
  j = Json{{"id", v.id},
           {"kind", v.kind},
           {"label", v.label},
           {"confidence", v.confidence},
           {"provenance", v.provenance},
           {"status", v.status},
           {"created_turn", v.created_turn},
           {"evidence", v.evidence}};
  put_opt(j, "slot", v.slot);
  put_opt(j, "value", v.value);
}

void from_json(const Json& j, Concept& v) {
  require(j, "id", v.id);
  read(j, "kind", v.kind);
  read(j, "label", v.label);
  read_opt(j, "slot", v.slot);
  read_opt(j, "value", v.value);
  read(j, "confidence", v.confidence);
  read(j, "provenance", v.provenance);
  read(j, "status", v.status);
  read(j, "created_turn", v.created_turn);
  read(j, "evidence", v.evidence);
}

void to_json(Json& j, const DependencyEdge& v) {
  j = Json{{"id", v.id},         {"source", v.source}, {"target", v.target},         {"relation", v.relation},
           {"strength", v.strength}, {"status", v.status}, {"provenance", v.provenance}, {"created_turn", v.created_turn}};
  put_opt(j, "rationale", v.rationale);
}

void from_json(const Json& j, DependencyEdge& v) {
  require(j, "id", v.id);
  require(j, "source", v.source);
  require(j, "target", v.target);
  read(j, "relation", v.relation);
  read(j, "strength", v.strength);
  read(j, "status", v.status);
  read(j, "provenance", v.provenance);
  read_opt(j, "rationale", v.rationale);
  read(j, "created_turn", v.created_turn);
}

void to_json(Json& j, const ConflictEdge& v) {
  j = Json{{"id", v.id}, {"a", v.a}, {"b", v.b}, {"description", v.description}, {"status", v.status}};
}

void from_json(const Json& j, ConflictEdge& v) {
  require(j, "id", v.id);
  require(j, "a", v.a);
  require(j, "b", v.b);
  read(j, "description", v.description);
  read(j, "status", v.status);
}

void to_json(Json& j, const EvidenceRecord& v) {
  j = Json{{"id", v.id}, {"target", v.target}, {"turn", v.turn}, {"source", v.source}, {"weight", v.weight}};
}

void from_json(const Json& j, EvidenceRecord& v) {
  require(j, "id", v.id);
  require(j, "target", v.target);
  read(j, "turn", v.turn);
  read(j, "source", v.source);
  read(j, "weight", v.weight);
}

void to_json(Json& j, const CognitiveGraph& v) {
  j = Json{{"concepts", v.concepts},
           {"edges", v.edges},
           {"conflicts", v.conflicts},
           {"evidence", v.evidence},
           {"turn_counter", v.turn_counter}};
}

void from_json(const Json& j, CognitiveGraph& v) {
  read(j, "concepts", v.concepts);
  read(j, "edges", v.edges);
  read(j, "conflicts", v.conflicts);
  read(j, "evidence", v.evidence);
  read(j, "turn_counter", v.turn_counter);
  for (const auto& [id, c] : v.concepts)
    if (c.id != id) throw Error("parse-failure", "concept key " + id + " does not match its id");
  for (const auto& [id, e] : v.edges)
    if (e.id != id) throw Error("parse-failure", "edge key " + id + " does not match its id");
}

// ---- extraction -------------------------------------------------------------

void to_json(Json& j, const Utterance& v) { j = Json{{"turn", v.turn}, {"speaker", v.speaker}, {"text", v.text}}; }

void from_json(const Json& j, Utterance& v) {
  read(j, "turn", v.turn);
  read(j, "speaker", v.speaker);
  require(j, "text", v.text);
}

void to_json(Json& j, const ConceptCandidate& v) {
  j = Json{{"concept", v.node}, {"source_turn", v.source_turn}, {"extractor", v.extractor}};
}

void from_json(const Json& j, ConceptCandidate& v) {
  require(j, "concept", v.node);
  read(j, "source_turn", v.source_turn);
  read(j, "extractor", v.extractor);
}

void to_json(Json& j, const DependencyCandidate& v) {
  j = Json{{"edge", v.edge}, {"causal_kind", v.causal_kind}, {"source_turn", v.source_turn}};
}

void from_json(const Json& j, DependencyCandidate& v) {
  require(j, "edge", v.edge);
  read(j, "causal_kind", v.causal_kind);
  read(j, "source_turn", v.source_turn);
}

void to_json(Json& j, const ConflictHint& v) { j = Json{{"a", v.a}, {"b", v.b}, {"description", v.description}}; }

void from_json(const Json& j, ConflictHint& v) {
  require(j, "a", v.a);
  require(j, "b", v.b);
  read(j, "description", v.description);
}

void to_json(Json& j, const ExtractionResult& v) {
  j = Json{{"concepts", v.concepts}, {"dependencies", v.dependencies}};
  if (!v.conflicts.empty()) j["conflicts"] = v.conflicts;
  if (!v.deprecations.empty()) j["deprecations"] = v.deprecations;
}

void from_json(const Json& j, ExtractionResult& v) {
  read(j, "concepts", v.concepts);
  read(j, "dependencies", v.dependencies);
  read(j, "conflicts", v.conflicts);
  read(j, "deprecations", v.deprecations);
}

// ---- motifs -----------------------------------------------------------------

void to_json(Json& j, const RoleSpec& v) {
  j = Json{{"role", v.role}};
  put_opt(j, "kind", v.kind);
  put_opt(j, "slot", v.slot);
}

void from_json(const Json& j, RoleSpec& v) {
  require(j, "role", v.role);
  read_opt(j, "kind", v.kind);
  read_opt(j, "slot", v.slot);
}

void to_json(Json& j, const EdgeTemplate& v) { j = Json{{"from", v.from}, {"to", v.to}, {"relation", v.relation}}; }

void from_json(const Json& j, EdgeTemplate& v) {
  require(j, "from", v.from);
  require(j, "to", v.to);
  require(j, "relation", v.relation);
}

void to_json(Json& j, const MotifPattern& v) {
  j = Json{{"name", v.name},   {"taxonomy_class", v.taxonomy_class},         {"roles", v.roles},
           {"edges", v.edges}, {"reasoning_function", v.reasoning_function}, {"usage_count", v.usage_count}};
}

void from_json(const Json& j, MotifPattern& v) {
  require(j, "name", v.name);
  read(j, "taxonomy_class", v.taxonomy_class);
  require(j, "roles", v.roles);
  require(j, "edges", v.edges);
  read(j, "reasoning_function", v.reasoning_function);
  read(j, "usage_count", v.usage_count);
}

void to_json(Json& j, const MotifTransition& v) {
  j = Json{{"event", v.event}, {"origin", v.origin}, {"from", v.from}, {"to", v.to}, {"turn", v.turn}};
}

void from_json(const Json& j, MotifTransition& v) {
  read(j, "event", v.event);
  read(j, "origin", v.origin);
  read(j, "from", v.from);
  read(j, "to", v.to);
  read(j, "turn", v.turn);
}

void to_json(Json& j, const MotifInstance& v) {
  j = Json{{"id", v.id},
           {"pattern", v.pattern},
           {"taxonomy_class", v.taxonomy_class},
           {"reasoning_function", v.reasoning_function},
           {"bindings", v.bindings},
           {"edges", v.edges},
           {"status", v.status},
           {"provenance", v.provenance},
           {"task_id", v.task_id},
           {"rationale", v.rationale},
           {"history", v.history}};
}

void from_json(const Json& j, MotifInstance& v) {
  read(j, "id", v.id);
  require(j, "pattern", v.pattern);
  read(j, "taxonomy_class", v.taxonomy_class);
  read(j, "reasoning_function", v.reasoning_function);
  require(j, "bindings", v.bindings);
  require(j, "edges", v.edges);
  read(j, "status", v.status);
  read(j, "provenance", v.provenance);
  read(j, "task_id", v.task_id);
  read(j, "rationale", v.rationale);
  read(j, "history", v.history);
}

void to_json(Json& j, const PatternUse& v) {
  j = Json{{"pattern", v.pattern}, {"source_task", v.source_task}, {"adopted", v.adopted}};
}

void from_json(const Json& j, PatternUse& v) {
  require(j, "pattern", v.pattern);
  read(j, "source_task", v.source_task);
  read(j, "adopted", v.adopted);
}

void to_json(Json& j, const MotifLibrary& v) {
  j = Json{{"patterns", v.patterns}, {"pattern_history", v.pattern_history}};
}

void from_json(const Json& j, MotifLibrary& v) {
  read(j, "patterns", v.patterns);
  read(j, "pattern_history", v.pattern_history);
}

void to_json(Json& j, const TransferCandidate& v) {
  j = Json{{"id", v.id},
           {"pattern", v.pattern},
           {"proposed_bindings", v.proposed_bindings},
           {"status", v.status},
           {"provenance", v.provenance},
           {"source_task", v.source_task},
           {"task_id", v.task_id},
           {"score", v.score}};
}

void from_json(const Json& j, TransferCandidate& v) {
  require(j, "id", v.id);
  require(j, "pattern", v.pattern);
  read(j, "proposed_bindings", v.proposed_bindings);
  read(j, "status", v.status);
  read(j, "provenance", v.provenance);
  read(j, "source_task", v.source_task);
  read(j, "task_id", v.task_id);
  read(j, "score", v.score);
}

// ---- configuration ----------------------------------------------------------

void to_json(Json& j, const ClarificationConfig& v) {
  j = Json{{"alpha_u", v.alpha_u}, {"alpha_s", v.alpha_s}, {"alpha_c", v.alpha_c},
           {"alpha_t", v.alpha_t}, {"tau", v.tau},         {"weaken_factor", v.weaken_factor}};
}

void from_json(const Json& j, ClarificationConfig& v) {
  read(j, "alpha_u", v.alpha_u);
  read(j, "alpha_s", v.alpha_s);
  read(j, "alpha_c", v.alpha_c);
  read(j, "alpha_t", v.alpha_t);
  read(j, "tau", v.tau);
  read(j, "weaken_factor", v.weaken_factor);
}

void to_json(Json& j, const GroundingConfig& v) {
  j = Json{{"weight_user_statement", v.weight_user_statement},
           {"weight_clarification_answer", v.weight_clarification_answer},
           {"weight_function_call", v.weight_function_call},
           {"weight_assistant_statement", v.weight_assistant_statement},
           {"base_threshold", v.base_threshold},
           {"empty_slot_discount", v.empty_slot_discount},
           {"hub_surcharge", v.hub_surcharge},
           {"hub_degree", v.hub_degree},
           {"extraction_evidence_weight", v.extraction_evidence_weight}};
}

void from_json(const Json& j, GroundingConfig& v) {
  read(j, "weight_user_statement", v.weight_user_statement);
  read(j, "weight_clarification_answer", v.weight_clarification_answer);
  read(j, "weight_function_call", v.weight_function_call);
  read(j, "weight_assistant_statement", v.weight_assistant_statement);
  read(j, "base_threshold", v.base_threshold);
  read(j, "empty_slot_discount", v.empty_slot_discount);
  read(j, "hub_surcharge", v.hub_surcharge);
  read(j, "hub_degree", v.hub_degree);
  read(j, "extraction_evidence_weight", v.extraction_evidence_weight);
}

void to_json(Json& j, const ScopeConfig& v) {
  j = Json{{"max_local_items", v.max_local_items},
           {"determine_veto", v.determine_veto},
           {"active_motif_veto", v.active_motif_veto}};
}

void from_json(const Json& j, ScopeConfig& v) {
  read(j, "max_local_items", v.max_local_items);
  read(j, "determine_veto", v.determine_veto);
  read(j, "active_motif_veto", v.active_motif_veto);
}

void to_json(Json& j, const ProbeTemplates& v) {
  j = Json::object();
  for (const auto& [kind, text] : v.text) j[std::string(to_string(kind))] = text;
}

void from_json(const Json& j, ProbeTemplates& v) {
  if (!j.is_object()) throw Error("parse-failure", "probe templates must be an object");
  v.text.clear();
  for (const auto& [key, text] : j.items()) v.text[parse_enum<ProbeKind>(key)] = text.get<std::string>();
}

void to_json(Json& j, const RuntimeConfig& v) {
  j = Json{{"clarification", v.clarification},
           {"grounding", v.grounding},
           {"scope", v.scope},
           {"vocabulary", v.vocabulary},
           {"templates", v.templates},
           {"vocabulary_version", v.vocabulary_version}};
}

void from_json(const Json& j, RuntimeConfig& v) {
  read(j, "clarification", v.clarification);
  read(j, "grounding", v.grounding);
  read(j, "scope", v.scope);
  read(j, "vocabulary", v.vocabulary);
  read(j, "templates", v.templates);
  read(j, "vocabulary_version", v.vocabulary_version);
}

// ---- clarification ----------------------------------------------------------

void to_json(Json& j, const ImpactScore& v) {
  j = Json{{"motif", v.motif}, {"unc", v.unc}, {"cent", v.cent}, {"cov", v.cov}, {"risk", v.risk}, {"value", v.value}};
}

void from_json(const Json& j, ImpactScore& v) {
  read(j, "motif", v.motif);
  read(j, "unc", v.unc);
  read(j, "cent", v.cent);
  read(j, "cov", v.cov);
  read(j, "risk", v.risk);
  read(j, "value", v.value);
}

void to_json(Json& j, const Probe& v) {
  j = Json{{"id", v.id},
           {"motif", v.motif},
           {"kind", v.kind},
           {"text", v.text},
           {"issued_turn", v.issued_turn},
           {"answered", v.answered}};
  put_opt(j, "verdict", v.verdict);
  put_opt(j, "detail", v.detail);
}

void from_json(const Json& j, Probe& v) {
  require(j, "id", v.id);
  require(j, "motif", v.motif);
  read(j, "kind", v.kind);
  read(j, "text", v.text);
  read(j, "issued_turn", v.issued_turn);
  read(j, "answered", v.answered);
  read_opt(j, "verdict", v.verdict);
  read_opt(j, "detail", v.detail);
}

void to_json(Json& j, const ProbeResponse& v) {
  j = Json{{"probe", v.probe}, {"verdict", v.verdict}};
  put_opt(j, "detail", v.detail);
}

void from_json(const Json& j, ProbeResponse& v) {
  require(j, "probe", v.probe);
  require(j, "verdict", v.verdict);
  read_opt(j, "detail", v.detail);
}

// ---- layout -----------------------------------------------------------------

void to_json(Json& j, const LayoutPosition& v) { j = Json{{"layer", v.layer}, {"x", v.x}}; }

void from_json(const Json& j, LayoutPosition& v) {
  read(j, "layer", v.layer);
  read(j, "x", v.x);
}

void to_json(Json& j, const LayoutSnapshot& v) {
  j = Json{{"positions", v.positions}, {"orderings", v.orderings}, {"basis_turn", v.basis_turn}};
}

void from_json(const Json& j, LayoutSnapshot& v) {
  read(j, "positions", v.positions);
  read(j, "orderings", v.orderings);
  read(j, "basis_turn", v.basis_turn);
}

// ---- plan layer and state ---------------------------------------------------

void to_json(Json& j, const PlanItem& v) {
  j = Json{{"id", v.id},           {"kind", v.kind},         {"text", v.text}, {"cites", v.cites},
           {"provenance", v.provenance}, {"promoted", v.promoted}, {"turn", v.turn}};
}

void from_json(const Json& j, PlanItem& v) {
  read(j, "id", v.id);
  read(j, "kind", v.kind);
  require(j, "text", v.text);
  read(j, "cites", v.cites);
  read(j, "provenance", v.provenance);
  read(j, "promoted", v.promoted);
  read(j, "turn", v.turn);
}

void to_json(Json& j, const TaskPlanState& v) {
  j = Json{{"drafts", v.drafts}, {"comparisons", v.comparisons}, {"notes", v.notes}, {"open_questions", v.open_questions}};
}

void from_json(const Json& j, TaskPlanState& v) {
  read(j, "drafts", v.drafts);
  read(j, "comparisons", v.comparisons);
  read(j, "notes", v.notes);
  read(j, "open_questions", v.open_questions);
}

void to_json(Json& j, const TaskRecord& v) {
  j = Json{{"task_id", v.task_id}, {"start_turn", v.start_turn}};
  put_opt(j, "end_turn", v.end_turn);
}

void from_json(const Json& j, TaskRecord& v) {
  require(j, "task_id", v.task_id);
  read(j, "start_turn", v.start_turn);
  read_opt(j, "end_turn", v.end_turn);
}

void to_json(Json& j, const CognitiveState& v) {
  j = Json{{"graph", v.graph},
           {"motifs", v.motifs},
           {"transfer_candidates", v.transfer_candidates},
           {"probes", v.probes},
           {"task_history", v.task_history},
           {"library", v.library}};
}

void from_json(const Json& j, CognitiveState& v) {
  require(j, "graph", v.graph);
  read(j, "motifs", v.motifs);
  read(j, "transfer_candidates", v.transfer_candidates);
  read(j, "probes", v.probes);
  read(j, "task_history", v.task_history);
  read(j, "library", v.library);
}

// ---- patches ----------------------------------------------------------------

namespace {

Json image_to_json(const EntityImage& image) {
  return std::visit(
      [](const auto& v) -> Json {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, std::monostate>)
          return nullptr;
        else
          return v;
      },
      image);
}

EntityImage image_from_json(EntityKind kind, const Json& j) {
  if (j.is_null()) return std::monostate{};
  switch (kind) {
    case EntityKind::node: return j.get<Concept>();
    case EntityKind::edge: return j.get<DependencyEdge>();
    case EntityKind::conflict: return j.get<ConflictEdge>();
    case EntityKind::evidence: return j.get<EvidenceRecord>();
    case EntityKind::motif: return j.get<MotifInstance>();
    case EntityKind::plan_item: return j.get<PlanItem>();
    case EntityKind::probe: return j.get<Probe>();
    case EntityKind::transfer: return j.get<TransferCandidate>();
  }
  return std::monostate{};
}

template <std::size_t I = 0>
PatchOp op_by_name(std::string_view name) {
  if constexpr (I == std::variant_size_v<PatchOp>) {
    throw Error("parse-failure", "unknown op '" + std::string(name) + "'");
  } else {
    PatchOp op{std::in_place_index<I>};
    if (op_name(op) == name) return op;
    return op_by_name<I + 1>(name);
  }
}

}  // namespace

void to_json(Json& j, const PatchOp& op) {
  j = std::visit(
      [](const auto& o) -> Json {
        using T = std::decay_t<decltype(o)>;
        Json out;
        if constexpr (std::is_same_v<T, AddConcept>) {
          out["concept"] = o.node;
        } else if constexpr (std::is_same_v<T, AddEdge>) {
          out["edge"] = o.edge;
        } else if constexpr (std::is_same_v<T, AddConflict>) {
          out["conflict"] = o.conflict;
        } else if constexpr (std::is_same_v<T, AddEvidence>) {
          out["record"] = o.record;
        } else if constexpr (std::is_same_v<T, SetConfidence> || std::is_same_v<T, SetStrength>) {
          out = {{"target", o.target}, {"value", o.value}};
        } else if constexpr (std::is_same_v<T, SetStatus>) {
          out = {{"target", o.target}, {"status", o.status}};
        } else if constexpr (std::is_same_v<T, SetLabel>) {
          out = {{"target", o.target}, {"label", o.label}, {"rationale", o.rationale}};
          put_opt(out, "slot", o.slot);
          put_opt(out, "value", o.value);
        } else if constexpr (std::is_same_v<T, MergeConcepts>) {
          out = {{"keep", o.keep}, {"drop", o.drop}};
        } else if constexpr (std::is_same_v<T, BindMotif>) {
          out["instance"] = o.instance;
        } else if constexpr (std::is_same_v<T, SetMotifStatus>) {
          out = {{"target", o.target}, {"event", o.event}, {"origin", o.origin}};
        } else if constexpr (std::is_same_v<T, AddPlanItem>) {
          out["item"] = o.item;
        } else if constexpr (std::is_same_v<T, RetagPlanItem>) {
          out = {{"target", o.target}, {"provenance", o.provenance}, {"promoted", o.promoted}};
        } else if constexpr (std::is_same_v<T, AnswerProbe>) {
          out = {{"target", o.target}, {"verdict", o.verdict}};
          put_opt(out, "detail", o.detail);
        } else if constexpr (std::is_same_v<T, SetTransferStatus>) {
          out = {{"target", o.target}, {"status", o.status}};
        } else if constexpr (std::is_same_v<T, SetProvenance>) {
          out = {{"target", o.target}, {"provenance", o.provenance}};
        } else if constexpr (std::is_same_v<T, Restore>) {
          out = {{"entity", o.entity}, {"id", o.id}, {"before", image_to_json(o.before)}};
        }
        return out;
      },
      op);
  j["op"] = std::string(op_name(op));
}

void from_json(const Json& j, PatchOp& op) {
  if (!j.is_object() || !j.contains("op") || !j.at("op").is_string())
    throw Error("parse-failure", "patch op needs an 'op' name");
  op = op_by_name(j.at("op").get<std::string>());
  std::visit(
      [&](auto& o) {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, AddConcept>) {
          require(j, "concept", o.node);
        } else if constexpr (std::is_same_v<T, AddEdge>) {
          require(j, "edge", o.edge);
        } else if constexpr (std::is_same_v<T, AddConflict>) {
          require(j, "conflict", o.conflict);
        } else if constexpr (std::is_same_v<T, AddEvidence>) {
          require(j, "record", o.record);
        } else if constexpr (std::is_same_v<T, SetConfidence> || std::is_same_v<T, SetStrength>) {
          require(j, "target", o.target);
          require(j, "value", o.value);
        } else if constexpr (std::is_same_v<T, SetStatus>) {
          require(j, "target", o.target);
          require(j, "status", o.status);
        } else if constexpr (std::is_same_v<T, SetLabel>) {
          require(j, "target", o.target);
          require(j, "label", o.label);
          read_opt(j, "slot", o.slot);
          read_opt(j, "value", o.value);
          read(j, "rationale", o.rationale);
        } else if constexpr (std::is_same_v<T, MergeConcepts>) {
          require(j, "keep", o.keep);
          require(j, "drop", o.drop);
        } else if constexpr (std::is_same_v<T, BindMotif>) {
          require(j, "instance", o.instance);
        } else if constexpr (std::is_same_v<T, SetMotifStatus>) {
          require(j, "target", o.target);
          require(j, "event", o.event);
          read(j, "origin", o.origin);
        } else if constexpr (std::is_same_v<T, AddPlanItem>) {
          require(j, "item", o.item);
        } else if constexpr (std::is_same_v<T, RetagPlanItem>) {
          require(j, "target", o.target);
          read(j, "provenance", o.provenance);
          read(j, "promoted", o.promoted);
        } else if constexpr (std::is_same_v<T, AnswerProbe>) {
          require(j, "target", o.target);
          require(j, "verdict", o.verdict);
          read_opt(j, "detail", o.detail);
        } else if constexpr (std::is_same_v<T, SetTransferStatus>) {
          require(j, "target", o.target);
          require(j, "status", o.status);
        } else if constexpr (std::is_same_v<T, SetProvenance>) {
          require(j, "target", o.target);
          require(j, "provenance", o.provenance);
        } else if constexpr (std::is_same_v<T, Restore>) {
          require(j, "entity", o.entity);
          require(j, "id", o.id);
          o.before = image_from_json(o.entity, j.value("before", Json()));
        }
      },
      op);
}

void to_json(Json& j, const GraphPatch& v) {
  j = Json{{"id", v.id}, {"ops", v.ops}, {"origin", v.origin}, {"turn", v.turn}};
}

void from_json(const Json& j, GraphPatch& v) {
  read(j, "id", v.id);
  require(j, "ops", v.ops);
  read(j, "origin", v.origin);
  read(j, "turn", v.turn);
}

void to_json(Json& j, const PatchDiff& v) {
  j = Json{{"affected_concepts", v.affected_concepts},
           {"affected_edges", v.affected_edges},
           {"affected_motifs", v.affected_motifs},
           {"downstream_plan_items", v.downstream_plan_items},
           {"scope", v.scope}};
}

void from_json(const Json& j, PatchDiff& v) {
  read(j, "affected_concepts", v.affected_concepts);
  read(j, "affected_edges", v.affected_edges);
  read(j, "affected_motifs", v.affected_motifs);
  read(j, "downstream_plan_items", v.downstream_plan_items);
  read(j, "scope", v.scope);
}

void to_json(Json& j, const PendingReview& v) { j = Json{{"patch", v.patch}, {"diff", v.diff}}; }

void from_json(const Json& j, PendingReview& v) {
  require(j, "patch", v.patch);
  require(j, "diff", v.diff);
}

void to_json(Json& j, const SessionState& v) {
  j = Json{{"cognitive", v.cognitive},
           {"plan", v.plan},
           {"task_id", v.task_id},
           {"task_start_turn", v.task_start_turn},
           {"turn", v.turn},
           {"probe_budget_used", v.probe_budget_used},
           {"patch_counter", v.patch_counter}};
  put_opt(j, "pending_review", v.pending_review);
  put_opt(j, "layout", v.layout);
}

void from_json(const Json& j, SessionState& v) {
  require(j, "cognitive", v.cognitive);
  require(j, "plan", v.plan);
  read(j, "task_id", v.task_id);
  read(j, "task_start_turn", v.task_start_turn);
  require(j, "turn", v.turn);
  read_opt(j, "pending_review", v.pending_review);
  read(j, "probe_budget_used", v.probe_budget_used);
  read(j, "patch_counter", v.patch_counter);
  read_opt(j, "layout", v.layout);
}

void to_json(Json& j, const Merge& v) { j = Json{{"keep", v.keep}, {"drop", v.drop}}; }

void from_json(const Json& j, Merge& v) {
  require(j, "keep", v.keep);
  require(j, "drop", v.drop);
}

void to_json(Json& j, const MotifChange& v) {
  j = Json{{"motif", v.motif}, {"event", v.event}, {"from", v.from}, {"to", v.to}};
}

void from_json(const Json& j, MotifChange& v) {
  require(j, "motif", v.motif);
  read(j, "event", v.event);
  read(j, "from", v.from);
  read(j, "to", v.to);
}

void to_json(Json& j, const CommitEffects& v) {
  j = Json{{"cascaded_edges", v.cascaded_edges},
           {"merges", v.merges},
           {"grounded", v.grounded},
           {"conflicts_opened", v.conflicts_opened},
           {"removed_edges", v.removed_edges},
           {"motifs_bound", v.motifs_bound},
           {"motif_changes", v.motif_changes},
           {"transfer_candidates", v.transfer_candidates},
           {"layout_touched", v.layout_touched}};
}

void from_json(const Json& j, CommitEffects& v) {
  read(j, "cascaded_edges", v.cascaded_edges);
  read(j, "merges", v.merges);
  read(j, "grounded", v.grounded);
  read(j, "conflicts_opened", v.conflicts_opened);
  read(j, "removed_edges", v.removed_edges);
  read(j, "motifs_bound", v.motifs_bound);
  read(j, "motif_changes", v.motif_changes);
  read(j, "transfer_candidates", v.transfer_candidates);
  read(j, "layout_touched", v.layout_touched);
}

void to_json(Json& j, const CommitRecord& v) {
  j = Json{{"patch", v.patch}, {"diff", v.diff}, {"approval", v.approval}, {"effects", v.effects}};
}

void from_json(const Json& j, CommitRecord& v) {
  require(j, "patch", v.patch);
  require(j, "diff", v.diff);
  read(j, "approval", v.approval);
  read(j, "effects", v.effects);
}

// ---- canonical text and digests ----------------------------------------------

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("parse-failure", "offset " + std::to_string(e.byte) + ": " + e.what());
  }
}

std::string serialize_state(const SessionState& state) { return Json(state).dump(); }

SessionState deserialize_state(std::string_view text) {
  Json doc = parse_json(text);
  try {
    return doc.get<SessionState>();
  } catch (const Error&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw Error("parse-failure", std::string("schema: ") + e.what());
  }
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int size = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &size, EVP_sha256(), nullptr) != 1)
    throw Error("digest-failure", "EVP_Digest");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(size * 2);
  for (unsigned int i = 0; i < size; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string state_digest(const SessionState& state) { return sha256_hex(serialize_state(state)); }

}  // namespace cog
