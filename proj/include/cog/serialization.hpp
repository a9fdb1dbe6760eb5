#pragma once

#include <string>
#include <string_view>
#include <type_traits>

#include <json.hpp>

#include "cog/revision.hpp"

namespace cog {

/// std::map-backed JSON: object keys always serialize sorted, which makes
/// dump() canonical for a given value.
using Json = nlohmann::json;

template <typename E>
  requires std::is_enum_v<E>
void to_json(Json& j, const E& v) {
  j = std::string(to_string(v));
}

template <typename E>
  requires std::is_enum_v<E>
void from_json(const Json& j, E& v) {
  if (!j.is_string()) throw Error("parse-failure", "expected enum string");
  v = parse_enum<E>(j.get<std::string>());
}

template <>
EntityKind parse_enum<EntityKind>(std::string_view text);

#define COG_JSON_DECL(T)                  \
  void to_json(Json& j, const T& v);      \
  void from_json(const Json& j, T& v);

COG_JSON_DECL(Concept)
COG_JSON_DECL(DependencyEdge)
COG_JSON_DECL(ConflictEdge)
COG_JSON_DECL(EvidenceRecord)
COG_JSON_DECL(CognitiveGraph)
COG_JSON_DECL(Utterance)
COG_JSON_DECL(ConceptCandidate)
COG_JSON_DECL(DependencyCandidate)
COG_JSON_DECL(ConflictHint)
COG_JSON_DECL(ExtractionResult)
COG_JSON_DECL(RoleSpec)
COG_JSON_DECL(EdgeTemplate)
COG_JSON_DECL(MotifPattern)
COG_JSON_DECL(MotifTransition)
COG_JSON_DECL(MotifInstance)
COG_JSON_DECL(PatternUse)
COG_JSON_DECL(MotifLibrary)
COG_JSON_DECL(TransferCandidate)
COG_JSON_DECL(ClarificationConfig)
COG_JSON_DECL(GroundingConfig)
COG_JSON_DECL(ScopeConfig)
COG_JSON_DECL(ProbeTemplates)
COG_JSON_DECL(RuntimeConfig)
COG_JSON_DECL(ImpactScore)
COG_JSON_DECL(Probe)
COG_JSON_DECL(ProbeResponse)
COG_JSON_DECL(LayoutPosition)
COG_JSON_DECL(LayoutSnapshot)
COG_JSON_DECL(PlanItem)
COG_JSON_DECL(TaskPlanState)
COG_JSON_DECL(TaskRecord)
COG_JSON_DECL(CognitiveState)
COG_JSON_DECL(PatchOp)
COG_JSON_DECL(GraphPatch)
COG_JSON_DECL(PatchDiff)
COG_JSON_DECL(PendingReview)
COG_JSON_DECL(SessionState)
COG_JSON_DECL(Merge)
COG_JSON_DECL(MotifChange)
COG_JSON_DECL(CommitEffects)
COG_JSON_DECL(CommitRecord)

#undef COG_JSON_DECL

/// Canonical compact JSON: sorted keys, shortest round-trip doubles, absent
/// optionals omitted.
std::string serialize_state(const SessionState& state);

/// Error("parse-failure", "offset N: ...") on malformed or incomplete input.
SessionState deserialize_state(std::string_view text);

/// Parses JSON, mapping any syntax or schema error to Error("parse-failure")
/// with the byte offset when known.
Json parse_json(std::string_view text);

std::string sha256_hex(std::string_view bytes);

/// SHA-256 of serialize_state.
std::string state_digest(const SessionState& state);

}  // namespace cog
