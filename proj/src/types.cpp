#include "cog/types.hpp"

#include <array>

namespace cog {

namespace {

template <typename Enum, std::size_t N>
struct EnumNames {
  std::array<std::string_view, N> names;

  std::string_view name(Enum v) const { return names.at(static_cast<std::size_t>(v)); }

  Enum parse(std::string_view text) const {
    for (std::size_t i = 0; i < N; ++i)
      if (names[i] == text) return static_cast<Enum>(i);
    throw Error("parse-failure", "unknown enum value '" + std::string(text) + "'");
  }
};

constexpr EnumNames<ConceptKind, 4> kConceptKind{{"belief", "constraint", "preference", "factual"}};
constexpr EnumNames<Provenance, 4> kProvenance{
    {"assistant_proposed", "user_confirmed", "co_authored", "transfer_based"}};
constexpr EnumNames<ItemStatus, 4> kItemStatus{{"candidate", "grounded", "deprecated", "cancelled"}};
constexpr EnumNames<Relation, 3> kRelation{{"enable", "constraint", "determine"}};
constexpr EnumNames<ConflictStatus, 3> kConflictStatus{{"open", "resolved", "dismissed"}};
constexpr EnumNames<Speaker, 2> kSpeaker{{"user", "assistant"}};
constexpr EnumNames<EvidenceSource, 4> kEvidenceSource{
    {"user_statement", "assistant_statement", "function_call", "clarification_answer"}};
constexpr EnumNames<ExtractorKind, 2> kExtractorKind{{"rule_based", "external"}};
constexpr EnumNames<CausalKind, 4> kCausalKind{{"direct", "mediated", "confounding", "intervention"}};
constexpr EnumNames<TaxonomyClass, 5> kTaxonomyClass{
    {"constraint", "preference", "trade_off", "sequential", "conditional"}};
constexpr EnumNames<MotifStatus, 4> kMotifStatus{{"active", "uncertain", "deprecated", "cancelled"}};
constexpr EnumNames<MotifEvent, 5> kMotifEvent{
    {"confirm", "weaken", "deprecate", "cancel", "edge_cancelled"}};
constexpr EnumNames<EventOrigin, 2> kEventOrigin{{"user", "system"}};
constexpr EnumNames<TransferStatus, 3> kTransferStatus{{"uncertain", "adopted", "rejected"}};
constexpr EnumNames<ProbeKind, 3> kProbeKind{
    {"direct_confirmation", "counterfactual", "mediation_check"}};
constexpr EnumNames<Verdict, 4> kVerdict{{"confirm", "weaken", "refine", "defer"}};
constexpr EnumNames<PatchOrigin, 5> kPatchOrigin{
    {"user_edit", "extraction", "clarification", "transfer", "system_consistency"}};
constexpr EnumNames<PatchScope, 2> kPatchScope{{"local", "non_local"}};
constexpr EnumNames<PlanItemKind, 4> kPlanItemKind{{"draft", "comparison", "note", "open_question"}};

}  // namespace

#define COG_ENUM_IO(Enum, table)                                             \
  std::string_view to_string(Enum v) { return table.name(v); }               \
  template <>                                                                \
  Enum parse_enum<Enum>(std::string_view text) { return table.parse(text); }

COG_ENUM_IO(ConceptKind, kConceptKind)
COG_ENUM_IO(Provenance, kProvenance)
COG_ENUM_IO(ItemStatus, kItemStatus)
COG_ENUM_IO(Relation, kRelation)
COG_ENUM_IO(ConflictStatus, kConflictStatus)
COG_ENUM_IO(Speaker, kSpeaker)
COG_ENUM_IO(EvidenceSource, kEvidenceSource)
COG_ENUM_IO(ExtractorKind, kExtractorKind)
COG_ENUM_IO(CausalKind, kCausalKind)
COG_ENUM_IO(TaxonomyClass, kTaxonomyClass)
COG_ENUM_IO(MotifStatus, kMotifStatus)
COG_ENUM_IO(MotifEvent, kMotifEvent)
COG_ENUM_IO(EventOrigin, kEventOrigin)
COG_ENUM_IO(TransferStatus, kTransferStatus)
COG_ENUM_IO(ProbeKind, kProbeKind)
COG_ENUM_IO(Verdict, kVerdict)
COG_ENUM_IO(PatchOrigin, kPatchOrigin)
COG_ENUM_IO(PatchScope, kPatchScope)
COG_ENUM_IO(PlanItemKind, kPlanItemKind)

#undef COG_ENUM_IO

Relation relation_for(CausalKind kind) {
  switch (kind) {
    case CausalKind::direct:
    case CausalKind::mediated:
      return Relation::enable;
    case CausalKind::confounding:
      return Relation::constraint;
    case CausalKind::intervention:
      return Relation::determine;
  }
  return Relation::enable;
}

CausalKind causal_kind_for(Relation relation) {
  switch (relation) {
    case Relation::enable:
      return CausalKind::direct;
    case Relation::constraint:
      return CausalKind::confounding;
    case Relation::determine:
      return CausalKind::intervention;
  }
  return CausalKind::direct;
}

}  // namespace cog
