#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace cog {

using ConceptId = std::string;
using EdgeId = std::string;
using ConflictId = std::string;
using EvidenceId = std::string;
using MotifId = std::string;
using ProbeId = std::string;
using PatchId = std::string;
using PlanItemId = std::string;
using TaskId = std::string;

/// Runtime error carrying one of the stable error codes ("unknown-focus",
/// "cyclic-backbone", ...). The code is what callers and the HTTP layer match on.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& detail = {})
      : std::runtime_error(detail.empty() ? code : code + ": " + detail),
        code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

enum class ConceptKind { belief, constraint, preference, factual };
enum class Provenance { assistant_proposed, user_confirmed, co_authored, transfer_based };
enum class ItemStatus { candidate, grounded, deprecated, cancelled };
enum class Relation { enable, constraint, determine };
enum class ConflictStatus { open, resolved, dismissed };
enum class Speaker { user, assistant };
enum class EvidenceSource { user_statement, assistant_statement, function_call, clarification_answer };
enum class ExtractorKind { rule_based, external };
enum class CausalKind { direct, mediated, confounding, intervention };
enum class TaxonomyClass { constraint, preference, trade_off, sequential, conditional };
enum class MotifStatus { active, uncertain, deprecated, cancelled };
enum class MotifEvent { confirm, weaken, deprecate, cancel, edge_cancelled };
enum class EventOrigin { user, system };
enum class TransferStatus { uncertain, adopted, rejected };
enum class ProbeKind { direct_confirmation, counterfactual, mediation_check };
enum class Verdict { confirm, weaken, refine, defer };
enum class PatchOrigin { user_edit, extraction, clarification, transfer, system_consistency };
enum class PatchScope { local, non_local };
enum class PlanItemKind { draft, comparison, note, open_question };

std::string_view to_string(ConceptKind v);
std::string_view to_string(Provenance v);
std::string_view to_string(ItemStatus v);
std::string_view to_string(Relation v);
std::string_view to_string(ConflictStatus v);
std::string_view to_string(Speaker v);
std::string_view to_string(EvidenceSource v);
std::string_view to_string(ExtractorKind v);
std::string_view to_string(CausalKind v);
std::string_view to_string(TaxonomyClass v);
std::string_view to_string(MotifStatus v);
std::string_view to_string(MotifEvent v);
std::string_view to_string(EventOrigin v);
std::string_view to_string(TransferStatus v);
std::string_view to_string(ProbeKind v);
std::string_view to_string(Verdict v);
std::string_view to_string(PatchOrigin v);
std::string_view to_string(PatchScope v);
std::string_view to_string(PlanItemKind v);

/// Parses the enum's wire name; throws Error("parse-failure") on unknown text.
template <typename Enum>
Enum parse_enum(std::string_view text);

/// Causal kind → backbone relation (direct/mediated → enable,
/// confounding → constraint, intervention → determine).
Relation relation_for(CausalKind kind);
CausalKind causal_kind_for(Relation relation);

}  // namespace cog
