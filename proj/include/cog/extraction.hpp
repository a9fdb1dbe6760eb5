#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cog/graph.hpp"

namespace cog {

struct Utterance {
  int turn = 0;
  Speaker speaker = Speaker::user;
  std::string text;

  bool operator==(const Utterance&) const = default;
};

struct ConceptCandidate {
  Concept node;  // status candidate; id is local to the extraction result
  int source_turn = 0;
  ExtractorKind extractor = ExtractorKind::rule_based;

  bool operator==(const ConceptCandidate&) const = default;
};

struct DependencyCandidate {
  DependencyEdge edge;  // endpoints are local candidate ids or existing concept ids
  CausalKind causal_kind = CausalKind::direct;
  int source_turn = 0;

  bool operator==(const DependencyCandidate&) const = default;
};

struct ConflictHint {
  ConceptId a;
  ConceptId b;
  std::string description;

  bool operator==(const ConflictHint&) const = default;
};

/// One extractor response. `conflicts` and `deprecations` are optional
/// extensions an external model may fill; the rule-based extractor leaves
/// them empty.
struct ExtractionResult {
  std::vector<ConceptCandidate> concepts;
  std::vector<DependencyCandidate> dependencies;
  std::vector<ConflictHint> conflicts;
  std::vector<ConceptId> deprecations;

  bool empty() const { return concepts.empty() && dependencies.empty() && conflicts.empty() && deprecations.empty(); }
  bool operator==(const ExtractionResult&) const = default;
};

class ExtractorClient {
 public:
  virtual ~ExtractorClient() = default;
  virtual ExtractorKind kind() const = 0;
  virtual ExtractionResult extract(const Utterance& utterance,
                                   std::span<const Utterance> recent_context) = 0;
};

/// Deterministic lexicon extractor. Identical input gives identical output.
class RuleBasedExtractor final : public ExtractorClient {
 public:
  ExtractorKind kind() const override { return ExtractorKind::rule_based; }
  ExtractionResult extract(const Utterance& utterance,
                           std::span<const Utterance> recent_context) override;
};

struct ExternalExtractorConfig {
  std::string endpoint;  // http://host:port/path
  std::string api_key;
  int timeout_ms = 5000;
  int retries = 1;

  /// Reads COG_EXTRACTOR_ENDPOINT, COG_EXTRACTOR_KEY, COG_EXTRACTOR_TIMEOUT_MS
  /// and COG_EXTRACTOR_RETRIES.
  static ExternalExtractorConfig from_env();
};

/// Remote model service speaking the JSON wire contract
/// {utterance, context[], schema_version} → {concepts[], dependencies[]}.
/// Any transport or decoding failure raises Error("extractor-unavailable").
class ExternalExtractor final : public ExtractorClient {
 public:
  explicit ExternalExtractor(ExternalExtractorConfig config) : config_(std::move(config)) {}
  ExtractorKind kind() const override { return ExtractorKind::external; }
  ExtractionResult extract(const Utterance& utterance,
                           std::span<const Utterance> recent_context) override;

 private:
  ExternalExtractorConfig config_;
};

inline constexpr const char* kExtractionSchemaVersion = "1";

ExtractionResult extract_candidates(const Utterance& utterance,
                                    std::span<const Utterance> recent_context,
                                    ExtractorClient& client);

struct GroundingConfig {
  double weight_user_statement = 1.0;
  double weight_clarification_answer = 1.0;
  double weight_function_call = 0.6;
  double weight_assistant_statement = 0.3;
  double base_threshold = 0.6;
  double empty_slot_discount = 0.1;
  double hub_surcharge = 0.1;
  int hub_degree = 3;
  /// Weight attached to the user_statement evidence an extracted concept receives.
  double extraction_evidence_weight = 0.4;

  double source_weight(EvidenceSource source) const;
  bool operator==(const GroundingConfig&) const = default;
};

/// 1 − (1 − current)·(1 − w_source·weight). Throws Error("bad-weight") when an
/// input leaves [0,1].
double fuse_evidence(double current_confidence, const EvidenceRecord& record,
                     const GroundingConfig& config = {});

/// Grounding threshold for a concept given the current graph.
double grounding_threshold(const CognitiveGraph& graph, const Concept& node,
                           const GroundingConfig& config = {});

struct GroundingResult {
  std::vector<std::string> promoted;  // concept and edge ids, in promotion order
  std::vector<ConflictId> conflicts_opened;
};

/// Promotes pending candidates (concepts then edges, each in id order).
GroundingResult ground_candidates(CognitiveGraph& graph, const GroundingConfig& config = {});

/// Lowest "<prefix>NNNN" id not present in `taken`.
template <typename Map>
std::string next_free_id(const Map& taken, const std::string& prefix);

}  // namespace cog

#include <cstdio>

namespace cog {

template <typename Map>
std::string next_free_id(const Map& taken, const std::string& prefix) {
  for (std::size_t n = taken.size() + 1;; ++n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04zu", n);
    std::string id = prefix + buf;
    if (!taken.count(id)) return id;
  }
}

}  // namespace cog
