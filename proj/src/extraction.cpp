#include "cog/extraction.hpp"

#include <httplib.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdlib>
#include <functional>
#include <json.hpp>

namespace cog {

namespace {

using Json = nlohmann::json;

struct Token {
  std::string lower;
  bool capitalized = false;
};

struct SlotEntry {
  std::string_view keyword;
  std::string_view slot;
  std::string_view value;
};

// Ordered by slot priority: the first slot with a keyword in the clause wins.
constexpr std::array<SlotEntry, 35> kSlotLexicon{{
    {"hotel", "accommodation_type", "hotel"},
    {"hotels", "accommodation_type", "hotel"},
    {"hostel", "accommodation_type", "hostel"},
    {"hostels", "accommodation_type", "hostel"},
    {"cabin", "accommodation_type", "cabin"},
    {"cabins", "accommodation_type", "cabin"},
    {"camping", "accommodation_type", "camping"},
    {"campsite", "accommodation_type", "camping"},
    {"camp", "accommodation_type", "camping"},
    {"airbnb", "accommodation_type", "airbnb"},
    {"resort", "accommodation_type", "resort"},
    {"motel", "accommodation_type", "motel"},
    {"rain", "weather", "rain"},
    {"raining", "weather", "rain"},
    {"rainy", "weather", "rain"},
    {"rainstorm", "weather", "rain"},
    {"storm", "weather", "rain"},
    {"sunny", "weather", "sunny"},
    {"snow", "weather", "snow"},
    {"forecast", "weather", "forecast"},
    {"museum", "activity_type", "museum"},
    {"aquarium", "activity_type", "aquarium"},
    {"park", "activity_type", "park"},
    {"hiking", "activity_type", "hiking"},
    {"outdoor", "activity_type", "outdoor"},
    {"indoor", "activity_type", "indoor"},
    {"beach", "activity_type", "beach"},
    {"transport", "transport", "transport"},
    {"budget", "budget", "low"},
    {"affordable", "budget", "low"},
    {"cheap", "budget", "low"},
    {"expensive", "budget", "high"},
    {"reviews", "review_quality", "reviews"},
    {"ratings", "review_quality", "ratings"},
    {"review", "review_quality", "reviews"},
}};

constexpr std::array<std::string_view, 18> kFillers{
    "i", "i'd", "i'm", "i'll", "we", "we'd", "we're", "usually", "really",
    "just", "also", "ideally", "honestly", "actually", "definitely", "so", "and", "then"};

using Phrase = std::vector<std::string_view>;

const std::vector<Phrase>& belief_cues() {
  static const std::vector<Phrase> cues{{"i", "think"}, {"probably"}, {"believe"}, {"maybe"}};
  return cues;
}
const std::vector<Phrase>& constraint_cues() {
  static const std::vector<Phrase> cues{{"must"},  {"can't"},       {"cannot"}, {"need"},
                                        {"needs"}, {"only", "if"},  {"limit"},  {"limited"},
                                        {"no", "longer"}, {"have", "to"}, {"has", "to"}};
  return cues;
}
const std::vector<Phrase>& preference_cues() {
  static const std::vector<Phrase> cues{{"prefer"}, {"prefers"}, {"like"}, {"likes"},  {"want"},
                                        {"wants"},  {"love"},    {"rather"}, {"pay", "more"},
                                        {"would", "pay"}, {"i'd", "pay"}, {"we'd", "pay"}};
  return cues;
}

bool contains_phrase(const std::vector<Token>& toks, const Phrase& phrase) {
  if (phrase.size() > toks.size()) return false;
  for (std::size_t i = 0; i + phrase.size() <= toks.size(); ++i) {
    bool hit = true;
    for (std::size_t k = 0; k < phrase.size() && hit; ++k) hit = toks[i + k].lower == phrase[k];
    if (hit) return true;
  }
  return false;
}

bool any_phrase(const std::vector<Token>& toks, const std::vector<Phrase>& phrases) {
  return std::any_of(phrases.begin(), phrases.end(),
                     [&](const Phrase& p) { return contains_phrase(toks, p); });
}

bool word_char(unsigned char ch) { return std::isalnum(ch) || ch == '\'' || ch == '-'; }

// Sentences → token lists. Curly apostrophes are folded to ASCII.
std::vector<std::vector<Token>> sentences(const std::string& raw) {
  std::string text;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw.compare(i, 3, "\xE2\x80\x99") == 0) {
      text += '\'';
      i += 2;
    } else {
      text += raw[i];
    }
  }
  std::vector<std::vector<Token>> out(1);
  std::string word;
  auto flush = [&] {
    while (!word.empty() && (word.back() == '\'' || word.back() == '-')) word.pop_back();
    while (!word.empty() && (word.front() == '\'' || word.front() == '-')) word.erase(word.begin());
    if (word.empty()) return;
    Token t;
    t.capitalized = std::isupper(static_cast<unsigned char>(word[0])) != 0;
    for (char ch : word) t.lower += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    out.back().push_back(std::move(t));
    word.clear();
  };
  for (char ch : text) {
    if (word_char(static_cast<unsigned char>(ch))) {
      word += ch;
      continue;
    }
    flush();
    if (ch == '.' || ch == '!' || ch == '?' || ch == ';') {
      if (!out.back().empty()) out.emplace_back();
    } else if (ch == ',') {
      if (!out.back().empty()) out.back().push_back({",", false});
    }
  }
  flush();
  if (out.back().empty()) out.pop_back();
  return out;
}

struct Clause {
  std::vector<Token> tokens;
};

std::vector<Token> strip_commas(std::vector<Token> toks) {
  toks.erase(std::remove_if(toks.begin(), toks.end(), [](const Token& t) { return t.lower == ","; }),
             toks.end());
  return toks;
}

bool is_joiner(const std::vector<Token>& toks, std::size_t i) {
  const auto& w = toks[i].lower;
  if (w == "but" || w == "unless") return true;
  if (w == "if") return !(i > 0 && toks[i - 1].lower == "only");
  return false;
}

// Splits a sentence into (conditioning, main) pairs. Returns the clause list
// plus, for each joiner, the index of the conditioning and the main clause.
struct Split {
  std::vector<Clause> clauses;
  std::vector<std::pair<std::size_t, std::size_t>> links;  // conditioning → main
};

Split split_sentence(const std::vector<Token>& toks) {
  Split out;
  if (toks.empty()) return out;

  // Leading "if/unless X, Y": the conditioning clause comes first.
  if (toks[0].lower == "if" || toks[0].lower == "unless") {
    auto comma = std::find_if(toks.begin(), toks.end(), [](const Token& t) { return t.lower == ","; });
    if (comma != toks.end()) {
      Clause cond{strip_commas({toks.begin() + 1, comma})};
      Clause main{strip_commas({comma + 1, toks.end()})};
      if (!cond.tokens.empty() && !main.tokens.empty()) {
        out.clauses = {cond, main};
        out.links.push_back({0, 1});
        return out;
      }
    }
  }

  std::vector<Token> current;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (i > 0 && is_joiner(toks, i)) {
      out.clauses.push_back({strip_commas(current)});
      current.clear();
      continue;
    }
    current.push_back(toks[i]);
  }
  out.clauses.push_back({strip_commas(current)});
  for (std::size_t k = 1; k < out.clauses.size(); ++k) out.links.push_back({k, k - 1});
  return out;
}

std::optional<ConceptKind> classify(const std::vector<Token>& toks) {
  if (any_phrase(toks, belief_cues())) return ConceptKind::belief;
  if (any_phrase(toks, constraint_cues())) return ConceptKind::constraint;
  if (any_phrase(toks, preference_cues())) return ConceptKind::preference;
  for (std::size_t i = 1; i < toks.size(); ++i)
    if (toks[i].capitalized && toks[i].lower != "i" && toks[i].lower.rfind("i'", 0) != 0)
      return ConceptKind::factual;
  return std::nullopt;
}

std::string label_of(const std::vector<Token>& toks) {
  std::string label;
  for (const auto& t : toks) {
    if (std::find(kFillers.begin(), kFillers.end(), t.lower) != kFillers.end()) continue;
    if (!label.empty()) label += ' ';
    label += t.lower;
  }
  return label;
}

std::optional<SlotEntry> slot_of(const std::vector<Token>& toks) {
  for (const auto& entry : kSlotLexicon)
    for (const auto& t : toks)
      if (t.lower == entry.keyword) return entry;
  return std::nullopt;
}

}  // namespace

ExtractionResult RuleBasedExtractor::extract(const Utterance& utterance, std::span<const Utterance>) {
  ExtractionResult result;
  const Provenance provenance =
      utterance.speaker == Speaker::user ? Provenance::user_confirmed : Provenance::assistant_proposed;
  int next_concept = 1;
  int next_edge = 1;

  for (const auto& sentence : sentences(utterance.text)) {
    Split split = split_sentence(sentence);
    std::vector<std::optional<ConceptId>> ids(split.clauses.size());
    for (std::size_t k = 0; k < split.clauses.size(); ++k) {
      const auto& toks = split.clauses[k].tokens;
      auto kind = classify(toks);
      std::string label = label_of(toks);
      if (!kind || label.empty()) continue;
      ConceptCandidate cand;
      cand.node.id = "n" + std::to_string(next_concept++);
      cand.node.kind = *kind;
      cand.node.label = label;
      if (auto slot = slot_of(toks)) {
        cand.node.slot = std::string(slot->slot);
        cand.node.value = std::string(slot->value);
      }
      cand.node.confidence = *kind == ConceptKind::belief ? 0.3 : 0.5;
      cand.node.provenance = provenance;
      cand.node.status = ItemStatus::candidate;
      cand.node.created_turn = utterance.turn;
      cand.source_turn = utterance.turn;
      cand.extractor = ExtractorKind::rule_based;
      ids[k] = cand.node.id;
      result.concepts.push_back(std::move(cand));
    }
    for (auto [cond, main] : split.links) {
      if (!ids[cond] || !ids[main]) continue;
      DependencyCandidate dep;
      dep.edge.id = "l" + std::to_string(next_edge++);
      dep.edge.source = *ids[cond];
      dep.edge.target = *ids[main];
      dep.edge.relation = Relation::constraint;
      dep.edge.strength = 0.5;
      dep.edge.status = ItemStatus::candidate;
      dep.edge.provenance = provenance;
      dep.edge.rationale = "conditional dependency";
      dep.edge.created_turn = utterance.turn;
      dep.causal_kind = CausalKind::confounding;
      dep.source_turn = utterance.turn;
      result.dependencies.push_back(std::move(dep));
    }
  }
  return result;
}

ExternalExtractorConfig ExternalExtractorConfig::from_env() {
  ExternalExtractorConfig config;
  if (const char* v = std::getenv("COG_EXTRACTOR_ENDPOINT")) config.endpoint = v;
  if (const char* v = std::getenv("COG_EXTRACTOR_KEY")) config.api_key = v;
  if (const char* v = std::getenv("COG_EXTRACTOR_TIMEOUT_MS")) config.timeout_ms = std::atoi(v);
  if (const char* v = std::getenv("COG_EXTRACTOR_RETRIES")) config.retries = std::atoi(v);
  return config;
}

namespace {

template <typename T>
std::optional<T> opt(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

ExtractionResult decode_wire(const Json& body, const Utterance& utterance) {
  ExtractionResult result;
  const Provenance provenance =
      utterance.speaker == Speaker::user ? Provenance::user_confirmed : Provenance::assistant_proposed;
  for (const auto& c : body.at("concepts")) {
    ConceptCandidate cand;
    cand.node.id = c.at("id").get<std::string>();
    cand.node.kind = parse_enum<ConceptKind>(c.at("kind").get<std::string>());
    cand.node.label = c.at("label").get<std::string>();
    cand.node.slot = opt<std::string>(c, "slot");
    cand.node.value = opt<std::string>(c, "value");
    cand.node.confidence = std::clamp(opt<double>(c, "confidence").value_or(0.5), 0.0, 1.0);
    cand.node.provenance = provenance;
    cand.node.status = ItemStatus::candidate;
    cand.node.created_turn = utterance.turn;
    cand.source_turn = utterance.turn;
    cand.extractor = ExtractorKind::external;
    result.concepts.push_back(std::move(cand));
  }
  int n = 1;
  for (const auto& d : body.at("dependencies")) {
    DependencyCandidate dep;
    dep.causal_kind = parse_enum<CausalKind>(opt<std::string>(d, "causal_kind").value_or("direct"));
    dep.edge.id = opt<std::string>(d, "id").value_or("l" + std::to_string(n));
    ++n;
    dep.edge.source = d.at("source").get<std::string>();
    dep.edge.target = d.at("target").get<std::string>();
    dep.edge.relation = relation_for(dep.causal_kind);
    dep.edge.strength = std::clamp(opt<double>(d, "strength").value_or(0.5), 0.0, 1.0);
    dep.edge.status = ItemStatus::candidate;
    dep.edge.provenance = provenance;
    dep.edge.rationale = opt<std::string>(d, "rationale");
    dep.edge.created_turn = utterance.turn;
    dep.source_turn = utterance.turn;
    result.dependencies.push_back(std::move(dep));
  }
  if (auto it = body.find("conflicts"); it != body.end())
    for (const auto& x : *it)
      result.conflicts.push_back({x.at("a").get<std::string>(), x.at("b").get<std::string>(),
                                  opt<std::string>(x, "description").value_or("")});
  if (auto it = body.find("deprecations"); it != body.end())
    for (const auto& id : *it) result.deprecations.push_back(id.get<std::string>());
  return result;
}

}  // namespace

ExtractionResult ExternalExtractor::extract(const Utterance& utterance,
                                            std::span<const Utterance> recent_context) {
  const std::string& url = config_.endpoint;
  auto scheme_end = url.find("://");
  if (url.empty() || scheme_end == std::string::npos)
    throw Error("extractor-unavailable", "no endpoint configured");
  auto path_start = url.find('/', scheme_end + 3);
  std::string origin = url.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  Json request{{"utterance", {{"turn", utterance.turn},
                              {"speaker", std::string(to_string(utterance.speaker))},
                              {"text", utterance.text}}},
               {"context", Json::array()},
               {"schema_version", kExtractionSchemaVersion}};
  for (const auto& u : recent_context)
    request["context"].push_back(
        {{"turn", u.turn}, {"speaker", std::string(to_string(u.speaker))}, {"text", u.text}});

  httplib::Client client(origin);
  const auto timeout_s = config_.timeout_ms / 1000;
  const auto timeout_us = (config_.timeout_ms % 1000) * 1000;
  client.set_connection_timeout(timeout_s, timeout_us);
  client.set_read_timeout(timeout_s, timeout_us);
  client.set_write_timeout(timeout_s, timeout_us);
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  std::string last_error = "no attempt";
  for (int attempt = 0; attempt <= std::max(0, config_.retries); ++attempt) {
    auto res = client.Post(path, headers, request.dump(), "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "status " + std::to_string(res->status);
      continue;
    }
    try {
      return decode_wire(Json::parse(res->body), utterance);
    } catch (const std::exception& e) {
      throw Error("extractor-unavailable", std::string("malformed response: ") + e.what());
    }
  }
  throw Error("extractor-unavailable", last_error);
}

ExtractionResult extract_candidates(const Utterance& utterance, std::span<const Utterance> recent_context,
                                    ExtractorClient& client) {
  return client.extract(utterance, recent_context);
}

double GroundingConfig::source_weight(EvidenceSource source) const {
  switch (source) {
    case EvidenceSource::user_statement: return weight_user_statement;
    case EvidenceSource::clarification_answer: return weight_clarification_answer;
    case EvidenceSource::function_call: return weight_function_call;
    case EvidenceSource::assistant_statement: return weight_assistant_statement;
  }
  return 0.0;
}

double fuse_evidence(double current_confidence, const EvidenceRecord& record, const GroundingConfig& config) {
  if (!(record.weight >= 0.0 && record.weight <= 1.0)) throw Error("bad-weight", record.id);
  if (!(current_confidence >= 0.0 && current_confidence <= 1.0))
    throw Error("bad-weight", "confidence out of range");
  const double w = config.source_weight(record.source) * record.weight;
  return std::clamp(1.0 - (1.0 - current_confidence) * (1.0 - w), 0.0, 1.0);
}

double grounding_threshold(const CognitiveGraph& graph, const Concept& node, const GroundingConfig& config) {
  double theta = config.base_threshold;
  if (node.slot) {
    bool filled = false;
    for (const auto& [id, c] : graph.concepts)
      if (id != node.id && c.slot == node.slot && c.status == ItemStatus::grounded) filled = true;
    if (!filled) theta -= config.empty_slot_discount;
  }
  auto degree = backbone_degree(graph);
  if (auto it = degree.find(node.id); it != degree.end() && it->second >= config.hub_degree)
    theta += config.hub_surcharge;
  return theta;
}

GroundingResult ground_candidates(CognitiveGraph& graph, const GroundingConfig& config) {
  constexpr double kSlack = 1e-9;
  GroundingResult result;

  // Thresholds are taken against the graph as it was before this pass, so the
  // promotion order does not change the outcome.
  std::vector<ConceptId> promote;
  for (const auto& [id, c] : graph.concepts)
    if (c.status == ItemStatus::candidate && !c.evidence.empty() &&
        c.confidence + kSlack >= grounding_threshold(graph, c, config))
      promote.push_back(id);
  for (const auto& id : promote) {
    graph.concepts.at(id).status = ItemStatus::grounded;
    result.promoted.push_back(id);
  }

  std::map<ConceptId, std::vector<ConceptId>> succ;
  for (const auto& [id, e] : graph.edges)
    if (e.status == ItemStatus::grounded) succ[e.source].push_back(e.target);
  auto reaches = [&](const ConceptId& from, const ConceptId& to) {
    std::set<ConceptId> seen{from};
    std::vector<ConceptId> todo{from};
    while (!todo.empty()) {
      auto v = todo.back();
      todo.pop_back();
      if (v == to) return true;
      for (const auto& w : succ[v])
        if (seen.insert(w).second) todo.push_back(w);
    }
    return false;
  };
  auto grounded = [&](const ConceptId& id) {
    const Concept* c = graph.find_concept(id);
    return c != nullptr && c->status == ItemStatus::grounded;
  };

  for (auto& [id, e] : graph.edges) {
    if (e.status != ItemStatus::candidate || !grounded(e.source) || !grounded(e.target)) continue;
    if (reaches(e.target, e.source)) {
      bool open = false;
      for (const auto& [xid, x] : graph.conflicts)
        if (x.status == ConflictStatus::open &&
            ((x.a == e.source && x.b == e.target) || (x.a == e.target && x.b == e.source)))
          open = true;
      if (!open) {
        ConflictEdge x;
        x.id = next_free_id(graph.conflicts, "x");
        x.a = e.source;
        x.b = e.target;
        x.description = "grounding " + id + " would close a cycle";
        graph.conflicts.emplace(x.id, x);
        result.conflicts_opened.push_back(x.id);
      }
      continue;
    }
    e.status = ItemStatus::grounded;
    succ[e.source].push_back(e.target);
    result.promoted.push_back(id);
  }
  return result;
}

}  // namespace cog
