#include "cog/clarification.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "cog/serialization.hpp"

namespace cog {

void ClarificationConfig::validate() const {
  for (double a : {alpha_u, alpha_s, alpha_c, alpha_t})
    if (!(a >= 0.0)) throw Error("bad-config", "negative impact weight");
  if (std::abs(alpha_u + alpha_s + alpha_c + alpha_t - 1.0) > 1e-9)
    throw Error("bad-config", "impact weights must sum to 1");
  if (!(tau >= 0.0 && tau <= 1.0)) throw Error("bad-config", "tau outside [0,1]");
  if (!(weaken_factor >= 0.0 && weaken_factor <= 1.0)) throw Error("bad-config", "weaken factor outside [0,1]");
}

ProbeTemplates ProbeTemplates::defaults() {
  ProbeTemplates t;
  t.text[ProbeKind::direct_confirmation] = "Is it right that {source} {relation} {target}?";
  t.text[ProbeKind::counterfactual] = "If {source} changed, would {target} still hold?";
  t.text[ProbeKind::mediation_check] = "Does {source} affect {target} directly, or through {mediator}?";
  return t;
}

ProbeTemplates ProbeTemplates::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("parse-failure", "cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return parse_json(text).get<ProbeTemplates>();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error("parse-failure", e.what());
  }
}

double impact_value(double unc, double cent, double cov, double risk, const ClarificationConfig& config) {
  return config.alpha_u * unc + config.alpha_s * cent + config.alpha_c * (1.0 - cov) + config.alpha_t * risk;
}

ImpactScore score_impact(const MotifInstance& motif, const CognitiveGraph& graph, int task_start_turn,
                         const ClarificationConfig& config) {
  if (motif.status != MotifStatus::uncertain && motif.status != MotifStatus::active)
    throw Error("stale-motif", motif.id + " is " + std::string(to_string(motif.status)));
  ImpactScore score;
  score.motif = motif.id;

  std::set<std::string> bound;
  double strength_sum = 0.0;
  for (const auto& eid : motif.edges) {
    const DependencyEdge* e = graph.find_edge(eid);
    if (e == nullptr || !is_live(e->status)) throw Error("stale-motif", motif.id + " edge " + eid);
    strength_sum += e->strength;
    bound.insert(eid);
  }
  auto ids = motif.concept_ids();
  if (ids.empty() || motif.edges.empty()) throw Error("stale-motif", motif.id + " binds nothing");

  auto degree = backbone_degree(graph);
  int max_degree = 0;
  for (const auto& [id, d] : degree) max_degree = std::max(max_degree, d);
  double cent_sum = 0.0;
  int covered = 0;
  for (const auto& id : ids) {
    const Concept* c = graph.find_concept(id);
    if (c == nullptr || !is_live(c->status)) throw Error("stale-motif", motif.id + " concept " + id);
    if (max_degree > 0) cent_sum += static_cast<double>(degree[id]) / max_degree;
    if (c->provenance == Provenance::user_confirmed || c->provenance == Provenance::co_authored) ++covered;
    bound.insert(id);
  }

  score.unc = 1.0 - strength_sum / static_cast<double>(motif.edges.size());
  score.cent = cent_sum / static_cast<double>(ids.size());
  score.cov = static_cast<double>(covered) / static_cast<double>(ids.size());
  if (motif.provenance == Provenance::transfer_based) {
    bool supported = false;
    for (const auto& [vid, rec] : graph.evidence)
      if (rec.turn >= task_start_turn && bound.count(rec.target)) supported = true;
    score.risk = supported ? 0.0 : 1.0;
  }
  score.value = impact_value(score.unc, score.cent, score.cov, score.risk, config);
  return score;
}

ProbeKind choose_probe_kind(const ImpactScore& score, const ClarificationConfig& config) {
  const double risk = config.alpha_t * score.risk;
  const double unc = config.alpha_u * score.unc;
  const double cent = config.alpha_s * score.cent;
  const double top = std::max({risk, unc, cent});
  const int hits = (risk == top) + (unc == top) + (cent == top);
  if (hits > 1 || risk == top) return ProbeKind::direct_confirmation;
  return unc == top ? ProbeKind::counterfactual : ProbeKind::mediation_check;
}

namespace {

void replace_all(std::string& text, const std::string& key, const std::string& value) {
  for (auto pos = text.find(key); pos != std::string::npos; pos = text.find(key, pos + value.size()))
    text.replace(pos, key.size(), value);
}

}  // namespace

std::string render_probe_text(const ProbeTemplates& templates, ProbeKind kind, const MotifInstance& motif,
                              const CognitiveGraph& graph) {
  auto it = templates.text.find(kind);
  std::string text = it == templates.text.end() ? ProbeTemplates::defaults().text.at(kind) : it->second;
  std::string source = "?", target = "?", relation = "?", mediator = "another factor";
  const DependencyEdge* first = motif.edges.empty() ? nullptr : graph.find_edge(motif.edges.front());
  auto label = [&](const ConceptId& id) {
    const Concept* c = graph.find_concept(id);
    return c == nullptr ? id : c->label;
  };
  if (first != nullptr) {
    source = label(first->source);
    target = label(first->target);
    relation = std::string(to_string(first->relation));
    for (const auto& id : motif.concept_ids())
      if (id != first->source && id != first->target) {
        mediator = label(id);
        break;
      }
  }
  replace_all(text, "{source}", source);
  replace_all(text, "{target}", target);
  replace_all(text, "{relation}", relation);
  replace_all(text, "{mediator}", mediator);
  replace_all(text, "{pattern}", motif.pattern);
  return text;
}

void ProbeBudget::spend(int turn) {
  if (spent(turn)) throw Error("probe-budget-exhausted", "turn " + std::to_string(turn));
  last_turn_ = turn;
}

std::optional<Probe> select_probe(std::span<const ImpactScore> scored, const ClarificationConfig& config, int turn,
                                  ProbeBudget& budget, const ProbeRenderer& render) {
  if (budget.spent(turn)) throw Error("probe-budget-exhausted", "turn " + std::to_string(turn));
  const ImpactScore* best = nullptr;
  for (const auto& s : scored) {
    if (!(s.value > config.tau)) continue;
    if (best == nullptr || s.value > best->value || (s.value == best->value && s.motif < best->motif)) best = &s;
  }
  if (best == nullptr) return std::nullopt;
  budget.spend(turn);
  Probe probe;
  probe.motif = best->motif;
  probe.kind = choose_probe_kind(*best, config);
  probe.issued_turn = turn;
  if (render) probe.text = render(*best, probe.kind);
  return probe;
}

}  // namespace cog
