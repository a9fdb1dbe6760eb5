#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "cog/graph.hpp"
#include "cog/motif.hpp"

namespace cog {

/// Impact weights and probe threshold. Frozen for the lifetime of a session.
struct ClarificationConfig {
  double alpha_u = 0.40;
  double alpha_s = 0.25;
  double alpha_c = 0.20;
  double alpha_t = 0.15;
  double tau = 0.5;
  double weaken_factor = 0.5;

  /// Throws Error("bad-config") unless all α ≥ 0, they sum to 1 (±1e-9),
  /// and τ and the weaken factor lie in [0,1].
  void validate() const;
  bool operator==(const ClarificationConfig&) const = default;
};

struct ImpactScore {
  MotifId motif;
  double unc = 0.0;
  double cent = 0.0;
  double cov = 0.0;
  double risk = 0.0;
  double value = 0.0;

  bool operator==(const ImpactScore&) const = default;
};

struct Probe {
  ProbeId id;
  MotifId motif;
  ProbeKind kind = ProbeKind::direct_confirmation;
  std::string text;
  int issued_turn = 0;
  bool answered = false;
  std::optional<Verdict> verdict;
  std::optional<std::string> detail;

  bool operator==(const Probe&) const = default;
};

struct ProbeResponse {
  ProbeId probe;
  Verdict verdict = Verdict::defer;
  std::optional<std::string> detail;

  bool operator==(const ProbeResponse&) const = default;
};

/// Question templates keyed by probe kind. Placeholders: {source}, {target},
/// {relation}, {mediator}, {pattern}.
struct ProbeTemplates {
  std::map<ProbeKind, std::string> text;

  static ProbeTemplates defaults();
  static ProbeTemplates load(const std::filesystem::path& path);
  bool operator==(const ProbeTemplates&) const = default;
};

/// Weighted sum α_u·unc + α_s·cent + α_c·(1−cov) + α_t·risk.
double impact_value(double unc, double cent, double cov, double risk, const ClarificationConfig& config);

/// Scores one motif. `task_start_turn` bounds what counts as current-task
/// evidence for the transfer-risk term. Throws Error("stale-motif") when a
/// bound concept or edge is missing or cancelled.
ImpactScore score_impact(const MotifInstance& motif, const CognitiveGraph& graph, int task_start_turn,
                         const ClarificationConfig& config);

/// Risk-dominant → direct confirmation, uncertainty-dominant → counterfactual,
/// centrality-dominant → mediation check; ties favor direct confirmation.
ProbeKind choose_probe_kind(const ImpactScore& score, const ClarificationConfig& config);

/// Fills a template from the motif's first bound edge.
std::string render_probe_text(const ProbeTemplates& templates, ProbeKind kind, const MotifInstance& motif,
                              const CognitiveGraph& graph);

/// One-probe-per-turn guard.
class ProbeBudget {
 public:
  bool spent(int turn) const { return last_turn_ == turn; }
  void spend(int turn);  // throws Error("probe-budget-exhausted")
  int last_turn() const { return last_turn_; }
  void restore(int last_turn) { last_turn_ = last_turn; }

 private:
  int last_turn_ = -1;
};

using ProbeRenderer = std::function<std::string(const ImpactScore&, ProbeKind)>;

/// Highest score strictly above τ (ties by motif id), or nothing. Spends the
/// turn's budget when a probe is produced. The probe id is left empty.
std::optional<Probe> select_probe(std::span<const ImpactScore> scored, const ClarificationConfig& config,
                                  int turn, ProbeBudget& budget, const ProbeRenderer& render = {});

}  // namespace cog
