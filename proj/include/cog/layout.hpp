#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cog/graph.hpp"

namespace cog {

struct LayoutPosition {
  int layer = 0;
  double x = 0.0;

  bool operator==(const LayoutPosition&) const = default;
};

struct LayoutSnapshot {
  std::map<ConceptId, LayoutPosition> positions;
  std::vector<std::vector<ConceptId>> orderings;  // per layer, left to right
  int basis_turn = 0;

  bool operator==(const LayoutSnapshot&) const = default;
};

/// Layered arrangement including virtual nodes ("~<edge>#k") for edges that
/// span more than one layer. Exposed so crossing counts can be checked.
struct LayeredArrangement {
  std::vector<std::vector<std::string>> layers;
  std::vector<std::pair<std::string, std::string>> segments;  // upper → lower, adjacent layers

  bool operator==(const LayeredArrangement&) const = default;
};

struct LayoutTrace {
  LayoutSnapshot snapshot;
  LayeredArrangement initial;  // id-ordered, or seeded from the previous snapshot
  LayeredArrangement final;
  int initial_crossings = 0;
  int final_crossings = 0;
};

/// Layered drawing of the backbone. Concepts present in `previous` and not in
/// `touched` keep their layer and relative in-layer order. Throws
/// Error("cyclic-backbone").
LayoutSnapshot compute_layout(const CognitiveGraph& graph,
                              const std::optional<LayoutSnapshot>& previous = std::nullopt,
                              const std::set<ConceptId>& touched = {});

LayoutTrace compute_layout_traced(const CognitiveGraph& graph,
                                  const std::optional<LayoutSnapshot>& previous = std::nullopt,
                                  const std::set<ConceptId>& touched = {});

int count_crossings(const LayeredArrangement& arrangement);

struct StabilityReport {
  double order_preserved = 1.0;
  double layer_preserved = 1.0;

  bool operator==(const StabilityReport&) const = default;
};

/// Fractions over concepts present in both snapshots and not touched:
/// layers kept, and same-layer pairs whose relative order is kept.
StabilityReport stability_report(const LayoutSnapshot& previous, const LayoutSnapshot& current,
                                 const std::set<ConceptId>& touched);

}  // namespace cog
