#include "cog/layout.hpp"

#include <algorithm>
#include <array>
#include <limits>

namespace cog {

namespace {

struct LayeredGraph {
  std::vector<std::vector<std::string>> layers;
  std::map<std::string, int> layer_of;
  std::map<std::string, std::vector<std::string>> upper, lower;  // neighbors in adjacent layers
  std::vector<std::pair<std::string, std::string>> segments;
  std::set<std::string> virtual_nodes;
};

bool is_virtual(const std::string& id) { return !id.empty() && id.front() == '~'; }

std::map<std::string, int> positions_of(const std::vector<std::vector<std::string>>& layers) {
  std::map<std::string, int> pos;
  for (const auto& layer : layers)
    for (std::size_t i = 0; i < layer.size(); ++i) pos[layer[i]] = static_cast<int>(i);
  return pos;
}

int crossings_between(const std::vector<std::pair<int, int>>& segs) {
  int count = 0;
  for (std::size_t i = 0; i < segs.size(); ++i)
    for (std::size_t j = i + 1; j < segs.size(); ++j) {
      auto [a, b] = segs[i];
      auto [c, d] = segs[j];
      if ((a < c && b > d) || (a > c && b < d)) ++count;
    }
  return count;
}

// Barycenter reorder of one layer against a neighbor layer. Fixed nodes keep
// their relative order; movable nodes are sorted by barycenter and merged in.
std::vector<std::string> reorder(const std::vector<std::string>& layer,
                                 const std::map<std::string, std::vector<std::string>>& neighbors,
                                 const std::map<std::string, int>& neighbor_pos,
                                 const std::map<std::string, int>& fixed_rank) {
  std::map<std::string, double> bary;
  for (std::size_t i = 0; i < layer.size(); ++i) {
    const auto& v = layer[i];
    auto it = neighbors.find(v);
    if (it == neighbors.end() || it->second.empty()) {
      bary[v] = static_cast<double>(i);
      continue;
    }
    double sum = 0.0;
    for (const auto& u : it->second) sum += neighbor_pos.at(u);
    bary[v] = sum / static_cast<double>(it->second.size());
  }
  std::vector<std::string> fixed, movable;
  for (const auto& v : layer) (fixed_rank.count(v) ? fixed : movable).push_back(v);
  std::sort(fixed.begin(), fixed.end(),
            [&](const std::string& a, const std::string& b) { return fixed_rank.at(a) < fixed_rank.at(b); });
  std::map<std::string, int> current;
  for (std::size_t i = 0; i < layer.size(); ++i) current[layer[i]] = static_cast<int>(i);
  std::stable_sort(movable.begin(), movable.end(), [&](const std::string& a, const std::string& b) {
    if (bary[a] != bary[b]) return bary[a] < bary[b];
    return current[a] < current[b];
  });
  std::vector<std::string> out;
  std::size_t i = 0, j = 0;
  while (i < movable.size() || j < fixed.size()) {
    if (j == fixed.size() || (i < movable.size() && bary[movable[i]] < bary[fixed[j]]))
      out.push_back(movable[i++]);
    else
      out.push_back(fixed[j++]);
  }
  return out;
}

// Brandes–Köpf coordinate assignment over a fixed layered order.
class CoordinateAssigner {
 public:
  CoordinateAssigner(const LayeredGraph& lg, const std::vector<std::vector<std::string>>& order)
      : lg_(lg), order_(order), pos_(positions_of(order)) {
    mark_type1_conflicts();
  }

  std::map<std::string, double> run() {
    std::array<std::map<std::string, double>, 4> xs;
    int k = 0;
    for (bool down : {true, false})
      for (bool left : {true, false}) xs[k++] = place(down, left);

    std::array<double, 4> lo{}, hi{};
    int smallest = 0;
    for (int i = 0; i < 4; ++i) {
      lo[i] = std::numeric_limits<double>::infinity();
      hi[i] = -std::numeric_limits<double>::infinity();
      for (const auto& [v, x] : xs[i]) {
        lo[i] = std::min(lo[i], x);
        hi[i] = std::max(hi[i], x);
      }
      if (hi[i] - lo[i] < hi[smallest] - lo[smallest]) smallest = i;
    }
    for (int i = 0; i < 4; ++i) {
      const bool left = i % 2 == 0;
      const double shift = left ? lo[smallest] - lo[i] : hi[smallest] - hi[i];
      for (auto& [v, x] : xs[i]) x += shift;
    }
    std::map<std::string, double> out;
    for (const auto& [v, x0] : xs[0]) {
      std::array<double, 4> vals{x0, xs[1].at(v), xs[2].at(v), xs[3].at(v)};
      std::sort(vals.begin(), vals.end());
      out[v] = (vals[1] + vals[2]) / 2.0;
    }
    return out;
  }

 private:
  const LayeredGraph& lg_;
  const std::vector<std::vector<std::string>>& order_;
  std::map<std::string, int> pos_;
  std::set<std::pair<std::string, std::string>> marked_;  // upper, lower

  void mark_type1_conflicts() {
    // A non-inner segment crossing an inner (virtual–virtual) segment loses.
    for (std::size_t l = 0; l + 1 < order_.size(); ++l) {
      std::vector<std::pair<std::string, std::string>> segs;
      for (const auto& v : order_[l + 1]) {
        auto it = lg_.upper.find(v);
        if (it == lg_.upper.end()) continue;
        for (const auto& u : it->second) segs.push_back({u, v});
      }
      for (const auto& inner : segs) {
        if (!is_virtual(inner.first) || !is_virtual(inner.second)) continue;
        for (const auto& other : segs) {
          if (is_virtual(other.first) && is_virtual(other.second)) continue;
          const int a = pos_.at(inner.first), b = pos_.at(inner.second);
          const int c = pos_.at(other.first), d = pos_.at(other.second);
          if ((a < c && b > d) || (a > c && b < d)) marked_.insert(other);
        }
      }
    }
  }

  std::map<std::string, double> place(bool down, bool left) {
    std::map<std::string, std::string> root, align;
    for (const auto& layer : order_)
      for (const auto& v : layer) root[v] = align[v] = v;

    const int n_layers = static_cast<int>(order_.size());
    for (int step = 0; step < n_layers; ++step) {
      const int l = down ? step : n_layers - 1 - step;
      std::vector<std::string> layer = order_[l];
      if (!left) std::reverse(layer.begin(), layer.end());
      int r = left ? -1 : std::numeric_limits<int>::max();
      for (const auto& v : layer) {
        const auto& nbr_map = down ? lg_.upper : lg_.lower;
        auto it = nbr_map.find(v);
        if (it == nbr_map.end() || it->second.empty()) continue;
        std::vector<std::string> nbrs = it->second;
        std::sort(nbrs.begin(), nbrs.end(),
                  [&](const std::string& a, const std::string& b) { return pos_.at(a) < pos_.at(b); });
        const int d = static_cast<int>(nbrs.size());
        std::vector<int> medians{(d - 1) / 2, d / 2};
        if (medians[0] == medians[1]) medians.pop_back();
        if (!left) std::reverse(medians.begin(), medians.end());
        for (int m : medians) {
          if (align[v] != v) break;
          const auto& u = nbrs[m];
          auto seg = down ? std::make_pair(u, v) : std::make_pair(v, u);
          if (marked_.count(seg)) continue;
          const int pu = pos_.at(u);
          if (left ? r < pu : r > pu) {
            align[u] = v;
            root[v] = root[u];
            align[v] = root[v];
            r = pu;
          }
        }
      }
    }

    // Block graph: a block must sit at least one unit right of its left
    // neighbor's block in every layer. Longest path gives compact x.
    std::map<std::string, std::set<std::string>> succ;
    std::map<std::string, int> indeg;
    for (const auto& [v, r] : root) indeg[r];
    for (const auto& layer : order_) {
      std::vector<std::string> seq = layer;
      if (!left) std::reverse(seq.begin(), seq.end());
      for (std::size_t i = 1; i < seq.size(); ++i) {
        const auto& a = root.at(seq[i - 1]);
        const auto& b = root.at(seq[i]);
        if (a != b && succ[a].insert(b).second) ++indeg[b];
      }
    }
    std::map<std::string, double> block_x;
    std::set<std::string> ready;
    for (const auto& [r, d] : indeg)
      if (d == 0) ready.insert(r);
    for (const auto& [r, d] : indeg) block_x[r] = 0.0;
    while (!ready.empty()) {
      auto r = *ready.begin();
      ready.erase(ready.begin());
      for (const auto& s : succ[r]) {
        block_x[s] = std::max(block_x[s], block_x[r] + 1.0);
        if (--indeg[s] == 0) ready.insert(s);
      }
    }
    std::map<std::string, double> x;
    for (const auto& [v, r] : root) x[v] = left ? block_x.at(r) : -block_x.at(r);
    return x;
  }
};

LayeredGraph build_layers(const CognitiveGraph& graph, const std::optional<LayoutSnapshot>& previous,
                          const std::set<ConceptId>& touched, std::map<std::string, int>& fixed_rank) {
  auto topo = topological_order(graph);  // throws cyclic-backbone
  std::map<ConceptId, std::vector<const DependencyEdge*>> in_edges;
  for (const DependencyEdge* e : backbone_edges(graph)) in_edges[e->target].push_back(e);

  LayeredGraph lg;
  auto pinned = [&](const ConceptId& id) {
    return previous && previous->positions.count(id) && !touched.count(id);
  };
  for (const auto& v : topo) {
    int layer = 0;
    for (const DependencyEdge* e : in_edges[v]) layer = std::max(layer, lg.layer_of.at(e->source) + 1);
    if (pinned(v)) layer = std::max(layer, previous->positions.at(v).layer);
    lg.layer_of[v] = layer;
  }
  int depth = 0;
  for (const auto& [v, l] : lg.layer_of) depth = std::max(depth, l + 1);
  lg.layers.assign(depth, {});

  // Fixed nodes: pinned concepts that kept their previous layer, ranked by
  // their previous in-layer index.
  if (previous) {
    for (const auto& ordering : previous->orderings)
      for (std::size_t i = 0; i < ordering.size(); ++i) {
        const auto& v = ordering[i];
        auto it = lg.layer_of.find(v);
        if (it != lg.layer_of.end() && pinned(v) && it->second == previous->positions.at(v).layer)
          fixed_rank[v] = static_cast<int>(i);
      }
  }

  std::vector<std::string> all;
  for (const auto& v : topo) all.push_back(v);
  std::sort(all.begin(), all.end());
  for (const auto& v : all) lg.layers[lg.layer_of[v]].push_back(v);

  for (const DependencyEdge* e : backbone_edges(graph)) {
    const int from = lg.layer_of.at(e->source), to = lg.layer_of.at(e->target);
    std::string prev = e->source;
    for (int l = from + 1; l < to; ++l) {
      std::string dummy = "~" + e->id + "#" + std::to_string(l - from);
      lg.layer_of[dummy] = l;
      lg.layers[l].push_back(dummy);
      lg.virtual_nodes.insert(dummy);
      lg.segments.push_back({prev, dummy});
      prev = dummy;
    }
    lg.segments.push_back({prev, e->target});
  }
  for (const auto& [u, v] : lg.segments) {
    lg.lower[u].push_back(v);
    lg.upper[v].push_back(u);
  }

  // Initial order: fixed nodes by previous rank first, then everything else by id.
  for (auto& layer : lg.layers)
    std::stable_sort(layer.begin(), layer.end(), [&](const std::string& a, const std::string& b) {
      const bool fa = fixed_rank.count(a), fb = fixed_rank.count(b);
      if (fa != fb) return fa;
      if (fa) return fixed_rank.at(a) < fixed_rank.at(b);
      return false;
    });
  return lg;
}

LayeredArrangement arrangement_of(const LayeredGraph& lg, std::vector<std::vector<std::string>> layers) {
  return {std::move(layers), lg.segments};
}

}  // namespace

int count_crossings(const LayeredArrangement& arrangement) {
  auto pos = positions_of(arrangement.layers);
  std::map<int, std::vector<std::pair<int, int>>> by_layer;
  std::map<std::string, int> layer_of;
  for (std::size_t l = 0; l < arrangement.layers.size(); ++l)
    for (const auto& v : arrangement.layers[l]) layer_of[v] = static_cast<int>(l);
  for (const auto& [u, v] : arrangement.segments)
    by_layer[layer_of.at(u)].push_back({pos.at(u), pos.at(v)});
  int total = 0;
  for (const auto& [l, segs] : by_layer) total += crossings_between(segs);
  return total;
}

LayoutTrace compute_layout_traced(const CognitiveGraph& graph, const std::optional<LayoutSnapshot>& previous,
                                  const std::set<ConceptId>& touched) {
  std::map<std::string, int> fixed_rank;
  LayeredGraph lg = build_layers(graph, previous, touched, fixed_rank);

  auto sweep = [&](std::vector<std::vector<std::string>> layers, bool down) {
    const int n = static_cast<int>(layers.size());
    for (int step = 1; step < n; ++step) {
      const int l = down ? step : n - 1 - step;
      const int ref = down ? l - 1 : l + 1;
      auto ref_pos = positions_of({layers[ref]});
      layers[l] = reorder(layers[l], down ? lg.upper : lg.lower, ref_pos, fixed_rank);
    }
    return layers;
  };

  LayoutTrace trace;
  trace.initial = arrangement_of(lg, lg.layers);
  auto first = sweep(lg.layers, true);
  auto second = sweep(first, false);
  std::vector<LayeredArrangement> options{trace.initial, arrangement_of(lg, first), arrangement_of(lg, second)};
  trace.initial_crossings = count_crossings(options[0]);
  std::size_t best = 0;
  int best_crossings = trace.initial_crossings;
  for (std::size_t i = 1; i < options.size(); ++i) {
    const int c = count_crossings(options[i]);
    if (c < best_crossings) {
      best = i;
      best_crossings = c;
    }
  }
  trace.final = options[best];
  trace.final_crossings = best_crossings;

  CoordinateAssigner assign(lg, trace.final.layers);
  auto x = assign.run();
  double min_x = std::numeric_limits<double>::infinity();
  for (const auto& [v, xv] : x)
    if (!is_virtual(v)) min_x = std::min(min_x, xv);

  LayoutSnapshot& snap = trace.snapshot;
  snap.basis_turn = graph.turn_counter;
  for (const auto& layer : trace.final.layers) {
    std::vector<ConceptId> ids;
    for (const auto& v : layer)
      if (!is_virtual(v)) {
        ids.push_back(v);
        snap.positions[v] = {lg.layer_of.at(v), x.at(v) - min_x};
      }
    snap.orderings.push_back(std::move(ids));
  }
  return trace;
}

LayoutSnapshot compute_layout(const CognitiveGraph& graph, const std::optional<LayoutSnapshot>& previous,
                              const std::set<ConceptId>& touched) {
  return compute_layout_traced(graph, previous, touched).snapshot;
}

StabilityReport stability_report(const LayoutSnapshot& previous, const LayoutSnapshot& current,
                                 const std::set<ConceptId>& touched) {
  std::vector<ConceptId> stable;
  for (const auto& [id, p] : previous.positions)
    if (current.positions.count(id) && !touched.count(id)) stable.push_back(id);

  auto rank = [](const LayoutSnapshot& s) {
    std::map<ConceptId, int> r;
    for (const auto& layer : s.orderings)
      for (std::size_t i = 0; i < layer.size(); ++i) r[layer[i]] = static_cast<int>(i);
    return r;
  };
  auto prev_rank = rank(previous), cur_rank = rank(current);

  StabilityReport report;
  int kept = 0;
  for (const auto& id : stable) kept += previous.positions.at(id).layer == current.positions.at(id).layer;
  if (!stable.empty()) report.layer_preserved = static_cast<double>(kept) / static_cast<double>(stable.size());

  int pairs = 0, ordered = 0;
  for (std::size_t i = 0; i < stable.size(); ++i)
    for (std::size_t j = i + 1; j < stable.size(); ++j) {
      const auto &a = stable[i], &b = stable[j];
      if (previous.positions.at(a).layer != previous.positions.at(b).layer) continue;
      if (current.positions.at(a).layer != current.positions.at(b).layer) continue;
      ++pairs;
      const bool before = prev_rank.at(a) < prev_rank.at(b);
      const bool after = cur_rank.at(a) < cur_rank.at(b);
      ordered += before == after;
    }
  if (pairs > 0) report.order_preserved = static_cast<double>(ordered) / static_cast<double>(pairs);
  return report;
}

}  // namespace cog
