#include <gtest/gtest.h>

#include "support.hpp"

using namespace cog;
using namespace cogtest;

namespace {

CognitiveGraph chain() {
  CognitiveGraph g;
  for (auto id : {"A", "B", "C"}) put_concept(g, make_concept(id));
  put_edge(g, make_edge("e1", "A", "B"));
  put_edge(g, make_edge("e2", "B", "C"));
  return g;
}

// Crossings counted pairwise from scratch.
int brute_crossings(const LayeredArrangement& a) {
  std::map<std::string, std::pair<int, int>> where;
  for (std::size_t l = 0; l < a.layers.size(); ++l)
    for (std::size_t i = 0; i < a.layers[l].size(); ++i) where[a.layers[l][i]] = {static_cast<int>(l), static_cast<int>(i)};
  int n = 0;
  for (std::size_t i = 0; i < a.segments.size(); ++i)
    for (std::size_t j = i + 1; j < a.segments.size(); ++j) {
      auto [u1, v1] = a.segments[i];
      auto [u2, v2] = a.segments[j];
      if (where[u1].first != where[u2].first) continue;
      int du = where[u1].second - where[u2].second, dv = where[v1].second - where[v2].second;
      n += (du < 0 && dv > 0) || (du > 0 && dv < 0);
    }
  return n;
}

// New concepts, endpoints of changed edges, and everything below them.
std::set<ConceptId> touched_between(const CognitiveGraph& before, const CognitiveGraph& after) {
  std::set<ConceptId> seeds;
  for (const auto& [id, c] : after.concepts)
    if (!before.concepts.count(id)) seeds.insert(id);
  for (const auto& [id, e] : after.edges)
    if (!before.edges.count(id)) {
      seeds.insert(e.source);
      seeds.insert(e.target);
    }
  std::set<ConceptId> out;
  for (const auto& s : seeds) {
    out.insert(s);
    for (const auto& d : backbone_descendants(after, s)) out.insert(d);
  }
  return out;
}

}  // namespace

TEST(Layout, Empty) {
  auto snap = compute_layout(CognitiveGraph{});
  EXPECT_TRUE(snap.positions.empty());
  EXPECT_TRUE(snap.orderings.empty());
}

TEST(Layout, ChainLayers) {
  auto snap = compute_layout(chain());
  EXPECT_EQ(snap.positions.at("A").layer, 0);
  EXPECT_EQ(snap.positions.at("B").layer, 1);
  EXPECT_EQ(snap.positions.at("C").layer, 2);
}

TEST(Layout, LeafAdditionKeepsTheRest) {
  CognitiveGraph g = chain();
  auto before = compute_layout(g);
  put_concept(g, make_concept("D"));
  put_edge(g, make_edge("e3", "C", "D"));
  auto after = compute_layout(g, before, {"D"});
  for (auto id : {"A", "B", "C"}) EXPECT_EQ(after.positions.at(id).layer, before.positions.at(id).layer);
  EXPECT_EQ(after.positions.at("D").layer, 3);
  auto r = stability_report(before, after, {"D"});
  EXPECT_EQ(r.order_preserved, 1.0);
  EXPECT_EQ(r.layer_preserved, 1.0);
}

TEST(Layout, IdenticalSnapshotsAreStable) {
  auto snap = compute_layout(chain());
  EXPECT_EQ(stability_report(snap, snap, {}), (StabilityReport{1.0, 1.0}));
}

TEST(Layout, MovedNodeIsFlagged) {
  auto snap = compute_layout(chain());
  auto moved = snap;
  moved.positions.at("B").layer = 2;
  EXPECT_LT(stability_report(snap, moved, {}).layer_preserved, 1.0);
  // Swapped order within a layer.
  CognitiveGraph g;
  for (auto id : {"A", "B"}) put_concept(g, make_concept(id));
  auto flat = compute_layout(g);
  auto swapped = flat;
  std::reverse(swapped.orderings[0].begin(), swapped.orderings[0].end());
  EXPECT_LT(stability_report(flat, swapped, {}).order_preserved, 1.0);
}

TEST(Layout, CycleRejected) {
  CognitiveGraph g = chain();
  put_edge(g, make_edge("e3", "C", "A"));
  try {
    compute_layout(g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "cyclic-backbone");
  }
}

TEST(Layout, LongEdgesGetVirtualNodes) {
  CognitiveGraph g = chain();
  put_edge(g, make_edge("e3", "A", "C"));
  auto trace = compute_layout_traced(g);
  ASSERT_EQ(trace.final.layers.size(), 3u);
  EXPECT_EQ(trace.final.layers[1].size(), 2u);  // B and the dummy of e3
  for (const auto& o : trace.snapshot.orderings)
    for (const auto& id : o) EXPECT_NE(id.front(), '~');
}

TEST(Layout, RandomGrowthProperties) {
  std::mt19937 rng(51);
  for (int run = 0; run < 60; ++run) {
    CognitiveGraph g;
    std::optional<LayoutSnapshot> prev;
    int n = 0, e = 0;
    for (int step = 0; step < 15; ++step) {
      CognitiveGraph before = g;
      // Grow: a new concept, then a few forward edges (ids order the DAG).
      put_concept(g, make_concept(nid("c", ++n)));
      for (int k = 0; k < 2 && n > 1; ++k) {
        int a = 1 + static_cast<int>(rng() % (n - 1));
        int b = a + 1 + static_cast<int>(rng() % (n - a));
        if (!g.find_live_edge(nid("c", a), nid("c", b), Relation::enable))
          put_edge(g, make_edge(nid("e", ++e), nid("c", a), nid("c", b)));
      }
      auto touched = touched_between(before, g);
      auto trace = compute_layout_traced(g, prev, touched);
      const auto& snap = trace.snapshot;
      for (const auto& [id, edge] : g.edges)
        ASSERT_LT(snap.positions.at(edge.source).layer, snap.positions.at(edge.target).layer);
      ASSERT_LE(trace.final_crossings, trace.initial_crossings);
      ASSERT_EQ(count_crossings(trace.final), brute_crossings(trace.final));
      ASSERT_EQ(count_crossings(trace.initial), brute_crossings(trace.initial));
      for (const auto& layer : snap.orderings)
        for (std::size_t i = 1; i < layer.size(); ++i)
          ASSERT_GE(snap.positions.at(layer[i]).x - snap.positions.at(layer[i - 1]).x, 1.0 - 1e-9);
      if (prev) {
        auto r = stability_report(*prev, snap, touched);
        ASSERT_EQ(r.layer_preserved, 1.0);
        ASSERT_EQ(r.order_preserved, 1.0);
      }
      // Same inputs, same drawing.
      ASSERT_EQ(compute_layout(g, prev, touched), snap);
      prev = snap;
    }
  }
}
