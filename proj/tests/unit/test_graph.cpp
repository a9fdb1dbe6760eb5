#include <gtest/gtest.h>

#include <queue>

#include "support.hpp"

using namespace cog;
using namespace cogtest;

namespace {

CognitiveGraph triangle(double sab, double sbc, double sca, int tab = 0, int tbc = 0, int tca = 0) {
  CognitiveGraph g;
  for (auto id : {"A", "B", "C"}) put_concept(g, make_concept(id));
  put_edge(g, make_edge("e1", "A", "B", Relation::enable, sab, ItemStatus::grounded, tab));
  put_edge(g, make_edge("e2", "B", "C", Relation::enable, sbc, ItemStatus::grounded, tbc));
  put_edge(g, make_edge("e3", "C", "A", Relation::enable, sca, ItemStatus::grounded, tca));
  return g;
}

bool has_violation(const ValidationReport& r, const std::string& name) {
  for (const auto& v : r.violations)
    if (v.invariant == name) return true;
  return false;
}

}  // namespace

TEST(Validate, EmptyGraphIsOk) {
  auto r = validate_backbone(CognitiveGraph{});
  EXPECT_TRUE(r.ok);
  EXPECT_TRUE(r.violations.empty());
}

TEST(Validate, DanglingEndpoint) {
  CognitiveGraph g;
  put_concept(g, make_concept("A"));
  put_edge(g, make_edge("e1", "A", "missing"));
  auto r = validate_backbone(g);
  EXPECT_FALSE(r.ok);
  EXPECT_TRUE(has_violation(r, "dangling-endpoint"));
}

TEST(Validate, ThreeCycleListsItsEdges) {
  auto r = validate_backbone(triangle(0.5, 0.5, 0.5));
  ASSERT_FALSE(r.ok);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].invariant, "backbone-cycle");
  EXPECT_EQ(r.violations[0].ids, (std::vector<std::string>{"e1", "e2", "e3"}));
}

TEST(Validate, OtherInvariants) {
  CognitiveGraph g;
  Concept a = make_concept("A", ConceptKind::belief, ItemStatus::grounded);
  a.confidence = 1.5;
  g.concepts["A"] = a;  // grounded, no evidence, out of range
  put_concept(g, make_concept("B"));
  put_concept(g, make_concept("Z", ConceptKind::belief, ItemStatus::cancelled));
  put_edge(g, make_edge("e1", "B", "B"));
  put_edge(g, make_edge("e2", "B", "Z"));
  put_edge(g, make_edge("e3", "A", "B", Relation::enable, 1.2));
  put_edge(g, make_edge("e4", "A", "B", Relation::enable, 0.3));
  auto r = validate_backbone(g);
  for (auto name : {"confidence-range", "grounded-without-evidence", "self-loop", "cancelled-endpoint",
                    "strength-range", "duplicate-edge"})
    EXPECT_TRUE(has_violation(r, name)) << name;
}

TEST(Validate, CancelledEdgesAreIgnored) {
  CognitiveGraph g = triangle(0.5, 0.5, 0.5);
  g.edges.at("e3").status = ItemStatus::cancelled;
  EXPECT_TRUE(validate_backbone(g).ok);
}

TEST(DetectCycles, Examples) {
  EXPECT_TRUE(detect_cycles(CognitiveGraph{}).empty());
  EXPECT_EQ(detect_cycles(triangle(0.5, 0.5, 0.5)), (std::vector<std::vector<ConceptId>>{{"A", "B", "C"}}));

  CognitiveGraph g;
  for (auto id : {"A", "B", "C", "D", "E", "F"}) put_concept(g, make_concept(id));
  put_edge(g, make_edge("e1", "A", "B"));
  put_edge(g, make_edge("e2", "B", "A"));
  put_edge(g, make_edge("e3", "C", "D"));
  put_edge(g, make_edge("e4", "D", "C"));
  put_edge(g, make_edge("e5", "D", "E"));
  put_edge(g, make_edge("e6", "E", "F"));
  EXPECT_EQ(detect_cycles(g), (std::vector<std::vector<ConceptId>>{{"A", "B"}, {"C", "D"}}));
}

TEST(DetectCycles, MatchesReachabilityOracle) {
  std::mt19937 rng(11);
  for (int i = 0; i < 1500; ++i) {
    int n = 1 + static_cast<int>(rng() % 8);
    double p = (rng() % 5 + 1) / 10.0;
    CognitiveGraph g = random_digraph(rng, n, p);
    if (rng() % 3 == 0 && !g.edges.empty()) g.edges.begin()->second.status = ItemStatus::cancelled;
    ASSERT_EQ(detect_cycles(g), scc_oracle(g)) << "graph " << i;
  }
}

TEST(RepairCycles, AcyclicUnchanged) {
  CognitiveGraph g = triangle(0.5, 0.5, 0.5);
  g.edges.at("e3").status = ItemStatus::cancelled;
  auto r = repair_cycles(g);
  EXPECT_TRUE(r.removed.empty());
  EXPECT_EQ(r.graph, g);
}

TEST(RepairCycles, RemovesMinimumStrength) {
  auto r = repair_cycles(triangle(0.9, 0.7, 0.4));
  EXPECT_EQ(r.removed, (std::vector<EdgeId>{"e3"}));
  EXPECT_EQ(r.graph.edges.at("e3").status, ItemStatus::cancelled);
  EXPECT_NE(r.graph.edges.at("e3").rationale->find("cycle repair"), std::string::npos);
  EXPECT_TRUE(validate_backbone(r.graph).ok);
}

TEST(RepairCycles, TieGoesToMostRecent) {
  auto r = repair_cycles(triangle(0.5, 0.5, 0.9, 1, 4, 0));
  EXPECT_EQ(r.removed, (std::vector<EdgeId>{"e2"}));
  // Same turn too: the larger id goes.
  r = repair_cycles(triangle(0.5, 0.5, 0.9, 2, 2, 0));
  EXPECT_EQ(r.removed, (std::vector<EdgeId>{"e2"}));
}

TEST(RepairCycles, MatchesRemovalOracle) {
  std::mt19937 rng(12);
  for (int i = 0; i < 1500; ++i) {
    CognitiveGraph g = random_digraph(rng, 2 + static_cast<int>(rng() % 5), 0.45);
    auto r = repair_cycles(g);
    ASSERT_EQ(r.removed, repair_oracle(g));
    ASSERT_FALSE(has_cycle_oracle(r.graph));
    // Idempotent once acyclic.
    auto again = repair_cycles(r.graph);
    ASSERT_TRUE(again.removed.empty());
    ASSERT_EQ(again.graph, r.graph);
  }
}

TEST(Attach, SingleNode) {
  CognitiveGraph g;
  put_concept(g, make_concept("X"));
  Concept n = make_concept("N", ConceptKind::belief, ItemStatus::candidate);
  auto e = attach_concept(g, n, "X");
  EXPECT_EQ(e.source, "X");
  EXPECT_EQ(e.target, "N");
  EXPECT_EQ(e.status, ItemStatus::candidate);
}

TEST(Attach, LabelMatchDownChain) {
  CognitiveGraph g;
  put_concept(g, make_concept("A", ConceptKind::belief, ItemStatus::grounded, std::nullopt, "budget limit"));
  put_concept(g, make_concept("B", ConceptKind::belief, ItemStatus::grounded, std::nullopt, "option cost"));
  put_concept(g, make_concept("C", ConceptKind::belief, ItemStatus::grounded, std::nullopt, "quiet beach"));
  put_edge(g, make_edge("e1", "A", "B"));
  put_edge(g, make_edge("e2", "B", "C"));
  Concept n = make_concept("N", ConceptKind::belief, ItemStatus::candidate, std::nullopt, "quiet beach");
  // Costs: A 0+1, B 1+1, C 2+0.
  EXPECT_EQ(attach_concept(g, n, "A").source, "A");
  n.label = "Quiet Beach";
  g.concepts.at("A").label = "mountain";
  // Tie at cost 1? A 0+1=1, C 2+0=2: A still wins.
  EXPECT_EQ(attach_concept(g, n, "A").source, "A");
  // Focus B: B 0+1, A 1+1, C 1+0 → tie between B and C at 1, smaller id wins.
  EXPECT_EQ(attach_concept(g, n, "B").source, "B");
  // Focus C: C is free.
  EXPECT_EQ(attach_concept(g, n, "C").source, "C");
}

TEST(Attach, SlotMateWinsRegardlessOfDistance) {
  CognitiveGraph g;
  put_concept(g, make_concept("A", ConceptKind::belief, ItemStatus::grounded, std::nullopt, "x"));
  put_concept(g, make_concept("B", ConceptKind::belief, ItemStatus::grounded, std::nullopt, "hotel"));
  put_concept(g, make_concept("Z", ConceptKind::belief, ItemStatus::grounded, "budget", "far away"));
  put_edge(g, make_edge("e1", "A", "B"));
  Concept n = make_concept("N", ConceptKind::belief, ItemStatus::candidate, "budget", "hotel");
  EXPECT_EQ(attach_concept(g, n, "A").source, "Z");
}

TEST(Attach, Errors) {
  CognitiveGraph g;
  Concept n = make_concept("N", ConceptKind::belief, ItemStatus::candidate);
  EXPECT_THROW(attach_concept(g, n, "A"), Error);
  put_concept(g, make_concept("A"));
  try {
    attach_concept(g, n, "B");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "unknown-focus");
  }
}

namespace {

std::set<std::string> token_set(const std::string& s) {
  std::set<std::string> out;
  std::string cur;
  for (char ch : s + " ") {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!cur.empty()) out.insert(cur);
      cur.clear();
    } else {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
  }
  return out;
}

double jaccard(const std::string& a, const std::string& b) {
  auto sa = token_set(a), sb = token_set(b);
  std::set<std::string> all = sa;
  all.insert(sb.begin(), sb.end());
  if (all.empty()) return 0.0;
  int common = 0;
  for (const auto& t : sa) common += sb.count(t);
  return static_cast<double>(common) / static_cast<double>(all.size());
}

}  // namespace

TEST(Attach, MatchesExhaustiveArgmin) {
  std::mt19937 rng(13);
  const std::vector<std::string> words{"hotel", "beach", "budget", "quiet", "rain", "museum"};
  for (int round = 0; round < 400; ++round) {
    int n = 1 + static_cast<int>(rng() % 20);
    CognitiveGraph g = random_digraph(rng, n, 0.12, false);
    for (auto& [id, c] : g.concepts) {
      c.label.clear();
      for (int k = 0, m = static_cast<int>(rng() % 3); k <= m; ++k) c.label += words[rng() % words.size()] + " ";
    }
    Concept in = make_concept("zz", ConceptKind::belief, ItemStatus::candidate);
    in.label = words[rng() % words.size()] + " " + words[rng() % words.size()];
    ConceptId focus = nid("c", 1 + static_cast<int>(rng() % n));

    // BFS distances over the undirected backbone from the focus.
    std::map<ConceptId, int> dist{{focus, 0}};
    std::queue<ConceptId> q;
    q.push(focus);
    while (!q.empty()) {
      auto v = q.front();
      q.pop();
      for (const auto& [id, e] : g.edges) {
        ConceptId w = e.source == v ? e.target : e.target == v ? e.source : "";
        if (!w.empty() && !dist.count(w)) {
          dist[w] = dist[v] + 1;
          q.push(w);
        }
      }
    }
    ConceptId best;
    double best_cost = 1e9;
    for (const auto& [id, d] : dist) {
      double cost = static_cast<double>(d) + (1.0 - jaccard(g.concepts.at(id).label, in.label));
      if (cost < best_cost - 1e-12) {
        best_cost = cost;
        best = id;
      }
    }
    ASSERT_EQ(attach_concept(g, in, focus).source, best) << "round " << round;
  }
}

TEST(Compact, NoSlotsUnchanged) {
  CognitiveGraph g;
  put_concept(g, make_concept("A"));
  put_concept(g, make_concept("B", ConceptKind::belief, ItemStatus::candidate));
  EXPECT_EQ(compact_singletons(g), g);
}

TEST(Compact, CandidateFoldsIntoGroundedSlotMate) {
  CognitiveGraph g;
  Concept keep = make_concept("A", ConceptKind::preference, ItemStatus::grounded, "budget");
  keep.confidence = 0.8;
  put_concept(g, keep);
  Concept drop = make_concept("B", ConceptKind::preference, ItemStatus::candidate, "budget");
  drop.confidence = 0.4;
  drop.evidence = {"v-B"};
  g.evidence["v-B"] = {"v-B", "B", 1, EvidenceSource::user_statement, 0.4};
  put_concept(g, drop);

  auto out = compact_singletons(g);
  EXPECT_EQ(out.concepts.at("A").confidence, 0.8);
  EXPECT_EQ(out.concepts.at("A").evidence, (std::vector<EvidenceId>{"v-A", "v-B"}));
  EXPECT_EQ(out.concepts.at("B").status, ItemStatus::cancelled);
  EXPECT_EQ(out.evidence.at("v-B").target, "A");
  int live = 0;
  for (const auto& [id, c] : out.concepts) live += is_live(c.status);
  EXPECT_EQ(live, 1);
  EXPECT_TRUE(validate_backbone(out).ok);
}

TEST(Compact, TwoGroundedUnchanged) {
  CognitiveGraph g;
  put_concept(g, make_concept("A", ConceptKind::preference, ItemStatus::grounded, "budget"));
  put_concept(g, make_concept("B", ConceptKind::preference, ItemStatus::grounded, "budget"));
  EXPECT_EQ(compact_singletons(g), g);
}

TEST(Compact, DifferentValuesAndTransferPlaceholdersStay) {
  CognitiveGraph g;
  Concept a = make_concept("A", ConceptKind::preference, ItemStatus::grounded, "budget");
  a.value = "low";
  put_concept(g, a);
  Concept b = make_concept("B", ConceptKind::preference, ItemStatus::candidate, "budget");
  b.value = "high";
  put_concept(g, b);
  EXPECT_EQ(compact_singletons(g), g);
  g.concepts.at("B").value = std::nullopt;
  g.concepts.at("B").provenance = Provenance::transfer_based;
  EXPECT_EQ(compact_singletons(g), g);
}

TEST(Compact, MergeRewiresEdgesAndDropsDuplicates) {
  CognitiveGraph g;
  put_concept(g, make_concept("A", ConceptKind::preference, ItemStatus::grounded, "budget"));
  Concept b = make_concept("B", ConceptKind::preference, ItemStatus::candidate, "budget");
  put_concept(g, b);
  put_concept(g, make_concept("C"));
  put_edge(g, make_edge("e1", "A", "C", Relation::enable, 0.3));
  put_edge(g, make_edge("e2", "B", "C", Relation::enable, 0.7));
  put_edge(g, make_edge("e3", "A", "B", Relation::enable, 0.5));
  auto out = compact_singletons(g);
  EXPECT_EQ(out.edges.at("e1").strength, 0.7);
  EXPECT_EQ(out.edges.at("e2").status, ItemStatus::cancelled);
  EXPECT_EQ(out.edges.at("e3").status, ItemStatus::cancelled);
  EXPECT_TRUE(validate_backbone(out).ok);
}

TEST(Topo, Examples) {
  EXPECT_TRUE(topological_order(CognitiveGraph{}).empty());
  CognitiveGraph g;
  for (auto id : {"A", "B", "C"}) put_concept(g, make_concept(id));
  put_edge(g, make_edge("e1", "A", "B"));
  put_edge(g, make_edge("e2", "A", "C"));
  put_edge(g, make_edge("e3", "C", "B"));
  EXPECT_EQ(topological_order(g), (std::vector<ConceptId>{"A", "C", "B"}));
  try {
    topological_order(triangle(0.5, 0.5, 0.5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "cyclic-backbone");
  }
}

TEST(Topo, RandomDagsGiveValidOrders) {
  std::mt19937 rng(14);
  for (int i = 0; i < 300; ++i) {
    CognitiveGraph g = random_digraph(rng, 1 + static_cast<int>(rng() % 12), 0.3, false);
    auto order = topological_order(g);
    ASSERT_EQ(order.size(), g.concepts.size());
    std::map<ConceptId, std::size_t> pos;
    for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]] = k;
    for (const auto& [id, e] : g.edges) ASSERT_LT(pos[e.source], pos[e.target]);
  }
}

TEST(Similarity, Jaccard) {
  EXPECT_DOUBLE_EQ(label_similarity("Quiet beach", "beach quiet"), 1.0);
  EXPECT_DOUBLE_EQ(label_similarity("a b", "b c"), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(label_similarity("", ""), 0.0);
}
