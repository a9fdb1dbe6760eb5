// Regenerates the bundled family-trip walkthrough archive. Extractions are
// written out explicitly so the fixture does not depend on any extractor.

#include <cstdio>
#include <iostream>
#include <string>

#include "cog/session.hpp"

using namespace cog;

namespace {

Json node(const std::string& id, const std::string& kind, const std::string& label, const std::string& slot,
          const std::string& value, double confidence) {
  Json c{{"id", id}, {"kind", kind}, {"label", label}, {"confidence", confidence}, {"provenance", "user_confirmed"}};
  if (!slot.empty()) c["slot"] = slot;
  if (!value.empty()) c["value"] = value;
  return Json{{"concept", c}, {"extractor", "external"}};
}

Json dep(const std::string& source, const std::string& target, CausalKind kind, double strength,
         const std::string& rationale) {
  Json e{{"id", source + ">" + target}, {"source", source}, {"target", target},
         {"relation", relation_for(kind)}, {"strength", strength}, {"rationale", rationale}};
  return Json{{"edge", e}, {"causal_kind", kind}};
}

ConceptId by_label(const SessionState& state, const std::string& label) {
  for (const auto& [id, c] : state.cognitive.graph.concepts)
    if (c.label == label && is_live(c.status)) return id;
  throw Error("unknown-target", "no live concept labelled " + label);
}

Json utterance(const std::string& text, Json extraction, const std::string& speaker = "user") {
  return Json{{"speaker", speaker}, {"text", text}, {"extraction", std::move(extraction)}};
}

std::string last_of(const std::vector<EventRecord>& events, EventKind kind, const char* field) {
  for (auto it = events.rbegin(); it != events.rend(); ++it)
    if (it->kind == kind) return it->payload.at(field).at("id").get<std::string>();
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string out = argc > 1 ? argv[1] : "walkthrough.jsonl";
  int tick = 0;
  Clock clock = [&tick] {
    char buf[32];
    std::snprintf(buf, sizeof buf, "2026-03-14T10:%02d:%02dZ", tick / 60, tick % 60);
    ++tick;
    return std::string(buf);
  };
  try {
    Session s("s-walkthrough", default_runtime_config(COG_DATA_DIR), nullptr, clock);

    s.submit(EventKind::task_start, {{"task_id", "family-trip"}});

    s.submit(EventKind::utterance,
             utterance("Planning a short family getaway this weekend, not far from home and out in nature if we can.",
                       {{"concepts",
                         {node("n1", "preference", "nature_centric", "setting", "nature", 0.5),
                          node("n2", "preference", "suburban", "location", "suburban", 0.5),
                          node("n3", "belief", "camping", "accommodation_type", "camping", 0.3)}},
                        {"dependencies",
                         {dep("n1", "n3", CausalKind::direct, 0.6, "nature access favors camping"),
                          dep("n2", "n3", CausalKind::direct, 0.5, "suburban campsites are close by")}}}));
    SessionState st = s.state();
    const ConceptId nature = by_label(st, "nature_centric"), camping = by_label(st, "camping");

    s.submit(EventKind::utterance,
             utterance("Both children and our dog are coming along; the children are keen on trail walks and eating "
                       "lunch outside.",
                       {{"concepts",
                         {node("n1", "factual", "kids_and_dog", "party", "family_with_dog", 0.6),
                          node("n2", "preference", "outdoor_activities", "activity_type", "outdoor", 0.5),
                          node("n3", "preference", "hiking", "", "", 0.5),
                          node("n4", "preference", "picnic", "", "", 0.5)}},
                        {"dependencies",
                         {dep("n1", camping, CausalKind::confounding, 0.5, "pets narrow the campsite choice"),
                          dep(nature, "n2", CausalKind::direct, 0.7, "nature invites outdoor time"),
                          dep("n2", "n3", CausalKind::direct, 0.6, "hiking is an outdoor activity"),
                          dep("n2", "n4", CausalKind::direct, 0.6, "picnics are an outdoor activity")}}}));

    auto back = s.submit(
        EventKind::utterance,
        utterance("My partner's back has been hurting for a few weeks.",
                  {{"concepts", {node("n1", "constraint", "back_injury", "health", "back_pain", 0.6)}},
                   {"dependencies",
                    {dep("n1", camping, CausalKind::confounding, 0.1, "sleeping on the ground may strain a back")}},
                   {"conflicts", {{{"a", "n1"}, {"b", camping}, {"description", "camping vs back pain"}}}}}));
    const std::string probe = last_of(back, EventKind::probe_issued, "probe");
    if (probe.empty()) throw Error("fixture", "expected a probe after the back-pain turn");
    st = s.state();
    const ConceptId injury = by_label(st, "back_injury");

    s.submit(EventKind::utterance,
             Json{{"speaker", "assistant"},
                  {"text",
                   "With the sore back in mind, camping could still work on a raised cot, or a woodland "
                   "hotel would give a proper bed."},
                  {"plan_items",
                   {{{"kind", "draft"}, {"text", "a woodland hotel with a proper bed"}},
                    {{"kind", "open_question"}, {"text", "camping on a raised cot?"}}}},
                  {"extraction",
                   {{"concepts",
                     {node("a1", "constraint", "back_injury", "", "", 0.5),
                      node("a2", "belief", "camping", "", "", 0.5)}},
                    {"dependencies", Json::array()}}}});

    s.submit(EventKind::probe_answered,
             Json{{"probe", probe},
                  {"verdict", "refine"},
                  {"detail", "A good night's sleep matters most, so book the hotel."},
                  {"extraction",
                   {{"concepts",
                     {node("n1", "preference", "comfort_priority", "priority", "comfort", 0.6),
                      node("n2", "preference", "hotel_accommodation", "accommodation_type", "hotel", 0.6)}},
                    {"dependencies",
                     {dep(injury, "n2", CausalKind::intervention, 0.9, "a back injury rules in a real bed"),
                      dep("n1", "n2", CausalKind::direct, 0.8, "comfort favors a hotel")}},
                    {"deprecations", {camping}}}}});
    st = s.state();
    if (!st.pending_review) throw Error("fixture", "expected the refine patch to be surfaced");
    s.submit(EventKind::patch_approved, {{"patch", st.pending_review->patch.id}, {"exclude", Json::array()}});

    st = s.state();
    std::string draft;
    for (const auto& item : st.plan.drafts)
      if (item.text.find("woodland hotel") != std::string::npos) draft = item.id;
    s.submit(EventKind::promotion, {{"item", draft}, {"origin", "user"}});

    st = s.state();
    const ConceptId outdoor = by_label(st, "outdoor_activities"), hiking = by_label(st, "hiking"),
                    picnic = by_label(st, "picnic");
    s.submit(EventKind::utterance,
             utterance("Storms are forecast all weekend, so nothing outdoors will work.",
                       {{"concepts",
                         {node("n1", "factual", "heavy_rain", "weather", "rain", 0.7),
                          node("n2", "preference", "museum_visit", "activity_type", "museum", 0.5),
                          node("n3", "preference", "aquarium_visit", "activity_type", "aquarium", 0.5)}},
                        {"dependencies",
                         {dep("n1", outdoor, CausalKind::confounding, 0.9, "rain rules out outdoor plans"),
                          dep("n1", "n2", CausalKind::confounding, 0.7, "rain points indoors"),
                          dep("n1", "n3", CausalKind::confounding, 0.7, "rain points indoors")}},
                        {"deprecations", {outdoor, hiking, picnic}}}));
    st = s.state();
    if (!st.pending_review) throw Error("fixture", "expected the rainstorm patch to be surfaced");
    std::string aquarium;
    for (const auto& op : st.pending_review->patch.ops)
      if (const auto* add = std::get_if<AddConcept>(&op); add && add->node.label == "aquarium_visit")
        aquarium = add->node.id;
    s.submit(EventKind::patch_approved, {{"patch", st.pending_review->patch.id}, {"exclude", {aquarium}}});

    st = s.state();
    std::string weather;
    for (const auto& [id, m] : st.cognitive.motifs)
      if (m.pattern == "weather-adaptation" && m.status == MotifStatus::uncertain) weather = id;
    if (weather.empty()) throw Error("fixture", "expected a weather-adaptation motif");
    s.submit(EventKind::motif_edit, {{"kind", "motif"}, {"target", weather}, {"event", "confirm"}});

    s.submit(EventKind::task_end, Json::object());
    s.submit(EventKind::task_start, {{"task_id", "team-building"}});
    s.submit(EventKind::utterance,
             utterance("Next month I'm organizing a corporate team-building day with outdoor activities.",
                       {{"concepts",
                         {node("n1", "factual", "team_building", "event_type", "team_building", 0.6),
                          node("n2", "preference", "outdoor_team_activities", "activity_type", "outdoor", 0.5)}},
                        {"dependencies", {dep("n1", "n2", CausalKind::direct, 0.6, "the event centers on activities")}}}));
    st = s.state();
    if (st.cognitive.transfer_candidates.size() != 1) throw Error("fixture", "expected one transfer candidate");
    s.submit(EventKind::transfer_uptake, {{"candidate", st.cognitive.transfer_candidates.begin()->first}, {"adopt", true}});

    SessionArchive archive = s.archive();
    save_archive(out, archive);
    std::cout << out << ": " << archive.events.size() << " events, digest " << archive.final_state_digest << "\n";
  } catch (const std::exception& e) {
    std::cerr << "make_walkthrough: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
