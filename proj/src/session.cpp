#include "cog/session.hpp"

#include <array>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace cog {

namespace {

constexpr std::array<std::string_view, 18> kEventKind{
    "utterance",       "text_restatement", "text_correction", "text_new_rewrite", "text_cross_task_reuse",
    "concept_edit",    "motif_edit",       "edge_edit",       "transfer_uptake",  "probe_issued",
    "probe_answered",  "patch_committed",  "patch_surfaced",  "patch_approved",   "patch_rejected",
    "promotion",       "task_start",       "task_end"};

}  // namespace

std::string_view to_string(EventKind v) { return kEventKind.at(static_cast<std::size_t>(v)); }

template <>
EventKind parse_enum<EventKind>(std::string_view text) {
  for (std::size_t i = 0; i < kEventKind.size(); ++i)
    if (kEventKind[i] == text) return static_cast<EventKind>(i);
  throw Error("parse-failure", "unknown event kind '" + std::string(text) + "'");
}

bool is_derived(EventKind kind) {
  return kind == EventKind::probe_issued || kind == EventKind::patch_committed || kind == EventKind::patch_surfaced;
}

bool is_text_event(EventKind kind) {
  switch (kind) {
    case EventKind::utterance:
    case EventKind::text_restatement:
    case EventKind::text_correction:
    case EventKind::text_new_rewrite:
    case EventKind::text_cross_task_reuse: return true;
    default: return false;
  }
}

void to_json(Json& j, const EventRecord& v) {
  j = Json{{"seq", v.seq}, {"turn", v.turn}, {"timestamp", v.timestamp}, {"kind", v.kind}, {"payload", v.payload}};
}

void from_json(const Json& j, EventRecord& v) {
  if (!j.is_object() || !j.contains("seq") || !j.contains("kind"))
    throw Error("parse-failure", "event record needs seq and kind");
  j.at("seq").get_to(v.seq);
  v.turn = j.value("turn", 0);
  v.timestamp = j.value("timestamp", std::string());
  j.at("kind").get_to(v.kind);
  v.payload = j.value("payload", Json::object());
}

void to_json(Json& j, const PushMessage& v) {
  j = Json{{"seq", v.seq}, {"event_seq", v.event_seq}, {"kind", v.kind}, {"payload", v.payload}};
}

// ---- log and archive --------------------------------------------------------

void EventLog::append(EventRecord event) {
  if (event.seq != last_seq() + 1)
    throw Error("sequence-violation",
                "expected seq " + std::to_string(last_seq() + 1) + ", got " + std::to_string(event.seq));
  records_.push_back(std::move(event));
}

std::vector<EventRecord> EventLog::since(int seq) const {
  std::vector<EventRecord> out;
  for (const auto& r : records_)
    if (r.seq > seq) out.push_back(r);
  return out;
}

void write_archive(std::ostream& out, const SessionArchive& archive) {
  Json header{{"format", kArchiveFormat},
              {"version", kArchiveVersion},
              {"hash", "sha256"},
              {"session_id", archive.session_id},
              {"config", archive.config}};
  out << header.dump() << '\n';
  for (const auto& e : archive.events) out << Json(e).dump() << '\n';
  Json footer{{"final_state_digest", archive.final_state_digest},
              {"event_count", static_cast<int>(archive.events.size())}};
  out << footer.dump() << '\n';
}

SessionArchive read_archive(std::istream& in) {
  SessionArchive archive;
  std::string line;
  std::size_t offset = 0;
  bool header = false, footer = false;
  int expected = -1;
  while (std::getline(in, line)) {
    const std::size_t line_offset = offset;
    offset += line.size() + 1;
    if (line.empty()) continue;
    if (footer) throw Error("parse-failure", "offset " + std::to_string(line_offset) + ": content after footer");
    Json j;
    try {
      j = parse_json(line);
    } catch (const Error& e) {
      throw Error("parse-failure", "line at offset " + std::to_string(line_offset) + ": " + e.what());
    }
    try {
      if (!header) {
        if (j.value("format", std::string()) != kArchiveFormat)
          throw Error("parse-failure", "offset 0: not a session archive");
        if (j.value("hash", std::string()) != "sha256") throw Error("parse-failure", "unsupported digest");
        archive.session_id = j.value("session_id", std::string());
        archive.config = j.at("config").get<RuntimeConfig>();
        header = true;
      } else if (j.contains("final_state_digest")) {
        archive.final_state_digest = j.at("final_state_digest").get<std::string>();
        expected = j.value("event_count", -1);
        footer = true;
      } else {
        archive.events.push_back(j.get<EventRecord>());
      }
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw Error("parse-failure", "offset " + std::to_string(line_offset) + ": " + e.what());
    }
  }
  if (!header) throw Error("parse-failure", "offset 0: empty archive");
  if (!footer) throw Error("parse-failure", "offset " + std::to_string(offset) + ": missing footer");
  if (expected != static_cast<int>(archive.events.size()))
    throw Error("parse-failure", "footer event_count does not match the log");
  EventLog check;
  for (const auto& e : archive.events) check.append(e);
  return archive;
}

SessionArchive load_archive(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("parse-failure", "cannot open " + path);
  return read_archive(in);
}

void save_archive(const std::string& path, const SessionArchive& archive) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("io-failure", "cannot write " + path);
  write_archive(out, archive);
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---- event folding ----------------------------------------------------------

namespace {

template <typename T>
std::optional<T> opt_field(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

std::string required_string(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string() || it->get<std::string>().empty())
    throw Error("bad-request", std::string("missing '") + key + "'");
  return it->get<std::string>();
}

GraphPatch edit_patch(const SessionState& state, const Json& edit) {
  const std::string kind = edit.value("kind", std::string());
  if (kind == "concept") {
    ConceptRevision r;
    r.target = required_string(edit, "target");
    r.label = opt_field<std::string>(edit, "label");
    r.slot = opt_field<std::string>(edit, "slot");
    r.value = opt_field<std::string>(edit, "value");
    r.status = opt_field<ItemStatus>(edit, "status");
    r.scoped_condition = opt_field<std::string>(edit, "scoped_condition");
    return revise(state, RevisionKind::node, r);
  }
  if (kind == "confidence") {
    ConfidenceRevision r{required_string(edit, "target"), edit.value("value", -1.0)};
    return revise(state, RevisionKind::confidence, r);
  }
  if (kind == "edge") {
    StructureRevision r;
    const std::string action = required_string(edit, "action");
    if (action == "add")
      r.action = StructureRevision::Action::add;
    else if (action == "cancel")
      r.action = StructureRevision::Action::cancel;
    else if (action == "retype")
      r.action = StructureRevision::Action::retype;
    else if (action == "strength")
      r.action = StructureRevision::Action::strength;
    else
      throw Error("bad-request", "unknown edge action '" + action + "'");
    r.edge = opt_field<std::string>(edit, "edge");
    r.source = opt_field<std::string>(edit, "source");
    r.target = opt_field<std::string>(edit, "target");
    r.relation = opt_field<Relation>(edit, "relation");
    r.strength = opt_field<double>(edit, "strength");
    r.rationale = opt_field<std::string>(edit, "rationale");
    return revise(state, RevisionKind::structure, r);
  }
  GraphPatch patch;
  char buf[32];
  std::snprintf(buf, sizeof buf, "pt%04d", state.patch_counter + 1);
  patch.id = buf;
  patch.turn = state.turn;
  patch.origin = PatchOrigin::user_edit;
  const auto& g = state.cognitive.graph;
  if (kind == "new_concept") {
    Concept c;
    c.id = next_free_id(g.concepts, "c");
    c.kind = opt_field<ConceptKind>(edit, "concept_kind").value_or(ConceptKind::belief);
    c.label = required_string(edit, "label");
    c.slot = opt_field<std::string>(edit, "slot");
    c.value = opt_field<std::string>(edit, "value");
    c.provenance = Provenance::user_confirmed;
    c.created_turn = state.turn;
    patch.ops.push_back(AddConcept{c});
    patch.ops.push_back(AddEvidence{{next_free_id(g.evidence, "v"), c.id, state.turn,
                                     EvidenceSource::user_statement, 1.0}});
    if (auto focus = opt_field<std::string>(edit, "focus")) {
      DependencyEdge anchor = attach_concept(g, c, *focus);
      anchor.id = next_free_id(g.edges, "e");
      anchor.created_turn = state.turn;
      patch.ops.push_back(AddEdge{anchor});
    }
    return patch;
  }
  if (kind == "motif") {
    SetMotifStatus op;
    op.target = required_string(edit, "target");
    op.event = parse_enum<MotifEvent>(required_string(edit, "event"));
    op.origin = EventOrigin::user;
    patch.ops.push_back(op);
    return patch;
  }
  if (kind == "ops") {
    patch.ops = edit.at("ops").get<std::vector<PatchOp>>();
    for (const auto& op : patch.ops)
      if (std::holds_alternative<Restore>(op)) throw Error("bad-request", "restore ops are internal");
    if (patch.ops.empty()) throw Error("no-op-revision", "empty edit");
    return patch;
  }
  throw Error("bad-request", "unknown edit kind '" + kind + "'");
}

void record_route(const RouteOutcome& routed, std::vector<std::pair<EventKind, Json>>& derived) {
  if (routed.committed) derived.emplace_back(EventKind::patch_committed, Json{{"record", *routed.committed}});
  if (routed.surfaced) derived.emplace_back(EventKind::patch_surfaced, Json{{"review", *routed.surfaced}});
}

void issue_probe(SessionState& state, const RuntimeConfig& config, std::vector<std::pair<EventKind, Json>>& derived) {
  if (auto probe = maybe_issue_probe(state, config))
    derived.emplace_back(EventKind::probe_issued, Json{{"probe", *probe}});
}

}  // namespace

Session::Outcome Session::execute(SessionState& state, const RuntimeConfig& config, EventKind kind,
                                  const Json& payload) {
  Outcome out;
  auto& derived = out.derived;
  if (is_text_event(kind)) {
    Utterance u;
    u.speaker = payload.contains("speaker") ? payload.at("speaker").get<Speaker>() : Speaker::user;
    u.text = required_string(payload, "text");
    if (u.speaker == Speaker::user) {
      ++state.turn;
      state.probe_budget_used = false;
    }
    u.turn = state.turn;
    TurnInputs inputs;
    inputs.utterance = u;
    inputs.extraction = opt_field<ExtractionResult>(payload, "extraction");
    if (payload.contains("plan_items")) inputs.plan_items = payload.at("plan_items").get<std::vector<PlanItem>>();
    GraphPatch patch = compile_turn_to_patch(inputs, state, config);
    if (!patch.ops.empty()) record_route(route_patch(state, patch, config), derived);
    if (u.speaker == Speaker::user) issue_probe(state, config, derived);
    return out;
  }
  switch (kind) {
    case EventKind::concept_edit:
    case EventKind::edge_edit:
    case EventKind::motif_edit: {
      GraphPatch patch = edit_patch(state, payload);
      record_route(route_patch(state, patch, config), derived);
      issue_probe(state, config, derived);
      break;
    }
    case EventKind::probe_answered: {
      ProbeResponse r;
      r.probe = required_string(payload, "probe");
      r.verdict = payload.at("verdict").get<Verdict>();
      r.detail = opt_field<std::string>(payload, "detail");
      auto outcome = apply_response(state, r, config, opt_field<ExtractionResult>(payload, "extraction"));
      record_route({outcome.committed, outcome.surfaced}, derived);
      break;
    }
    case EventKind::patch_approved: {
      auto exclude = payload.value("exclude", std::set<std::string>());
      auto record = approve_pending(state, required_string(payload, "patch"), exclude, config);
      derived.emplace_back(EventKind::patch_committed, Json{{"record", record}});
      issue_probe(state, config, derived);
      break;
    }
    case EventKind::patch_rejected: reject_pending(state, required_string(payload, "patch")); break;
    case EventKind::promotion: {
      Confirmation confirmation{required_string(payload, "item"),
                                payload.contains("origin") ? payload.at("origin").get<EventOrigin>()
                                                           : EventOrigin::user};
      auto record = promote_to_cognitive(state, confirmation.item, confirmation, config,
                                         opt_field<ExtractionResult>(payload, "extraction"));
      if (record) derived.emplace_back(EventKind::patch_committed, Json{{"record", *record}});
      break;
    }
    case EventKind::transfer_uptake: {
      auto record =
          decide_transfer(state, required_string(payload, "candidate"), payload.value("adopt", false), config);
      derived.emplace_back(EventKind::patch_committed, Json{{"record", record}});
      break;
    }
    case EventKind::task_start: start_task(state, required_string(payload, "task_id")); break;
    case EventKind::task_end: end_task(state); break;
    default: throw Error("bad-request", "derived event kinds cannot be submitted");
  }
  return out;
}

// ---- replay -----------------------------------------------------------------

SessionState replay(const SessionArchive& archive, const ReplayOptions& options) {
  SessionState state;
  const auto& events = archive.events;
  const int limit = options.until.value_or(events.empty() ? 0 : events.back().seq);
  std::size_t i = 0;
  while (i < events.size() && events[i].seq <= limit) {
    const EventRecord& input = events[i];
    auto diverged = [](int seq, const std::string& why) {
      return Error("nondeterminism-detected", "seq " + std::to_string(seq) + ": " + why);
    };
    if (is_derived(input.kind)) throw diverged(input.seq, "unexpected derived event");
    Session::Outcome outcome;
    try {
      outcome = Session::execute(state, archive.config, input.kind, input.payload);
    } catch (const Error& e) {
      throw diverged(input.seq, std::string("input rejected on replay: ") + e.what());
    }
    if (input.turn != state.turn) throw diverged(input.seq, "turn mismatch");
    ++i;
    for (const auto& [kind, payload] : outcome.derived) {
      if (i >= events.size() || events[i].seq > limit) break;
      const EventRecord& logged = events[i];
      if (logged.kind != kind || logged.payload.dump() != payload.dump() || logged.turn != state.turn)
        throw diverged(logged.seq, "derived " + std::string(to_string(kind)) + " differs");
      ++i;
    }
  }
  const bool complete = !options.until || (events.empty() ? true : *options.until >= events.back().seq);
  if (options.verify_digest && complete) {
    const std::string digest = state_digest(state);
    if (digest != archive.final_state_digest)
      throw Error("nondeterminism-detected",
                  "seq " + std::to_string(events.empty() ? 0 : events.back().seq) + ": final digest " + digest +
                      " differs from archived " + archive.final_state_digest);
  }
  return state;
}

// ---- live session -----------------------------------------------------------

Session::Session(std::string id, RuntimeConfig config, std::shared_ptr<ExtractorClient> extractor, Clock clock)
    : id_(std::move(id)), config_(std::move(config)), extractor_(std::move(extractor)), clock_(std::move(clock)) {
  config_.clarification.validate();
  if (!extractor_) extractor_ = std::make_shared<RuleBasedExtractor>();
}

Json Session::enrich(EventKind kind, Json payload, const SessionState& state) {
  auto run = [&](const Utterance& u) {
    const std::size_t n = std::min<std::size_t>(recent_.size(), 4);
    std::span<const Utterance> context(recent_.data() + recent_.size() - n, n);
    try {
      return extract_candidates(u, context, *extractor_);
    } catch (const Error& e) {
      if (e.code() != "extractor-unavailable" || extractor_->kind() == ExtractorKind::rule_based) throw;
      payload["extractor_fallback"] = e.what();
      RuleBasedExtractor rule;
      return extract_candidates(u, context, rule);
    }
  };
  if (is_text_event(kind) && !payload.contains("extraction")) {
    Utterance u;
    u.speaker = payload.contains("speaker") ? payload.at("speaker").get<Speaker>() : Speaker::user;
    u.text = required_string(payload, "text");
    u.turn = state.turn + (u.speaker == Speaker::user ? 1 : 0);
    payload["extraction"] = run(u);
  }
  if (kind == EventKind::probe_answered && payload.value("verdict", std::string()) == "refine" &&
      !payload.contains("extraction") && payload.contains("detail") && payload.at("detail").is_string())
    payload["extraction"] = run({state.turn, Speaker::user, payload.at("detail").get<std::string>()});
  if (kind == EventKind::promotion && !payload.contains("extraction") && payload.contains("item")) {
    if (const PlanItem* item = state.plan.find(payload.at("item").get<std::string>()))
      payload["extraction"] = extract_plan_item(*item, state.turn);
  }
  return payload;
}

std::vector<EventRecord> Session::submit(EventKind kind, Json payload) {
  if (is_derived(kind)) throw Error("bad-request", "derived event kinds cannot be submitted");
  if (!payload.is_object()) throw Error("bad-request", "payload must be an object");
  std::lock_guard lock(mu_);
  SessionState work = state_;
  try {
    payload = enrich(kind, std::move(payload), work);
  } catch (const nlohmann::json::exception& e) {
    throw Error("bad-request", e.what());
  }
  Outcome outcome;
  try {
    outcome = execute(work, config_, kind, payload);
  } catch (const nlohmann::json::exception& e) {
    throw Error("bad-request", e.what());
  }

  std::vector<EventRecord> appended;
  const std::string now = clock_();
  int seq = log_.last_seq();
  appended.push_back({++seq, work.turn, now, kind, payload});
  for (auto& [k, p] : outcome.derived) appended.push_back({++seq, work.turn, now, k, std::move(p)});
  for (const auto& e : appended) log_.append(e);

  if (is_text_event(kind)) {
    Utterance u{work.turn, payload.contains("speaker") ? payload.at("speaker").get<Speaker>() : Speaker::user,
                payload.at("text").get<std::string>()};
    recent_.push_back(std::move(u));
  }
  SessionState before = std::move(state_);
  state_ = std::move(work);
  publish(before, state_, appended);
  return appended;
}

std::vector<EventRecord> Session::say(Speaker speaker, const std::string& text, EventKind kind) {
  return submit(kind, Json{{"speaker", speaker}, {"text", text}});
}

std::vector<EventRecord> Session::answer(const ProbeId& probe, Verdict verdict,
                                         const std::optional<std::string>& detail) {
  Json payload{{"probe", probe}, {"verdict", verdict}};
  if (detail) payload["detail"] = *detail;
  return submit(EventKind::probe_answered, std::move(payload));
}

namespace {

Json map_delta(const Json& before, const Json& after) {
  Json delta = Json::object();
  for (const auto& [key, value] : after.items())
    if (!before.contains(key) || before.at(key) != value) delta[key] = value;
  for (const auto& [key, value] : before.items())
    if (!after.contains(key)) delta[key] = nullptr;
  return delta;
}

Json plan_index(const TaskPlanState& plan) {
  Json out = Json::object();
  for (auto kind : {PlanItemKind::draft, PlanItemKind::comparison, PlanItemKind::note, PlanItemKind::open_question})
    for (const auto& item : plan.list(kind)) out[item.id] = item;
  return out;
}

}  // namespace

void Session::publish(const SessionState& before, const SessionState& after, const std::vector<EventRecord>& appended) {
  const int event_seq = appended.back().seq;
  auto emit = [&](std::string kind, Json payload) {
    push_.push_back({static_cast<int>(push_.size()) + 1, event_seq, std::move(kind), std::move(payload)});
  };
  const auto& c0 = before.cognitive;
  const auto& c1 = after.cognitive;
  Json delta{{"turn", after.turn},
             {"task_id", after.task_id},
             {"events", Json::array()},
             {"concepts", map_delta(Json(c0.graph.concepts), Json(c1.graph.concepts))},
             {"edges", map_delta(Json(c0.graph.edges), Json(c1.graph.edges))},
             {"conflicts", map_delta(Json(c0.graph.conflicts), Json(c1.graph.conflicts))},
             {"motifs", map_delta(Json(c0.motifs), Json(c1.motifs))},
             {"probes", map_delta(Json(c0.probes), Json(c1.probes))},
             {"transfer_candidates", map_delta(Json(c0.transfer_candidates), Json(c1.transfer_candidates))},
             {"plan_items", map_delta(plan_index(before.plan), plan_index(after.plan))},
             {"pending_review", after.pending_review ? Json(*after.pending_review) : Json(nullptr)},
             {"digest", state_digest(after)}};
  for (const auto& e : appended) delta["events"].push_back({{"seq", e.seq}, {"kind", e.kind}});
  emit("state-delta", std::move(delta));
  if (after.layout && after.layout != before.layout) emit("layout", Json(*after.layout));
  for (const auto& e : appended) {
    if (e.kind == EventKind::patch_surfaced) emit("surfaced-patch", e.payload.at("review"));
    if (e.kind == EventKind::probe_issued) emit("probe", e.payload.at("probe"));
  }
  pushed_.notify_all();
}

SessionState Session::state() const {
  std::lock_guard lock(mu_);
  return state_;
}

std::string Session::digest() const {
  std::lock_guard lock(mu_);
  return state_digest(state_);
}

std::vector<EventRecord> Session::events_since(int seq) const {
  std::lock_guard lock(mu_);
  return log_.since(seq);
}

int Session::last_seq() const {
  std::lock_guard lock(mu_);
  return log_.last_seq();
}

std::vector<PushMessage> Session::push_since(int since, std::chrono::milliseconds wait) const {
  std::unique_lock lock(mu_);
  auto ready = [&] { return static_cast<int>(push_.size()) > since; };
  if (wait.count() > 0) pushed_.wait_for(lock, wait, ready);
  std::vector<PushMessage> out;
  for (const auto& m : push_)
    if (m.seq > since) out.push_back(m);
  return out;
}

SessionArchive Session::archive() const {
  std::lock_guard lock(mu_);
  return {id_, config_, log_.records(), state_digest(state_)};
}

std::unique_ptr<Session> Session::resume(const SessionArchive& archive, std::shared_ptr<ExtractorClient> extractor,
                                         Clock clock) {
  auto session = std::make_unique<Session>(archive.session_id, archive.config, std::move(extractor), std::move(clock));
  session->state_ = replay(archive);
  for (const auto& e : archive.events) {
    session->log_.append(e);
    if (is_text_event(e.kind))
      session->recent_.push_back({e.turn,
                                  e.payload.contains("speaker") ? e.payload.at("speaker").get<Speaker>()
                                                                : Speaker::user,
                                  e.payload.value("text", std::string())});
  }
  return session;
}

// ---- manager and config -----------------------------------------------------

SessionManager::SessionManager(RuntimeConfig config, ExtractorFactory factory, Clock clock)
    : config_(std::move(config)), factory_(std::move(factory)), clock_(std::move(clock)) {
  config_.clarification.validate();
}

std::shared_ptr<Session> SessionManager::create(const std::optional<RuntimeConfig>& config) {
  std::lock_guard lock(mu_);
  std::string id;
  do {
    char buf[32];
    std::snprintf(buf, sizeof buf, "s%04d", ++counter_);
    id = buf;
  } while (sessions_.count(id));
  auto session =
      std::make_shared<Session>(id, config.value_or(config_), factory_ ? factory_() : nullptr, clock_);
  sessions_.emplace(id, session);
  return session;
}

std::shared_ptr<Session> SessionManager::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error("unknown-session", id);
  return it->second;
}

std::shared_ptr<Session> SessionManager::adopt(std::unique_ptr<Session> session) {
  std::lock_guard lock(mu_);
  std::shared_ptr<Session> shared = std::move(session);
  if (!sessions_.emplace(shared->id(), shared).second) throw Error("duplicate-id", shared->id());
  return shared;
}

std::vector<std::string> SessionManager::ids() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, s] : sessions_) out.push_back(id);
  return out;
}

RuntimeConfig load_runtime_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("parse-failure", "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  Json doc = parse_json(buffer.str());
  RuntimeConfig config;
  try {
    config = doc.get<RuntimeConfig>();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error("parse-failure", e.what());
  }
  const auto base = std::filesystem::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };
  if (doc.contains("vocabulary_path")) config.vocabulary = load_vocabulary(resolve(doc.at("vocabulary_path")));
  if (doc.contains("templates_path")) config.templates = ProbeTemplates::load(resolve(doc.at("templates_path")));
  config.clarification.validate();
  for (const auto& p : config.vocabulary) validate_pattern(p);
  return config;
}

RuntimeConfig default_runtime_config(const std::string& data_dir) {
  RuntimeConfig config;
  const std::filesystem::path dir(data_dir);
  config.vocabulary = load_vocabulary(dir / "motif_vocabulary.json");
  config.templates = ProbeTemplates::load(dir / "probe_templates.json");
  return config;
}

}  // namespace cog
