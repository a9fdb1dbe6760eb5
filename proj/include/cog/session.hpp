#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cog/revision.hpp"
#include "cog/serialization.hpp"

namespace cog {

enum class EventKind {
  utterance,
  text_restatement,
  text_correction,
  text_new_rewrite,
  text_cross_task_reuse,
  concept_edit,
  motif_edit,
  edge_edit,
  transfer_uptake,
  probe_issued,
  probe_answered,
  patch_committed,
  patch_surfaced,
  patch_approved,
  patch_rejected,
  promotion,
  task_start,
  task_end,
};

std::string_view to_string(EventKind v);
template <>
EventKind parse_enum<EventKind>(std::string_view text);

/// True for events the runtime derives from inputs (regenerated on replay).
bool is_derived(EventKind kind);
/// User-text kinds: a user utterance and its four restatement/correction variants.
bool is_text_event(EventKind kind);

struct EventRecord {
  int seq = 0;
  int turn = 0;
  std::string timestamp;
  EventKind kind = EventKind::utterance;
  Json payload = Json::object();

  bool operator==(const EventRecord&) const = default;
};

void to_json(Json& j, const EventRecord& v);
void from_json(const Json& j, EventRecord& v);

/// Append-only, gap-free sequence of events.
class EventLog {
 public:
  /// Throws Error("sequence-violation") unless event.seq == last seq + 1.
  void append(EventRecord event);
  const std::vector<EventRecord>& records() const { return records_; }
  int last_seq() const { return records_.empty() ? 0 : records_.back().seq; }
  std::vector<EventRecord> since(int seq) const;

 private:
  std::vector<EventRecord> records_;
};

inline constexpr const char* kArchiveFormat = "cog-session-archive";
inline constexpr int kArchiveVersion = 1;

struct SessionArchive {
  std::string session_id;
  RuntimeConfig config;
  std::vector<EventRecord> events;
  std::string final_state_digest;
};

/// Header line, one line per event, footer line.
void write_archive(std::ostream& out, const SessionArchive& archive);
SessionArchive read_archive(std::istream& in);
SessionArchive load_archive(const std::string& path);
void save_archive(const std::string& path, const SessionArchive& archive);

struct ReplayOptions {
  std::optional<int> until;  // stop after this seq
  bool verify_digest = true;  // only checked when the whole log was replayed
};

/// Folds the archive's input events through the runtime using only logged
/// extraction results; derived events must match the log exactly.
/// Error("nondeterminism-detected") names the first divergent seq.
SessionState replay(const SessionArchive& archive, const ReplayOptions& options = {});

/// Server→client message on the push channel.
struct PushMessage {
  int seq = 0;
  int event_seq = 0;  // last event this message reflects
  std::string kind;   // state-delta | layout | surfaced-patch | probe
  Json payload;
};

void to_json(Json& j, const PushMessage& v);

using Clock = std::function<std::string()>;

/// ISO-8601 UTC wall clock.
std::string utc_timestamp();

/// One session: its state, event log and push queue behind a single writer.
class Session {
 public:
  Session(std::string id, RuntimeConfig config, std::shared_ptr<ExtractorClient> extractor = nullptr,
          Clock clock = utc_timestamp);

  const std::string& id() const { return id_; }
  const RuntimeConfig& config() const { return config_; }

  /// Applies one input event (seq/turn/timestamp are assigned here) and
  /// returns every event it appended, derived ones included. Nothing is
  /// logged when the input is rejected.
  std::vector<EventRecord> submit(EventKind kind, Json payload);

  // Convenience wrappers over submit().
  std::vector<EventRecord> say(Speaker speaker, const std::string& text,
                               EventKind kind = EventKind::utterance);
  std::vector<EventRecord> answer(const ProbeId& probe, Verdict verdict,
                                  const std::optional<std::string>& detail = std::nullopt);

  SessionState state() const;
  std::string digest() const;
  std::vector<EventRecord> events_since(int seq) const;
  int last_seq() const;

  /// Messages with seq > `since`; waits up to `wait` for one to arrive.
  std::vector<PushMessage> push_since(int since, std::chrono::milliseconds wait = std::chrono::milliseconds(0)) const;

  SessionArchive archive() const;

  /// Rebuilds a live session from an archive (replayed, digest-checked) so it
  /// can keep appending past the end.
  static std::unique_ptr<Session> resume(const SessionArchive& archive,
                                         std::shared_ptr<ExtractorClient> extractor = nullptr,
                                         Clock clock = utc_timestamp);

 private:
  friend SessionState replay(const SessionArchive&, const ReplayOptions&);

  struct Outcome {
    std::vector<std::pair<EventKind, Json>> derived;
  };

  /// Live-only enrichment: runs the extractor and records its output in the payload.
  Json enrich(EventKind kind, Json payload, const SessionState& state);
  /// Pure fold of one input event; shared by live submission and replay.
  static Outcome execute(SessionState& state, const RuntimeConfig& config, EventKind kind, const Json& payload);
  void publish(const SessionState& before, const SessionState& after, const std::vector<EventRecord>& appended);

  std::string id_;
  RuntimeConfig config_;
  std::shared_ptr<ExtractorClient> extractor_;
  Clock clock_;

  mutable std::mutex mu_;
  mutable std::condition_variable pushed_;
  SessionState state_;
  EventLog log_;
  std::vector<Utterance> recent_;
  std::vector<PushMessage> push_;
};

/// Registry of independent sessions.
class SessionManager {
 public:
  using ExtractorFactory = std::function<std::shared_ptr<ExtractorClient>()>;

  SessionManager(RuntimeConfig config, ExtractorFactory factory = {}, Clock clock = utc_timestamp);

  std::shared_ptr<Session> create(const std::optional<RuntimeConfig>& config = std::nullopt);
  std::shared_ptr<Session> find(const std::string& id) const;  // Error("unknown-session")
  std::shared_ptr<Session> adopt(std::unique_ptr<Session> session);
  std::vector<std::string> ids() const;
  const RuntimeConfig& base_config() const { return config_; }

 private:
  RuntimeConfig config_;
  ExtractorFactory factory_;
  Clock clock_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  int counter_ = 0;
};

/// Runtime config from a JSON file; missing fields keep their defaults and a
/// "vocabulary_path"/"templates_path" entry loads those files.
RuntimeConfig load_runtime_config(const std::string& path);

/// Defaults with the bundled vocabulary and templates from `data_dir`.
RuntimeConfig default_runtime_config(const std::string& data_dir);

}  // namespace cog
