#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "cog/service.hpp"

using namespace cog;

namespace {

std::string summarize(const EventRecord& e) {
  const Json& p = e.payload;
  switch (e.kind) {
    case EventKind::patch_committed: {
      const Json& r = p.at("record");
      return r.at("patch").at("id").get<std::string>() + " " + r.at("diff").at("scope").get<std::string>() + " " +
             std::to_string(r.at("patch").at("ops").size()) + " ops, approval " + r.at("approval").get<std::string>();
    }
    case EventKind::patch_surfaced: {
      const Json& r = p.at("review");
      return r.at("patch").at("id").get<std::string>() + " awaiting review";
    }
    case EventKind::probe_issued:
      return p.at("probe").at("id").get<std::string>() + " " + p.at("probe").at("text").get<std::string>();
    default: break;
  }
  if (p.contains("text")) return p.value("speaker", std::string("user")) + ": " + p.at("text").get<std::string>();
  return p.dump();
}

void print_graph(const CognitiveGraph& g) {
  for (const auto& [id, c] : g.concepts) {
    std::cout << id << "  " << to_string(c.kind) << "  " << c.label;
    if (c.slot) std::cout << "  [" << *c.slot << "=" << c.value.value_or("") << "]";
    std::cout << "  " << to_string(c.status) << "  conf " << std::setprecision(3) << c.confidence << "  "
              << to_string(c.provenance) << "\n";
  }
  for (const auto& [id, e] : g.edges)
    std::cout << id << "  " << e.source << " -" << to_string(e.relation) << "-> " << e.target << "  strength "
              << std::setprecision(3) << e.strength << "  " << to_string(e.status) << "\n";
  for (const auto& [id, x] : g.conflicts)
    std::cout << id << "  " << x.a << " <-> " << x.b << "  " << to_string(x.status) << "  " << x.description << "\n";
}

void print_motifs(const CognitiveState& c) {
  for (const auto& [id, m] : c.motifs) {
    std::cout << id << "  " << m.pattern << "  " << to_string(m.status) << "  task " << m.task_id << " ";
    for (const auto& [role, concept_id] : m.bindings) std::cout << " " << role << "=" << concept_id;
    std::cout << "\n";
  }
  for (const auto& [id, t] : c.transfer_candidates)
    std::cout << id << "  transfer " << t.pattern << "  " << to_string(t.status) << "  from " << t.source_task
              << " to " << t.task_id << "  score " << t.score << "\n";
  for (const auto& [name, p] : c.library.patterns)
    std::cout << "library  " << name << "  usage " << p.usage_count << "\n";
}

Service* g_service = nullptr;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cognition-graph runtime control"};
  app.require_subcommand(1);

  std::string archive_path, dump_path;
  bool verify = false;
  int until = 0;
  auto* replay_cmd = app.add_subcommand("replay", "Replay an archive");
  replay_cmd->add_option("archive", archive_path)->required()->check(CLI::ExistingFile);
  replay_cmd->add_flag("--verify-digest", verify, "Check the final digest against the footer");
  replay_cmd->add_option("--dump-state", dump_path, "Write the canonical state here");
  replay_cmd->add_option("--until", until, "Stop after this seq");

  bool show_events = false, show_motifs = false, show_graph = false;
  auto* inspect_cmd = app.add_subcommand("inspect", "Print parts of an archive");
  inspect_cmd->add_option("archive", archive_path)->required()->check(CLI::ExistingFile);
  inspect_cmd->add_flag("--events", show_events);
  inspect_cmd->add_flag("--motifs", show_motifs);
  inspect_cmd->add_flag("--graph", show_graph);

  int port = 8080;
  std::string host = "127.0.0.1", extractor = "rule", config_path, data_dir = COG_DATA_DIR;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  serve_cmd->add_option("--port", port);
  serve_cmd->add_option("--host", host);
  serve_cmd->add_option("--extractor", extractor)->check(CLI::IsMember({"rule", "external"}));
  serve_cmd->add_option("--config", config_path)->check(CLI::ExistingFile);
  serve_cmd->add_option("--data-dir", data_dir);

  CLI11_PARSE(app, argc, argv);

  try {
    if (replay_cmd->parsed()) {
      SessionArchive archive = load_archive(archive_path);
      ReplayOptions options;
      options.verify_digest = verify;
      if (until > 0) options.until = until;
      SessionState state = replay(archive, options);
      const std::string text = serialize_state(state);
      if (!dump_path.empty()) {
        std::ofstream out(dump_path, std::ios::trunc);
        out << text;
      }
      std::cout << "turn " << state.turn << "  digest " << sha256_hex(text) << (verify ? "  verified" : "") << "\n";
      return 0;
    }
    if (inspect_cmd->parsed()) {
      SessionArchive archive = load_archive(archive_path);
      if (!show_events && !show_motifs && !show_graph) show_events = true;
      if (show_events)
        for (const auto& e : archive.events)
          std::cout << e.seq << "  t" << e.turn << "  " << to_string(e.kind) << "  " << summarize(e) << "\n";
      if (show_motifs || show_graph) {
        SessionState state = replay(archive, {});
        if (show_graph) print_graph(state.cognitive.graph);
        if (show_motifs) print_motifs(state.cognitive);
      }
      return 0;
    }
    RuntimeConfig config = config_path.empty() ? default_runtime_config(data_dir) : load_runtime_config(config_path);
    SessionManager::ExtractorFactory factory;
    if (extractor == "external") {
      auto settings = ExternalExtractorConfig::from_env();
      if (settings.endpoint.empty()) throw Error("bad-config", "COG_EXTRACTOR_ENDPOINT is not set");
      factory = [settings] { return std::make_shared<ExternalExtractor>(settings); };
    }
    Service service(std::make_shared<SessionManager>(config, factory));
    g_service = &service;
    std::signal(SIGINT, [](int) { g_service->stop(); });
    std::signal(SIGTERM, [](int) { g_service->stop(); });
    std::cout << "listening on " << host << ":" << port << std::endl;
    service.run(host, port);
  } catch (const Error& e) {
    std::cerr << "cogctl: " << e.what() << "\n";
    return e.code() == "nondeterminism-detected" ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "cogctl: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
