#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pta/error.hpp"
#include "pta/fcm/engine.hpp"
#include "pta/goalnet/model.hpp"
#include "pta/json_util.hpp"
#include "pta/kb/knowledge_base.hpp"
#include "pta/session/server.hpp"
#include "pta/session/session.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kUsage = 2;
constexpr int kRuntime = 3;

bool is_validation_error(pta::Errc code) {
  using pta::Errc;
  switch (code) {
    case Errc::syntax:
    case Errc::schema:
    case Errc::invariant:
    case Errc::unknown_leaf:
    case Errc::non_leaf_clamp:
    case Errc::taxonomy_violation:
    case Errc::unknown_map:
      return true;
    default:
      return false;
  }
}

int report(const pta::Error& e) {
  std::cerr << "error: " << e.what() << "\n";
  return is_validation_error(e.code()) ? kInvalid : kRuntime;
}

int validate(const std::string& kind, const std::string& path, const std::string& fcm_path) {
  if (kind == "goalnet") {
    const auto net = pta::goalnet::load_goalnet(path);
    const auto violations = pta::goalnet::validate_goalnet(net);
    for (const auto& v : violations) std::cout << v.rule << " at " << v.node << ": " << v.message << "\n";
    if (!violations.empty()) return kInvalid;
    std::cout << "valid goalnet '" << net.name << "'\n";
  } else if (kind == "fcm") {
    const auto model = pta::fcm::load_fcm(path);
    std::cout << "valid fcm: " << model.size() << " concepts, " << model.stems().size() << " stems, "
              << model.leaves().size() << " leaves, " << model.edges().edge_count() << " edges\n";
  } else {
    const auto kb = pta::kb::load_kb_file(path);
    if (!fcm_path.empty()) pta::kb::cross_validate(kb, pta::fcm::load_fcm(fcm_path));
    std::cout << "valid kb: " << kb.concept_maps.size() << " concept maps, " << kb.cues.size() << " cues, "
              << kb.factor_map.size() << " factor_map entries\n";
  }
  return kOk;
}

int run(const std::string& config_path, const std::string& trace_path, const std::string& out_dir) {
  auto config = pta::session::load_config(config_path);
  if (!out_dir.empty()) config.out_dir = out_dir;
  const auto trace = pta::session::load_trace(trace_path);
  const auto result = pta::session::run_trace(config, trace);
  std::cout << "cycles: " << result.cycles.size() << "\n";
  for (const auto& c : result.cycles) {
    std::cout << "  " << c.cycle << " @" << c.at_ms << "ms " << (c.kind ? pta::reasoning::to_string(*c.kind) : "?")
              << " -> " << pta::reasoning::to_string(c.directive.kind);
    if (!c.directive.cue_id.empty()) std::cout << " " << c.directive.cue_id;
    std::cout << "\n";
  }
  if (!config.out_dir.empty()) std::cout << "outputs written to " << config.out_dir.string() << "\n";
  return kOk;
}

int fcm_eval(const std::string& fcm_path, const std::string& activations, int max_rounds) {
  const auto model = pta::fcm::load_fcm(fcm_path);
  std::string text = activations;
  if (!text.empty() && text.front() != '{' && std::filesystem::exists(text)) text = pta::json_util::read_file(text);
  const auto doc = pta::json_util::parse_document(text);
  std::map<std::string, double> leaves;
  for (const auto& [leaf, value] : pta::json_util::as_object(doc, "").items())
    leaves[leaf] = pta::json_util::as_number(value, "/" + leaf);
  pta::fcm::EvalOptions options;
  if (max_rounds > 0) options.max_rounds = static_cast<std::size_t>(max_rounds);
  const auto result = pta::fcm::evaluate(model, leaves, options);
  pta::json_util::OrderedJson out;
  out["rounds"] = result.rounds;
  out["converged"] = result.converged;
  out["cycle_detected"] = result.cycle_detected;
  if (auto i = model.stem(pta::fcm::StemKind::motivation)) out["motivation"] = result.final.values[*i];
  if (auto i = model.stem(pta::fcm::StemKind::ability)) out["ability"] = result.final.values[*i];
  out["values"] = pta::json_util::OrderedJson::object();
  for (std::size_t i = 0; i < model.size(); ++i) out["values"][model.concept_at(i).id] = result.final.values[i];
  std::cout << out.dump(2) << "\n";
  return kOk;
}

int serve(const std::string& config_path, const std::string& host, int port) {
  pta::session::Server server(pta::session::load_config(config_path));
  const int bound = server.bind(host, port);
  std::cout << "serving on http://" << host << ":" << bound << "\n" << std::flush;
  server.listen();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Persuasive Teachable Agent engine"};
  app.require_subcommand(1);

  std::string kind, path, fcm_for_kb;
  auto* validate_cmd = app.add_subcommand("validate", "Validate a goalnet, fcm or kb document");
  validate_cmd->add_option("kind", kind, "goalnet | fcm | kb")->required()->check(CLI::IsMember({"goalnet", "fcm", "kb"}));
  validate_cmd->add_option("path", path, "Document to validate")->required();
  validate_cmd->add_option("--fcm", fcm_for_kb, "Cross-check a kb's factor_map against this FCM");

  std::string config_path, trace_path, out_dir;
  auto* run_cmd = app.add_subcommand("run", "Replay a scripted trace headlessly");
  run_cmd->add_option("--config", config_path, "Session config")->required();
  run_cmd->add_option("--trace", trace_path, "Trace file")->required();
  run_cmd->add_option("--out", out_dir, "Output directory (overrides the config)");

  std::string fcm_path, activations;
  int max_rounds = 0;
  auto* eval_cmd = app.add_subcommand("fcm-eval", "Evaluate an FCM for given leaf activations");
  eval_cmd->add_option("--fcm", fcm_path, "FCM document")->required();
  eval_cmd->add_option("--activations", activations, "JSON object {leaf: value} or a file holding one")->required();
  eval_cmd->add_option("--max-rounds", max_rounds, "Override the model's round limit");

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve_cmd = app.add_subcommand("serve", "Serve live sessions over HTTP");
  serve_cmd->add_option("--config", config_path, "Session config")->required();
  serve_cmd->add_option("--port", port, "TCP port (0 picks one)")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--host", host, "Listen address");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*validate_cmd) return validate(kind, path, fcm_for_kb);
    if (*run_cmd) return run(config_path, trace_path, out_dir);
    if (*eval_cmd) return fcm_eval(fcm_path, activations, max_rounds);
    if (*serve_cmd) return serve(config_path, host, port);
  } catch (const pta::Error& e) {
    return report(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
