#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "janus/builder/builder.hpp"
#include "janus/checker/checker.hpp"
#include "janus/kb/kb.hpp"
#include "janus/learn/learn.hpp"
#include "janus/trace/trace.hpp"

namespace {

using namespace janus;
using trace::Json;

// Exit codes, stable across releases and documented in the README:
// 0 success (for repair: a valid model), 1 corpus or scene problems,
// 2 configuration or file I/O problems, 3 repair stuck, 4 budget exhausted.
constexpr int kExitOk = 0;
constexpr int kExitCorpus = 1;
constexpr int kExitConfigIo = 2;
constexpr int kExitStuck = 3;
constexpr int kExitBudget = 4;

struct Options {
  std::string corpus_root;
  std::vector<std::string> use_files;  // when given, replaces the corpus set
  std::string target = "energy";
  std::vector<std::string> sources = {"electricity"};
  std::string config_path;
  std::string out_path;
  std::string golden_dir = "golden";
  bool update_golden = false;
  RunConfig config;
};

std::size_t line_of(const std::string& content, std::size_t offset) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset && i < content.size(); ++i)
    if (content[i] == '\n') ++line;
  return line;
}

void print_diagnostics(const std::vector<Diagnostic>& diagnostics) {
  for (const auto& d : diagnostics) {
    std::string location = d.file;
    std::ifstream in(d.file, std::ios::binary);
    if (in) {
      std::ostringstream buffer;
      buffer << in.rdbuf();
      location += ":" + std::to_string(line_of(buffer.str(), d.span.begin));
    }
    std::cerr << location << ": "
              << (d.severity == Severity::Error ? "error" : "warning") << " " << d.code
              << ": " << d.message << "\n";
  }
}

OutputMode parse_output_mode(const std::string& word) {
  if (word == "json") return OutputMode::Json;
  if (word == "text") return OutputMode::Text;
  if (word == "both") return OutputMode::Both;
  throw EngineError("CONFIG", "output mode must be json, text, or both, not `" + word + "`");
}

/// Key-value configuration file: one `<key> <value>` pair per line, `#`
/// starts a comment, blank lines ignored. Keys mirror the command-line flags.
void apply_config_file(const std::string& path, RunConfig& config) {
  trace::InputFile file = trace::read_input(path);
  std::istringstream lines(file.content);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string key, value, extra;
    if (!(fields >> key)) continue;
    const std::string at = path + ":" + std::to_string(lineno);
    if (!(fields >> value) || fields >> extra)
      throw EngineError("CONFIG", at + ": expected `<key> <value>`");
    try {
      if (key == "saliency_threshold") {
        config.saliency_threshold = std::stod(value);
      } else if (key == "janus_threshold") {
        config.janus_threshold = std::stod(value);
      } else if (key == "budget") {
        config.budget = std::stoi(value);
      } else if (key == "seed") {
        config.seed = std::stol(value);
      } else if (key == "output") {
        config.output = parse_output_mode(value);
      } else {
        throw EngineError("CONFIG", at + ": unknown configuration key `" + key + "`");
      }
    } catch (const std::invalid_argument&) {
      throw EngineError("CONFIG", at + ": `" + value + "` is not a number");
    } catch (const std::out_of_range&) {
      throw EngineError("CONFIG", at + ": `" + value + "` is out of range");
    }
  }
}

std::vector<std::string> corpus_file_set(const Options& opts) {
  if (!opts.use_files.empty()) return opts.use_files;
  return kb::corpus_files(opts.corpus_root);
}

kb::LoadResult load_or_exit(const std::vector<std::string>& paths) {
  kb::LoadResult loaded = kb::load_files(paths);
  print_diagnostics(loaded.diagnostics);
  if (!loaded.ok()) std::exit(kExitCorpus);
  return loaded;
}

const kb::SceneGraph& find_scene_or_exit(const kb::LoadResult& loaded,
                                         const std::string& name) {
  const kb::SceneGraph* scene = loaded.find_scene(name);
  if (!scene) {
    std::cerr << "error: no scene `" << name << "` in the loaded corpus\n";
    std::exit(kExitCorpus);
  }
  return *scene;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << content) || !out.flush())
    throw EngineError("IO-WRITE", "cannot write `" + path + "`");
}

/// Sends the selected rendering(s) to --out or standard output.
void emit(const Options& opts, const Json& doc, const std::string& text) {
  std::string payload;
  if (opts.config.output != OutputMode::Text) payload += trace::render(doc);
  if (opts.config.output != OutputMode::Json) payload += text;
  if (opts.out_path.empty())
    std::cout << payload;
  else
    write_file(opts.out_path, payload);
}

/// Reference outputs regenerated by --update-golden, keyed by command and
/// scene so a stray invocation cannot silently overwrite them.
void update_goldens(const Options& opts, const std::string& command,
                    const std::string& scene, const Json& doc, const std::string& text) {
  std::cerr << "WARNING: regenerating golden reference files under `" << opts.golden_dir
            << "`; review the diff before committing\n";
  std::filesystem::create_directories(opts.golden_dir);
  if (command == "interpret" && scene == "battery_bulb") {
    write_file(opts.golden_dir + "/fig5b.json", trace::render(doc["model"]));
    write_file(opts.golden_dir + "/battery_bulb.text", text);
  } else if (command == "repair" && scene == "battery_bulb") {
    write_file(opts.golden_dir + "/fig2_target.json", trace::render(doc["model"]));
  } else {
    throw EngineError("CONFIG", "no golden reference is registered for `" + command +
                                    "` on scene `" + scene + "`");
  }
}

int run_check(const std::vector<std::string>& paths) {
  std::vector<std::string> files;
  for (const auto& path : paths) {
    if (std::filesystem::is_directory(path)) {
      for (auto& f : kb::corpus_files(path)) files.push_back(std::move(f));
    } else if (std::filesystem::exists(path)) {
      files.push_back(path);
    } else {
      throw EngineError("IO-READ", "cannot read `" + path + "`");
    }
  }
  kb::LoadResult loaded = kb::load_files(files);
  print_diagnostics(loaded.diagnostics);
  if (loaded.ok())
    std::cout << "ok: " << files.size() << " files, " << loaded.kb.domains.size()
              << " domains, " << loaded.scenes.size() << " scenes\n";
  return loaded.ok() ? kExitOk : kExitCorpus;
}

int run_interpret(const Options& opts, const std::string& scene_name) {
  validate_config(opts.config);
  std::vector<std::string> files = corpus_file_set(opts);
  kb::LoadResult loaded = load_or_exit(files);
  const kb::SceneGraph& scene = find_scene_or_exit(loaded, scene_name);

  builder::BuildOutput build =
      builder::build_model(scene, opts.target, opts.sources, loaded.kb, opts.config);
  const kb::Domain& target = *build.kb.find_domain(opts.target);
  checker::CheckReport report = checker::check_all(build.model, target);

  std::vector<trace::InputFile> inputs;
  for (const auto& path : files) inputs.push_back(trace::read_input(path));
  Json doc = trace::interpret_document(inputs, scene_name, opts.target, opts.sources,
                                       opts.config, build, report);
  std::string text = trace::render_text(build.model, report.violations, target);
  if (opts.update_golden) update_goldens(opts, "interpret", scene_name, doc, text);
  emit(opts, doc, text);
  return kExitOk;  // violations are the command's subject, not a failure
}

int run_repair(const Options& opts, const std::string& scene_name) {
  validate_config(opts.config);
  std::vector<std::string> files = corpus_file_set(opts);
  kb::LoadResult loaded = load_or_exit(files);
  const kb::SceneGraph& scene = find_scene_or_exit(loaded, scene_name);

  learn::Episode episode =
      learn::repair_loop(scene, opts.target, opts.sources, loaded.kb, opts.config);
  const kb::Domain& target = *episode.final_kb.find_domain(opts.target);

  std::vector<trace::InputFile> inputs;
  for (const auto& path : files) inputs.push_back(trace::read_input(path));
  Json doc = trace::repair_document(inputs, scene_name, opts.target, opts.sources,
                                    opts.config, episode);
  const learn::Iteration& last = episode.iterations.back();
  std::string text = trace::render_text(last.model, last.report.violations, target);
  if (opts.update_golden) update_goldens(opts, "repair", scene_name, doc, text);
  emit(opts, doc, text);

  switch (episode.outcome) {
    case learn::Outcome::ValidModel:
      return kExitOk;
    case learn::Outcome::Stuck:
      return kExitStuck;
    case learn::Outcome::BudgetExhausted:
      return kExitBudget;
  }
  return kExitOk;
}

std::string provenance_suffix(const Json& model, const std::string& fact) {
  if (!model.contains("provenance") || !model["provenance"].contains(fact)) return "";
  const Json& entry = model["provenance"][fact];
  builder::Provenance p;
  const std::string tag = entry.value("tag", "native");
  p.tag = tag == "borrowed"     ? builder::Provenance::Tag::Borrowed
          : tag == "default"    ? builder::Provenance::Tag::Default
          : tag == "postulated" ? builder::Provenance::Tag::Postulated
                                : builder::Provenance::Tag::Native;
  p.domain = entry.value("domain", "");
  p.demon = entry.value("demon", "");
  p.janus = entry.value("janus", "");
  std::string joined;
  for (const auto& t : builder::provenance_tags(fact, p)) {
    if (!joined.empty()) joined += ", ";
    joined += t;
  }
  return "  [" + joined + "]";
}

/// Prints one violation's full accountability chain: evidence consequences,
/// cited model facts with their provenance, and the implicated tag closure.
int run_explain(const std::string& trace_path, const std::string& violation_id) {
  trace::InputFile file = trace::read_input(trace_path);
  Json doc = Json::parse(file.content, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("violations"))
    throw EngineError("CONFIG", "`" + trace_path + "` is not a trace document");

  for (const auto& v : doc["violations"]) {
    if (v.at("id") != violation_id) continue;
    std::cout << violation_id << " " << v.at("kind").get<std::string>() << " "
              << v.at("constraint").get<std::string>() << ": "
              << v.at("message").get<std::string>() << "\n";
    if (!v.at("evidence").empty()) {
      std::cout << "evidence:\n";
      for (const auto& cid : v.at("evidence")) {
        std::cout << "  " << cid.get<std::string>();
        for (const auto& c : doc.value("consequences", Json::array()))
          if (c.at("id") == cid) std::cout << " " << c.at("statement").get<std::string>();
        std::cout << "\n";
      }
    }
    std::cout << "cites:\n";
    for (const auto& fact : v.at("cites"))
      std::cout << "  " << fact.get<std::string>()
                << provenance_suffix(doc.value("model", Json::object()),
                                     fact.get<std::string>())
                << "\n";
    std::cout << "implicated:\n";
    for (const auto& t : v.at("implicated")) std::cout << "  " << t.get<std::string>() << "\n";
    return kExitOk;
  }
  std::cerr << "error: no violation `" << violation_id << "` in `" << trace_path << "`\n";
  return kExitCorpus;
}

void add_run_options(CLI::App* cmd, Options& opts) {
  cmd->add_option("--corpus", opts.corpus_root, "corpus directory")
      ->capture_default_str();
  cmd->add_option("--use", opts.use_files,
                  "load exactly these files instead of the corpus directory");
  cmd->add_option("--target", opts.target, "target domain")->capture_default_str();
  cmd->add_option("--source", opts.sources, "source domains to associate from")
      ->capture_default_str();
  cmd->add_option("--config", opts.config_path, "key-value configuration file");
  cmd->add_option("--saliency-threshold", opts.config.saliency_threshold,
                  "minimum scene saliency an entity needs to be bound")
      ->capture_default_str();
  cmd->add_option("--janus-threshold", opts.config.janus_threshold,
                  "minimum notional overlap to form an association")
      ->capture_default_str();
  cmd->add_option("--budget", opts.config.budget, "repair iteration budget")
      ->capture_default_str();
  cmd->add_option("--seed", opts.config.seed,
                  "reserved for future stochastic modes; recorded in traces")
      ->capture_default_str();
  cmd->add_option("-o,--out", opts.out_path, "write the rendering here instead of stdout");
  cmd->add_option("--golden-dir", opts.golden_dir, "golden reference directory")
      ->capture_default_str();
  cmd->add_flag("--update-golden", opts.update_golden,
                "regenerate the golden reference files for this command");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Janus: builds scene models in a target conceptual domain by borrowing\n"
      "inference across undifferentiated associations, reinterprets them under\n"
      "the target's own constraints, and repairs the knowledge base when the\n"
      "borrowed assumptions surface as violations."};
  app.require_subcommand(1);

  Options opts;
  const char* env_root = std::getenv("JANUS_CORPUS");
  opts.corpus_root = env_root ? env_root : "corpus";

  std::vector<std::string> check_paths;
  CLI::App* check = app.add_subcommand("check", "Parse and validate corpus files");
  check->add_option("paths", check_paths, "files or directories (default: corpus root)");

  std::string scene_name;
  std::string output_word;
  CLI::App* interpret = app.add_subcommand(
      "interpret", "Build one model, reinterpret it, and report violations");
  interpret->add_option("scene", scene_name, "scene name")->required();
  add_run_options(interpret, opts);
  interpret->add_option("--output", output_word, "rendering: json, text, or both");

  CLI::App* repair =
      app.add_subcommand("repair", "Run the build/check/repair loop to an episode");
  repair->add_option("scene", scene_name, "scene name")->required();
  add_run_options(repair, opts);
  repair->add_option("--output", output_word, "rendering: json, text, or both");

  std::string trace_path, violation_id;
  CLI::App* explain = app.add_subcommand(
      "explain", "Print the provenance chain behind one violation of a saved trace");
  explain->add_option("trace", trace_path, "trace JSON file")->required();
  explain->add_option("violation", violation_id, "violation id, e.g. v1")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigIo;
  }

  try {
    // Precedence: defaults < config file < explicit command-line flags.
    if (!opts.config_path.empty()) {
      RunConfig from_file = opts.config;
      apply_config_file(opts.config_path, from_file);
      for (CLI::App* cmd : {interpret, repair}) {
        if (!cmd->parsed()) continue;
        if (cmd->count("--saliency-threshold") == 0)
          opts.config.saliency_threshold = from_file.saliency_threshold;
        if (cmd->count("--janus-threshold") == 0)
          opts.config.janus_threshold = from_file.janus_threshold;
        if (cmd->count("--budget") == 0) opts.config.budget = from_file.budget;
        if (cmd->count("--seed") == 0) opts.config.seed = from_file.seed;
        if (cmd->count("--output") == 0) opts.config.output = from_file.output;
      }
    }
    if (!output_word.empty()) opts.config.output = parse_output_mode(output_word);

    if (check->parsed()) {
      if (check_paths.empty()) check_paths.push_back(opts.corpus_root);
      return run_check(check_paths);
    }
    if (interpret->parsed()) return run_interpret(opts, scene_name);
    if (repair->parsed()) return run_repair(opts, scene_name);
    return run_explain(trace_path, violation_id);
  } catch (const EngineError& e) {
    std::cerr << "error: " << e.what() << "\n";
    const std::string& code = e.code();
    return (code == "CONFIG" || code.rfind("IO-", 0) == 0) ? kExitConfigIo : kExitCorpus;
  }
}
