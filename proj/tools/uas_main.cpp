// tools/uas_main.cpp

// Copyright 2026 The UAS Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <pthread.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "uas/audit.hpp"
#include "uas/error.hpp"
#include "uas/qa.hpp"
#include "uas/schema.hpp"
#include "uas/synthesis.hpp"
#include "uas/validation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace uas;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRejections = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBackend = 3;

// Thrown for anything that should end the process with kExitUsage.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json load_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw UsageError(std::string("cannot open ") + what + " '" + path + "'");
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw UsageError(std::string(what) + " '" + path + "' is not valid JSON");
  return doc;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot write '" + path.string() + "'");
  return out;
}

struct ValidationFlags {
  std::string ontologyPath;
  std::string thresholdsPath;
  bool lenient = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--ontology", ontologyPath, "Ontology JSON (label sets and contradiction lexicon)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--thresholds", thresholdsPath, "Duration alignment thresholds JSON")
        ->check(CLI::ExistingFile);
    cmd->add_flag("--lenient", lenient, "Speech records need only age, gender and emotion");
  }

  Ontology ontology() const {
    if (ontologyPath.empty()) return {};
    Ontology o = Ontology::from_json(load_json_file(ontologyPath, "ontology"));
    o.check();
    return o;
  }

  AlignmentThresholds thresholds() const {
    if (thresholdsPath.empty()) return {};
    AlignmentThresholds t = AlignmentThresholds::from_json(load_json_file(thresholdsPath, "thresholds"));
    t.check();
    return t;
  }

  ValidationOptions options() const { return {.strict = !lenient}; }
};

// --- synthesize ------------------------------------------------------------

struct SynthesizeArgs {
  std::string manifest;
  std::string outDir;
  std::string mockFixtures;
  std::string backendConfig;
  int workers = 1;
  int retryRejected = 0;
  std::optional<int> maxRetries;
  ValidationFlags validation;
};

int run_synthesize(const SynthesizeArgs& args) {
  const auto manifest = read_manifest_file(args.manifest);

  PipelineOptions options;
  options.ontology = args.validation.ontology();
  options.thresholds = args.validation.thresholds();
  options.validation = args.validation.options();
  options.workerCount = args.workers;
  options.retryRejected = args.retryRejected;

  std::unique_ptr<ModelBackend> backend;
  const bool mocked = !args.mockFixtures.empty();
  if (mocked) {
    backend = std::make_unique<MockBackend>(args.mockFixtures);
  } else if (!args.backendConfig.empty()) {
    auto config = BackendConfig::from_json(load_json_file(args.backendConfig, "backend config"));
    config.check();
    options.maxRetries = config.maxRetries;
    backend = std::make_unique<HttpBackend>(std::move(config));
  } else {
    throw UsageError("synthesize needs --mock-fixtures DIR or --backend FILE");
  }
  if (args.maxRetries) options.maxRetries = *args.maxRetries;

  const fs::path out(args.outDir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw UsageError("cannot create output directory '" + out.string() + "': " + ec.message());

  auto accepted = open_output(out / "accepted.jsonl");
  auto rejected = open_output(out / "rejected.jsonl");
  auto failures = open_output(out / "failures.jsonl");
  const PipelineRunSummary summary =
      run_pipeline(manifest, *backend, options, {&accepted, &rejected, &failures});
  auto summary_file = open_output(out / "summary.json");
  summary_file << summary.to_json().dump(2) << '\n';

  std::cout << "total " << summary.total << ", accepted " << summary.accepted << ", rejected "
            << summary.rejected << ", backend failures " << summary.backendFailures << '\n';
  if (!mocked && summary.total > 0 && summary.backendFailures == summary.total) {
    std::cerr << "error: backend unreachable; every entry failed after retries (see failures.jsonl)\n";
    return kExitBackend;
  }
  return kExitOk;
}

// --- validate --------------------------------------------------------------

struct ValidateArgs {
  std::string corpus;
  std::string rejectedPath = "rejected.jsonl";
  ValidationFlags validation;
};

int run_validate(const ValidateArgs& args) {
  const auto corpus = read_manifest_file(args.corpus);
  const Ontology ontology = args.validation.ontology();
  const AlignmentThresholds thresholds = args.validation.thresholds();
  const ValidationOptions options = args.validation.options();

  std::map<ViolationCode, std::size_t> counts;
  std::vector<ValidationReport> rejections;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const CorpusEntry& entry = corpus[i];
    if (!entry.uas) throw UsageError("entry '" + entry.id + "' has no uas record");
    ValidationReport report = validate_entry(entry, ontology, thresholds, options);
    if (report.verdict == Verdict::Accept) continue;
    std::set<ViolationCode> seen;
    for (const auto& v : report.violations)
      if (seen.insert(v.code).second) ++counts[v.code];
    rejections.push_back(std::move(report));
  }

  auto out = open_output(args.rejectedPath);
  for (const auto& report : rejections) out << serialize_report(report) << '\n';

  std::cout << "records " << corpus.size() << "\n"
            << "accepted " << corpus.size() - rejections.size() << "\n"
            << "rejected " << rejections.size() << "\n";
  for (ViolationCode code : kAllViolationCodes) std::cout << to_string(code) << ' ' << counts[code] << '\n';
  return rejections.empty() ? kExitOk : kExitRejections;
}

// --- qagen -----------------------------------------------------------------

struct QagenArgs {
  std::string corpus;
  std::string output;
  std::uint64_t seed = 0;
  int itemsPerRecord = 6;
  int options = 4;
  bool withMeta = false;
  bool freeTextMcq = false;
  std::vector<std::string> fields;
  std::string templates;
  std::string ontologyPath;
};

int run_qagen(const QagenArgs& args) {
  QaGenConfig config;
  config.rngSeed = args.seed;
  config.itemsPerRecord = args.itemsPerRecord;
  config.optionsPerMcq = args.options;
  config.freeTextMcq = args.freeTextMcq;
  if (!args.fields.empty()) config.fieldsEnabled = {args.fields.begin(), args.fields.end()};
  config.check();

  Ontology ontology;
  if (!args.ontologyPath.empty()) {
    ontology = Ontology::from_json(load_json_file(args.ontologyPath, "ontology"));
    ontology.check();
  }
  std::optional<TemplateBank> custom;
  if (!args.templates.empty()) custom = TemplateBank::from_file(args.templates);
  const TemplateBank& bank = custom ? *custom : TemplateBank::builtin();

  const auto corpus = read_manifest_file(args.corpus);
  const fs::path out_path(args.output);
  auto out = open_output(out_path);
  std::optional<std::ofstream> meta;
  if (args.withMeta) {
    fs::path meta_path = out_path;
    meta_path.replace_extension(".meta.jsonl");
    meta = open_output(meta_path);
  }

  std::size_t items = 0;
  for (const auto& entry : corpus) {
    if (!entry.uas) throw UsageError("entry '" + entry.id + "' has no uas record");
    for (const auto& item : gen_for_record(*entry.uas, entry.id, ontology, config, bank)) {
      out << serialize_chat(item) << '\n';
      if (meta) *meta << qa_meta_to_json(item).dump() << '\n';
      ++items;
    }
  }
  std::cout << "wrote " << items << " items for " << corpus.size() << " records\n";
  return kExitOk;
}

// --- audit -----------------------------------------------------------------

struct AuditArgs {
  std::string corpus;
  std::string tasks;
  std::string store;
  std::string out;
  std::string bind = "127.0.0.1:8080";
  std::string uiDir;
  std::string format = "table";
  std::string unsure = "not-correct";
  std::vector<std::string> roster;
  std::size_t n = 400;
  std::uint64_t seed = 0;
  int requiredVotes = 3;
};

audit::ReportOptions report_options(const AuditArgs& args) {
  audit::ReportOptions options;
  options.requiredVotes = args.requiredVotes;
  options.unsurePolicy = args.unsure == "abstain" ? audit::UnsurePolicy::Abstain : audit::UnsurePolicy::NotCorrect;
  return options;
}

int run_audit_sample(const AuditArgs& args) {
  const auto corpus = read_manifest_file(args.corpus);
  const auto tasks = audit::sample_audit_set(corpus, args.n, args.seed, args.roster);
  auto out = open_output(args.out);
  audit::write_audit_set(out, tasks);
  std::map<DomainTag, std::size_t> strata;
  for (const auto& t : tasks) ++strata[t.domainTag];
  std::cout << "sampled " << tasks.size() << " tasks:";
  for (const auto& [tag, count] : strata) std::cout << ' ' << to_string(tag) << '=' << count;
  std::cout << '\n';
  return kExitOk;
}

int run_audit_report(const AuditArgs& args) {
  const auto tasks = audit::read_audit_set_file(args.tasks);
  std::unique_ptr<audit::JudgmentStore> store;
  if (fs::exists(args.store)) store = std::make_unique<audit::JudgmentStore>(fs::path(args.store));
  else store = std::make_unique<audit::JudgmentStore>();
  const auto rows = audit::field_accuracy_report(*store, tasks, report_options(args));
  if (args.format == "json") std::cout << audit::report_to_json(rows).dump(2) << '\n';
  else std::cout << audit::report_to_table(rows);
  return kExitOk;
}

std::pair<std::string, int> split_bind(const std::string& bind) {
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) throw UsageError("--bind expects HOST:PORT, got '" + bind + "'");
  try {
    std::size_t used = 0;
    const std::string port_text = bind.substr(colon + 1);
    const int port = std::stoi(port_text, &used);
    if (used != port_text.size() || port < 0 || port > 65535) throw std::out_of_range("port");
    return {bind.substr(0, colon), port};
  } catch (const std::logic_error&) {
    throw UsageError("--bind has an invalid port: '" + bind + "'");
  }
}

int run_audit_serve(const AuditArgs& args) {
  auto tasks = audit::read_audit_set_file(args.tasks);
  const auto [host, port] = split_bind(args.bind);
  audit::JudgmentStore store{fs::path(args.store)};
  audit::ServiceOptions options;
  if (!args.uiDir.empty()) options.uiDir = args.uiDir;
  options.roster = args.roster;
  options.report = report_options(args);
  const std::size_t task_count = tasks.size();
  audit::AuditService service(std::move(tasks), store, std::move(options));

  const int bound = service.bind(host, port);
  if (bound < 0) {
    std::cerr << "error: cannot bind " << args.bind << '\n';
    return 1;
  }

  // SIGINT/SIGTERM are handled synchronously on a watcher thread.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::jthread watcher([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    service.stop();
  });

  std::cout << "serving " << task_count << " tasks on http://" << host << ':' << bound << std::endl;
  const bool ok = service.listen_after_bind();
  if (ok) watcher.detach();  // woken by a signal; nothing left to join
  else pthread_kill(watcher.native_handle(), SIGTERM);
  return ok ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unified audio schema toolkit: synthesis, validation, QA generation and audit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "uas 0.1.0");

  SynthesizeArgs synth;
  auto* synthesize = app.add_subcommand("synthesize", "Caption, convert and validate a manifest");
  synthesize->add_option("manifest", synth.manifest, "Corpus manifest (JSON Lines)")->required();
  synthesize->add_option("--out", synth.outDir, "Output directory")->required();
  synthesize->add_option("--mock-fixtures", synth.mockFixtures, "Serve model calls from fixture files")
      ->check(CLI::ExistingDirectory);
  synthesize->add_option("--backend", synth.backendConfig, "HTTP backend config JSON")
      ->check(CLI::ExistingFile);
  synthesize->add_option("--workers", synth.workers, "Worker threads")->check(CLI::PositiveNumber);
  synthesize->add_option("--retry-rejected", synth.retryRejected,
                         "Extra conversion samples for a rejected record")
      ->check(CLI::NonNegativeNumber);
  synthesize->add_option("--max-retries", synth.maxRetries, "Retries per backend call")
      ->check(CLI::NonNegativeNumber);
  synth.validation.add_to(synthesize);

  ValidateArgs val;
  auto* validate = app.add_subcommand("validate", "Lint a corpus that already carries UAS records");
  validate->add_option("corpus", val.corpus, "Corpus (JSON Lines)")->required();
  validate->add_option("--rejected", val.rejectedPath, "Where to write the rejection log")->capture_default_str();
  val.validation.add_to(validate);

  QagenArgs qa;
  auto* qagen = app.add_subcommand("qagen", "Generate chat-format QA pairs from UAS records");
  qagen->add_option("corpus", qa.corpus, "Corpus (JSON Lines)")->required();
  qagen->add_option("output", qa.output, "Output file (JSON Lines)")->required();
  qagen->add_option("--seed", qa.seed, "RNG seed");
  qagen->add_option("--items-per-record", qa.itemsPerRecord, "Items per record")->check(CLI::PositiveNumber);
  qagen->add_option("--options", qa.options, "Options per multiple-choice item")->check(CLI::Range(3, 4));
  qagen->add_option("--fields", qa.fields, "Restrict to these dotted field paths")->delimiter(',');
  qagen->add_option("--templates", qa.templates, "Template bank JSON")->check(CLI::ExistingFile);
  qagen->add_option("--ontology", qa.ontologyPath, "Ontology JSON")->check(CLI::ExistingFile);
  qagen->add_flag("--with-meta", qa.withMeta, "Also write a .meta.jsonl sidecar");
  qagen->add_flag("--free-text-mcq", qa.freeTextMcq, "Allow multiple choice on free-text fields");

  AuditArgs au;
  auto* audit_cmd = app.add_subcommand("audit", "Human audit: sample, serve, report");
  audit_cmd->require_subcommand(1);
  auto add_report_flags = [&au](CLI::App* cmd) {
    cmd->add_option("--required-votes", au.requiredVotes, "Verdicts needed per field")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--unsure", au.unsure, "How Unsure verdicts count")
        ->check(CLI::IsMember({"not-correct", "abstain"}));
  };

  auto* sample = audit_cmd->add_subcommand("sample", "Draw a stratified audit set");
  sample->add_option("corpus", au.corpus, "Corpus (JSON Lines)")->required();
  sample->add_option("--n", au.n, "Sample size")->check(CLI::PositiveNumber);
  sample->add_option("--seed", au.seed, "RNG seed");
  sample->add_option("--out", au.out, "Audit-set file to write")->required();
  sample->add_option("--roster", au.roster, "Annotator ids (odd count)")->delimiter(',');

  auto* serve = audit_cmd->add_subcommand("serve", "Run the judgment collection service");
  serve->add_option("--tasks", au.tasks, "Audit-set file")->required()->check(CLI::ExistingFile);
  serve->add_option("--store", au.store, "Judgment log (created if missing)")->required();
  serve->add_option("--bind", au.bind, "HOST:PORT")->capture_default_str();
  serve->add_option("--ui-dir", au.uiDir, "Static UI assets")->check(CLI::ExistingDirectory);
  serve->add_option("--roster", au.roster, "Closed annotator roster")->delimiter(',');
  add_report_flags(serve);

  auto* report = audit_cmd->add_subcommand("report", "Print per-field accuracy with Wilson intervals");
  report->add_option("--tasks", au.tasks, "Audit-set file")->required()->check(CLI::ExistingFile);
  report->add_option("--store", au.store, "Judgment log")->required();
  report->add_option("--format", au.format, "table or json")->check(CLI::IsMember({"table", "json"}));
  add_report_flags(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*synthesize) return run_synthesize(synth);
    if (*validate) return run_validate(val);
    if (*qagen) return run_qagen(qa);
    if (*sample) return run_audit_sample(au);
    if (*serve) return run_audit_serve(au);
    if (*report) return run_audit_report(au);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
