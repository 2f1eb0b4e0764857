// tools/wsw.cpp

// Copyright 2026  The wsw Authors
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

// wsw: command-line driver.
//
//   wsw ingest-check --meta M --machine F [--expert F]
//   wsw ingest-check --root DIR | --manifest PATH
//   wsw align        --meta M --machine F --expert F [--out FILE]
//   wsw features     --meta M --machine F [--expert F] [--out FILE]
//   wsw reliability  --meta M --machine F --expert F [--out FILE]
//   wsw batch        --root DIR | --manifest PATH [--out DIR] [--workers N] [--format csv|json]
//   wsw report       --in report.json --out DIR [--format csv|json]
//
// Exit status: 0 success, 1 usage error, 2 some recordings failed, 3 fatal.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "wsw/align.hpp"
#include "wsw/batch.hpp"
#include "wsw/errors.hpp"
#include "wsw/features.hpp"
#include "wsw/ingest.hpp"
#include "wsw/reliability.hpp"
#include "wsw/report.hpp"

namespace {

namespace fs = std::filesystem;
using namespace wsw;

enum Exit { kOk = 0, kUsage = 1, kPartial = 2, kFatal = 3 };

struct Options {
  std::string config;
  std::string root;
  std::string manifest;
  std::string out;
  std::string in;
  std::string meta;
  std::string machine;
  std::string expert;
  std::string format = "csv";
  std::optional<unsigned> workers;
  std::optional<double> response_window;
  std::optional<double> ld_window;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("wsw");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("%^%l%$: %v");
  const char* env = std::getenv("WSW_LOG");
  const std::string level = env ? env : "warn";
  if (level == "error") spdlog::set_level(spdlog::level::err);
  else if (level == "info") spdlog::set_level(spdlog::level::info);
  else if (level == "debug") spdlog::set_level(spdlog::level::debug);
  else spdlog::set_level(spdlog::level::warn);
}

RunConfig run_config(const Options& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_run_config(o.config);
  if (o.workers) cfg.workers = *o.workers;
  if (o.response_window) cfg.features.response_window = *o.response_window;
  if (o.ld_window) cfg.features.ld_window = *o.ld_window;
  if (!o.out.empty()) cfg.output_dir = o.out;
  check(cfg);
  return cfg;
}

// Writes to --out when given, stdout otherwise.
template <typename F>
void with_output(const std::string& path, F&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  write(out);
}

struct Loaded {
  RecordingMeta meta;
  Transcript machine;
  std::optional<Transcript> expert;
};

Loaded load(const Options& o, const RunConfig& cfg, bool need_expert) {
  if (need_expert && o.expert.empty())
    throw CLI::RequiredError("--expert");
  Loaded l;
  l.meta = load_meta(o.meta);
  l.machine = load_machine(o.machine, l.meta);
  if (!o.expert.empty()) l.expert = load_expert(o.expert, l.meta, cfg.expert_delimiter);
  return l;
}

CorpusManifest corpus(const Options& o) {
  if (o.root.empty() == o.manifest.empty())
    throw CLI::ValidationError("corpus", "give exactly one of --root or --manifest");
  return o.root.empty() ? load_manifest(o.manifest) : discover(o.root);
}

void log_warnings(const std::string& what, const Transcript& t) {
  for (const auto& w : validate(t))
    spdlog::warn("{} utterance {}: {} ({})", what, w.utterance_id, to_string(w.kind), w.message);
}

int ingest_check(const Options& o) {
  const RunConfig cfg = run_config(o);
  if (o.root.empty() && o.manifest.empty()) {
    const Loaded l = load(o, cfg, false);
    log_warnings("machine", l.machine);
    if (l.expert) log_warnings("expert", *l.expert);
    std::cout << l.meta.recording_id << ": " << l.machine.utterances.size()
              << " machine utterances";
    if (l.expert) {
      std::cout << ", " << l.expert->utterances.size() << " expert utterances"
                << (l.expert->linked ? " (linked)" : "");
    }
    std::cout << '\n';
    return kOk;
  }
  const CorpusManifest m = corpus(o);
  std::size_t failed = 0;
  for (const auto& e : m.entries) {
    try {
      const RecordingMeta meta = load_meta(e.meta_path);
      const Transcript machine = load_machine(e.machine_path, meta);
      log_warnings(e.recording_id + " machine", machine);
      if (e.expert_path) log_warnings(e.recording_id + " expert", load_expert(*e.expert_path, meta, cfg.expert_delimiter));
      spdlog::info("{}: ok", e.recording_id);
    } catch (const Error& err) {
      ++failed;
      std::cout << e.recording_id << ": " << err.what() << '\n';
    }
  }
  std::cout << m.entries.size() - failed << "/" << m.entries.size() << " recordings ok\n";
  return failed ? kPartial : kOk;
}

int align_cmd(const Options& o) {
  const RunConfig cfg = run_config(o);
  const Loaded l = load(o, cfg, true);
  const AlignedCorpus c = align(l.machine, *l.expert, cfg.align);
  spdlog::info("{} pairs, {} machine-only, {} expert-only", c.pairs.size(), c.machine_only.size(),
               c.expert_only.size());
  with_output(o.out, [&](std::ostream& out) { write_aligned(out, c); });
  return kOk;
}

int features_cmd(const Options& o) {
  const RunConfig cfg = run_config(o);
  const Loaded l = load(o, cfg, false);
  with_output(o.out, [&](std::ostream& out) {
    write_feature_csv_header(out);
    for (const Transcript* t : {&l.machine, l.expert ? &*l.expert : nullptr}) {
      if (t == nullptr) continue;
      for (SpeakerRole role : {SpeakerRole::Teacher, SpeakerRole::Child})
        write_feature_csv_row(out, {l.meta.recording_id, t->source, summarize(*t, role, cfg.features)});
    }
  });
  return kOk;
}

int reliability_cmd(const Options& o) {
  const RunConfig cfg = run_config(o);
  const Loaded l = load(o, cfg, true);
  ReliabilityReport report;
  report.per_recording.emplace(l.meta.recording_id,
                               assess(align(l.machine, *l.expert, cfg.align), cfg.wer_wearer_match));
  aggregate(report);
  with_output(o.out, [&](std::ostream& out) { write_reliability_csv(out, report); });
  return kOk;
}

ReportFormat format_of(const Options& o) {
  const auto f = parse_report_format(o.format);
  if (!f) throw CLI::ValidationError("--format", "expected csv or json");
  return *f;
}

int batch_cmd(const Options& o) {
  const RunConfig cfg = run_config(o);
  const ReportFormat format = format_of(o);
  const CorpusManifest m = corpus(o);
  spdlog::info("{} recordings, {} workers", m.entries.size(), cfg.workers);
  const PipelineResult result = run_pipeline(m, cfg);
  emit_report(result, cfg.output_dir, format);
  for (const auto& e : result.errors) spdlog::error("{}: {}", e.recording_id, e.message);
  std::cout << result.recordings.size() << " recordings processed, " << result.errors.size()
            << " failed; " << result.totals.machine_utterances << " machine and "
            << result.totals.expert_utterances << " expert utterances; report in "
            << cfg.output_dir.string() << '\n';
  return result.errors.empty() ? kOk : kPartial;
}

int report_cmd(const Options& o) {
  if (o.in.empty()) throw CLI::RequiredError("--in");
  if (o.out.empty()) throw CLI::RequiredError("--out");
  const ReportFormat format = format_of(o);
  PipelineResult result = load_report(o.in);
  emit_report(result, o.out, format);
  return result.errors.empty() ? kOk : kPartial;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"wsw: machine vs expert classroom transcript analysis"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "run configuration JSON")->check(CLI::ExistingFile);
    sub->add_option("--response-window", o.response_window, "response window, seconds");
    sub->add_option("--ld-window", o.ld_window, "lexical diversity window, seconds");
  };
  auto single = [&](CLI::App* sub, bool out_file) {
    sub->add_option("--meta", o.meta, "metadata sidecar")->required();
    sub->add_option("--machine", o.machine, "machine transcript (JSONL)")->required();
    sub->add_option("--expert", o.expert, "expert transcript (TSV)");
    if (out_file) sub->add_option("--out", o.out, "output file (default stdout)");
  };

  auto* ingest = app.add_subcommand("ingest-check", "parse and validate transcripts");
  common(ingest);
  ingest->add_option("--meta", o.meta, "metadata sidecar");
  ingest->add_option("--machine", o.machine, "machine transcript (JSONL)");
  ingest->add_option("--expert", o.expert, "expert transcript (TSV)");
  ingest->add_option("--root", o.root, "corpus directory");
  ingest->add_option("--manifest", o.manifest, "corpus manifest JSON");

  auto* align_sub = app.add_subcommand("align", "align one recording, JSONL audit output");
  common(align_sub);
  single(align_sub, true);

  auto* features = app.add_subcommand("features", "feature CSV for one recording");
  common(features);
  single(features, true);

  auto* reliability = app.add_subcommand("reliability", "reliability CSV for one recording");
  common(reliability);
  single(reliability, true);

  auto* batch = app.add_subcommand("batch", "run the whole corpus pipeline");
  common(batch);
  batch->add_option("--root", o.root, "corpus directory");
  batch->add_option("--manifest", o.manifest, "corpus manifest JSON");
  batch->add_option("--out", o.out, "output directory");
  batch->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  batch->add_option("--format", o.format, "csv or json");

  auto* report = app.add_subcommand("report", "re-emit a saved report.json");
  report->add_option("--in", o.in, "report.json")->required();
  report->add_option("--out", o.out, "output directory")->required();
  report->add_option("--format", o.format, "csv or json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*ingest) {
      if (o.root.empty() && o.manifest.empty() && (o.meta.empty() || o.machine.empty()))
        throw CLI::ValidationError("ingest-check", "give --meta and --machine, or a corpus");
      return ingest_check(o);
    }
    if (*align_sub) return align_cmd(o);
    if (*features) return features_cmd(o);
    if (*reliability) return reliability_cmd(o);
    if (*batch) return batch_cmd(o);
    if (*report) return report_cmd(o);
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidConfig) {
      spdlog::error("{}", e.what());
      return kUsage;
    }
    spdlog::critical("{}", e.what());
    return kFatal;
  } catch (const std::exception& e) {
    spdlog::critical("{}", e.what());
    return kFatal;
  }
  return kUsage;
}
