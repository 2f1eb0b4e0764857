// python/bindings.cpp

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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "wsw/align.hpp"
#include "wsw/batch.hpp"
#include "wsw/confusion.hpp"
#include "wsw/edit_distance.hpp"
#include "wsw/errors.hpp"
#include "wsw/features.hpp"
#include "wsw/ingest.hpp"
#include "wsw/reliability.hpp"
#include "wsw/report.hpp"
#include "wsw/transcript.hpp"

namespace py = pybind11;
using namespace wsw;

namespace {

SpeakerRole role_arg(const std::string& name) {
  const auto r = parse_role(name);
  if (!r) throw py::value_error("unknown speaker role '" + name + "'");
  return *r;
}

py::dict summary_dict(const FeatureSummary& s) {
  py::dict d;
  d["role"] = std::string(to_string(s.role));
  d["duration_minutes"] = s.duration_minutes;
  d["n_words"] = s.n_words;
  d["n_utterances"] = s.n_utterances;
  d["n_questions"] = s.n_questions;
  d["n_non_questions"] = s.n_non_questions;
  d["mlu_overall"] = s.mlu_overall;
  d["mlu_question"] = s.mlu_question;
  d["mlu_non_question"] = s.mlu_non_question;
  d["words_per_minute"] = s.words_per_minute;
  d["n_responded_questions"] = s.n_responded_questions;
  d["n_responded_non_questions"] = s.n_responded_non_questions;
  d["prop_responded_questions"] = s.prop_responded_questions;
  d["prop_responded_non_questions"] = s.prop_responded_non_questions;
  d["prop_responded_total"] = s.prop_responded_total;
  d["pct_questions"] = s.pct_questions;
  d["questions_per_minute"] = s.questions_per_minute;
  d["non_questions_per_minute"] = s.non_questions_per_minute;
  d["responded_questions_per_minute"] = s.responded_questions_per_minute;
  d["lexical_diversity_per_minute"] = s.lexical_diversity_per_minute;
  d["lexical_diversity_pooled"] = s.lexical_diversity_pooled;
  return d;
}

py::dict metrics_dict(const ReliabilityMetrics& m) {
  py::dict d;
  d["f1_weighted"] = m.f1_weighted;
  d["accuracy"] = m.accuracy;
  d["kappa"] = m.kappa;
  d["wer_teacher"] = m.wer_teacher;
  d["wer_child"] = m.wer_child;
  return d;
}

ConfusionMatrix matrix_arg(const std::array<std::array<std::uint64_t, 2>, 2>& counts) {
  ConfusionMatrix m;
  m.counts = counts;
  return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "wsw core bindings";
  py::register_exception<Error>(m, "WswError");

  m.def("normalize", [](const std::string& s) { return normalize(s); });
  m.def("tokenize", [](const std::string& raw) { return tokenize(normalize(raw)); });
  m.def("is_question", &is_question);
  m.def("levenshtein", [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
    return levenshtein(a, b);
  });

  py::class_<RecordingMeta>(m, "RecordingMeta")
      .def(py::init([](std::string id, const std::string& wearer, std::string classroom,
                       std::string year, double minutes) {
             return RecordingMeta{std::move(id), role_arg(wearer), std::move(classroom),
                                  std::move(year), minutes};
           }),
           py::arg("recording_id"), py::arg("wearer_role"), py::arg("classroom_id"),
           py::arg("academic_year"), py::arg("duration_minutes"))
      .def_readonly("recording_id", &RecordingMeta::recording_id)
      .def_property_readonly("wearer_role",
                             [](const RecordingMeta& r) { return std::string(to_string(r.wearer_role)); })
      .def_readonly("classroom_id", &RecordingMeta::classroom_id)
      .def_readonly("academic_year", &RecordingMeta::academic_year)
      .def_readonly("duration_minutes", &RecordingMeta::duration_minutes);

  py::class_<Utterance>(m, "Utterance")
      .def_readonly("id", &Utterance::id)
      .def_readonly("onset", &Utterance::onset)
      .def_readonly("offset", &Utterance::offset)
      .def_readonly("raw_text", &Utterance::raw_text)
      .def_readonly("tokens", &Utterance::tokens)
      .def_property_readonly("role", [](const Utterance& u) { return std::string(to_string(u.role)); })
      .def_property_readonly("source", [](const Utterance& u) { return std::string(to_string(u.source)); })
      .def_readonly("question", &Utterance::question)
      .def_readonly("confidence", &Utterance::confidence)
      .def_readonly("linked_machine_id", &Utterance::linked_machine_id)
      .def_property_readonly("word_count", &Utterance::word_count)
      .def("__repr__", [](const Utterance& u) {
        return "<Utterance " + u.id + " " + std::string(to_string(u.role)) + " '" + u.raw_text + "'>";
      });

  py::class_<Transcript>(m, "Transcript")
      .def_readonly("meta", &Transcript::meta)
      .def_property_readonly("source", [](const Transcript& t) { return std::string(to_string(t.source)); })
      .def_readonly("utterances", &Transcript::utterances)
      .def_readonly("linked", &Transcript::linked)
      .def("__len__", [](const Transcript& t) { return t.utterances.size(); });

  m.def("load_meta", &load_meta, py::arg("path"));
  m.def("load_machine", [](const fs::path& p, const RecordingMeta& meta) { return load_machine(p, meta); },
        py::arg("path"), py::arg("meta"));
  m.def("load_expert",
        [](const fs::path& p, const RecordingMeta& meta, char delimiter) {
          return load_expert(p, meta, delimiter);
        },
        py::arg("path"), py::arg("meta"), py::arg("delimiter") = '\t');
  m.def("validate", [](const Transcript& t) {
    py::list out;
    for (const auto& w : validate(t)) {
      py::dict d;
      d["kind"] = std::string(to_string(w.kind));
      d["utterance_id"] = w.utterance_id;
      d["other_id"] = w.other_id;
      d["message"] = w.message;
      out.append(d);
    }
    return out;
  });

  py::class_<AlignConfig>(m, "AlignConfig")
      .def(py::init<>())
      .def_readwrite("gap_penalty", &AlignConfig::gap_penalty)
      .def_readwrite("min_iou", &AlignConfig::min_iou)
      .def_readwrite("min_similarity", &AlignConfig::min_similarity)
      .def_readwrite("similarity_weight", &AlignConfig::similarity_weight)
      .def_readwrite("search_window", &AlignConfig::search_window);

  py::class_<AlignedPair>(m, "AlignedPair")
      .def_readonly("machine", &AlignedPair::machine)
      .def_readonly("expert", &AlignedPair::expert)
      .def_readonly("time_iou", &AlignedPair::time_iou)
      .def_readonly("text_similarity", &AlignedPair::text_similarity);

  py::class_<AlignedCorpus>(m, "AlignedCorpus")
      .def_property_readonly("method", [](const AlignedCorpus& c) {
        return c.method == AlignMethod::Index ? "index" : "time";
      })
      .def_readonly("pairs", &AlignedCorpus::pairs)
      .def_readonly("machine_only", &AlignedCorpus::machine_only)
      .def_readonly("expert_only", &AlignedCorpus::expert_only)
      .def_readonly("score", &AlignedCorpus::score);

  m.def("align", [](const Transcript& a, const Transcript& b, const AlignConfig& cfg) {
    check(cfg);
    return align(a, b, cfg);
  }, py::arg("machine"), py::arg("expert"), py::arg("config") = AlignConfig{});
  m.def("align_by_time", [](const Transcript& a, const Transcript& b, const AlignConfig& cfg) {
    check(cfg);
    return align_by_time(a, b, cfg);
  }, py::arg("machine"), py::arg("expert"), py::arg("config") = AlignConfig{});
  m.def("align_by_index", &align_by_index, py::arg("machine"), py::arg("expert"));

  py::class_<ConfusionMatrix>(m, "ConfusionMatrix")
      .def(py::init(&matrix_arg), py::arg("counts"))
      .def_readonly("counts", &ConfusionMatrix::counts)
      .def_readonly("excluded_other", &ConfusionMatrix::excluded_other)
      .def_readonly("residue_machine", &ConfusionMatrix::residue_machine)
      .def_readonly("residue_expert", &ConfusionMatrix::residue_expert)
      .def_property_readonly("total", &ConfusionMatrix::total);
  m.def("cross_classify", &cross_classify);
  m.def("accuracy", &accuracy);
  m.def("weighted_f1", &weighted_f1);
  m.def("cohen_kappa", &cohen_kappa);

  m.def("utterance_wer", [](const Utterance* hyp, const Utterance* ref) { return utterance_wer(hyp, ref); },
        py::arg("hyp").none(true), py::arg("ref").none(true));
  m.def("reliability", [](const AlignedCorpus& c, bool wearer_match) {
    const RecordingReliability r = assess(c, wearer_match);
    py::dict d = metrics_dict(r.metrics);
    d["pairs"] = r.pairs;
    d["confusion"] = r.confusion;
    return d;
  }, py::arg("corpus"), py::arg("wearer_match") = true);
  m.def("time_weighted_mean",
        [](const std::vector<std::optional<double>>& v, const std::vector<double>& d) {
          return time_weighted_mean(v, d);
        },
        py::arg("values"), py::arg("durations"));
  m.def("icc_absolute", [](const std::vector<std::array<double, 2>>& rows) {
    return icc_absolute(rows).value;
  }, py::arg("ratings"));

  m.def("detect_responses",
        [](const Transcript& t, double window) {
          std::vector<std::tuple<std::string, std::string, double>> out;
          for (const auto& l : detect_responses(t, window))
            out.emplace_back(l.target_id, l.response_id, l.latency);
          return out;
        },
        py::arg("transcript"), py::arg("window") = kDefaultResponseWindow);
  m.def("response_proportion", &response_proportion, py::arg("responded"), py::arg("total"));
  m.def("summarize",
        [](const Transcript& t, const std::string& role, double response_window, double ld_window) {
          const FeatureConfig cfg{response_window, ld_window};
          check(cfg);
          return summary_dict(summarize(t, role_arg(role), cfg));
        },
        py::arg("transcript"), py::arg("role"), py::arg("response_window") = kDefaultResponseWindow,
        py::arg("ld_window") = kDefaultLexicalWindow);

  m.def("run_batch",
        [](std::optional<fs::path> root, std::optional<fs::path> manifest, std::optional<fs::path> out,
           unsigned workers, const std::string& format, std::optional<fs::path> config) {
          if (root.has_value() == manifest.has_value())
            throw py::value_error("give exactly one of root or manifest");
          const auto fmt = parse_report_format(format);
          if (!fmt) throw py::value_error("format must be csv or json");
          RunConfig cfg = config ? load_run_config(*config) : RunConfig{};
          cfg.workers = workers;
          const CorpusManifest m = root ? discover(*root) : load_manifest(*manifest);
          PipelineResult result;
          {
            py::gil_scoped_release release;
            result = run_pipeline(m, cfg);
            if (out) emit_report(result, *out, *fmt);
          }
          py::dict d;
          d["recordings"] = result.recordings.size();
          d["errors"] = [&] {
            py::list errors;
            for (const auto& e : result.errors) errors.append(py::make_tuple(e.recording_id, e.code, e.message));
            return errors;
          }();
          d["machine_utterances"] = result.totals.machine_utterances;
          d["expert_utterances"] = result.totals.expert_utterances;
          d["hours"] = result.totals.hours;
          d["overall"] = metrics_dict(result.reliability.overall);
          d["time_weighted"] = metrics_dict(result.reliability.time_weighted);
          py::dict iccs;
          for (const auto& [name, e] : result.reliability.iccs) iccs[py::str(name)] = e.value;
          d["iccs"] = iccs;
          return d;
        },
        py::arg("root") = py::none(), py::arg("manifest") = py::none(), py::arg("out") = py::none(),
        py::arg("workers") = 1, py::arg("format") = "csv", py::arg("config") = py::none());
}
