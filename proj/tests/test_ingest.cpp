// tests/test_ingest.cpp

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

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "wsw/errors.hpp"
#include "wsw/ingest.hpp"

using namespace wsw;

namespace {

RecordingMeta test_meta(double minutes = 1.0) {
  return {"rec", SpeakerRole::Teacher, "C1", "2223", minutes};
}

ErrorCode machine_error(const std::string& text, std::optional<std::size_t>* line = nullptr) {
  std::istringstream in(text);
  try {
    parse_machine(in, test_meta());
  } catch (const Error& e) {
    if (line) *line = e.line();
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

ErrorCode expert_error(const std::string& text) {
  std::istringstream in(text);
  try {
    parse_expert(in, test_meta());
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("parse_machine reads one segment per line") {
  std::istringstream in(R"({"start":0.0,"end":1.2,"text":"Sunny.","speaker":"child"})" "\n");
  const Transcript t = parse_machine(in, test_meta());
  REQUIRE(t.utterances.size() == 1);
  const auto& u = t.utterances[0];
  CHECK(u.role == SpeakerRole::Child);
  CHECK(u.word_count() == 1);
  CHECK(u.id == "1");
  CHECK(u.source == Source::Machine);
  CHECK(t.source == Source::Machine);
}

TEST_CASE("parse_machine on an empty stream") {
  std::istringstream in("");
  CHECK(parse_machine(in, test_meta()).utterances.empty());
}

TEST_CASE("parse_machine sorts and keeps line-number ids") {
  std::istringstream in(
      R"({"start":5,"end":6,"text":"later","speaker":"teacher","confidence":0.5})" "\n"
      "\n"
      R"({"start":1,"end":2,"text":"earlier","speaker":"child"})" "\r\n");
  const Transcript t = parse_machine(in, test_meta());
  REQUIRE(t.utterances.size() == 2);
  CHECK(t.utterances[0].id == "3");
  CHECK(t.utterances[1].id == "1");
  CHECK(t.utterances[1].confidence == 0.5);
}

TEST_CASE("parse_machine errors carry line numbers") {
  std::optional<std::size_t> line;
  CHECK(machine_error(R"({"start":0,"end":1,"text":"a","speaker":"child"})" "\n"
                      R"({"start":2,"end":1,"text":"b","speaker":"child"})" "\n",
                      &line) == ErrorCode::InvalidTimestamps);
  CHECK(line == 2u);
  CHECK(machine_error(R"({"start":0,"end":1,"text":"a","speaker":"kid"})", &line) ==
        ErrorCode::UnknownSpeakerLabel);
  CHECK(line == 1u);
  CHECK(machine_error("{not json", &line) == ErrorCode::MalformedRecord);
  CHECK(machine_error(R"({"start":0,"end":1,"text":"a"})") == ErrorCode::MalformedRecord);
  CHECK(machine_error(R"({"start":"0","end":1,"text":"a","speaker":"child"})") ==
        ErrorCode::MalformedRecord);
  CHECK(machine_error(R"({"start":0,"end":1,"text":"a","speaker":"child","extra":1})") ==
        ErrorCode::MalformedRecord);
  CHECK(machine_error(R"({"start":0,"end":1,"text":"a","speaker":"child","confidence":1.5})") ==
        ErrorCode::MalformedRecord);
  CHECK(machine_error(R"([1,2,3])") == ErrorCode::MalformedRecord);
}

TEST_CASE("parse_expert reads the snack fixture") {
  const Transcript t = load_expert(WSW_FIXTURE_DIR "/snack.expert.tsv", test_meta());
  REQUIRE(t.utterances.size() == 10);
  const std::vector<std::size_t> expected = {4, 1, 2, 8, 2, 8, 2, 3, 6, 4};
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(t.utterances[i].word_count() == expected[i]);
    CHECK(t.utterances[i].linked_machine_id == std::to_string(i + 1));
  }
  CHECK(t.linked);
  CHECK(t.source == Source::Expert);
}

TEST_CASE("expert linkage needs machine ids on 90% of rows") {
  auto build = [](int linked, int total) {
    std::string s = "start\tend\tspeaker\ttext\tmachine_id\n";
    for (int i = 0; i < total; ++i) {
      s += std::to_string(i) + "\t" + std::to_string(i) + ".5\tchild\thi\t" +
           (i < linked ? std::to_string(i + 1) : "") + "\n";
    }
    return s;
  };
  std::istringstream nine_of_ten(build(9, 10)), eight_of_ten(build(8, 10));
  CHECK(parse_expert(nine_of_ten, test_meta()).linked);
  CHECK_FALSE(parse_expert(eight_of_ten, test_meta()).linked);

  std::istringstream no_column("start\tend\tspeaker\ttext\n0\t1\tchild\thi\n");
  CHECK_FALSE(parse_expert(no_column, test_meta()).linked);
}

TEST_CASE("parse_expert header and record errors") {
  CHECK(expert_error("start\tend\ttext\n0\t1\thi\n") == ErrorCode::MissingHeader);
  CHECK(expert_error("") == ErrorCode::MissingHeader);
  CHECK(expert_error("start\tend\tspeaker\ttext\n0\tx\tchild\thi\n") ==
        ErrorCode::MalformedRecord);
  CHECK(expert_error("start\tend\tspeaker\ttext\n3\t1\tchild\thi\n") ==
        ErrorCode::InvalidTimestamps);
  CHECK(expert_error("start\tend\tspeaker\ttext\n0\t1\tparent\thi\n") ==
        ErrorCode::UnknownSpeakerLabel);
  CHECK(expert_error("start\tend\tspeaker\ttext\n0\t1\tchild\thi\textra\n") ==
        ErrorCode::MalformedRecord);
}

TEST_CASE("parse_expert with comma delimiter, quotes and column order") {
  std::istringstream in(
      "Speaker,Text,Start,End\n"
      "teacher,\"Well, \"\"yes\"\"?\",0,1.5\n"
      "child,\"two\nlines\",2,3\n");
  const Transcript t = parse_expert(in, test_meta(), ',');
  REQUIRE(t.utterances.size() == 2);
  CHECK(t.utterances[0].raw_text == "Well, \"yes\"?");
  CHECK(t.utterances[0].question);
  CHECK(t.utterances[1].raw_text == "two\nlines");
  CHECK(t.utterances[1].word_count() == 2);
}

TEST_CASE("metadata sidecar") {
  std::istringstream in(R"({"recording_id":"r1","wearer_role":"child","classroom_id":"C3",
                            "academic_year":"2223","duration_minutes":12.5})");
  const RecordingMeta m = parse_meta(in);
  CHECK(m.recording_id == "r1");
  CHECK(m.wearer_role == SpeakerRole::Child);
  CHECK(m.duration_minutes == 12.5);

  std::istringstream zero(R"({"recording_id":"r1","wearer_role":"child","classroom_id":"C3",
                              "academic_year":"2223","duration_minutes":0})");
  CHECK_THROWS_AS(parse_meta(zero), Error);
  std::istringstream missing(R"({"recording_id":"r1"})");
  CHECK_THROWS_AS(parse_meta(missing), Error);

  std::stringstream round;
  write_meta(round, m);
  CHECK(parse_meta(round) == m);
}

TEST_CASE("validate: clean transcript has no warnings") {
  Transcript t;
  t.meta = test_meta(1.0);
  t.utterances.push_back(make_utterance("1", 0, 1, "hi", SpeakerRole::Child, Source::Machine));
  t.utterances.push_back(make_utterance("2", 1, 2, "hi", SpeakerRole::Child, Source::Machine));
  t.utterances.push_back(make_utterance("3", 0.5, 1.5, "hi", SpeakerRole::Teacher, Source::Machine));
  t.sort();
  CHECK(validate(t).empty());
}

TEST_CASE("validate: past duration, zero words, overlap") {
  Transcript t;
  t.meta = test_meta(1.0);
  t.utterances.push_back(make_utterance("1", 55, 70, "late", SpeakerRole::Child, Source::Machine));
  t.utterances.push_back(make_utterance("2", 10, 12, "[noise]", SpeakerRole::Teacher, Source::Machine));
  t.utterances.push_back(make_utterance("3", 11, 13, "hello", SpeakerRole::Teacher, Source::Machine));
  t.sort();
  const auto w = validate(t);
  REQUIRE(w.size() == 3);
  CHECK(w[0].kind == WarningKind::ZeroWords);
  CHECK(w[1].kind == WarningKind::Overlap);
  CHECK(w[1].utterance_id == "3");
  CHECK(w[1].other_id == "2");
  CHECK(w[2].kind == WarningKind::PastDuration);

  // within the one-second tolerance
  Transcript edge;
  edge.meta = test_meta(1.0);
  edge.utterances.push_back(make_utterance("1", 59, 60.9, "ok", SpeakerRole::Child, Source::Machine));
  CHECK(validate(edge).empty());
}

TEST_CASE("validate overlap warnings match a pairwise scan") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    oracle::GeneratorOptions opt;
    opt.utterances = 40;
    opt.mean_gap = 1.0;
    Transcript t = oracle::random_transcript(rng, opt);
    t.meta.duration_minutes = 60;

    std::set<std::string> expected;
    for (std::size_t j = 0; j < t.utterances.size(); ++j)
      for (std::size_t i = 0; i < j; ++i)
        if (t.utterances[i].role == t.utterances[j].role &&
            t.utterances[i].offset > t.utterances[j].onset)
          expected.insert(t.utterances[j].id);

    const Transcript before = t;
    std::set<std::string> flagged;
    for (const auto& w : validate(t))
      if (w.kind == WarningKind::Overlap) flagged.insert(w.utterance_id);
    CHECK(flagged == expected);
    CHECK(t == before);  // never mutates
  }
}

TEST_CASE("machine and expert formats round-trip") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    oracle::GeneratorOptions opt;
    opt.utterances = 30;
    Transcript generated = oracle::random_transcript(rng, opt);
    generated.meta = test_meta(10);

    // Canonical machine transcript: ids equal line numbers in sorted order.
    std::stringstream first;
    write_machine(first, generated);
    const Transcript machine = parse_machine(first, generated.meta);
    std::stringstream second;
    write_machine(second, machine);
    CHECK(parse_machine(second, generated.meta) == machine);

    Transcript expert = machine;
    expert.source = Source::Expert;
    for (auto& u : expert.utterances) {
      u.source = Source::Expert;
      u.confidence.reset();
      if (std::bernoulli_distribution(0.95)(rng)) u.linked_machine_id = u.id;
    }
    std::stringstream tsv;
    write_expert(tsv, expert);
    Transcript reparsed = parse_expert(tsv, generated.meta);
    std::stringstream tsv_again;
    write_expert(tsv_again, reparsed);
    CHECK(tsv_again.str() == [&] {
      std::stringstream s;
      write_expert(s, expert);
      return s.str();
    }());
    CHECK(parse_expert(tsv_again, generated.meta) == reparsed);
  }
}

TEST_CASE("parsing is order-stable across runs") {
  const auto meta = test_meta();
  const Transcript a = load_machine(WSW_FIXTURE_DIR "/snack.machine.jsonl", meta);
  const Transcript b = load_machine(WSW_FIXTURE_DIR "/snack.machine.jsonl", meta);
  CHECK(a == b);
  CHECK_THROWS_AS(load_machine(WSW_FIXTURE_DIR "/does-not-exist.jsonl", meta), Error);
}
