// tests/test_features.cpp

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

#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "wsw/errors.hpp"
#include "wsw/features.hpp"
#include "wsw/ingest.hpp"

using namespace wsw;

namespace {

Utterance utt(const std::string& id, double on, double off, const std::string& text,
              SpeakerRole role) {
  return make_utterance(id, on, off, text, role, Source::Expert);
}

Transcript transcript(double minutes, std::vector<Utterance> us) {
  Transcript t;
  t.meta = {"r", SpeakerRole::Teacher, "C", "Y", minutes};
  t.source = Source::Expert;
  t.utterances = std::move(us);
  t.sort();
  return t;
}

std::set<std::tuple<std::string, std::string>> link_set(const std::vector<ResponseLink>& links) {
  std::set<std::tuple<std::string, std::string>> out;
  for (const auto& l : links) out.emplace(l.target_id, l.response_id);
  return out;
}

void check_summary(const FeatureSummary& a, const FeatureSummary& b) {
  CHECK(a.n_words == b.n_words);
  CHECK(a.n_utterances == b.n_utterances);
  CHECK(a.n_questions == b.n_questions);
  CHECK(a.n_non_questions == b.n_non_questions);
  CHECK(a.n_responded_questions == b.n_responded_questions);
  CHECK(a.n_responded_non_questions == b.n_responded_non_questions);
  auto same = [](std::optional<double> x, std::optional<double> y) {
    REQUIRE(x.has_value() == y.has_value());
    if (x) CHECK(*x == doctest::Approx(*y).epsilon(1e-12));
  };
  same(a.mlu_overall, b.mlu_overall);
  same(a.mlu_question, b.mlu_question);
  same(a.mlu_non_question, b.mlu_non_question);
  same(a.prop_responded_questions, b.prop_responded_questions);
  same(a.prop_responded_non_questions, b.prop_responded_non_questions);
  same(a.prop_responded_total, b.prop_responded_total);
  same(a.pct_questions, b.pct_questions);
  same(a.words_per_minute, b.words_per_minute);
  same(a.questions_per_minute, b.questions_per_minute);
  same(a.non_questions_per_minute, b.non_questions_per_minute);
  same(a.responded_questions_per_minute, b.responded_questions_per_minute);
  same(a.lexical_diversity_per_minute, b.lexical_diversity_per_minute);
  same(a.lexical_diversity_pooled, b.lexical_diversity_pooled);
}

}  // namespace

TEST_CASE("mlu") {
  const std::vector<Utterance> us = {utt("1", 0, 1, "a b c", SpeakerRole::Child),
                                     utt("2", 1, 2, "a b c d e", SpeakerRole::Child),
                                     utt("3", 2, 3, "[noise]", SpeakerRole::Child)};
  CHECK(mlu(us) == 4.0);
  CHECK_FALSE(mlu(std::span<const Utterance>{}).has_value());
  const std::vector<const Utterance*> ptrs = {&us[0], &us[2]};
  CHECK(mlu(ptrs) == 3.0);
}

TEST_CASE("words_per_minute") {
  std::vector<Utterance> us;
  for (int i = 0; i < 20; ++i)
    us.push_back(utt(std::to_string(i), i, i + 0.5, "one two three four five", SpeakerRole::Teacher));
  us.push_back(utt("c", 30, 31, "child words", SpeakerRole::Child));
  const auto t = transcript(4, us);
  CHECK(words_per_minute(t, SpeakerRole::Teacher) == 25.0);
  CHECK(words_per_minute(transcript(4, {}), SpeakerRole::Teacher) == 0.0);
  CHECK_THROWS_AS(words_per_minute(transcript(0, {}), SpeakerRole::Teacher), Error);

  std::mt19937_64 rng(71);
  oracle::GeneratorOptions opt;
  opt.utterances = 30;
  Transcript r = oracle::random_transcript(rng, opt);
  std::size_t words = 0;
  for (const auto& u : r.utterances)
    if (u.role == SpeakerRole::Child) words += u.tokens.size();
  CHECK(words_per_minute(r, SpeakerRole::Child) ==
        doctest::Approx(static_cast<double>(words) / r.meta.duration_minutes));
}

TEST_CASE("detect_responses examples") {
  const auto yes = transcript(1, {utt("c", 8, 10, "look", SpeakerRole::Child),
                                  utt("t", 12, 13, "nice", SpeakerRole::Teacher)});
  const auto links = detect_responses(yes);
  REQUIRE(links.size() == 1);
  CHECK(links[0].target_id == "c");
  CHECK(links[0].response_id == "t");
  CHECK(links[0].latency == doctest::Approx(2.0));

  const auto no = transcript(1, {utt("c", 8, 10, "look", SpeakerRole::Child),
                                 utt("t", 12.6, 13, "nice", SpeakerRole::Teacher)});
  CHECK(detect_responses(no).empty());

  // overlap counts; boundary is inclusive on the window end
  const auto overlap = transcript(1, {utt("c", 8, 10, "look", SpeakerRole::Child),
                                      utt("t", 9, 13, "nice", SpeakerRole::Teacher),
                                      utt("t2", 12.5, 14, "yes", SpeakerRole::Teacher)});
  CHECK(link_set(detect_responses(overlap)) ==
        std::set<std::tuple<std::string, std::string>>{{"c", "t"}, {"c", "t2"}});

  const auto other = transcript(1, {utt("c", 8, 10, "look", SpeakerRole::Child),
                                    utt("o", 11, 12, "hello", SpeakerRole::Other),
                                    utt("t", 11, 12, "[laughs]", SpeakerRole::Teacher)});
  CHECK(detect_responses(other).empty());
}

TEST_CASE("detect_responses matches the quadratic scan") {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 100; ++trial) {
    oracle::GeneratorOptions opt;
    opt.utterances = 1 + trial * 2;
    opt.mean_gap = 0.5 + (trial % 5) * 0.5;
    const Transcript t = oracle::random_transcript(rng, opt);
    const double window = trial % 3 == 0 ? 1.0 : kDefaultResponseWindow;
    const auto links = detect_responses(t, window);
    CHECK(link_set(links) == oracle::brute_force_responses(t, window));
    CHECK(links.size() == link_set(links).size());

    Transcript shifted = t;
    for (auto& u : shifted.utterances) {
      u.onset += 1000.0;
      u.offset += 1000.0;
    }
    CHECK(link_set(detect_responses(shifted, window)) == link_set(links));

    Transcript no_child = t;
    std::erase_if(no_child.utterances, [](const Utterance& u) { return u.role == SpeakerRole::Child; });
    CHECK(detect_responses(no_child, window).empty());
  }
}

TEST_CASE("response_proportion") {
  CHECK(*response_proportion(40, 122) == doctest::Approx(0.33).epsilon(0.005 / 0.33));
  CHECK(std::abs(*response_proportion(40, 122) - 0.33) <= 0.005);
  CHECK(std::abs(*response_proportion(502, 1823) - 0.28) <= 0.005);
  CHECK_FALSE(response_proportion(0, 0).has_value());
  CHECK(*response_proportion(0, 5) == 0.0);
  CHECK_THROWS_AS(response_proportion(6, 5), Error);
}

TEST_CASE("lexical diversity") {
  const auto one = transcript(1, {utt("1", 5, 6, "the cat the cat", SpeakerRole::Teacher)});
  CHECK(lexical_diversity_per_minute(one, SpeakerRole::Teacher) == 2.0);

  const auto two = transcript(2, {utt("1", 5, 6, "a b c d", SpeakerRole::Teacher)});
  CHECK(lexical_diversity_per_minute(two, SpeakerRole::Teacher) == 2.0);
  CHECK(lexical_diversity_pooled(two, SpeakerRole::Teacher) == 2.0);

  // the same types in different windows count again per window
  const auto repeat = transcript(2, {utt("1", 5, 6, "a b", SpeakerRole::Teacher),
                                     utt("2", 65, 66, "a b", SpeakerRole::Teacher),
                                     utt("3", 130, 131, "c", SpeakerRole::Teacher)});
  CHECK(lexical_diversity_per_minute(repeat, SpeakerRole::Teacher) == 2.5);
  CHECK(lexical_diversity_pooled(repeat, SpeakerRole::Teacher) == 1.5);

  // 30 s windows give a per-minute rate
  const auto half = transcript(1, {utt("1", 5, 6, "a b", SpeakerRole::Teacher)});
  CHECK(lexical_diversity_per_minute(half, SpeakerRole::Teacher, 30.0) == 2.0);

  CHECK_THROWS_AS(lexical_diversity_per_minute(transcript(0, {}), SpeakerRole::Teacher), Error);
}

TEST_CASE("summarize the snack fixture") {
  const RecordingMeta meta{"snack", SpeakerRole::Teacher, "C1", "2223", 1.0};
  const Transcript expert = load_expert(WSW_FIXTURE_DIR "/snack.expert.tsv", meta);
  const auto child = summarize(expert, SpeakerRole::Child);
  CHECK(child.n_utterances == 5);
  CHECK(child.n_questions == 0);
  CHECK(child.n_non_questions == 5);
  CHECK(child.n_words == 1 + 2 + 2 + 6 + 4);
  CHECK(*child.mlu_overall * static_cast<double>(child.n_utterances) ==
        doctest::Approx(static_cast<double>(child.n_words)));
  CHECK_FALSE(child.prop_responded_questions.has_value());
  CHECK(summarize(expert, SpeakerRole::Child) == child);
}

TEST_CASE("summarize an empty transcript") {
  const auto s = summarize(transcript(3, {}), SpeakerRole::Teacher);
  CHECK(s.n_utterances == 0);
  CHECK(s.n_words == 0);
  CHECK_FALSE(s.mlu_overall);
  CHECK_FALSE(s.pct_questions);
  CHECK_FALSE(s.prop_responded_total);
  CHECK(s.words_per_minute == 0.0);
  CHECK(s.lexical_diversity_per_minute == 0.0);
}

TEST_CASE("summarize matches a scripted tally") {
  std::mt19937_64 rng(79);
  for (int trial = 0; trial < 20; ++trial) {
    oracle::GeneratorOptions opt;
    opt.utterances = 200;
    opt.p_question = 0.3;
    const Transcript t = oracle::random_transcript(rng, opt);
    for (const SpeakerRole role : {SpeakerRole::Teacher, SpeakerRole::Child}) {
      FeatureConfig cfg;
      cfg.ld_window = trial % 2 ? 60.0 : 45.0;
      const auto s = summarize(t, role, cfg);
      check_summary(s, oracle::scripted_summary(t, role, cfg.response_window, cfg.ld_window));
      CHECK(s.n_utterances == s.n_questions + s.n_non_questions);
      CHECK(s.n_responded_questions <= s.n_questions);
      CHECK(s.n_responded_non_questions <= s.n_non_questions);
      if (s.mlu_overall)
        CHECK(*s.mlu_overall * static_cast<double>(s.n_utterances) ==
              doctest::Approx(static_cast<double>(s.n_words)));
    }
  }
}

TEST_CASE("feature CSV row shape") {
  const auto cols = feature_csv_columns();
  std::ostringstream out;
  write_feature_csv_header(out);
  FeatureRow row{"rec,1", Source::Machine, summarize(transcript(1, {}), SpeakerRole::Child)};
  write_feature_csv_row(out, row);
  const std::string s = out.str();
  const auto header = s.substr(0, s.find('\n'));
  CHECK(static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) == cols.size() - 1);
  CHECK(s.find("\"rec,1\"") != std::string::npos);
}
