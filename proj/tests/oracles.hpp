// tests/oracles.hpp

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

#pragma once

// Independent reference implementations used only by the tests. Each one
// takes the slow, definitional route so it shares no code path with the
// library function it checks.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "wsw/align.hpp"
#include "wsw/confusion.hpp"
#include "wsw/features.hpp"
#include "wsw/transcript.hpp"

namespace wsw::oracle {

// Plain exponential recursion on prefixes.
inline std::size_t naive_levenshtein(const std::vector<std::string>& a, std::size_t n,
                                     const std::vector<std::string>& b, std::size_t m) {
  if (n == 0) return m;
  if (m == 0) return n;
  const std::size_t sub = naive_levenshtein(a, n - 1, b, m - 1) + (a[n - 1] == b[m - 1] ? 0 : 1);
  const std::size_t del = naive_levenshtein(a, n - 1, b, m) + 1;
  const std::size_t ins = naive_levenshtein(a, n, b, m - 1) + 1;
  return std::min({sub, del, ins});
}

inline std::size_t naive_levenshtein(const std::vector<std::string>& a,
                                     const std::vector<std::string>& b) {
  return naive_levenshtein(a, a.size(), b, b.size());
}

// Textbook Wagner-Fischer with the full (n+1) x (m+1) table.
inline std::size_t full_table_levenshtein(const std::vector<std::string>& a,
                                          const std::vector<std::string>& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0u : 1u)});
  return d[a.size()][b.size()];
}

// Best objective over every monotone one-to-one matching, by enumerating
// equal-size subsets of both sides (n, m <= 10).
struct MatchingOptimum {
  double score = -std::numeric_limits<double>::infinity();
  std::size_t matchings = 0;
};

inline MatchingOptimum brute_force_matching(const std::vector<Utterance>& machine,
                                            const std::vector<Utterance>& expert,
                                            const AlignConfig& cfg) {
  const std::size_t n = machine.size(), m = expert.size();
  std::vector<std::vector<double>> score(n, std::vector<double>(m));
  std::vector<std::vector<bool>> allowed(n, std::vector<bool>(m));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      // Score straight from the definitions, not via pair_score().
      const auto& a = machine[i];
      const auto& b = expert[j];
      const double inter = std::max(0.0, std::min(a.offset, b.offset) - std::max(a.onset, b.onset));
      const double uni = std::max(a.offset, b.offset) - std::min(a.onset, b.onset);
      const double iou = uni > 0 ? inter / uni : (a.onset == b.onset && a.offset == b.offset);
      const double longest = static_cast<double>(std::max(a.tokens.size(), b.tokens.size()));
      const double sim =
          longest == 0 ? 1.0
                       : std::clamp(1.0 - static_cast<double>(naive_levenshtein(a.tokens, b.tokens)) /
                                              longest,
                                    0.0, 1.0);
      score[i][j] = cfg.similarity_weight * sim + (1.0 - cfg.similarity_weight) * iou;
      allowed[i][j] = std::isinf(cfg.search_window) ||
                      (b.onset <= a.offset + cfg.search_window &&
                       a.onset <= b.offset + cfg.search_window);
    }
  }

  MatchingOptimum best;
  for (std::uint32_t mm = 0; mm < (1u << n); ++mm) {
    for (std::uint32_t em = 0; em < (1u << m); ++em) {
      const int k = std::popcount(mm);
      if (k != std::popcount(em)) continue;
      std::vector<std::size_t> mi, ei;
      for (std::size_t i = 0; i < n; ++i)
        if (mm >> i & 1u) mi.push_back(i);
      for (std::size_t j = 0; j < m; ++j)
        if (em >> j & 1u) ei.push_back(j);
      double total = 0.0;
      bool ok = true;
      for (int p = 0; p < k && ok; ++p) {
        ok = allowed[mi[p]][ei[p]];
        total += score[mi[p]][ei[p]];
      }
      if (!ok) continue;
      ++best.matchings;
      total -= cfg.gap_penalty * static_cast<double>(n + m - 2 * static_cast<std::size_t>(k));
      best.score = std::max(best.score, total);
    }
  }
  return best;
}

// All-pairs response scan.
inline std::set<std::tuple<std::string, std::string>> brute_force_responses(
    const Transcript& t, double window) {
  std::set<std::tuple<std::string, std::string>> links;
  for (const auto& u : t.utterances) {
    for (const auto& v : t.utterances) {
      if (u.role == SpeakerRole::Other || v.role == SpeakerRole::Other) continue;
      if (u.tokens.empty() || v.tokens.empty()) continue;
      if (u.role == v.role) continue;
      if (v.onset > u.onset && v.onset - u.offset <= window + kTimeTolerance)
        links.emplace(u.id, v.id);
    }
  }
  return links;
}

// Two-way ANOVA sums of squares straight from their definitions.
inline double anova_icc(const std::vector<std::array<double, 2>>& x) {
  const long double n = static_cast<long double>(x.size());
  const long double k = 2;
  long double grand = 0;
  for (const auto& r : x) grand += r[0] + r[1];
  grand /= n * k;
  std::array<long double, 2> col{0, 0};
  for (const auto& r : x) {
    col[0] += r[0];
    col[1] += r[1];
  }
  col[0] /= n;
  col[1] /= n;
  long double ssr = 0, ssc = 0, sse = 0;
  for (const auto& r : x) {
    const long double rm = (static_cast<long double>(r[0]) + r[1]) / k;
    ssr += k * (rm - grand) * (rm - grand);
    for (int c = 0; c < 2; ++c) {
      const long double e = r[c] - rm - col[c] + grand;
      sse += e * e;
    }
  }
  for (int c = 0; c < 2; ++c) ssc += n * (col[c] - grand) * (col[c] - grand);
  const long double msr = ssr / (n - 1);
  const long double msc = ssc / (k - 1);
  const long double mse = sse / ((n - 1) * (k - 1));
  return static_cast<double>((msr - mse) / (msr + (k - 1) * mse + (k / n) * (msc - mse)));
}

// Confusion metrics through precision and recall.
struct DirectMetrics {
  double accuracy;
  double weighted_f1;
  std::optional<double> kappa;
};

inline DirectMetrics direct_metrics(const ConfusionMatrix& m) {
  const auto& c = m.counts;
  const double tt = static_cast<double>(c[0][0]), tc = static_cast<double>(c[0][1]);
  const double ct = static_cast<double>(c[1][0]), cc = static_cast<double>(c[1][1]);
  const double total = tt + tc + ct + cc;
  DirectMetrics out{};
  out.accuracy = (tt + cc) / total;

  auto f1 = [](double tp, double fp, double fn) {
    const double p = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double r = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
  };
  const double f1_teacher = f1(tt, ct, tc);
  const double f1_child = f1(cc, tc, ct);
  out.weighted_f1 = ((tt + tc) * f1_teacher + (ct + cc) * f1_child) / total;

  const double po = (tt + cc) / total;
  const double pe = ((tt + tc) * (tt + ct) + (ct + cc) * (tc + cc)) / (total * total);
  if (pe < 1.0) out.kappa = (po - pe) / (1 - pe);
  return out;
}

// Straight-line feature battery for one role.
inline FeatureSummary scripted_summary(const Transcript& t, SpeakerRole role, double window,
                                       double ld_window) {
  FeatureSummary s;
  s.role = role;
  s.duration_minutes = t.meta.duration_minutes;
  const auto links = brute_force_responses(t, window);
  std::set<std::string> responded;
  for (const auto& [target, response] : links) responded.insert(target);

  std::size_t wq = 0, wnq = 0;
  std::set<std::string> all_types;
  const double dur_s = t.meta.duration_minutes * 60.0;
  std::size_t windows = static_cast<std::size_t>(std::ceil(dur_s / ld_window - 1e-9));
  if (windows == 0) windows = 1;
  std::vector<std::set<std::string>> per_window(windows);
  for (const auto& u : t.utterances) {
    if (u.role != role) continue;
    for (const auto& tok : u.tokens) all_types.insert(tok);
    if (u.tokens.empty()) continue;
    std::size_t w = static_cast<std::size_t>(u.onset / ld_window);
    if (w >= windows) w = windows - 1;
    for (const auto& tok : u.tokens) per_window[w].insert(tok);
    ++s.n_utterances;
    s.n_words += u.tokens.size();
    if (u.question) {
      ++s.n_questions;
      wq += u.tokens.size();
      if (responded.count(u.id)) ++s.n_responded_questions;
    } else {
      ++s.n_non_questions;
      wnq += u.tokens.size();
      if (responded.count(u.id)) ++s.n_responded_non_questions;
    }
  }
  auto div = [](double a, double b) -> std::optional<double> {
    return b == 0 ? std::nullopt : std::optional<double>(a / b);
  };
  const double mins = t.meta.duration_minutes;
  s.mlu_overall = div(static_cast<double>(s.n_words), static_cast<double>(s.n_utterances));
  s.mlu_question = div(static_cast<double>(wq), static_cast<double>(s.n_questions));
  s.mlu_non_question = div(static_cast<double>(wnq), static_cast<double>(s.n_non_questions));
  s.words_per_minute = static_cast<double>(s.n_words) / mins;
  s.prop_responded_questions =
      div(static_cast<double>(s.n_responded_questions), static_cast<double>(s.n_questions));
  s.prop_responded_non_questions = div(static_cast<double>(s.n_responded_non_questions),
                                       static_cast<double>(s.n_non_questions));
  s.prop_responded_total =
      div(static_cast<double>(s.n_responded_questions + s.n_responded_non_questions),
          static_cast<double>(s.n_utterances));
  s.pct_questions = div(static_cast<double>(s.n_questions), static_cast<double>(s.n_utterances));
  s.questions_per_minute = static_cast<double>(s.n_questions) / mins;
  s.non_questions_per_minute = static_cast<double>(s.n_non_questions) / mins;
  s.responded_questions_per_minute = static_cast<double>(s.n_responded_questions) / mins;
  double sum = 0;
  for (const auto& w : per_window) sum += static_cast<double>(w.size());
  s.lexical_diversity_per_minute = sum / static_cast<double>(windows) * (60.0 / ld_window);
  s.lexical_diversity_pooled = static_cast<double>(all_types.size()) / mins;
  return s;
}

// --- generators ---------------------------------------------------------

inline const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> words = {
      "the", "cat", "is", "sunny", "raisin", "i", "you", "it's", "don't", "know",
      "me",  "too", "oh", "look",  "at",     "this", "what", "do", "want", "blocks"};
  return words;
}

inline std::string random_text(std::mt19937_64& rng, std::size_t max_words, double p_question,
                               std::size_t vocab = 20) {
  std::uniform_int_distribution<std::size_t> len(1, max_words);
  std::uniform_int_distribution<std::size_t> pick(0, std::min(vocab, vocabulary().size()) - 1);
  std::string text;
  const std::size_t n = len(rng);
  for (std::size_t i = 0; i < n; ++i) {
    if (i) text += ' ';
    std::string w = vocabulary()[pick(rng)];
    if (i == 0) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
    text += w;
  }
  text += std::bernoulli_distribution(p_question)(rng) ? "?" : ".";
  return text;
}

struct GeneratorOptions {
  std::size_t utterances = 50;
  double mean_gap = 1.5;       // seconds between onsets
  double max_duration = 4.0;
  double p_other = 0.05;
  double p_question = 0.2;
  double p_empty = 0.03;       // utterances that normalize to nothing
  Source source = Source::Machine;
};

inline Transcript random_transcript(std::mt19937_64& rng, const GeneratorOptions& opt) {
  Transcript t;
  t.source = opt.source;
  std::exponential_distribution<double> gap(1.0 / opt.mean_gap);
  std::uniform_real_distribution<double> dur(0.2, opt.max_duration);
  std::bernoulli_distribution other(opt.p_other), empty(opt.p_empty), teacher(0.55);
  double clock = 0.0;
  for (std::size_t i = 0; i < opt.utterances; ++i) {
    clock += std::round(gap(rng) * 100.0) / 100.0;  // centisecond grid makes ties likely
    const double onset = clock;
    const double offset = onset + std::round(dur(rng) * 100.0) / 100.0;
    const SpeakerRole role = other(rng)     ? SpeakerRole::Other
                             : teacher(rng) ? SpeakerRole::Teacher
                                            : SpeakerRole::Child;
    std::string text = empty(rng) ? "[laughs]" : random_text(rng, 8, opt.p_question);
    t.utterances.push_back(
        make_utterance(std::to_string(i + 1), onset, offset, std::move(text), role, opt.source));
  }
  t.meta.recording_id = "synthetic";
  t.meta.wearer_role = SpeakerRole::Child;
  t.meta.duration_minutes = std::max(1.0, std::ceil(clock / 60.0 + 0.2));
  t.sort();
  return t;
}

}  // namespace wsw::oracle
