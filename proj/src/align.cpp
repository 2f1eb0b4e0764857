// src/align.cpp

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

#include "wsw/align.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string_view>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "wsw/edit_distance.hpp"
#include "wsw/errors.hpp"

namespace wsw {

namespace {

using TokenIds = std::vector<std::uint32_t>;

double similarity_from_distance(std::size_t distance, std::size_t len_a, std::size_t len_b) {
  const std::size_t longest = std::max(len_a, len_b);
  if (longest == 0) return 1.0;
  return std::clamp(1.0 - static_cast<double>(distance) / static_cast<double>(longest), 0.0,
                    1.0);
}

// Maps every token of both transcripts to a small integer so the inner
// edit-distance loops compare integers instead of strings.
class TokenInterner {
 public:
  TokenIds intern(const std::vector<std::string>& tokens) {
    TokenIds ids;
    ids.reserve(tokens.size());
    for (const auto& t : tokens) {
      auto [it, inserted] = table_.try_emplace(t, static_cast<std::uint32_t>(table_.size()));
      ids.push_back(it->second);
    }
    return ids;
  }

 private:
  std::unordered_map<std::string_view, std::uint32_t> table_;
};

struct Candidate {
  std::uint32_t machine;
  std::uint32_t expert;
  double weight;  // score + 2 * gap_penalty
};

struct Best {
  double value = 0.0;
  std::int64_t edge = -1;
};

// Prefix-maximum Fenwick tree over expert positions.
class PrefixMax {
 public:
  explicit PrefixMax(std::size_t size) : tree_(size + 1) {}

  // Best over positions [1, pos].
  Best query(std::size_t pos) const {
    Best best;
    for (; pos > 0; pos -= pos & (~pos + 1)) {
      if (better(tree_[pos], best)) best = tree_[pos];
    }
    return best;
  }

  void update(std::size_t pos, Best value) {
    for (; pos < tree_.size(); pos += pos & (~pos + 1)) {
      if (better(value, tree_[pos])) tree_[pos] = value;
    }
  }

 private:
  static bool better(const Best& a, const Best& b) {
    if (a.edge < 0) return false;
    if (b.edge < 0) return true;
    return a.value > b.value || (a.value == b.value && a.edge < b.edge);
  }

  std::vector<Best> tree_;
};

void push_residues(const std::vector<Utterance>& all, const std::vector<bool>& matched,
                   std::vector<Utterance>& out) {
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (!matched[i]) out.push_back(all[i]);
  }
}

}  // namespace

void check(const AlignConfig& cfg) {
  auto bad = [](const char* what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (!(cfg.gap_penalty >= 0.0) || !std::isfinite(cfg.gap_penalty)) bad("gap_penalty < 0");
  if (!(cfg.min_iou >= 0.0 && cfg.min_iou <= 1.0)) bad("min_iou outside [0, 1]");
  if (!(cfg.min_similarity >= 0.0 && cfg.min_similarity <= 1.0))
    bad("min_similarity outside [0, 1]");
  if (!(cfg.similarity_weight >= 0.0 && cfg.similarity_weight <= 1.0))
    bad("similarity_weight outside [0, 1]");
  if (!(cfg.search_window >= 0.0)) bad("search_window < 0");
}

double time_iou(const Utterance& a, const Utterance& b) {
  const double inter = std::min(a.offset, b.offset) - std::max(a.onset, b.onset);
  const double uni = std::max(a.offset, b.offset) - std::min(a.onset, b.onset);
  if (uni <= 0.0) return (a.onset == b.onset && a.offset == b.offset) ? 1.0 : 0.0;
  if (inter <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double text_similarity(const Utterance& a, const Utterance& b) {
  return similarity_from_distance(levenshtein(a.tokens, b.tokens), a.word_count(),
                                  b.word_count());
}

double pair_score(const Utterance& machine, const Utterance& expert, const AlignConfig& cfg) {
  return cfg.similarity_weight * text_similarity(machine, expert) +
         (1.0 - cfg.similarity_weight) * time_iou(machine, expert);
}

bool within_search_window(const Utterance& a, const Utterance& b, const AlignConfig& cfg) {
  if (std::isinf(cfg.search_window)) return true;
  return b.onset <= a.offset + cfg.search_window && a.onset <= b.offset + cfg.search_window;
}

AlignedCorpus align_by_index(const Transcript& machine, const Transcript& expert) {
  if (!expert.linked) {
    throw Error(ErrorCode::NotLinked, "expert transcript for " + expert.meta.recording_id +
                                          " has no machine_id linkage");
  }
  AlignedCorpus corpus;
  corpus.meta = expert.meta;
  corpus.method = AlignMethod::Index;

  std::unordered_map<std::string_view, std::size_t> by_id;
  by_id.reserve(machine.utterances.size());
  for (std::size_t i = 0; i < machine.utterances.size(); ++i) {
    by_id.emplace(machine.utterances[i].id, i);
  }

  // Candidate links in expert order.
  std::vector<std::pair<std::size_t, std::size_t>> links;  // (machine, expert)
  std::vector<bool> machine_claimed(machine.utterances.size(), false);
  for (std::size_t e = 0; e < expert.utterances.size(); ++e) {
    const auto& link = expert.utterances[e].linked_machine_id;
    if (!link) continue;
    auto it = by_id.find(*link);
    if (it == by_id.end() || machine_claimed[it->second]) continue;
    machine_claimed[it->second] = true;
    links.emplace_back(it->second, e);
  }

  // Longest subsequence of links increasing in machine index (patience
  // sorting); the rest cross and are dropped.
  std::vector<std::size_t> tails;  // index into links
  std::vector<std::int64_t> parent(links.size(), -1);
  for (std::size_t k = 0; k < links.size(); ++k) {
    auto pos = std::lower_bound(tails.begin(), tails.end(), links[k].first,
                                [&](std::size_t t, std::size_t value) {
                                  return links[t].first < value;
                                });
    if (pos != tails.begin()) parent[k] = static_cast<std::int64_t>(*(pos - 1));
    if (pos == tails.end()) tails.push_back(k);
    else *pos = k;
  }
  std::vector<std::size_t> kept;
  for (std::int64_t k = tails.empty() ? -1 : static_cast<std::int64_t>(tails.back()); k >= 0;
       k = parent[static_cast<std::size_t>(k)]) {
    kept.push_back(static_cast<std::size_t>(k));
  }
  std::reverse(kept.begin(), kept.end());

  std::vector<bool> machine_matched(machine.utterances.size(), false);
  std::vector<bool> expert_matched(expert.utterances.size(), false);
  corpus.pairs.reserve(kept.size());
  for (std::size_t k : kept) {
    const auto [mi, ei] = links[k];
    machine_matched[mi] = expert_matched[ei] = true;
    const auto& mu = machine.utterances[mi];
    const auto& eu = expert.utterances[ei];
    corpus.pairs.push_back({mu, eu, time_iou(mu, eu), text_similarity(mu, eu)});
  }
  push_residues(machine.utterances, machine_matched, corpus.machine_only);
  push_residues(expert.utterances, expert_matched, corpus.expert_only);
  return corpus;
}

AlignedCorpus align_by_time(const Transcript& machine, const Transcript& expert,
                            const AlignConfig& cfg) {
  check(cfg);
  AlignedCorpus corpus;
  corpus.meta = expert.meta;
  corpus.method = AlignMethod::Time;

  const auto& mu = machine.utterances;
  const auto& eu = expert.utterances;
  const std::size_t n = mu.size(), m = eu.size();

  TokenInterner interner;
  std::vector<TokenIds> machine_tokens, expert_tokens;
  machine_tokens.reserve(n);
  expert_tokens.reserve(m);
  for (const auto& u : mu) machine_tokens.push_back(interner.intern(u.tokens));
  for (const auto& u : eu) expert_tokens.push_back(interner.intern(u.tokens));

  double longest_expert = 0.0;
  for (const auto& u : eu) longest_expert = std::max(longest_expert, u.duration());

  // Candidate pairs, machine ascending and expert descending within a
  // machine row so that a row never chains onto itself.
  std::vector<Candidate> candidates;
  const double w = cfg.similarity_weight;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo = 0, hi = m;
    if (!std::isinf(cfg.search_window)) {
      const double earliest = mu[i].onset - cfg.search_window - longest_expert;
      const double latest = mu[i].offset + cfg.search_window;
      lo = static_cast<std::size_t>(
          std::lower_bound(eu.begin(), eu.end(), earliest,
                           [](const Utterance& u, double t) { return u.onset < t; }) -
          eu.begin());
      hi = static_cast<std::size_t>(
          std::upper_bound(eu.begin(), eu.end(), latest,
                           [](double t, const Utterance& u) { return t < u.onset; }) -
          eu.begin());
    }
    for (std::size_t j = hi; j-- > lo;) {
      if (!within_search_window(mu[i], eu[j], cfg)) continue;
      const double sim = similarity_from_distance(
          levenshtein(machine_tokens[i], expert_tokens[j]), machine_tokens[i].size(),
          expert_tokens[j].size());
      const double score = w * sim + (1.0 - w) * time_iou(mu[i], eu[j]);
      candidates.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                            score + 2.0 * cfg.gap_penalty});
    }
  }

  // Heaviest chain strictly increasing in both indices.
  std::vector<double> chain(candidates.size());
  std::vector<std::int64_t> parent(candidates.size(), -1);
  PrefixMax prefix(m);
  Best overall;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const auto& c = candidates[k];
    const Best before = prefix.query(c.expert);  // experts [0, c.expert)
    chain[k] = c.weight;
    if (before.edge >= 0 && before.value > 0.0) {
      chain[k] += before.value;
      parent[k] = before.edge;
    }
    const Best here{chain[k], static_cast<std::int64_t>(k)};
    prefix.update(c.expert + 1, here);
    if (overall.edge < 0 || here.value > overall.value) overall = here;
  }

  std::vector<std::size_t> matched;
  for (std::int64_t k = overall.edge; k >= 0; k = parent[static_cast<std::size_t>(k)]) {
    matched.push_back(static_cast<std::size_t>(k));
  }
  std::reverse(matched.begin(), matched.end());

  const double chain_value = overall.edge >= 0 ? overall.value : 0.0;
  corpus.score = chain_value - cfg.gap_penalty * static_cast<double>(n + m);

  std::vector<bool> machine_matched(n, false), expert_matched(m, false);
  for (std::size_t k : matched) {
    const auto& c = candidates[k];
    const auto& a = mu[c.machine];
    const auto& b = eu[c.expert];
    const double iou = time_iou(a, b);
    const double sim = similarity_from_distance(
        levenshtein(machine_tokens[c.machine], expert_tokens[c.expert]),
        machine_tokens[c.machine].size(), expert_tokens[c.expert].size());
    if (iou < cfg.min_iou && sim < cfg.min_similarity) continue;
    machine_matched[c.machine] = expert_matched[c.expert] = true;
    corpus.pairs.push_back({a, b, iou, sim});
  }
  push_residues(mu, machine_matched, corpus.machine_only);
  push_residues(eu, expert_matched, corpus.expert_only);
  return corpus;
}

AlignedCorpus align(const Transcript& machine, const Transcript& expert,
                    const AlignConfig& cfg) {
  return expert.linked ? align_by_index(machine, expert) : align_by_time(machine, expert, cfg);
}

ConfusionMatrix cross_classify(const AlignedCorpus& corpus) {
  ConfusionMatrix m;
  for (const auto& p : corpus.pairs) {
    if (p.expert.role == SpeakerRole::Other || p.machine.role == SpeakerRole::Other) {
      ++m.excluded_other;
    } else {
      ++m.at(p.expert.role, p.machine.role);
    }
  }
  m.residue_machine = corpus.machine_only.size();
  m.residue_expert = corpus.expert_only.size();
  return m;
}

void write_aligned(std::ostream& out, const AlignedCorpus& corpus) {
  for (const auto& p : corpus.pairs) {
    nlohmann::ordered_json obj;
    obj["machine_id"] = p.machine.id;
    obj["expert_id"] = p.expert.id;
    obj["machine_role"] = to_string(p.machine.role);
    obj["expert_role"] = to_string(p.expert.role);
    obj["time_iou"] = p.time_iou;
    obj["text_similarity"] = p.text_similarity;
    out << obj.dump() << '\n';
  }
  for (const auto& u : corpus.machine_only) {
    nlohmann::ordered_json obj;
    obj["machine_id"] = u.id;
    obj["machine_role"] = to_string(u.role);
    obj["matched"] = false;
    out << obj.dump() << '\n';
  }
  for (const auto& u : corpus.expert_only) {
    nlohmann::ordered_json obj;
    obj["expert_id"] = u.id;
    obj["expert_role"] = to_string(u.role);
    obj["matched"] = false;
    out << obj.dump() << '\n';
  }
}

}  // namespace wsw
