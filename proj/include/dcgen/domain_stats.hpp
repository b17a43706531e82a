// Copyright 2026 The dcgen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Per-domain n-gram document frequencies and the scores derived from them:
// the domain posterior P(D|w), the domain affinity rho(w,D) and the masking
// score m(w,D,D') = rho(w,D) - rho(w,D').

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dcgen/binary_io.hpp"
#include "dcgen/corpus.hpp"
#include "dcgen/errors.hpp"

namespace dcgen {

struct StatsConfig {
  // Smoothing per n-gram order: alpha[0] for unigrams, alpha[1] for bigrams...
  std::array<double, 3> alpha{1.0, 5.0, 7.0};
  std::uint32_t min_doc_frequency = 10;
  std::size_t max_order = 3;

  double alpha_for(std::size_t order) const { return alpha.at(order - 1); }

  void validate() const {
    for (double a : alpha) {
      if (!(a > 0.0)) throw ConfigError("smoothing values must be positive");
    }
    if (min_doc_frequency < 1) throw ConfigError("min doc frequency must be >= 1");
    if (max_order < 1 || max_order > 3) throw ConfigError("max order must be in 1..3");
  }

  friend bool operator==(const StatsConfig&, const StatsConfig&) = default;
};

inline std::size_t ngram_order(std::string_view key) {
  return 1 + static_cast<std::size_t>(std::count(key.begin(), key.end(), ' '));
}

// P(D_i|w) proportional to (count_i + alpha) / n_i, normalized over domains.
inline std::vector<double> posterior_from_counts(std::span<const double> counts,
                                                 std::span<const double> n_docs,
                                                 double alpha) {
  std::vector<double> p(counts.size());
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    p[i] = (counts[i] + alpha) / n_docs[i];
    total += p[i];
  }
  for (auto& x : p) x /= total;
  return p;
}

// H(D|w) / log N, computed in the given logarithm base (natural when 0).
inline double normalized_entropy(std::span<const double> p, double log_base = 0.0) {
  auto lg = [log_base](double x) {
    return log_base == 0.0 ? std::log(x) : std::log(x) / std::log(log_base);
  };
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * lg(x);
  }
  return h / lg(static_cast<double>(p.size()));
}

// rho(w,D_i) = P(D_i|w) * (1 - H(D|w)/log N) for every domain i.
inline std::vector<double> affinities_from_posterior(std::span<const double> p,
                                                     double log_base = 0.0) {
  std::vector<double> rho(p.size(), 0.0);
  const auto [lo, hi] = std::minmax_element(p.begin(), p.end());
  if (*lo == *hi) return rho;  // uniform: entropy is exactly log N
  const double specificity = std::clamp(1.0 - normalized_entropy(p, log_base), 0.0, 1.0);
  for (std::size_t i = 0; i < p.size(); ++i) rho[i] = p[i] * specificity;
  return rho;
}

struct NgramEntry {
  std::vector<std::uint32_t> doc_freq;
  std::vector<double> posterior;
  std::vector<double> affinity;

  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (auto c : doc_freq) t += c;
    return t;
  }
};

using DocFreqTable = std::map<std::string, std::vector<std::uint32_t>, std::less<>>;

class StatsSnapshot;

namespace detail {
inline std::string encode_snapshot_body(const StatsSnapshot& s);
}  // namespace detail

// Frozen document-frequency table over a fixed set of domains. Posteriors and
// affinities are derived once at construction; the object is immutable.
class StatsSnapshot {
 public:
  StatsSnapshot(DomainRegistry registry, std::vector<std::uint64_t> n_docs,
                StatsConfig config, const DocFreqTable& doc_freq,
                std::map<std::string, std::string, std::less<>> surface_forms = {})
      : registry_(std::move(registry)),
        n_docs_(std::move(n_docs)),
        config_(config),
        surface_forms_(std::move(surface_forms)) {
    config_.validate();
    const std::size_t n = registry_.size();
    if (n_docs_.size() != n) throw ConfigError("document count table does not match domains");
    for (std::size_t i = 0; i < n; ++i) {
      if (n_docs_[i] == 0) {
        throw ConfigError("domain '" + registry_.names()[i] + "' has no documents");
      }
    }
    std::vector<double> nd(n_docs_.begin(), n_docs_.end());
    std::vector<double> counts(n);
    for (const auto& [key, df] : doc_freq) {
      const std::size_t order = ngram_order(key);
      if (key.empty() || order > config_.max_order) {
        throw ConfigError("n-gram '" + key + "' exceeds the configured max order");
      }
      if (df.size() != n) throw ConfigError("count vector size mismatch for '" + key + "'");
      std::uint64_t total = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (df[i] > n_docs_[i]) {
          throw ConfigError("count for '" + key + "' exceeds the domain size");
        }
        total += df[i];
        counts[i] = df[i];
      }
      if (total < config_.min_doc_frequency) {
        throw ConfigError("n-gram '" + key + "' is below the min doc frequency");
      }
      NgramEntry entry;
      entry.doc_freq = df;
      entry.posterior = posterior_from_counts(counts, nd, config_.alpha_for(order));
      entry.affinity = affinities_from_posterior(entry.posterior);
      table_.emplace(key, std::move(entry));
    }
    for (const auto& [key, surface] : surface_forms_) {
      if (!table_.contains(key) || ngram_order(key) != 1) {
        throw ConfigError("surface form given for unknown unigram '" + key + "'");
      }
    }
    fingerprint_ = sha256_hex(detail::encode_snapshot_body(*this));
  }

  const DomainRegistry& registry() const noexcept { return registry_; }
  std::size_t domain_count() const noexcept { return registry_.size(); }
  const std::vector<std::uint64_t>& n_docs() const noexcept { return n_docs_; }
  const StatsConfig& config() const noexcept { return config_; }
  const std::string& fingerprint() const noexcept { return fingerprint_; }
  std::size_t size() const noexcept { return table_.size(); }

  const NgramEntry* find(std::string_view key) const {
    auto it = table_.find(key);
    return it == table_.end() ? nullptr : &it->second;
  }

  // All entries in canonical (bytewise lexicographic) key order.
  const std::map<std::string, NgramEntry, std::less<>>& entries() const noexcept {
    return table_;
  }

  const std::map<std::string, std::string, std::less<>>& surface_forms() const noexcept {
    return surface_forms_;
  }

  // Most frequent surface spelling of a unigram stem; the stem itself when
  // none was recorded.
  std::string surface_form(std::string_view key) const {
    auto it = surface_forms_.find(key);
    return it == surface_forms_.end() ? std::string(key) : it->second;
  }

  friend bool operator==(const StatsSnapshot& a, const StatsSnapshot& b) {
    return a.fingerprint_ == b.fingerprint_ && a.registry_ == b.registry_ &&
           a.n_docs_ == b.n_docs_ && a.config_ == b.config_ &&
           a.surface_forms_ == b.surface_forms_ && a.same_counts(b);
  }

 private:
  bool same_counts(const StatsSnapshot& o) const {
    if (table_.size() != o.table_.size()) return false;
    auto it = o.table_.begin();
    for (const auto& [key, entry] : table_) {
      if (key != it->first || entry.doc_freq != it->second.doc_freq) return false;
      ++it;
    }
    return true;
  }

  DomainRegistry registry_;
  std::vector<std::uint64_t> n_docs_;
  StatsConfig config_;
  std::map<std::string, NgramEntry, std::less<>> table_;
  std::map<std::string, std::string, std::less<>> surface_forms_;
  std::string fingerprint_;
};

namespace detail {

inline constexpr std::string_view kSnapshotMagic = "DCGSNAP1";
inline constexpr std::uint32_t kSnapshotVersion = 1;

// Canonical serialization: magic, version, config block, domain table, one
// section per n-gram order (each restating its smoothing value), then the
// unigram surface-form table.
inline std::string encode_snapshot_body(const StatsSnapshot& s) {
  ByteWriter w;
  w.put_raw(kSnapshotMagic);
  w.put<std::uint32_t>(kSnapshotVersion);
  const auto& cfg = s.config();
  w.put<std::uint8_t>(static_cast<std::uint8_t>(cfg.max_order));
  for (double a : cfg.alpha) w.put<double>(a);
  w.put<std::uint32_t>(cfg.min_doc_frequency);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(s.domain_count()));
  for (std::size_t i = 0; i < s.domain_count(); ++i) {
    w.put_string(s.registry().names()[i]);
    w.put<std::uint64_t>(s.n_docs()[i]);
  }
  for (std::size_t order = 1; order <= cfg.max_order; ++order) {
    std::uint64_t count = 0;
    for (const auto& [key, e] : s.entries()) count += ngram_order(key) == order;
    w.put<std::uint8_t>(static_cast<std::uint8_t>(order));
    w.put<double>(cfg.alpha_for(order));
    w.put<std::uint64_t>(count);
    for (const auto& [key, e] : s.entries()) {
      if (ngram_order(key) != order) continue;
      w.put_string(key);
      for (auto c : e.doc_freq) w.put<std::uint32_t>(c);
    }
  }
  w.put<std::uint64_t>(s.surface_forms().size());
  for (const auto& [key, surface] : s.surface_forms()) {
    w.put_string(key);
    w.put_string(surface);
  }
  return w.take();
}

struct ShardCounts {
  std::unordered_map<std::string, std::vector<std::uint32_t>> doc_freq;
  std::unordered_map<std::string, std::map<std::string, std::uint64_t>> surfaces;
};

inline void count_document(const Document& doc, std::size_t n_domains,
                           std::size_t max_order, ShardCounts& out,
                           std::unordered_set<std::string>& seen) {
  seen.clear();
  for_each_ngram_span(doc.stems.size(), max_order,
                      [&](std::size_t, std::size_t b, std::size_t e) {
                        seen.insert(join_key(doc.stems, b, e));
                      });
  for (const auto& key : seen) {
    auto& df = out.doc_freq[key];
    if (df.empty()) df.assign(n_domains, 0);
    ++df[to_index(doc.domain)];
  }
  for (std::size_t i = 0; i < doc.stems.size(); ++i) {
    ++out.surfaces[doc.stems[i]][detail::ascii_lower(doc.surface[i])];
  }
}

}  // namespace detail

// Counts every n-gram of orders 1..max_order at most once per document, then
// drops n-grams seen in fewer than min_doc_frequency documents overall.
// Counting is sharded over `jobs` threads; the result does not depend on it.
inline StatsSnapshot build_stats(const DomainCorpus& corpus, const StatsConfig& config,
                                 std::size_t jobs = 1) {
  config.validate();
  const std::size_t n = corpus.registry.size();
  if (n < 2) throw ConfigError("at least two domains are required");
  if (corpus.docs.size() != n) throw ConfigError("corpus does not cover every domain");
  std::vector<const Document*> all;
  std::vector<std::uint64_t> n_docs(n, 0);
  for (std::size_t d = 0; d < n; ++d) {
    if (corpus.docs[d].empty()) {
      throw ConfigError("domain '" + corpus.registry.names()[d] + "' is empty");
    }
    n_docs[d] = corpus.docs[d].size();
    for (const auto& doc : corpus.docs[d]) {
      if (to_index(doc.domain) != d) throw ConfigError("document filed under the wrong domain");
      all.push_back(&doc);
    }
  }

  jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(1, all.size()));
  std::vector<detail::ShardCounts> shards(jobs);
  {
    std::vector<std::jthread> workers;
    for (std::size_t j = 0; j < jobs; ++j) {
      workers.emplace_back([&, j] {
        std::unordered_set<std::string> seen;
        const std::size_t begin = all.size() * j / jobs;
        const std::size_t end = all.size() * (j + 1) / jobs;
        for (std::size_t i = begin; i < end; ++i) {
          detail::count_document(*all[i], n, config.max_order, shards[j], seen);
        }
      });
    }
  }

  detail::ShardCounts merged = std::move(shards[0]);
  for (std::size_t j = 1; j < jobs; ++j) {
    for (auto& [key, df] : shards[j].doc_freq) {
      auto& target = merged.doc_freq[key];
      if (target.empty()) {
        target = std::move(df);
      } else {
        for (std::size_t i = 0; i < n; ++i) target[i] += df[i];
      }
    }
    for (auto& [stem, forms] : shards[j].surfaces) {
      auto& target = merged.surfaces[stem];
      for (auto& [form, c] : forms) target[form] += c;
    }
  }

  DocFreqTable kept;
  std::map<std::string, std::string, std::less<>> surface_forms;
  for (auto& [key, df] : merged.doc_freq) {
    std::uint64_t total = 0;
    for (auto c : df) total += c;
    if (total < config.min_doc_frequency) continue;
    if (ngram_order(key) == 1) {
      const auto& forms = merged.surfaces.at(key);
      // std::map iterates lexicographically, so strict > keeps the smallest
      // spelling among equally frequent ones.
      const std::pair<const std::string, std::uint64_t>* best = nullptr;
      for (const auto& f : forms) {
        if (!best || f.second > best->second) best = &f;
      }
      surface_forms.emplace(key, best->first);
    }
    kept.emplace(key, std::move(df));
  }
  return StatsSnapshot(corpus.registry, std::move(n_docs), config, kept,
                       std::move(surface_forms));
}

// Normalized domain posterior of w; nullopt for n-grams the snapshot does not
// hold.
inline std::optional<std::vector<double>> posterior(const StatsSnapshot& s,
                                                    std::string_view w) {
  const NgramEntry* e = s.find(w);
  if (!e) return std::nullopt;
  return e->posterior;
}

inline double affinity(const StatsSnapshot& s, std::string_view w, DomainId d) {
  if (!s.registry().contains(d)) throw ConfigError("unknown domain id");
  const NgramEntry* e = s.find(w);
  return e ? e->affinity[to_index(d)] : 0.0;
}

inline double masking_score(const StatsSnapshot& s, std::string_view w, DomainId origin,
                            DomainId destination) {
  if (!s.registry().contains(origin) || !s.registry().contains(destination)) {
    throw ConfigError("unknown domain id");
  }
  const NgramEntry* e = s.find(w);
  if (!e) return 0.0;
  return e->affinity[to_index(origin)] - e->affinity[to_index(destination)];
}

struct ScoredWord {
  std::string key;
  double score;

  friend bool operator==(const ScoredWord&, const ScoredWord&) = default;
};

// log(#_{w|D} + 1) * rho(w, D): how strongly a unigram represents D.
inline double representing_score(const NgramEntry& e, DomainId d) {
  return std::log(static_cast<double>(e.doc_freq[to_index(d)]) + 1.0) *
         e.affinity[to_index(d)];
}

// Unigrams ranked by representing score, best first; ties in lexicographic
// order. Punctuation tokens are not candidates.
inline std::vector<ScoredWord> representing_words(const StatsSnapshot& s, DomainId d,
                                                  std::size_t top_k) {
  if (top_k < 1) throw ConfigError("top_k must be >= 1");
  if (!s.registry().contains(d)) throw ConfigError("unknown domain id");
  std::vector<ScoredWord> all;
  for (const auto& [key, e] : s.entries()) {
    if (ngram_order(key) != 1 || is_punctuation(key)) continue;
    all.push_back({key, representing_score(e, d)});
  }
  auto better = [](const ScoredWord& a, const ScoredWord& b) {
    return a.score != b.score ? a.score > b.score : a.key < b.key;
  };
  const std::size_t k = std::min(top_k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(),
                    better);
  all.resize(k);
  return all;
}

}  // namespace dcgen
