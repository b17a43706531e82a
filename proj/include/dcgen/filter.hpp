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

// Candidate filtering: a multinomial Naive Bayes domain classifier, the word
// overlap measure, and the three rejection rules (too short, low overlap,
// predicted domain differs from the destination).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dcgen/corpus.hpp"
#include "dcgen/errors.hpp"
#include "json.hpp"

namespace dcgen {

struct DomainPrediction {
  DomainId domain{};
  std::vector<double> log_scores;  // one per domain
};

// Anything that can say which domain a text belongs to.
class DomainClassifier {
 public:
  virtual ~DomainClassifier() = default;
  virtual const DomainRegistry& registry() const = 0;
  virtual DomainPrediction predict(std::string_view text) const = 0;
};

inline DomainId argmax_lowest_id(const std::vector<double>& scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return domain_at(best);
}

// Multinomial Naive Bayes over stemmed unigrams with add-k smoothing. The
// vocabulary gets one extra bucket for unseen stems, so each likelihood
// column sums to one over V+1 outcomes.
class NaiveBayesModel final : public DomainClassifier {
 public:
  NaiveBayesModel(DomainRegistry registry, CorpusConfig tokenizer, double smoothing,
                  std::vector<double> log_priors, std::vector<std::string> vocabulary,
                  std::vector<std::vector<double>> log_likelihood,
                  std::vector<double> unknown_log_likelihood)
      : registry_(std::move(registry)),
        tokenizer_(std::move(tokenizer)),
        smoothing_(smoothing),
        log_priors_(std::move(log_priors)),
        vocabulary_(std::move(vocabulary)),
        log_likelihood_(std::move(log_likelihood)),
        unknown_(std::move(unknown_log_likelihood)) {
    const std::size_t n = registry_.size();
    if (!(smoothing_ > 0.0)) throw ConfigError("smoothing must be positive");
    if (log_priors_.size() != n || unknown_.size() != n ||
        log_likelihood_.size() != vocabulary_.size()) {
      throw ConfigError("classifier tables have inconsistent shapes");
    }
    for (const auto& row : log_likelihood_) {
      if (row.size() != n) throw ConfigError("classifier tables have inconsistent shapes");
    }
    for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
      if (!index_.emplace(vocabulary_[i], i).second) {
        throw ConfigError("duplicate classifier vocabulary entry '" + vocabulary_[i] + "'");
      }
    }
  }

  const DomainRegistry& registry() const override { return registry_; }
  const CorpusConfig& tokenizer() const noexcept { return tokenizer_; }
  double smoothing() const noexcept { return smoothing_; }
  const std::vector<double>& log_priors() const noexcept { return log_priors_; }
  const std::vector<std::string>& vocabulary() const noexcept { return vocabulary_; }
  const std::vector<double>& unknown_log_likelihood() const noexcept { return unknown_; }

  // log P(stem | D) for every domain; the unknown bucket for unseen stems.
  const std::vector<double>& log_likelihood(std::string_view stem) const {
    auto it = index_.find(stem);
    return it == index_.end() ? unknown_ : log_likelihood_[it->second];
  }

  DomainPrediction predict_stems(const std::vector<std::string>& stems) const {
    DomainPrediction p{{}, log_priors_};
    for (const auto& s : stems) {
      if (is_punctuation(s)) continue;
      const auto& ll = log_likelihood(s);
      for (std::size_t d = 0; d < ll.size(); ++d) p.log_scores[d] += ll[d];
    }
    p.domain = argmax_lowest_id(p.log_scores);
    return p;
  }

  DomainPrediction predict(std::string_view text) const override {
    return predict_stems(tokenize(text, tokenizer_, std::numeric_limits<std::size_t>::max()).stems);
  }

  friend bool operator==(const NaiveBayesModel& a, const NaiveBayesModel& b) {
    return a.registry_ == b.registry_ && a.tokenizer_.stemmer == b.tokenizer_.stemmer &&
           a.smoothing_ == b.smoothing_ && a.log_priors_ == b.log_priors_ &&
           a.vocabulary_ == b.vocabulary_ && a.log_likelihood_ == b.log_likelihood_ &&
           a.unknown_ == b.unknown_;
  }

 private:
  DomainRegistry registry_;
  CorpusConfig tokenizer_;
  double smoothing_;
  std::vector<double> log_priors_;
  std::vector<std::string> vocabulary_;
  std::vector<std::vector<double>> log_likelihood_;
  std::vector<double> unknown_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

using DomainClassifierModel = NaiveBayesModel;

// Fits on every document of every domain. Punctuation stems are ignored.
inline NaiveBayesModel train_domain_classifier(const DomainCorpus& corpus, double smoothing = 1.0,
                                               const CorpusConfig& tokenizer = {}) {
  const std::size_t n = corpus.registry.size();
  if (corpus.docs.size() != n) throw ConfigError("corpus has no document list for some domain");
  if (!(smoothing > 0.0)) throw ConfigError("smoothing must be positive");
  std::map<std::string, std::vector<double>> counts;
  std::vector<double> totals(n, 0.0);
  std::size_t all_docs = 0;
  for (std::size_t d = 0; d < n; ++d) {
    if (corpus.docs[d].empty()) {
      throw ConfigError("domain '" + corpus.registry.name(domain_at(d)) + "' has no documents");
    }
    all_docs += corpus.docs[d].size();
    for (const auto& doc : corpus.docs[d]) {
      for (const auto& s : doc.stems) {
        if (is_punctuation(s)) continue;
        auto& row = counts[s];
        if (row.empty()) row.assign(n, 0.0);
        row[d] += 1.0;
        totals[d] += 1.0;
      }
    }
  }
  const double buckets = static_cast<double>(counts.size() + 1);
  std::vector<double> denom(n), priors(n), unknown(n);
  for (std::size_t d = 0; d < n; ++d) {
    denom[d] = std::log(totals[d] + smoothing * buckets);
    priors[d] = std::log(static_cast<double>(corpus.docs[d].size()) / static_cast<double>(all_docs));
    unknown[d] = std::log(smoothing) - denom[d];
  }
  std::vector<std::string> vocab;
  std::vector<std::vector<double>> table;
  vocab.reserve(counts.size());
  table.reserve(counts.size());
  for (auto& [stem, row] : counts) {
    for (std::size_t d = 0; d < n; ++d) row[d] = std::log(row[d] + smoothing) - denom[d];
    vocab.push_back(stem);
    table.push_back(std::move(row));
  }
  return NaiveBayesModel(corpus.registry, tokenizer, smoothing, std::move(priors),
                         std::move(vocab), std::move(table), std::move(unknown));
}

inline DomainPrediction predict_domain(const DomainClassifier& model, std::string_view text) {
  return model.predict(text);
}

// Softmax of log-scores.
inline std::vector<double> posterior_from_log_scores(const std::vector<double>& log_scores) {
  const double top = *std::max_element(log_scores.begin(), log_scores.end());
  std::vector<double> p(log_scores.size());
  double z = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) z += (p[i] = std::exp(log_scores[i] - top));
  for (auto& x : p) x /= z;
  return p;
}

// Model file -----------------------------------------------------------------

inline constexpr std::string_view kClassifierFormat = "dcgen-naive-bayes";
inline constexpr int kClassifierVersion = 1;

inline nlohmann::json classifier_to_json(const NaiveBayesModel& m) {
  return nlohmann::json{{"format", kClassifierFormat},
                        {"version", kClassifierVersion},
                        {"domains", m.registry().names()},
                        {"stemmer", m.tokenizer().stemmer},
                        {"lowercase", m.tokenizer().lowercase},
                        {"smoothing", m.smoothing()},
                        {"log_priors", m.log_priors()},
                        {"vocabulary", m.vocabulary()},
                        {"log_likelihood", [&] {
                           nlohmann::json rows = nlohmann::json::array();
                           for (const auto& w : m.vocabulary()) rows.push_back(m.log_likelihood(w));
                           return rows;
                         }()},
                        {"unknown_log_likelihood", m.unknown_log_likelihood()}};
}

inline NaiveBayesModel classifier_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kClassifierFormat) {
      throw FormatError("not a dcgen classifier file");
    }
    if (j.at("version").get<int>() != kClassifierVersion) {
      throw FormatError("unsupported classifier version " + j.at("version").dump());
    }
    CorpusConfig tok;
    tok.stemmer = j.at("stemmer").get<std::string>();
    tok.lowercase = j.at("lowercase").get<bool>();
    tok.validate();
    return NaiveBayesModel(DomainRegistry(j.at("domains").get<std::vector<std::string>>()), tok,
                           j.at("smoothing").get<double>(),
                           j.at("log_priors").get<std::vector<double>>(),
                           j.at("vocabulary").get<std::vector<std::string>>(),
                           j.at("log_likelihood").get<std::vector<std::vector<double>>>(),
                           j.at("unknown_log_likelihood").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed classifier file: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("invalid classifier file: ") + e.what());
  }
}

inline void save_classifier(const NaiveBayesModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << classifier_to_json(m).dump() << '\n';
  if (!out) throw ConfigError("failed writing " + path);
}

inline NaiveBayesModel load_classifier(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw FormatError(path + ": classifier file is not valid JSON");
  return classifier_from_json(j);
}

// Filtering -------------------------------------------------------------------

struct FilterConfig {
  std::size_t min_words = 4;
  double min_overlap = 0.25;
  bool require_domain_agreement = true;
  CorpusConfig tokenizer;  // how candidate texts are split and stemmed

  void validate() const {
    if (!(min_overlap >= 0.0 && min_overlap <= 1.0)) {
      throw ConfigError("min overlap must lie in [0, 1]");
    }
    tokenizer.validate();
  }
};

enum class RejectReason { kTooShort, kLowOverlap, kDomainMismatch };

inline const char* to_string(RejectReason r) {
  switch (r) {
    case RejectReason::kTooShort: return "too-short";
    case RejectReason::kLowOverlap: return "low-overlap";
    case RejectReason::kDomainMismatch: return "domain-mismatch";
  }
  return "?";
}

struct FilterVerdict {
  bool accepted = true;
  std::vector<RejectReason> reasons;
  std::optional<DomainId> predicted;  // absent when no classifier was consulted
  double overlap = 0.0;

  friend bool operator==(const FilterVerdict&, const FilterVerdict&) = default;
};

namespace detail {
inline std::set<std::string> word_stems(const std::vector<std::string>& stems) {
  std::set<std::string> out;
  for (const auto& s : stems) {
    if (!is_punctuation(s)) out.insert(s);
  }
  return out;
}
}  // namespace detail

// Share of the original's distinct (non-punctuation) stems that the candidate
// also contains.
inline double word_overlap(const Document& original, const std::vector<std::string>& candidate_stems) {
  const auto base = detail::word_stems(original.stems);
  if (base.empty()) throw UndefinedInputError("original example has no words");
  const auto cand = detail::word_stems(candidate_stems);
  std::size_t shared = 0;
  for (const auto& s : base) shared += cand.contains(s) ? 1 : 0;
  return static_cast<double>(shared) / static_cast<double>(base.size());
}

inline double word_overlap(const Document& original, std::string_view candidate_text,
                           const CorpusConfig& tokenizer = {}) {
  return word_overlap(original,
                      tokenize(candidate_text, tokenizer, std::numeric_limits<std::size_t>::max()).stems);
}

// All three rules are always evaluated, so `reasons` is complete. The
// classifier may be null only when domain agreement is not required.
inline FilterVerdict apply_filter(std::string_view candidate_text, DomainId destination,
                                  const Document& original, const DomainClassifier* classifier,
                                  const FilterConfig& config) {
  if (config.require_domain_agreement && !classifier) {
    throw ConfigError("domain-agreement filtering needs a classifier");
  }
  if (classifier && !classifier->registry().contains(destination)) {
    throw ConfigError("destination is not a classifier domain");
  }
  const auto toks = tokenize(candidate_text, config.tokenizer, std::numeric_limits<std::size_t>::max());
  FilterVerdict v;
  const auto words = static_cast<std::size_t>(std::count_if(
      toks.surface.begin(), toks.surface.end(), [](const std::string& t) { return !is_punctuation(t); }));
  if (words < config.min_words) v.reasons.push_back(RejectReason::kTooShort);
  v.overlap = word_overlap(original, toks.stems);
  if (v.overlap < config.min_overlap) v.reasons.push_back(RejectReason::kLowOverlap);
  if (classifier) v.predicted = classifier->predict(candidate_text).domain;
  if (config.require_domain_agreement && v.predicted != destination) {
    v.reasons.push_back(RejectReason::kDomainMismatch);
  }
  v.accepted = v.reasons.empty();
  return v;
}

inline FilterVerdict apply_filter(std::string_view candidate_text, DomainId destination,
                                  const Document& original, const DomainClassifier& classifier,
                                  const FilterConfig& config) {
  return apply_filter(candidate_text, destination, original, &classifier, config);
}

}  // namespace dcgen
