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

// Synthetic multi-domain corpora for tests. Documents are built directly from
// word lists, bypassing the tokenizer, so stems equal surface tokens.

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "dcgen/corpus.hpp"

namespace dcgen::testing {

inline Document word_doc(DocId id, DomainId domain, const std::vector<std::string>& words) {
  Document d;
  d.id = id;
  d.domain = domain;
  d.surface = words;
  d.stems = words;
  for (std::size_t i = 0; i < words.size(); ++i) d.text += (i ? " " : "") + words[i];
  return d;
}

inline std::vector<std::string> domain_names(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("dom" + std::to_string(i));
  return names;
}

// Tiny random corpus over a small shared alphabet: word "w<k>" is drawn with
// a domain-dependent skew so that counts differ across domains.
inline DomainCorpus random_corpus(std::mt19937_64& rng, std::size_t n_domains,
                                  std::size_t max_docs, std::size_t vocab = 12,
                                  std::size_t max_len = 12) {
  DomainCorpus c{DomainRegistry(domain_names(n_domains)), {}};
  DocId next = 0;
  for (std::size_t d = 0; d < n_domains; ++d) {
    std::uniform_int_distribution<std::size_t> n_docs(1, max_docs);
    std::uniform_int_distribution<std::size_t> len(0, max_len);
    std::vector<double> weights(vocab);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (auto& w : weights) w = u(rng);
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    std::vector<Document> docs;
    const std::size_t count = n_docs(rng);
    for (std::size_t k = 0; k < count; ++k) {
      std::vector<std::string> words;
      const std::size_t l = len(rng);
      for (std::size_t t = 0; t < l; ++t) words.push_back("w" + std::to_string(pick(rng)));
      docs.push_back(word_doc(next++, domain_at(d), words));
    }
    c.docs.push_back(std::move(docs));
  }
  return c;
}

// Domains whose documents mix a shared vocabulary ("the", "is", ...) with a
// domain-exclusive one ("d<k>x<j>"). `exclusive_share` is the probability that
// a token is domain-exclusive.
struct DisjointCorpusSpec {
  std::size_t n_domains = 4;
  std::size_t docs_per_domain = 200;
  std::size_t exclusive_vocab = 30;
  std::size_t shared_vocab = 30;
  std::size_t doc_len = 20;
  double exclusive_share = 0.3;
};

inline std::string exclusive_word(std::size_t domain, std::size_t j) {
  return "d" + std::to_string(domain) + "x" + std::to_string(j);
}

inline std::string shared_word(std::size_t j) { return "s" + std::to_string(j); }

inline std::vector<std::string> disjoint_doc_words(std::mt19937_64& rng,
                                                   const DisjointCorpusSpec& spec,
                                                   std::size_t domain) {
  std::bernoulli_distribution exclusive(spec.exclusive_share);
  std::uniform_int_distribution<std::size_t> ex(0, spec.exclusive_vocab - 1);
  std::uniform_int_distribution<std::size_t> sh(0, spec.shared_vocab - 1);
  std::vector<std::string> words;
  for (std::size_t t = 0; t < spec.doc_len; ++t) {
    words.push_back(exclusive(rng) ? exclusive_word(domain, ex(rng)) : shared_word(sh(rng)));
  }
  return words;
}

inline DomainCorpus disjoint_corpus(std::mt19937_64& rng, const DisjointCorpusSpec& spec) {
  DomainCorpus c{DomainRegistry(domain_names(spec.n_domains)), {}};
  DocId next = 0;
  for (std::size_t d = 0; d < spec.n_domains; ++d) {
    std::vector<Document> docs;
    for (std::size_t k = 0; k < spec.docs_per_domain; ++k) {
      docs.push_back(word_doc(next++, domain_at(d), disjoint_doc_words(rng, spec, d)));
    }
    c.docs.push_back(std::move(docs));
  }
  return c;
}

}  // namespace dcgen::testing
