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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "dcgen/filter.hpp"
#include "support/synthetic.hpp"

namespace {

using dcgen::domain_at;
using dcgen::DomainCorpus;
using dcgen::DomainRegistry;
using dcgen::RejectReason;
using dcgen::testing::word_doc;

dcgen::CorpusConfig raw_tokens() {
  dcgen::CorpusConfig c;
  c.stemmer = "none";
  return c;
}

DomainCorpus two_disjoint() {
  DomainCorpus c{DomainRegistry({"kitchen", "airline"}), {{}, {}}};
  dcgen::DocId id = 0;
  const std::vector<std::vector<std::string>> k = {{"pan", "knife", "oven"}, {"knife", "lid"}, {"oven", "pan"}};
  const std::vector<std::vector<std::string>> a = {{"flight", "seat"}, {"crew", "seat", "gate"}, {"gate", "flight"}};
  for (const auto& w : k) c.docs[0].push_back(word_doc(id++, domain_at(0), w));
  for (const auto& w : a) c.docs[1].push_back(word_doc(id++, domain_at(1), w));
  return c;
}

TEST(NaiveBayes, SeparableTrainingAccuracy) {
  auto c = two_disjoint();
  auto m = dcgen::train_domain_classifier(c, 1.0, raw_tokens());
  for (std::size_t d = 0; d < 2; ++d) {
    for (const auto& doc : c.docs[d]) {
      auto p = dcgen::predict_domain(m, doc.text);
      EXPECT_EQ(p.domain, domain_at(d)) << doc.text;
      EXPECT_EQ(p.log_scores.size(), 2u);
    }
  }
  EXPECT_EQ(m.predict("knife knife").domain, domain_at(0));
  EXPECT_EQ(m.predict("the gate").domain, domain_at(1));
}

TEST(NaiveBayes, HeldOutAccuracyOnExclusiveVocabulary) {
  std::mt19937_64 rng(2024);
  dcgen::testing::DisjointCorpusSpec spec;
  spec.docs_per_domain = 300;
  spec.exclusive_share = 0.9;
  auto train = dcgen::testing::disjoint_corpus(rng, spec);
  auto test = dcgen::testing::disjoint_corpus(rng, spec);
  auto m = dcgen::train_domain_classifier(train, 1.0, raw_tokens());
  std::size_t right = 0, total = 0;
  for (std::size_t d = 0; d < spec.n_domains; ++d) {
    for (const auto& doc : test.docs[d]) {
      right += m.predict_stems(doc.stems).domain == domain_at(d) ? 1 : 0;
      ++total;
    }
  }
  EXPECT_GE(static_cast<double>(right) / static_cast<double>(total), 0.95);
}

TEST(NaiveBayes, IdenticalCorporaTieToLowestId) {
  DomainCorpus c{DomainRegistry({"a", "b", "c"}), {{}, {}, {}}};
  for (std::size_t d = 0; d < 3; ++d) {
    c.docs[d].push_back(word_doc(d * 2, domain_at(d), {"x", "y"}));
    c.docs[d].push_back(word_doc(d * 2 + 1, domain_at(d), {"y", "z"}));
  }
  auto m = dcgen::train_domain_classifier(c, 1.0, raw_tokens());
  for (const char* text : {"x", "y z", "", "unseen words"}) {
    EXPECT_EQ(m.predict(text).domain, domain_at(0)) << text;
  }
}

TEST(NaiveBayes, EmptyTextUsesPriors) {
  DomainCorpus c{DomainRegistry({"a", "b"}), {{}, {}}};
  c.docs[0].push_back(word_doc(0, domain_at(0), {"x"}));
  for (int i = 0; i < 3; ++i) c.docs[1].push_back(word_doc(1 + i, domain_at(1), {"y"}));
  auto m = dcgen::train_domain_classifier(c, 1.0, raw_tokens());
  auto p = m.predict("");
  EXPECT_EQ(p.domain, domain_at(1));
  EXPECT_NEAR(p.log_scores[0], std::log(0.25), 1e-12);
  EXPECT_NEAR(p.log_scores[1], std::log(0.75), 1e-12);
  EXPECT_EQ(m.predict(". , !").log_scores, p.log_scores);
}

TEST(NaiveBayes, LikelihoodsAreDistributionsAndPosteriorsNormalize) {
  std::mt19937_64 rng(8);
  auto c = dcgen::testing::random_corpus(rng, 4, 40);
  for (auto& docs : c.docs) {
    if (docs.empty()) docs.push_back(word_doc(999, domain_at(0), {"w1"}));
  }
  for (std::size_t d = 0; d < 4; ++d) {
    for (auto& doc : c.docs[d]) doc.domain = domain_at(d);
  }
  auto m = dcgen::train_domain_classifier(c, 0.5, raw_tokens());
  for (std::size_t d = 0; d < 4; ++d) {
    double sum = std::exp(m.unknown_log_likelihood()[d]);
    for (const auto& w : m.vocabulary()) sum += std::exp(m.log_likelihood(w)[d]);
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
  for (const auto& docs : c.docs) {
    for (const auto& doc : docs) {
      auto p = dcgen::posterior_from_log_scores(m.predict_stems(doc.stems).log_scores);
      double s = 0;
      for (double x : p) s += x;
      EXPECT_NEAR(s, 1.0, 1e-9);
    }
  }
}

TEST(NaiveBayes, Errors) {
  auto c = two_disjoint();
  EXPECT_THROW(dcgen::train_domain_classifier(c, 0.0), dcgen::ConfigError);
  c.docs[1].clear();
  EXPECT_THROW(dcgen::train_domain_classifier(c), dcgen::ConfigError);
}

TEST(NaiveBayes, ModelFileRoundTrip) {
  auto m = dcgen::train_domain_classifier(two_disjoint(), 1.0, raw_tokens());
  auto path = std::filesystem::temp_directory_path() / "dcgen_test_classifier.json";
  dcgen::save_classifier(m, path.string());
  auto back = dcgen::load_classifier(path.string());
  EXPECT_TRUE(back == m);
  EXPECT_EQ(back.predict("knife pan gate").log_scores, m.predict("knife pan gate").log_scores);

  auto j = dcgen::classifier_to_json(m);
  j["version"] = 99;
  EXPECT_THROW(dcgen::classifier_from_json(j), dcgen::FormatError);
  j = dcgen::classifier_to_json(m);
  j["log_priors"].erase(0);
  EXPECT_THROW(dcgen::classifier_from_json(j), dcgen::FormatError);
  j = dcgen::classifier_to_json(m);
  j.erase("vocabulary");
  EXPECT_THROW(dcgen::classifier_from_json(j), dcgen::FormatError);
  {
    std::ofstream(path) << "{not json";
  }
  EXPECT_THROW(dcgen::load_classifier(path.string()), dcgen::FormatError);
  std::filesystem::remove(path);
  EXPECT_THROW(dcgen::load_classifier(path.string()), dcgen::ConfigError);
}

TEST(WordOverlap, Cases) {
  auto orig = word_doc(0, domain_at(0), {"a", "b", "c", "d", "e", "f", "g", "h"});
  EXPECT_DOUBLE_EQ(dcgen::word_overlap(orig, orig.text, raw_tokens()), 1.0);
  EXPECT_DOUBLE_EQ(dcgen::word_overlap(orig, "x y z", raw_tokens()), 0.0);
  EXPECT_DOUBLE_EQ(dcgen::word_overlap(orig, "a x y z q r s t", raw_tokens()), 0.125);
  EXPECT_DOUBLE_EQ(dcgen::word_overlap(orig, "a a a a", raw_tokens()), 0.125);
  EXPECT_THROW(dcgen::word_overlap(word_doc(1, domain_at(0), {}), "a"), dcgen::UndefinedInputError);
  EXPECT_THROW(dcgen::word_overlap(word_doc(1, domain_at(0), {"."}), "a"), dcgen::UndefinedInputError);
}

TEST(WordOverlap, AddingOriginalWordsNeverLowersIt) {
  std::mt19937_64 rng(6);
  auto orig = word_doc(0, domain_at(0), {"a", "b", "c", "d", "e"});
  std::vector<std::string> pool = {"a", "b", "c", "d", "e", "x", "y"};
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> cand;
    for (int i = 0; i < 4; ++i) cand.push_back(pool[pick(rng)]);
    double prev = dcgen::word_overlap(orig, cand);
    for (int i = 0; i < 5; ++i) {
      cand.push_back(orig.stems[static_cast<std::size_t>(i)]);
      double now = dcgen::word_overlap(orig, cand);
      EXPECT_GE(now, prev);
      prev = now;
    }
  }
}

class ApplyFilter : public ::testing::Test {
 protected:
  DomainCorpus corpus = two_disjoint();
  dcgen::NaiveBayesModel model = dcgen::train_domain_classifier(corpus, 1.0, raw_tokens());
  dcgen::FilterConfig config = [] {
    dcgen::FilterConfig f;
    f.tokenizer = raw_tokens();
    return f;
  }();
};

TEST_F(ApplyFilter, ThreeWordsIsTooShort) {
  auto orig = word_doc(0, domain_at(0), {"pan", "knife", "oven"});
  auto v = dcgen::apply_filter("pan knife oven", domain_at(0), orig, model, config);
  EXPECT_FALSE(v.accepted);
  EXPECT_EQ(v.reasons, std::vector<RejectReason>{RejectReason::kTooShort});
  // punctuation does not count as words
  v = dcgen::apply_filter("pan knife oven .", domain_at(0), orig, model, config);
  EXPECT_EQ(v.reasons, std::vector<RejectReason>{RejectReason::kTooShort});
}

TEST_F(ApplyFilter, CopyOfOriginalFailsOnlyOnDomain) {
  auto orig = word_doc(0, domain_at(0), {"pan", "knife", "oven", "lid"});
  auto v = dcgen::apply_filter(orig.text, domain_at(1), orig, model, config);
  EXPECT_EQ(v.reasons, std::vector<RejectReason>{RejectReason::kDomainMismatch});
  EXPECT_DOUBLE_EQ(v.overlap, 1.0);
  EXPECT_EQ(v.predicted, domain_at(0));
  config.require_domain_agreement = false;
  EXPECT_TRUE(dcgen::apply_filter(orig.text, domain_at(1), orig, model, config).accepted);
}

TEST_F(ApplyFilter, LowOverlapEightStemCase) {
  auto orig = word_doc(0, domain_at(0), {"a", "b", "c", "d", "e", "f", "g", "h"});
  auto v = dcgen::apply_filter("a flight seat gate crew", domain_at(1), orig, model, config);
  EXPECT_DOUBLE_EQ(v.overlap, 0.125);
  EXPECT_EQ(v.reasons, std::vector<RejectReason>{RejectReason::kLowOverlap});
}

TEST_F(ApplyFilter, AllReasonsReportedTogether) {
  auto orig = word_doc(0, domain_at(0), {"a", "b", "c", "d", "e", "f", "g", "h"});
  auto v = dcgen::apply_filter("pan", domain_at(1), orig, model, config);
  EXPECT_EQ(v.reasons, (std::vector<RejectReason>{RejectReason::kTooShort, RejectReason::kLowOverlap,
                                                  RejectReason::kDomainMismatch}));
  EXPECT_FALSE(v.accepted);
}

TEST_F(ApplyFilter, AcceptsAGoodCandidate) {
  auto orig = word_doc(0, domain_at(0), {"the", "pan", "was", "great"});
  auto v = dcgen::apply_filter("the flight was great", domain_at(1), orig, model, config);
  EXPECT_TRUE(v.accepted);
  EXPECT_TRUE(v.reasons.empty());
  EXPECT_DOUBLE_EQ(v.overlap, 0.75);
  EXPECT_EQ(dcgen::apply_filter("the flight was great", domain_at(1), orig, model, config), v);
  EXPECT_THROW(dcgen::apply_filter("x", domain_at(7), orig, model, config), dcgen::ConfigError);
}

TEST(FilterConfig, Validation) {
  dcgen::FilterConfig f;
  EXPECT_NO_THROW(f.validate());
  f.min_overlap = 1.5;
  EXPECT_THROW(f.validate(), dcgen::ConfigError);
  EXPECT_STREQ(dcgen::to_string(RejectReason::kLowOverlap), "low-overlap");
}

}  // namespace
