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
#include <map>
#include <random>
#include <string>
#include <vector>

#include "dcgen/orientation.hpp"
#include "support/synthetic.hpp"

namespace {

using dcgen::domain_at;
using dcgen::DomainCorpus;
using dcgen::DomainRegistry;
using dcgen::testing::word_doc;

dcgen::StatsConfig loose() {
  dcgen::StatsConfig c;
  c.min_doc_frequency = 1;
  return c;
}

// "airline" shows up in its own domain often enough to top the ranking.
DomainCorpus travel_corpus() {
  DomainCorpus c{DomainRegistry({"airline", "kitchen"}), {{}, {}}};
  dcgen::DocId id = 0;
  const std::vector<std::vector<std::string>> air = {
      {"the", "airline", "flight", "was", "late"},
      {"the", "airline", "seat", "was", "small"},
      {"the", "airline", "staff", "was", "kind"},
      {"airline", "flight", "seat", "staff"},
      {"the", "flight", "was", "fine"},
  };
  const std::vector<std::vector<std::string>> kit = {
      {"the", "pan", "was", "hot"},   {"the", "knife", "was", "sharp"},
      {"the", "pan", "lid", "fits"},  {"a", "knife", "and", "a", "pan"},
      {"the", "oven", "was", "fine"},
  };
  for (const auto& w : air) c.docs[0].push_back(word_doc(id++, domain_at(0), w));
  for (const auto& w : kit) c.docs[1].push_back(word_doc(id++, domain_at(1), w));
  return c;
}

std::vector<std::string> words_of(const dcgen::OrientationSet& set, dcgen::DomainId d) {
  std::vector<std::string> out;
  for (const auto& desc : set.descriptors(d)) out.push_back(desc.word);
  return out;
}

TEST(BuildOrientations, OverrideIsUsedVerbatim) {
  auto s = dcgen::build_stats(travel_corpus(), loose());
  dcgen::OrientationOverrides ov{{"airline", {"flight", "seat", "staff"}}};
  auto set = dcgen::build_orientations(s, 4, ov);
  EXPECT_EQ(words_of(set, domain_at(0)),
            (std::vector<std::string>{"airline", "flight", "seat", "staff"}));
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(set.at(domain_at(0), i).index, i);
  EXPECT_EQ(set.descriptors(domain_at(1)).size(), 4u);
}

TEST(BuildOrientations, KOneIsJustTheName) {
  auto s = dcgen::build_stats(travel_corpus(), loose());
  auto set = dcgen::build_orientations(s, 1);
  EXPECT_EQ(words_of(set, domain_at(0)), std::vector<std::string>{"airline"});
  EXPECT_EQ(words_of(set, domain_at(1)), std::vector<std::string>{"kitchen"});
}

TEST(BuildOrientations, FollowsRankingAndSkipsTheDomainName) {
  auto s = dcgen::build_stats(travel_corpus(), loose());
  auto ranking = dcgen::representing_words(s, domain_at(0), 10);
  ASSERT_EQ(ranking.front().key, "airline");
  auto set = dcgen::build_orientations(s, 3);
  const auto& row = set.descriptors(domain_at(0));
  EXPECT_EQ(row[1].stem, ranking[1].key);
  EXPECT_EQ(row[2].stem, ranking[2].key);

  // "kitchen" never occurs, so nothing is skipped there.
  auto kr = dcgen::representing_words(s, domain_at(1), 2);
  const auto& krow = set.descriptors(domain_at(1));
  EXPECT_EQ(krow[1].stem, kr[0].key);
  EXPECT_EQ(krow[2].stem, kr[1].key);
  EXPECT_EQ(dcgen::build_orientations(s, 3), set);
}

TEST(BuildOrientations, Errors) {
  auto s = dcgen::build_stats(travel_corpus(), loose());
  EXPECT_THROW(dcgen::build_orientations(s, 0), dcgen::ConfigError);
  EXPECT_THROW(dcgen::build_orientations(s, 4, {{"airline", {"flight", "seat"}}}),
               dcgen::ConfigError);
  EXPECT_THROW(dcgen::build_orientations(s, 2, {{"railway", {"train"}}}), dcgen::ConfigError);
  EXPECT_THROW(dcgen::build_orientations(s, 3, {{"airline", {"seat", "seats"}}}),
               dcgen::ConfigError);
  EXPECT_THROW(dcgen::build_orientations(s, 200), dcgen::ConfigError);
}

TEST(BuildOrientations, OverrideWordsAreStemmed) {
  auto s = dcgen::build_stats(travel_corpus(), loose());
  auto set = dcgen::build_orientations(s, 2, {{"kitchen", {"Knives"}}});
  EXPECT_EQ(set.at(domain_at(1), 1).word, "Knives");
  EXPECT_EQ(set.at(domain_at(1), 1).stem, "knive");
}

TEST(SampleTrainingOrientation, FallsBackToTheName) {
  auto s = dcgen::build_stats(travel_corpus(), loose());
  auto set = dcgen::build_orientations(s, 4, {{"airline", {"flight", "seat", "staff"}}});
  auto doc = word_doc(0, domain_at(0), {"the", "meal", "was", "cold"});
  std::mt19937_64 rng(8);
  for (int i = 0; i < 200; ++i) {
    EXPECT_EQ(dcgen::sample_training_orientation(doc, set, rng).index, 0u);
  }
}

TEST(SampleTrainingOrientation, UniformOverEligible) {
  auto s = dcgen::build_stats(travel_corpus(), loose());
  auto set = dcgen::build_orientations(s, 4, {{"airline", {"flight", "seat", "staff"}}});
  auto doc = word_doc(0, domain_at(0), {"flight", "seat", "staff", "ok"});
  std::mt19937_64 rng(77);
  const int draws = 10000;
  std::map<std::size_t, int> hits;
  for (int i = 0; i < draws; ++i) ++hits[dcgen::sample_training_orientation(doc, set, rng).index];
  const double p = 0.25;
  const double sigma = std::sqrt(p * (1 - p) / draws);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(hits[k] / static_cast<double>(draws), p, 3 * sigma) << k;
  }
}

TEST(SampleTrainingOrientation, NeverPicksAnAbsentWord) {
  auto s = dcgen::build_stats(travel_corpus(), loose());
  auto set = dcgen::build_orientations(s, 4, {{"airline", {"flight", "seat", "staff"}}});
  auto doc = word_doc(0, domain_at(0), {"seat", "was", "fine"});
  std::mt19937_64 rng(1), again(1);
  for (int i = 0; i < 500; ++i) {
    const auto& d = dcgen::sample_training_orientation(doc, set, rng);
    EXPECT_TRUE(d.index == 0 || d.word == "seat");
    EXPECT_EQ(dcgen::sample_training_orientation(doc, set, again).index, d.index);
  }
}

TEST(Cooccurrence, CollectsWordsSharingADocument) {
  auto corpus = travel_corpus();
  auto s = dcgen::build_stats(corpus, loose());
  auto set = dcgen::build_orientations(s, 4, {{"airline", {"flight", "seat", "staff"}}});
  auto cooc = dcgen::build_cooccurrence(corpus, set);
  const auto* seat = cooc.find(domain_at(0), "seat");
  ASSERT_NE(seat, nullptr);
  EXPECT_EQ(*seat, (std::set<std::string>{"airline", "flight", "small", "staff", "the", "was"}));
  const auto* name = cooc.find(domain_at(1), "kitchen");
  ASSERT_NE(name, nullptr);
  EXPECT_TRUE(name->empty());
}

TEST(OrientationJson, RoundTrip) {
  auto corpus = travel_corpus();
  auto s = dcgen::build_stats(corpus, loose());
  auto set = dcgen::build_orientations(s, 3);
  auto cooc = dcgen::build_cooccurrence(corpus, set);
  auto loaded = dcgen::orientation_from_json(dcgen::orientation_to_json(set, &cooc));
  EXPECT_EQ(loaded.set, set);
  EXPECT_EQ(loaded.cooccurrence, cooc);

  auto bare = dcgen::orientation_from_json(dcgen::orientation_to_json(set));
  EXPECT_EQ(bare.set, set);
  EXPECT_TRUE(bare.cooccurrence.entries().empty());

  auto broken = dcgen::orientation_to_json(set);
  broken["orientations"]["airline"].erase(1);
  EXPECT_THROW(dcgen::orientation_from_json(broken), dcgen::FormatError);
  broken.erase("k");
  EXPECT_THROW(dcgen::orientation_from_json(broken), dcgen::FormatError);
}

TEST(OrientationJson, Overrides) {
  auto ov = dcgen::parse_orientation_overrides(
      nlohmann::json::parse(R"({"Airline": ["flight", "seat", "staff"]})"));
  EXPECT_EQ(ov.at("airline"), (std::vector<std::string>{"flight", "seat", "staff"}));
  EXPECT_THROW(dcgen::parse_orientation_overrides(nlohmann::json::parse("[1]")),
               dcgen::ParseError);
  EXPECT_THROW(dcgen::parse_orientation_overrides(nlohmann::json::parse(R"({"a": [1]})")),
               dcgen::ParseError);
  EXPECT_THROW(dcgen::load_orientation_overrides("/nonexistent/ov.json"), dcgen::ConfigError);
}

}  // namespace
