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

#include "dcgen/domain_stats.hpp"
#include "dcgen/snapshot_io.hpp"
#include "support/oracle.hpp"
#include "support/synthetic.hpp"

namespace {

using dcgen::domain_at;
using dcgen::DomainCorpus;
using dcgen::DomainRegistry;
using dcgen::StatsConfig;
using dcgen::testing::word_doc;

StatsConfig loose_config() {
  StatsConfig cfg;
  cfg.min_doc_frequency = 1;
  return cfg;
}

// Ten documents per domain; "blade" occurs in four documents of the first
// domain and none of the second.
DomainCorpus worked_case_corpus() {
  DomainCorpus c{DomainRegistry({"kitchen", "airline"}), {{}, {}}};
  dcgen::DocId id = 0;
  for (int i = 0; i < 10; ++i) {
    c.docs[0].push_back(word_doc(id++, domain_at(0),
                                 i < 4 ? std::vector<std::string>{"the", "blade"}
                                       : std::vector<std::string>{"the", "pan"}));
  }
  for (int i = 0; i < 10; ++i) {
    c.docs[1].push_back(word_doc(id++, domain_at(1), {"the", "seat"}));
  }
  return c;
}

// Values evaluated by hand from the formulas (independent scalar script).
constexpr double kP1 = 5.0 / 6.0;
constexpr double kP2 = 1.0 / 6.0;
constexpr double kNormalizedEntropy = 0.6500224216483542;
constexpr double kRho1 = 0.2916479819597048;
constexpr double kRho2 = 0.05832959639194097;
constexpr double kMask = 0.23331838556776385;
constexpr double kRepresenting = 0.4693893192508455;

TEST(DomainStats, WorkedScalarCase) {
  auto s = dcgen::build_stats(worked_case_corpus(), loose_config());
  auto p = dcgen::posterior(s, "blade");
  ASSERT_TRUE(p.has_value());
  EXPECT_NEAR((*p)[0], kP1, 1e-12);
  EXPECT_NEAR((*p)[1], kP2, 1e-12);
  EXPECT_NEAR(dcgen::normalized_entropy(*p), kNormalizedEntropy, 1e-12);
  EXPECT_NEAR(dcgen::affinity(s, "blade", domain_at(0)), kRho1, 1e-12);
  EXPECT_NEAR(dcgen::affinity(s, "blade", domain_at(1)), kRho2, 1e-12);
  EXPECT_NEAR(dcgen::masking_score(s, "blade", domain_at(0), domain_at(1)), kMask, 1e-12);
  EXPECT_GT(dcgen::masking_score(s, "blade", domain_at(0), domain_at(1)), 0.08);
  EXPECT_NEAR(dcgen::representing_score(*s.find("blade"), domain_at(0)), kRepresenting,
              1e-12);
}

TEST(DomainStats, CountsDocumentsNotOccurrences) {
  DomainCorpus c{DomainRegistry({"a", "b"}), {{}, {}}};
  for (int i = 0; i < 3; ++i) {
    c.docs[0].push_back(word_doc(i, domain_at(0), {"blade", "x", "blade"}));
  }
  c.docs[1].push_back(word_doc(9, domain_at(1), {"y"}));
  auto s = dcgen::build_stats(c, loose_config());
  EXPECT_EQ(s.find("blade")->doc_freq, (std::vector<std::uint32_t>{3, 0}));
  EXPECT_EQ(s.find("blade x")->doc_freq[0], 3u);
}

TEST(DomainStats, DropsRareNgrams) {
  DomainCorpus c{DomainRegistry({"a", "b"}), {{}, {}}};
  for (int i = 0; i < 9; ++i) c.docs[0].push_back(word_doc(i, domain_at(0), {"rare"}));
  for (int i = 0; i < 10; ++i) c.docs[1].push_back(word_doc(20 + i, domain_at(1), {"common"}));
  auto s = dcgen::build_stats(c, StatsConfig{});
  EXPECT_EQ(s.find("rare"), nullptr);
  EXPECT_NE(s.find("common"), nullptr);
  EXPECT_FALSE(dcgen::posterior(s, "rare").has_value());
  EXPECT_EQ(dcgen::affinity(s, "rare", domain_at(0)), 0.0);
  EXPECT_EQ(dcgen::masking_score(s, "rare", domain_at(0), domain_at(1)), 0.0);
}

TEST(DomainStats, IdenticalCorporaAreSymmetric) {
  std::mt19937_64 rng(5);
  auto base = dcgen::testing::random_corpus(rng, 2, 30);
  DomainCorpus c{DomainRegistry({"left", "right"}), {base.docs[0], base.docs[0]}};
  for (auto& d : c.docs[1]) d.domain = domain_at(1);
  auto s = dcgen::build_stats(c, loose_config());
  ASSERT_GT(s.size(), 0u);
  for (const auto& [key, e] : s.entries()) {
    EXPECT_EQ(e.doc_freq[0], e.doc_freq[1]) << key;
    EXPECT_EQ(e.affinity[0], 0.0);
    EXPECT_EQ(e.posterior[0], 0.5);
  }
}

TEST(DomainStats, PosteriorIsMonotoneInCount) {
  const std::vector<double> n{10, 10, 10};
  double prev = 0;
  for (double c = 0; c <= 10; ++c) {
    const std::vector<double> counts{c, 2, 3};
    auto p = dcgen::posterior_from_counts(counts, n, 1.0);
    EXPECT_GT(p[0], prev);
    prev = p[0];
  }
}

TEST(DomainStats, PosteriorScaleInvariance) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 40);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> counts(4), n(4);
    for (int i = 0; i < 4; ++i) {
      n[i] = 1 + std::floor(u(rng));
      counts[i] = std::floor(u(rng) * n[i] / 40.0);
    }
    const double c = 0.5 + u(rng) / 4;
    std::vector<double> cs = counts, ns = n;
    for (auto& x : cs) x *= c;
    for (auto& x : ns) x *= c;
    auto p = dcgen::posterior_from_counts(counts, n, 3.0);
    auto q = dcgen::posterior_from_counts(cs, ns, 3.0 * c);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(p[i], q[i], 1e-12);
  }
}

TEST(DomainStats, AffinityIsLogBaseInvariant) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> p(2 + trial % 5);
    double z = 0;
    for (auto& x : p) z += (x = u(rng));
    for (auto& x : p) x /= z;
    auto natural = dcgen::affinities_from_posterior(p);
    for (double base : {2.0, 10.0}) {
      auto other = dcgen::affinities_from_posterior(p, base);
      for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(natural[i], other[i], 1e-12);
    }
  }
}

TEST(DomainStats, UniformPosteriorHasZeroAffinity) {
  const std::vector<double> p(5, 0.2);
  for (double r : dcgen::affinities_from_posterior(p)) EXPECT_EQ(r, 0.0);
}

TEST(DomainStats, MatchesDirectOracleOnRandomCorpora) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 5;
    auto corpus = dcgen::testing::random_corpus(rng, n, 50, 8, 8);
    auto s = dcgen::build_stats(corpus, loose_config());
    for (const auto& [key, e] : s.entries()) {
      const double alpha = s.config().alpha_for(dcgen::ngram_order(key));
      const auto p = dcgen::testing::oracle::posterior(corpus, key, alpha);
      const auto rho = dcgen::testing::oracle::affinity(corpus, key, alpha);
      for (std::size_t i = 0; i < n; ++i) {
        ASSERT_NEAR(e.posterior[i], p[i], 1e-9) << key;
        ASSERT_NEAR(e.affinity[i], rho[i], 1e-9) << key;
      }
    }
  }
}

TEST(DomainStats, ScoreIdentitiesAndRanges) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 5;
    auto s = dcgen::build_stats(dcgen::testing::random_corpus(rng, n, 40), loose_config());
    for (const auto& [key, e] : s.entries()) {
      double total = 0;
      for (double x : e.posterior) {
        EXPECT_GT(x, 0.0);
        total += x;
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
      for (std::size_t a = 0; a < n; ++a) {
        const double rho = dcgen::affinity(s, key, domain_at(a));
        EXPECT_GE(rho, 0.0);
        EXPECT_LE(rho, 1.0);
        EXPECT_EQ(dcgen::masking_score(s, key, domain_at(a), domain_at(a)), 0.0);
        for (std::size_t b = 0; b < n; ++b) {
          const double m = dcgen::masking_score(s, key, domain_at(a), domain_at(b));
          EXPECT_GE(m, -1.0);
          EXPECT_LE(m, 1.0);
          EXPECT_NEAR(m, -dcgen::masking_score(s, key, domain_at(b), domain_at(a)), 1e-12);
        }
      }
    }
  }
}

TEST(DomainStats, RepresentingWords) {
  DomainCorpus c{DomainRegistry({"a", "b"}), {{}, {}}};
  dcgen::DocId id = 0;
  for (int i = 0; i < 6; ++i) c.docs[0].push_back(word_doc(id++, domain_at(0), {"zed", "yak", "common", "!"}));
  for (int i = 0; i < 2; ++i) c.docs[0].push_back(word_doc(id++, domain_at(0), {"less", "common"}));
  for (int i = 0; i < 6; ++i) c.docs[1].push_back(word_doc(id++, domain_at(1), {"other", "common", "!"}));
  auto s = dcgen::build_stats(c, loose_config());
  auto top = dcgen::representing_words(s, domain_at(0), 10);
  ASSERT_GE(top.size(), 3u);
  // identical counts everywhere: adjacent, lexicographic
  EXPECT_EQ(top[0].key, "yak");
  EXPECT_EQ(top[1].key, "zed");
  EXPECT_EQ(top[0].score, top[1].score);
  for (const auto& w : top) {
    EXPECT_EQ(dcgen::ngram_order(w.key), 1u);
    EXPECT_NE(w.key, "!");
  }
  for (std::size_t i = 1; i < top.size(); ++i) EXPECT_GE(top[i - 1].score, top[i].score);
  // absent from the domain: log(0 + 1) = 0
  for (const auto& w : top) {
    if (w.key == "other") EXPECT_EQ(w.score, 0.0);
  }
  EXPECT_EQ(top.size(), 5u);  // fewer candidates than top_k: all of them
  EXPECT_EQ(dcgen::representing_words(s, domain_at(0), 1).size(), 1u);
  EXPECT_THROW(dcgen::representing_words(s, domain_at(0), 0), dcgen::ConfigError);
}

TEST(DomainStats, BuildErrors) {
  DomainCorpus c{DomainRegistry({"a", "b"}), {{word_doc(0, domain_at(0), {"x"})}, {}}};
  EXPECT_THROW(dcgen::build_stats(c, loose_config()), dcgen::ConfigError);
  StatsConfig bad;
  bad.alpha[1] = 0;
  c.docs[1].push_back(word_doc(1, domain_at(1), {"y"}));
  EXPECT_THROW(dcgen::build_stats(c, bad), dcgen::ConfigError);
}

TEST(DomainStats, ShardingDoesNotChangeResult) {
  std::mt19937_64 rng(31);
  auto corpus = dcgen::testing::random_corpus(rng, 4, 50);
  auto one = dcgen::build_stats(corpus, loose_config(), 1);
  auto many = dcgen::build_stats(corpus, loose_config(), 7);
  EXPECT_EQ(one.fingerprint(), many.fingerprint());
  EXPECT_TRUE(one == many);
}

class SnapshotFile : public ::testing::Test {
 protected:
  std::string path_ =
      (std::filesystem::temp_directory_path() / "dcgen_snapshot_test.bin").string();

  std::string read_bytes() {
    std::ifstream in(path_, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }
  void write_bytes(const std::string& b) {
    std::ofstream(path_, std::ios::binary | std::ios::trunc) << b;
  }
};

TEST_F(SnapshotFile, RoundTrip) {
  std::mt19937_64 rng(4);
  auto s = dcgen::build_stats(dcgen::testing::random_corpus(rng, 3, 40), loose_config());
  dcgen::save_snapshot(s, path_);
  auto loaded = dcgen::load_snapshot(path_);
  EXPECT_EQ(loaded.fingerprint(), s.fingerprint());
  EXPECT_TRUE(loaded == s);
}

TEST_F(SnapshotFile, TruncatedFileIsFormatError) {
  auto s = dcgen::build_stats(worked_case_corpus(), loose_config());
  dcgen::save_snapshot(s, path_);
  const auto bytes = read_bytes();
  for (std::size_t cut : {std::size_t{0}, std::size_t{5}, bytes.size() / 2, bytes.size() - 1}) {
    write_bytes(bytes.substr(0, cut));
    EXPECT_THROW(dcgen::load_snapshot(path_), dcgen::FormatError) << cut;
  }
}

TEST_F(SnapshotFile, SectionSmoothingMustMatchHeader) {
  auto s = dcgen::build_stats(worked_case_corpus(), loose_config());
  std::string body = dcgen::encode_snapshot(s);
  body.resize(body.size() - 32);
  // The trigram smoothing value (7.0) appears once in the header config block
  // and again at the head of the trigram section; alter the second copy.
  dcgen::ByteWriter seven;
  seven.put<double>(7.0);
  const auto first = body.find(seven.bytes());
  const auto second = body.find(seven.bytes(), first + 1);
  ASSERT_NE(second, std::string::npos);
  dcgen::ByteWriter eight;
  eight.put<double>(8.0);
  body.replace(second, 8, eight.bytes());
  const auto digest = dcgen::sha256(body);
  body.append(reinterpret_cast<const char*>(digest.data()), digest.size());
  write_bytes(body);
  try {
    dcgen::load_snapshot(path_);
    FAIL() << "expected FormatError";
  } catch (const dcgen::FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("disagrees"), std::string::npos) << e.what();
  }
}

TEST_F(SnapshotFile, VersionAndMagicChecked) {
  auto s = dcgen::build_stats(worked_case_corpus(), loose_config());
  auto bytes = dcgen::encode_snapshot(s);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  write_bytes(bad_magic);
  EXPECT_THROW(dcgen::load_snapshot(path_), dcgen::FormatError);
  auto bad_version = bytes;
  bad_version[8] = 9;
  write_bytes(bad_version);
  EXPECT_THROW(dcgen::load_snapshot(path_), dcgen::FormatError);
  auto flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x5a;
  write_bytes(flipped);
  EXPECT_THROW(dcgen::load_snapshot(path_), dcgen::FormatError);
}

}  // namespace
