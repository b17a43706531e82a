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


// Library walk-through: three toy review domains, one labeled airline review,
// and the counterfactuals generated from it toward the other two domains.

#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "dcgen/pipeline.hpp"

namespace {

// Reviews mixing shared opinion words with a handful of domain words.
std::vector<dcgen::Document> toy_domain(dcgen::DomainId d, const std::vector<std::string>& topic,
                                        dcgen::DocId first, std::mt19937_64& rng) {
  const std::vector<std::string> shared{"the", "was", "really", "good", "bad", "and", "a", "very",
                                        "slow", "great", "but", "not", "worth", "it"};
  std::uniform_int_distribution<std::size_t> pick_topic(0, topic.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_shared(0, shared.size() - 1);
  std::bernoulli_distribution on_topic(0.4);
  std::vector<dcgen::Document> docs;
  for (std::size_t i = 0; i < 120; ++i) {
    std::string text;
    for (int t = 0; t < 16; ++t) {
      text += (t ? " " : "") + (on_topic(rng) ? topic[pick_topic(rng)] : shared[pick_shared(rng)]);
    }
    docs.push_back(dcgen::make_document(first + i, d, text + " .", {}));
    docs.back().label = i % 2 ? "pos" : "neg";
  }
  return docs;
}

}  // namespace

int main() {
  std::mt19937_64 rng(3);
  dcgen::DomainCorpus corpus{dcgen::DomainRegistry({"airline", "kitchen", "books"}), {}};
  corpus.docs.push_back(toy_domain(dcgen::domain_at(0),
                                   {"flight", "seat", "crew", "pilot", "luggage", "boarding", "delay"}, 0, rng));
  corpus.docs.push_back(toy_domain(dcgen::domain_at(1),
                                   {"knife", "blade", "pan", "oven", "spoon", "recipe", "kettle"}, 1000, rng));
  corpus.docs.push_back(toy_domain(dcgen::domain_at(2),
                                   {"novel", "author", "chapter", "plot", "story", "page", "writer"}, 2000, rng));

  const auto stats = dcgen::build_stats(corpus, {});
  const auto orientations = dcgen::build_orientations(stats, 2);
  const auto cooccurrence = dcgen::build_cooccurrence(corpus, orientations);
  const auto classifier = dcgen::train_domain_classifier(corpus);

  dcgen::GenerationPlan plan;
  plan.mode = dcgen::GenerationMode::kFDocogen;
  plan.k = 2;
  plan.destinations = {dcgen::domain_at(1), dcgen::domain_at(2)};
  plan.filter = dcgen::FilterConfig{};
  plan.seed = 42;

  std::vector<dcgen::Document> labeled{corpus.docs[0][0]};
  auto ds = dcgen::augment(labeled, stats, orientations, plan, {&cooccurrence, &classifier, nullptr});

  const auto& reg = stats.registry();
  std::cout << "original (" << *labeled[0].label << "): " << labeled[0].text << "\n\n";
  for (const auto& c : ds.candidates) {
    std::cout << "-> " << reg.name(c.destination) << " / " << c.orientation->word << "\n"
              << "   template: " << c.masked.render() << "\n"
              << "   text:     " << c.text << "\n"
              << "   " << (c.accepted() ? "kept" : "filtered out") << "\n";
  }
  std::cout << "\n" << dcgen::report(ds, stats).to_text();
}
