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

// Orientation descriptors: per domain, the domain name plus its top K-1
// representing words. The learned embeddings live in the generation service;
// this side only decides which words seed them and which one a training
// example is conditioned on.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dcgen/corpus.hpp"
#include "dcgen/domain_stats.hpp"
#include "dcgen/errors.hpp"

namespace dcgen {

struct OrientationDescriptor {
  DomainId domain{};
  std::string word;  // surface form
  std::string stem;
  std::size_t index = 0;

  friend bool operator==(const OrientationDescriptor&, const OrientationDescriptor&) = default;
};

// domain name -> K-1 words, used verbatim in place of the computed ranking.
using OrientationOverrides = std::map<std::string, std::vector<std::string>, std::less<>>;

class OrientationSet {
 public:
  OrientationSet(DomainRegistry registry, std::size_t k,
                 std::vector<std::vector<OrientationDescriptor>> table)
      : registry_(std::move(registry)), k_(k), table_(std::move(table)) {
    if (k_ < 1) throw ConfigError("K must be >= 1");
    if (table_.size() != registry_.size()) throw ConfigError("orientation table size mismatch");
    for (std::size_t d = 0; d < table_.size(); ++d) {
      const auto& row = table_[d];
      if (row.size() != k_) {
        throw ConfigError("domain '" + registry_.name(domain_at(d)) + "' needs exactly " +
                          std::to_string(k_) + " descriptors");
      }
      std::set<std::string> seen;
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (row[i].domain != domain_at(d) || row[i].index != i) {
          throw ConfigError("orientation descriptor out of place");
        }
        if (!seen.insert(row[i].stem).second) {
          throw ConfigError("duplicate orientation word '" + row[i].word + "' in domain '" +
                            registry_.name(domain_at(d)) + "'");
        }
      }
    }
  }

  const DomainRegistry& registry() const noexcept { return registry_; }
  std::size_t k() const noexcept { return k_; }
  const std::vector<OrientationDescriptor>& descriptors(DomainId d) const {
    if (!registry_.contains(d)) throw ConfigError("unknown domain id");
    return table_[to_index(d)];
  }
  const OrientationDescriptor& at(DomainId d, std::size_t index) const {
    const auto& row = descriptors(d);
    if (index >= row.size()) throw ConfigError("orientation index out of range");
    return row[index];
  }

  friend bool operator==(const OrientationSet&, const OrientationSet&) = default;

 private:
  DomainRegistry registry_;
  std::size_t k_;
  std::vector<std::vector<OrientationDescriptor>> table_;
};

inline std::string stem_word(std::string_view word, const std::string& stemmer) {
  return stem_token(detail::ascii_lower(word), stemmer);
}

// Descriptor 0 is the domain name. The rest come from the representing-word
// ranking, skipping the name itself (stemmed or not) so that the K words stay
// distinct.
inline OrientationSet build_orientations(const StatsSnapshot& snapshot, std::size_t k,
                                         const OrientationOverrides& overrides = {},
                                         const std::string& stemmer = "snowball-english") {
  if (k < 1) throw ConfigError("K must be >= 1");
  const auto& reg = snapshot.registry();
  for (const auto& [name, words] : overrides) {
    if (!reg.find(name)) throw ConfigError("override for unknown domain '" + name + "'");
    if (words.size() != k - 1) {
      throw ConfigError("override for '" + name + "' has " + std::to_string(words.size()) +
                        " words, expected K-1 = " + std::to_string(k - 1));
    }
  }
  std::vector<std::vector<OrientationDescriptor>> table;
  for (DomainId d : reg.ids()) {
    const std::string& name = reg.name(d);
    std::vector<OrientationDescriptor> row;
    row.push_back({d, name, stem_word(name, stemmer), 0});
    if (auto it = overrides.find(name); it != overrides.end()) {
      for (const auto& w : it->second) row.push_back({d, w, stem_word(w, stemmer), row.size()});
    } else if (k > 1) {
      for (const auto& sw : representing_words(snapshot, d, k)) {
        if (row.size() == k) break;
        if (sw.key == row[0].stem || sw.key == detail::ascii_lower(name)) continue;
        row.push_back({d, snapshot.surface_form(sw.key), sw.key, row.size()});
      }
      if (row.size() != k) {
        throw ConfigError("domain '" + name + "' has fewer than K-1 representing words");
      }
    }
    table.push_back(std::move(row));
  }
  return OrientationSet(reg, k, std::move(table));
}

// Uniform over the domain name and every representing word whose stem occurs
// in the document. The name is always eligible.
template <class URBG>
const OrientationDescriptor& sample_training_orientation(const Document& doc,
                                                         const OrientationSet& set, URBG& rng) {
  const auto& row = set.descriptors(doc.domain);
  std::vector<std::size_t> eligible{0};
  for (std::size_t i = 1; i < row.size(); ++i) {
    if (std::find(doc.stems.begin(), doc.stems.end(), row[i].stem) != doc.stems.end()) {
      eligible.push_back(i);
    }
  }
  std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
  return row[eligible[pick(rng)]];
}

// For each descriptor, the unigram stems sharing at least one document with
// the descriptor's stem in its own domain. Drives the native filler's
// orientation boost.
class CooccurrenceIndex {
 public:
  using Key = std::pair<DomainId, std::string>;

  const std::set<std::string>* find(DomainId d, std::string_view stem) const {
    auto it = table_.find(Key{d, std::string(stem)});
    return it == table_.end() ? nullptr : &it->second;
  }
  void set(DomainId d, std::string stem, std::set<std::string> words) {
    table_[Key{d, std::move(stem)}] = std::move(words);
  }
  const std::map<Key, std::set<std::string>>& entries() const noexcept { return table_; }

  friend bool operator==(const CooccurrenceIndex&, const CooccurrenceIndex&) = default;

 private:
  std::map<Key, std::set<std::string>> table_;
};

inline CooccurrenceIndex build_cooccurrence(const DomainCorpus& corpus, const OrientationSet& set) {
  if (!(corpus.registry == set.registry())) throw ConfigError("corpus and orientation registries differ");
  CooccurrenceIndex index;
  for (DomainId d : set.registry().ids()) {
    std::map<std::string, std::set<std::string>> acc;
    for (const auto& desc : set.descriptors(d)) acc[desc.stem];
    for (const auto& doc : corpus.docs[to_index(d)]) {
      std::set<std::string> present(doc.stems.begin(), doc.stems.end());
      for (auto& [stem, words] : acc) {
        if (!present.contains(stem)) continue;
        for (const auto& w : present) {
          if (w != stem && !is_punctuation(w)) words.insert(w);
        }
      }
    }
    for (auto& [stem, words] : acc) index.set(d, stem, std::move(words));
  }
  return index;
}

// JSON forms ---------------------------------------------------------------

inline OrientationOverrides parse_orientation_overrides(const nlohmann::json& j,
                                                        const std::string& source = "<overrides>") {
  if (!j.is_object()) throw ParseError(source, 0, "orientation overrides must be a JSON object");
  OrientationOverrides out;
  for (const auto& [name, words] : j.items()) {
    if (!words.is_array()) throw ParseError(source, 0, "overrides for '" + name + "' must be a list");
    auto& dst = out[detail::ascii_lower(name)];
    for (const auto& w : words) {
      if (!w.is_string()) throw ParseError(source, 0, "override words must be strings");
      dst.push_back(w.get<std::string>());
    }
  }
  return out;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path, 0, e.what());
  }
}

inline OrientationOverrides load_orientation_overrides(const std::string& path) {
  return parse_orientation_overrides(read_json_file(path), path);
}

inline nlohmann::json orientation_to_json(const OrientationSet& set,
                                          const CooccurrenceIndex* cooc = nullptr) {
  nlohmann::json j;
  j["k"] = set.k();
  j["domains"] = set.registry().names();
  nlohmann::json table = nlohmann::json::object();
  for (DomainId d : set.registry().ids()) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& desc : set.descriptors(d)) {
      nlohmann::json e{{"word", desc.word}, {"stem", desc.stem}};
      if (cooc) {
        const auto* words = cooc->find(d, desc.stem);
        e["cooccurring"] = words ? nlohmann::json(*words) : nlohmann::json::array();
      }
      row.push_back(std::move(e));
    }
    table[set.registry().name(d)] = std::move(row);
  }
  j["orientations"] = std::move(table);
  return j;
}

struct LoadedOrientations {
  OrientationSet set;
  CooccurrenceIndex cooccurrence;
};

inline LoadedOrientations orientation_from_json(const nlohmann::json& j) {
  try {
    DomainRegistry reg(j.at("domains").get<std::vector<std::string>>());
    const auto k = j.at("k").get<std::size_t>();
    std::vector<std::vector<OrientationDescriptor>> table;
    CooccurrenceIndex cooc;
    for (DomainId d : reg.ids()) {
      std::vector<OrientationDescriptor> row;
      for (const auto& e : j.at("orientations").at(reg.name(d))) {
        OrientationDescriptor desc{d, e.at("word").get<std::string>(),
                                   e.at("stem").get<std::string>(), row.size()};
        if (e.contains("cooccurring")) {
          cooc.set(d, desc.stem, e.at("cooccurring").get<std::set<std::string>>());
        }
        row.push_back(std::move(desc));
      }
      table.push_back(std::move(row));
    }
    return {OrientationSet(std::move(reg), k, std::move(table)), std::move(cooc)};
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed orientation file: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("invalid orientation file: ") + e.what());
  }
}

}  // namespace dcgen
