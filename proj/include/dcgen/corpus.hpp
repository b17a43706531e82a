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

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dcgen/errors.hpp"
#include "dcgen/stemmer.hpp"
#include "json.hpp"

namespace dcgen {

enum class DomainId : std::uint32_t {};

constexpr std::size_t to_index(DomainId d) { return static_cast<std::size_t>(d); }
constexpr DomainId domain_at(std::size_t i) {
  return static_cast<DomainId>(static_cast<std::uint32_t>(i));
}

using DocId = std::uint64_t;

// The ordered set of domains a run works over. Ids are dense 0..N-1 in the
// order the names were given.
class DomainRegistry {
 public:
  DomainRegistry() = default;

  explicit DomainRegistry(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.size() < 2) {
      throw ConfigError("at least two domains are required, got " +
                        std::to_string(names_.size()));
    }
    for (std::size_t i = 0; i < names_.size(); ++i) {
      auto& name = names_[i];
      std::transform(name.begin(), name.end(), name.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      if (name.empty()) throw ConfigError("domain names must be non-empty");
      if (!index_.emplace(name, domain_at(i)).second) {
        throw ConfigError("duplicate domain name '" + name + "'");
      }
    }
  }

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(DomainId d) const { return names_.at(to_index(d)); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  std::optional<DomainId> find(std::string_view name) const {
    std::string lowered(name);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    auto it = index_.find(lowered);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  DomainId id(std::string_view name) const {
    auto d = find(name);
    if (!d) throw ConfigError("unknown domain '" + std::string(name) + "'");
    return *d;
  }

  bool contains(DomainId d) const noexcept { return to_index(d) < names_.size(); }

  std::vector<DomainId> ids() const {
    std::vector<DomainId> out;
    for (std::size_t i = 0; i < names_.size(); ++i) out.push_back(domain_at(i));
    return out;
  }

  friend bool operator==(const DomainRegistry& a, const DomainRegistry& b) {
    return a.names_ == b.names_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, DomainId> index_;
};

struct CorpusConfig {
  std::size_t truncation_limit = 96;
  bool lowercase = true;
  std::string stemmer = "snowball-english";

  void validate() const {
    if (truncation_limit < 1) throw ConfigError("truncation limit must be >= 1");
    if (stemmer != "snowball-english" && stemmer != "none") {
      throw ConfigError("unknown stemmer '" + stemmer + "'");
    }
  }
};

struct Document {
  DocId id = 0;
  DomainId domain{};
  std::string text;
  std::vector<std::string> surface;
  std::vector<std::string> stems;
  std::optional<std::string> label;
  std::optional<std::string> external_id;

  std::size_t size() const noexcept { return surface.size(); }
};

struct Tokens {
  std::vector<std::string> surface;
  std::vector<std::string> stems;
};

namespace detail {

inline bool is_word_byte(unsigned char c) {
  return std::isalnum(c) || c >= 0x80;
}

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace detail

// A token made only of punctuation bytes (no letters, digits or UTF-8).
inline bool is_punctuation(std::string_view token) {
  return !token.empty() &&
         std::none_of(token.begin(), token.end(), [](char c) {
           return detail::is_word_byte(static_cast<unsigned char>(c));
         });
}

inline std::string stem_token(std::string_view lowered, const std::string& stemmer) {
  if (stemmer == "none" || is_punctuation(lowered)) return std::string(lowered);
  return stem_english(lowered);
}

// Splits on whitespace; every punctuation byte becomes its own token. An
// apostrophe between two word characters stays inside the word ("don't").
// At most `limit` tokens are produced.
inline Tokens tokenize(std::string_view text, const CorpusConfig& config,
                       std::size_t limit) {
  Tokens out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  auto at = [&](std::size_t k) { return static_cast<unsigned char>(text[k]); };
  while (i < n && out.surface.size() < limit) {
    if (std::isspace(at(i))) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    if (detail::is_word_byte(at(i))) {
      while (j < n) {
        if (detail::is_word_byte(at(j))) {
          ++j;
        } else if (text[j] == '\'' && j + 1 < n && detail::is_word_byte(at(j + 1))) {
          j += 2;
        } else {
          break;
        }
      }
    }
    std::string_view raw = text.substr(i, j - i);
    std::string lowered = detail::ascii_lower(raw);
    out.stems.push_back(stem_token(lowered, config.stemmer));
    out.surface.push_back(config.lowercase ? std::move(lowered) : std::string(raw));
    i = j;
  }
  return out;
}

inline Tokens tokenize(std::string_view text, const CorpusConfig& config) {
  return tokenize(text, config, config.truncation_limit);
}

inline Document make_document(DocId id, DomainId domain, std::string text,
                              const CorpusConfig& config) {
  Document doc;
  doc.id = id;
  doc.domain = domain;
  auto tokens = tokenize(text, config);
  doc.text = std::move(text);
  doc.surface = std::move(tokens.surface);
  doc.stems = std::move(tokens.stems);
  return doc;
}

namespace detail {

inline std::optional<std::string> optional_string_field(const nlohmann::json& rec,
                                                        const char* field,
                                                        const std::string& path,
                                                        std::size_t line) {
  auto it = rec.find(field);
  if (it == rec.end() || it->is_null()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer() || it->is_boolean()) return it->dump();
  throw ParseError(path, line, std::string("field '") + field + "' must be a string");
}

}  // namespace detail

// Reads a JSONL corpus: one object per line with a required string "text" and
// optional "label" and "id". Blank lines are skipped. Ids are assigned densely
// from `first_id` in read order.
inline std::vector<Document> load_corpus(const std::string& path, DomainId domain,
                                         const CorpusConfig& config,
                                         DocId first_id = 0) {
  config.validate();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open corpus file '" + path + "'");
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(path, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!rec.is_object()) throw ParseError(path, line_no, "record is not an object");
    auto text = rec.find("text");
    if (text == rec.end() || !text->is_string()) {
      throw ParseError(path, line_no, "missing string field 'text'");
    }
    Document doc = make_document(first_id + docs.size(), domain,
                                 text->get<std::string>(), config);
    doc.label = detail::optional_string_field(rec, "label", path, line_no);
    doc.external_id = detail::optional_string_field(rec, "id", path, line_no);
    docs.push_back(std::move(doc));
  }
  return docs;
}

// Documents grouped by domain; docs[d] holds the documents of domain d.
struct DomainCorpus {
  DomainRegistry registry;
  std::vector<std::vector<Document>> docs;

  std::size_t domain_size(DomainId d) const { return docs.at(to_index(d)).size(); }
};

// Loads one JSONL file per domain, in registry order. Doc ids are unique
// across the whole corpus.
inline DomainCorpus load_domain_corpus(
    const std::vector<std::pair<std::string, std::string>>& name_and_path,
    const CorpusConfig& config) {
  std::vector<std::string> names;
  for (const auto& [name, path] : name_and_path) names.push_back(name);
  DomainCorpus corpus{DomainRegistry(std::move(names)), {}};
  DocId next = 0;
  for (std::size_t i = 0; i < name_and_path.size(); ++i) {
    corpus.docs.push_back(load_corpus(name_and_path[i].second, domain_at(i), config, next));
    next += corpus.docs.back().size();
  }
  return corpus;
}

struct NgramRef {
  std::size_t order;
  std::string key;
  std::size_t begin;  // first token position
  std::size_t end;    // one past the last token position
};

inline std::string join_key(const std::vector<std::string>& stems, std::size_t begin,
                            std::size_t end) {
  std::string key;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) key += ' ';
    key += stems[i];
  }
  return key;
}

// Calls fn(order, begin, end) for every contiguous n-gram of orders
// 1..max_order, order-major and left to right.
template <typename Fn>
void for_each_ngram_span(std::size_t length, std::size_t max_order, Fn&& fn) {
  for (std::size_t order = 1; order <= max_order; ++order) {
    for (std::size_t b = 0; b + order <= length; ++b) fn(order, b, b + order);
  }
}

inline std::vector<NgramRef> ngrams(const Document& doc, std::size_t max_order) {
  if (max_order < 1 || max_order > 3) {
    throw ConfigError("n-gram order must be in 1..3, got " + std::to_string(max_order));
  }
  std::vector<NgramRef> out;
  for_each_ngram_span(doc.stems.size(), max_order,
                      [&](std::size_t order, std::size_t b, std::size_t e) {
                        out.push_back({order, join_key(doc.stems, b, e), b, e});
                      });
  return out;
}

}  // namespace dcgen
