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

// Reconstruction: the constrained vocabulary admitted toward a destination
// domain, the native statistical slot filler, and the client side of the
// generation service's POST /generate protocol.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <iterator>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "dcgen/corpus.hpp"
#include "dcgen/corruption.hpp"
#include "dcgen/domain_stats.hpp"
#include "dcgen/errors.hpp"
#include "dcgen/orientation.hpp"
#include "dcgen/random.hpp"
#include "httplib.h"
#include "json.hpp"

namespace dcgen {

// Score-admitted stems plus the stems of the example being rewritten.
struct AllowedVocabulary {
  DomainId destination{};
  double tau = 0.08;
  std::set<std::string> words;
  std::set<std::string> original;
  // original stem -> first surface spelling in the example
  std::map<std::string, std::string> original_surface;

  bool contains(std::string_view stem) const {
    const std::string key(stem);
    return words.contains(key) || original.contains(key);
  }

  // Sorted union; what is sent to the service as allowed_words.
  std::vector<std::string> effective() const {
    std::vector<std::string> out;
    std::set_union(words.begin(), words.end(), original.begin(), original.end(),
                   std::back_inserter(out));
    return out;
  }
};

// max over i != destination of m(w, destination, D_i).
inline double max_destination_margin(const NgramEntry& e, DomainId destination) {
  const std::size_t d = to_index(destination);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < e.affinity.size(); ++i) {
    if (i != d) best = std::max(best, e.affinity[d] - e.affinity[i]);
  }
  return best;
}

// Unigram stems w with max_i m(w, destination, D_i) > tau. Independent of the
// example, so callers rewriting many examples compute it once per destination.
inline std::set<std::string> score_admitted_words(const StatsSnapshot& s, DomainId destination,
                                                  double tau) {
  if (!s.registry().contains(destination)) throw ConfigError("unknown destination domain");
  std::set<std::string> out;
  if (s.domain_count() < 2) return out;
  for (const auto& [key, e] : s.entries()) {
    if (ngram_order(key) == 1 && max_destination_margin(e, destination) > tau) out.insert(key);
  }
  return out;
}

inline AllowedVocabulary make_allowed_vocabulary(DomainId destination, double tau,
                                                 std::set<std::string> admitted,
                                                 const Document& original) {
  AllowedVocabulary v{destination, tau, std::move(admitted), {}, {}};
  for (std::size_t i = 0; i < original.stems.size(); ++i) {
    v.original.insert(original.stems[i]);
    v.original_surface.emplace(original.stems[i], original.surface[i]);
  }
  return v;
}

inline AllowedVocabulary build_allowed_vocabulary(const StatsSnapshot& s, DomainId destination,
                                                  const Document& original, double tau) {
  return make_allowed_vocabulary(destination, tau, score_admitted_words(s, destination, tau),
                                 original);
}

// Native filler ---------------------------------------------------------------

struct NativeFillOptions {
  bool oriented = true;
  // Multiplier on the weight of words co-occurring with the orientation word.
  double boost = 4.0;
};

struct FillResult {
  std::vector<std::string> tokens;
  std::vector<std::vector<std::string>> slot_fills;
  // True when nothing was score-admitted and slots were filled from the
  // example's own words.
  bool degenerate = false;

  std::string text() const {
    std::string out;
    for (const auto& t : tokens) {
      if (!out.empty()) out += ' ';
      out += t;
    }
    return out;
  }
};

namespace detail {

struct WeightedWords {
  std::vector<std::string> surface;
  std::vector<double> weight;
};

// Expands each slot to its original span length, drawing words from `pool`.
template <class Draw>
FillResult fill_slots(const MaskedTemplate& t, Draw&& draw) {
  FillResult r;
  r.tokens.reserve(t.token_count);
  for (const auto& seg : t.segments) {
    if (const auto* keep = std::get_if<KeepSegment>(&seg)) {
      r.tokens.insert(r.tokens.end(), keep->tokens.begin(), keep->tokens.end());
      continue;
    }
    const auto& slot = std::get<SlotSegment>(seg);
    std::vector<std::string> fill;
    for (std::size_t i = 0; i < slot.size(); ++i) fill.push_back(draw());
    r.tokens.insert(r.tokens.end(), fill.begin(), fill.end());
    r.slot_fills.push_back(std::move(fill));
  }
  return r;
}

inline FillResult fill_from(const MaskedTemplate& t, const WeightedWords& pool, Rng& rng) {
  const bool usable = std::any_of(pool.weight.begin(), pool.weight.end(),
                                  [](double w) { return w > 0.0; });
  std::discrete_distribution<std::size_t> pick;
  std::uniform_int_distribution<std::size_t> uniform(0, pool.surface.size() - 1);
  if (usable) pick = std::discrete_distribution<std::size_t>(pool.weight.begin(), pool.weight.end());
  return fill_slots(t, [&]() -> std::string {
    return pool.surface[usable ? pick(rng) : uniform(rng)];
  });
}

}  // namespace detail

// Fills every slot with as many words as it masked, sampled from the
// score-admitted vocabulary with weight log(#_{w|D'}+1) * rho(w, D'). In the
// oriented variant words sharing a document with the orientation word in D'
// get their weight multiplied by options.boost.
inline FillResult fill_native(const MaskedTemplate& t, const OrientationDescriptor* orientation,
                              const StatsSnapshot& s, const AllowedVocabulary& vocab,
                              const CooccurrenceIndex* cooccurrence, Rng& rng,
                              const NativeFillOptions& options = {}) {
  if (vocab.destination != t.destination_domain) {
    throw ConfigError("vocabulary destination differs from the template's");
  }
  if (options.oriented) {
    if (!orientation) throw ConfigError("oriented fill needs an orientation");
    if (orientation->domain != t.destination_domain) {
      throw ConfigError("orientation domain differs from the template destination");
    }
  }
  if (!(options.boost > 0.0)) throw ConfigError("boost must be positive");
  if (t.slot_count() == 0) return detail::fill_slots(t, [] { return std::string(); });

  const std::set<std::string>* boosted = nullptr;
  if (options.oriented && cooccurrence) {
    boosted = cooccurrence->find(orientation->domain, orientation->stem);
  }
  detail::WeightedWords pool;
  for (const auto& w : vocab.words) {
    if (is_punctuation(w)) continue;
    const NgramEntry* e = s.find(w);
    double weight = e ? std::max(0.0, representing_score(*e, vocab.destination)) : 0.0;
    if (boosted && boosted->contains(w)) weight *= options.boost;
    pool.surface.push_back(s.surface_form(w));
    pool.weight.push_back(weight);
  }
  bool degenerate = false;
  if (pool.surface.empty()) {
    degenerate = true;
    for (const auto& [stem, surface] : vocab.original_surface) {
      if (is_punctuation(stem)) continue;
      pool.surface.push_back(surface);
      pool.weight.push_back(1.0);
    }
    if (pool.surface.empty()) throw UndefinedInputError("nothing to fill slots with");
  }
  auto r = detail::fill_from(t, pool, rng);
  r.degenerate = degenerate;
  return r;
}

// Domain-agnostic filler for random-reconstruction ablations: every
// non-punctuation unigram in the snapshot, weighted by log(total df + 1).
class UnconstrainedVocabulary {
 public:
  explicit UnconstrainedVocabulary(const StatsSnapshot& s) {
    for (const auto& [key, e] : s.entries()) {
      if (ngram_order(key) != 1 || is_punctuation(key)) continue;
      pool_.surface.push_back(s.surface_form(key));
      pool_.weight.push_back(std::log(static_cast<double>(e.total()) + 1.0));
    }
  }
  std::size_t size() const noexcept { return pool_.surface.size(); }

  FillResult fill(const MaskedTemplate& t, Rng& rng) const {
    if (t.slot_count() == 0) return detail::fill_slots(t, [] { return std::string(); });
    if (pool_.surface.empty()) throw UndefinedInputError("snapshot holds no unigrams");
    return detail::fill_from(t, pool_, rng);
  }

 private:
  detail::WeightedWords pool_;
};

// Stems of every non-punctuation word in `text` that the vocabulary does not
// admit, in order of first appearance.
inline std::vector<std::string> vocabulary_violations(std::string_view text,
                                                      const AllowedVocabulary& vocab,
                                                      const CorpusConfig& corpus_config) {
  auto toks = tokenize(text, corpus_config, std::numeric_limits<std::size_t>::max());
  std::vector<std::string> bad;
  for (const auto& stem : toks.stems) {
    if (is_punctuation(stem) || vocab.contains(stem)) continue;
    if (std::find(bad.begin(), bad.end(), stem) == bad.end()) bad.push_back(stem);
  }
  return bad;
}

// Generation service client -----------------------------------------------

struct GenerationRequest {
  std::string template_text;
  std::string orientation_domain;
  std::string orientation_word;
  std::optional<std::vector<std::string>> allowed_words;
  bool enforce_vocabulary = true;
  int max_length = 128;
  int beam_size = 4;

  nlohmann::json to_json() const {
    nlohmann::json j{{"template", template_text},
                     {"orientation_domain", orientation_domain},
                     {"orientation_word", orientation_word},
                     {"enforce_vocabulary", enforce_vocabulary},
                     {"max_length", max_length},
                     {"beam_size", beam_size}};
    if (allowed_words) j["allowed_words"] = *allowed_words;
    return j;
  }
};

struct GenerationResponse {
  std::string text;
  std::vector<std::string> slot_fills;
  std::string model_version;

  static GenerationResponse from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ProtocolError("generation reply is not a JSON object");
    GenerationResponse r;
    try {
      r.text = j.at("text").get<std::string>();
      r.slot_fills = j.at("slot_fills").get<std::vector<std::string>>();
      r.model_version = j.at("model_version").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ProtocolError(std::string("generation reply breaks the contract: ") + e.what());
    }
    return r;
  }
};

struct ServiceConfig {
  std::string url;  // e.g. http://127.0.0.1:8000 or http://host:port/prefix
  double timeout_seconds = 60.0;
  int beam_size = 4;
  int max_length = 128;
  bool enforce_vocabulary = true;
  bool send_allowed_words = true;
  std::size_t max_in_flight = 4;
  int retries = 1;  // extra attempts after a transport failure
  CorpusConfig corpus;  // tokenizer used to check replies against the vocabulary
};

class GenerationClient {
 public:
  explicit GenerationClient(ServiceConfig config) : config_(std::move(config)) {
    auto scheme = config_.url.find("://");
    if (config_.url.empty() || scheme == std::string::npos) {
      throw ConfigError("service url must look like http://host:port, got '" + config_.url + "'");
    }
    if (config_.url.compare(0, scheme, "http") != 0) {
      throw ConfigError("only http service urls are supported");
    }
    auto path = config_.url.find('/', scheme + 3);
    base_ = config_.url.substr(0, path);
    prefix_ = path == std::string::npos ? "" : config_.url.substr(path);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    if (config_.max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
  }

  const ServiceConfig& config() const noexcept { return config_; }

  GenerationResponse generate(const GenerationRequest& request) const {
    httplib::Client cli(base_);
    const auto secs = static_cast<time_t>(config_.timeout_seconds);
    const auto usecs = static_cast<time_t>((config_.timeout_seconds - static_cast<double>(secs)) * 1e6);
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);
    const std::string body = request.to_json().dump();
    for (int attempt = 0;; ++attempt) {
      auto res = cli.Post(prefix_ + "/generate", body, "application/json");
      if (!res) {
        if (attempt < config_.retries) continue;
        throw TransportError("cannot reach generation service at " + config_.url + ": " +
                             httplib::to_string(res.error()));
      }
      return interpret(res->status, res->body);
    }
  }

  // Runs requests with at most max_in_flight outstanding. Results keep the
  // input order; the first failure (by index) is rethrown after all finish.
  std::vector<GenerationResponse> generate_all(const std::vector<GenerationRequest>& requests) const {
    std::vector<std::optional<GenerationResponse>> out(requests.size());
    std::vector<std::exception_ptr> errors(requests.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < requests.size(); i = next++) {
        try {
          out[i] = generate(requests[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    {
      std::vector<std::jthread> pool;
      const std::size_t n = std::min(config_.max_in_flight, requests.size());
      for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    std::vector<GenerationResponse> result;
    result.reserve(out.size());
    for (auto& r : out) result.push_back(std::move(*r));
    return result;
  }

  static GenerationResponse interpret(int status, const std::string& body) {
    nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
    if (status < 200 || status >= 300) {
      std::string message = body;
      if (j.is_object() && j.contains("error") && j["error"].is_string()) {
        message = j["error"].get<std::string>();
      }
      throw GenerationError(status, message);
    }
    if (j.is_discarded()) throw ProtocolError("generation reply is not valid JSON");
    return GenerationResponse::from_json(j);
  }

 private:
  ServiceConfig config_;
  std::string base_;
  std::string prefix_;
};

inline GenerationRequest make_generation_request(const MaskedTemplate& t,
                                                 const OrientationDescriptor& orientation,
                                                 const AllowedVocabulary& vocab,
                                                 const DomainRegistry& registry,
                                                 const ServiceConfig& config) {
  GenerationRequest req;
  req.template_text = t.render();
  req.orientation_domain = registry.name(orientation.domain);
  req.orientation_word = orientation.word;
  if (config.send_allowed_words) req.allowed_words = vocab.effective();
  req.enforce_vocabulary = config.enforce_vocabulary;
  req.max_length = config.max_length;
  req.beam_size = config.beam_size;
  return req;
}

// Checks a reply against the template it answers: zero-slot templates must come
// back verbatim, and with enforcement on every word must be admitted.
inline void check_generation_reply(const MaskedTemplate& t, const AllowedVocabulary& vocab,
                                   const GenerationResponse& reply, const ServiceConfig& config) {
  if (t.slot_count() == 0 && reply.text != t.kept_text()) {
    throw ProtocolError("service altered a template with no slots");
  }
  if (config.enforce_vocabulary) {
    auto bad = vocabulary_violations(reply.text, vocab, config.corpus);
    if (!bad.empty()) throw VocabularyViolation(std::move(bad));
  }
}

inline GenerationResponse fill_external(const MaskedTemplate& t,
                                        const OrientationDescriptor& orientation,
                                        const AllowedVocabulary& vocab,
                                        const DomainRegistry& registry,
                                        const GenerationClient& client) {
  auto reply = client.generate(
      make_generation_request(t, orientation, vocab, registry, client.config()));
  check_generation_reply(t, vocab, reply, client.config());
  return reply;
}

}  // namespace dcgen
