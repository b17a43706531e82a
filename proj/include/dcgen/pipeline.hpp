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

// End-to-end augmentation: K candidates per destination for every labeled
// example, optional filtering, the oracle-retrieval baseline, dataset and
// manifest output, and the summary report.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dcgen/binary_io.hpp"
#include "dcgen/corpus.hpp"
#include "dcgen/corruption.hpp"
#include "dcgen/domain_stats.hpp"
#include "dcgen/errors.hpp"
#include "dcgen/filter.hpp"
#include "dcgen/orientation.hpp"
#include "dcgen/random.hpp"
#include "dcgen/reconstruct.hpp"
#include "json.hpp"

namespace dcgen {

enum class GenerationMode { kDocogen, kFDocogen, kNoOv, kRmOv, kRmRr, kOracle };

inline const char* to_string(GenerationMode m) {
  switch (m) {
    case GenerationMode::kDocogen: return "docogen";
    case GenerationMode::kFDocogen: return "f-docogen";
    case GenerationMode::kNoOv: return "no-ov";
    case GenerationMode::kRmOv: return "rm-ov";
    case GenerationMode::kRmRr: return "rm-rr";
    case GenerationMode::kOracle: return "oracle";
  }
  return "?";
}

inline GenerationMode parse_generation_mode(std::string_view s) {
  for (auto m : {GenerationMode::kDocogen, GenerationMode::kFDocogen, GenerationMode::kNoOv,
                 GenerationMode::kRmOv, GenerationMode::kRmRr, GenerationMode::kOracle}) {
    if (s == to_string(m)) return m;
  }
  throw ConfigError("unknown generation mode '" + std::string(s) + "'");
}

inline bool uses_random_masking(GenerationMode m) {
  return m == GenerationMode::kRmOv || m == GenerationMode::kRmRr;
}

struct GenerationPlan {
  GenerationMode mode = GenerationMode::kDocogen;
  std::size_t k = 4;
  std::vector<DomainId> destinations;
  CorruptionConfig corruption;  // tau and masking seed for threshold modes
  double random_mask_fraction = 0.15;
  NativeFillOptions native;
  // When set, oriented modes fill through the generation service.
  std::optional<ServiceConfig> service;
  std::optional<FilterConfig> filter;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  // Each original is written this many times to the dataset; >1 balances
  // non-augmenting baselines against the augmented size.
  std::size_t duplicate_originals = 1;

  // Candidates per labeled example before filtering.
  std::size_t candidates_per_example() const {
    return (mode == GenerationMode::kOracle ? 1 : k) * destinations.size();
  }
};

struct CounterfactualCandidate {
  DocId origin = 0;
  std::string origin_ref;  // external id when the corpus had one
  DomainId origin_domain{};
  std::optional<std::string> label;
  DomainId destination{};
  std::optional<OrientationDescriptor> orientation;  // absent for oracle retrievals
  std::string text;
  MaskedTemplate masked;
  std::optional<FilterVerdict> verdict;
  bool degenerate = false;
  std::string model_version;  // service model, or "native"
  std::optional<DocId> retrieved;  // oracle mode: pool document returned

  bool accepted() const { return !verdict || verdict->accepted; }
};

struct AugmentedDataset {
  GenerationPlan plan;
  std::vector<Document> originals;
  std::vector<CounterfactualCandidate> candidates;  // every generated one, in order
  nlohmann::json manifest;

  std::vector<const CounterfactualCandidate*> accepted() const {
    std::vector<const CounterfactualCandidate*> out;
    for (const auto& c : candidates) {
      if (c.accepted()) out.push_back(&c);
    }
    return out;
  }
};

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The exception from the
// lowest failing index is rethrown once all work stops.
template <class Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < jobs; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n && !failed; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
            failed = true;
          }
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Oracle retrieval ------------------------------------------------------------

// Scores every pool document against the query; larger is more similar.
using SimilarityFn =
    std::function<std::vector<double>(const Document& query, const std::vector<Document>& pool)>;

// Cosine between TF-IDF vectors of stemmed unigrams (punctuation dropped).
// IDF is the smoothed log((1+n)/(1+df)) + 1 over the pool plus the query.
inline std::vector<double> tfidf_cosine(const Document& query, const std::vector<Document>& pool) {
  std::map<std::string, double> df;
  auto counts = [](const Document& d) {
    std::map<std::string, double> tf;
    for (const auto& s : d.stems) {
      if (!is_punctuation(s)) tf[s] += 1.0;
    }
    return tf;
  };
  std::vector<std::map<std::string, double>> tfs;
  tfs.reserve(pool.size());
  for (const auto& d : pool) tfs.push_back(counts(d));
  auto qtf = counts(query);
  for (const auto& tf : tfs) {
    for (const auto& [w, c] : tf) df[w] += 1.0;
  }
  for (const auto& [w, c] : qtf) df[w] += 1.0;
  const double n = static_cast<double>(pool.size() + 1);
  auto weigh = [&](std::map<std::string, double>& tf) {
    double norm = 0.0;
    for (auto& [w, c] : tf) {
      c *= std::log((1.0 + n) / (1.0 + df[w])) + 1.0;
      norm += c * c;
    }
    return std::sqrt(norm);
  };
  const double qn = weigh(qtf);
  std::vector<double> out(pool.size(), 0.0);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const double dn = weigh(tfs[i]);
    if (qn == 0.0 || dn == 0.0) continue;
    double dot = 0.0;
    for (const auto& [w, c] : qtf) {
      if (auto it = tfs[i].find(w); it != tfs[i].end()) dot += c * it->second;
    }
    out[i] = dot / (qn * dn);
  }
  return out;
}

// Most similar pool document with the query's label; ties to the lowest doc id.
inline const Document& oracle_match(const Document& example, const std::vector<Document>& pool,
                                    const SimilarityFn& similarity = tfidf_cosine) {
  const auto scores = similarity(example, pool);
  if (scores.size() != pool.size()) throw ConfigError("similarity returned the wrong number of scores");
  const Document* best = nullptr;
  double best_score = 0.0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (pool[i].label != example.label) continue;
    if (!best || scores[i] > best_score || (scores[i] == best_score && pool[i].id < best->id)) {
      best = &pool[i];
      best_score = scores[i];
    }
  }
  if (!best) {
    throw UndefinedInputError("no pool example shares the label '" + example.label.value_or("") + "'");
  }
  return *best;
}

// Augmentation -----------------------------------------------------------------

struct AugmentInputs {
  const CooccurrenceIndex* cooccurrence = nullptr;
  const DomainClassifier* classifier = nullptr;  // needed when the filter checks domains
  const DomainCorpus* oracle_pool = nullptr;     // labeled target-domain documents
};

namespace detail {

inline void validate_plan(const GenerationPlan& plan, const StatsSnapshot& snapshot,
                          const OrientationSet& orientations, const AugmentInputs& in) {
  plan.corruption.validate();
  if (plan.k < 1) throw ConfigError("K must be >= 1");
  if (plan.destinations.empty()) throw ConfigError("no destination domains");
  std::set<DomainId> seen;
  for (DomainId d : plan.destinations) {
    if (!snapshot.registry().contains(d)) throw ConfigError("destination is not a snapshot domain");
    if (!seen.insert(d).second) throw ConfigError("duplicate destination domain");
  }
  if (!(orientations.registry() == snapshot.registry())) {
    throw ConfigError("orientation set and snapshot cover different domains");
  }
  if (plan.mode != GenerationMode::kOracle && plan.k > orientations.k()) {
    throw ConfigError("K = " + std::to_string(plan.k) + " exceeds the " +
                      std::to_string(orientations.k()) + " orientation descriptors available");
  }
  if (!(plan.random_mask_fraction >= 0.0 && plan.random_mask_fraction <= 1.0)) {
    throw ConfigError("random mask fraction must lie in [0, 1]");
  }
  if (plan.mode == GenerationMode::kFDocogen && !plan.filter) {
    throw ConfigError("f-docogen needs a filter configuration");
  }
  if (plan.filter) {
    plan.filter->validate();
    if (plan.filter->require_domain_agreement) {
      if (!in.classifier) throw ConfigError("domain-agreement filtering needs a classifier");
      if (!(in.classifier->registry() == snapshot.registry())) {
        throw ConfigError("classifier and snapshot cover different domains");
      }
    }
  }
  if (plan.mode == GenerationMode::kOracle) {
    if (!in.oracle_pool) throw ConfigError("oracle mode needs a labeled target pool");
    if (!(in.oracle_pool->registry == snapshot.registry())) {
      throw ConfigError("oracle pool and snapshot cover different domains");
    }
  }
  if (plan.service && (plan.mode == GenerationMode::kNoOv || plan.mode == GenerationMode::kRmRr ||
                       plan.mode == GenerationMode::kOracle)) {
    throw ConfigError(std::string("mode ") + to_string(plan.mode) +
                      " does not use the generation service");
  }
  if (!(plan.native.boost > 0.0)) throw ConfigError("boost must be positive");
}

inline std::string origin_ref(const Document& d) {
  return d.external_id.value_or(std::to_string(d.id));
}

// Candidate slots for one example: (destination, orientation index) pairs in
// destination-major order.
struct Job {
  std::size_t example;
  DomainId destination;
  std::size_t orientation;
};

}  // namespace detail

inline nlohmann::json filter_config_json(const FilterConfig& f) {
  return {{"min_words", f.min_words},
          {"min_overlap", f.min_overlap},
          {"require_domain_agreement", f.require_domain_agreement}};
}

inline nlohmann::json build_manifest(const AugmentedDataset& ds, const StatsSnapshot& snapshot,
                                     const OrientationSet& orientations) {
  const auto& plan = ds.plan;
  const auto& reg = snapshot.registry();
  nlohmann::json m;
  m["format"] = "dcgen-augmentation-manifest";
  m["version"] = 1;
  m["mode"] = to_string(plan.mode);
  m["k"] = plan.k;
  m["seed"] = plan.seed;
  m["tau"] = plan.corruption.tau;
  m["masking_seed"] = plan.corruption.seed;
  m["random_mask_fraction"] = plan.random_mask_fraction;
  m["boost"] = plan.native.boost;
  m["reconstructor"] = plan.mode == GenerationMode::kOracle ? "oracle"
                       : plan.mode == GenerationMode::kRmRr ? "native-unconstrained"
                       : plan.mode == GenerationMode::kNoOv ? "native-unoriented"
                       : plan.service                       ? "external"
                                                            : "native";
  if (plan.service) m["service_url"] = plan.service->url;
  m["filter"] = plan.filter ? filter_config_json(*plan.filter) : nlohmann::json(nullptr);
  m["snapshot_fingerprint"] = snapshot.fingerprint();
  m["orientation_fingerprint"] = sha256_hex(orientation_to_json(orientations).dump());
  std::vector<std::string> dests;
  for (DomainId d : plan.destinations) dests.push_back(reg.name(d));
  m["destinations"] = dests;
  m["labeled_examples"] = ds.originals.size();
  m["duplicate_originals"] = plan.duplicate_originals;
  m["candidates_per_example"] = plan.candidates_per_example();
  m["generated"] = ds.candidates.size();

  std::size_t accepted = 0;
  std::size_t degenerate = 0;
  std::map<std::string, std::size_t> rejections;
  nlohmann::json per = nlohmann::json::object();
  for (const auto& c : ds.candidates) {
    const std::string dest = reg.name(c.destination);
    const std::string slot = c.orientation ? std::to_string(c.orientation->index) : "oracle";
    auto& cell = per[dest][slot];
    if (cell.is_null()) cell = {{"generated", 0}, {"accepted", 0}};
    cell["generated"] = cell["generated"].get<std::size_t>() + 1;
    if (c.accepted()) {
      ++accepted;
      cell["accepted"] = cell["accepted"].get<std::size_t>() + 1;
    } else {
      std::string key;
      for (auto r : c.verdict->reasons) key += (key.empty() ? "" : "+") + std::string(to_string(r));
      ++rejections[key];
    }
    degenerate += c.degenerate ? 1 : 0;
  }
  m["accepted"] = accepted;
  m["degenerate_fills"] = degenerate;
  m["rejections"] = rejections;
  m["per_destination_orientation"] = per;
  return m;
}

inline AugmentedDataset augment(const std::vector<Document>& labeled, const StatsSnapshot& snapshot,
                                const OrientationSet& orientations, const GenerationPlan& plan,
                                const AugmentInputs& in = {}) {
  detail::validate_plan(plan, snapshot, orientations, in);
  for (const auto& doc : labeled) {
    if (!doc.label) throw ConfigError("labeled example " + detail::origin_ref(doc) + " has no label");
    if (std::find(plan.destinations.begin(), plan.destinations.end(), doc.domain) !=
        plan.destinations.end()) {
      throw ConfigError("example " + detail::origin_ref(doc) + " already belongs to destination '" +
                        snapshot.registry().name(doc.domain) + "'");
    }
    if (!snapshot.registry().contains(doc.domain)) throw ConfigError("example from an unknown domain");
  }

  AugmentedDataset ds;
  ds.plan = plan;
  ds.originals = labeled;
  const std::size_t per_dest = plan.mode == GenerationMode::kOracle ? 1 : plan.k;
  std::vector<detail::Job> jobs;
  for (std::size_t e = 0; e < labeled.size(); ++e) {
    for (DomainId d : plan.destinations) {
      for (std::size_t o = 0; o < per_dest; ++o) jobs.push_back({e, d, o});
    }
  }
  ds.candidates.resize(jobs.size());

  // Admitted vocabularies depend only on the destination.
  std::map<DomainId, std::set<std::string>> admitted;
  for (DomainId d : plan.destinations) admitted[d] = score_admitted_words(snapshot, d, plan.corruption.tau);
  std::optional<UnconstrainedVocabulary> unconstrained;
  if (plan.mode == GenerationMode::kRmRr) unconstrained.emplace(snapshot);
  std::optional<GenerationClient> client;
  if (plan.service) client.emplace(*plan.service);
  std::vector<GenerationRequest> requests(plan.service ? jobs.size() : 0);
  std::vector<AllowedVocabulary> request_vocab(plan.service ? jobs.size() : 0);

  parallel_for(jobs.size(), plan.jobs, [&](std::size_t j) {
    const auto& job = jobs[j];
    const Document& doc = labeled[job.example];
    auto& c = ds.candidates[j];
    c.origin = doc.id;
    c.origin_ref = detail::origin_ref(doc);
    c.origin_domain = doc.domain;
    c.label = doc.label;
    c.destination = job.destination;
    c.model_version = "native";
    const std::uint64_t dest_key = to_index(job.destination);

    if (plan.mode == GenerationMode::kOracle) {
      const auto& pool = in.oracle_pool->docs[to_index(job.destination)];
      const Document& hit = oracle_match(doc, pool);
      c.text = hit.text;
      c.retrieved = hit.id;
      c.model_version = "oracle";
      Rng unused(0);
      c.masked = mask_random(doc, 0.0, unused);
      c.masked.destination_domain = job.destination;
      return;
    }

    c.orientation = orientations.at(job.destination, job.orientation);
    if (uses_random_masking(plan.mode)) {
      Rng mrng = derive_rng(plan.seed, {doc.id, dest_key, job.orientation, 1});
      c.masked = mask_random(doc, plan.random_mask_fraction, mrng);
      c.masked.destination_domain = job.destination;
    } else {
      c.masked = mask(doc, job.destination, snapshot, plan.corruption);
    }
    Rng frng = derive_rng(plan.seed, {doc.id, dest_key, job.orientation, 2});
    if (plan.mode == GenerationMode::kRmRr) {
      auto r = unconstrained->fill(c.masked, frng);
      c.text = r.text();
      return;
    }
    auto vocab = make_allowed_vocabulary(job.destination, plan.corruption.tau,
                                         admitted.at(job.destination), doc);
    if (plan.service) {
      requests[j] = make_generation_request(c.masked, *c.orientation, vocab, snapshot.registry(),
                                            *plan.service);
      request_vocab[j] = std::move(vocab);
      return;
    }
    NativeFillOptions opts = plan.native;
    opts.oriented = plan.mode != GenerationMode::kNoOv;
    auto r = fill_native(c.masked, opts.oriented ? &*c.orientation : nullptr, snapshot, vocab,
                         in.cooccurrence, frng, opts);
    c.text = r.text();
    c.degenerate = r.degenerate;
  });

  if (client) {
    auto replies = client->generate_all(requests);
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      check_generation_reply(ds.candidates[j].masked, request_vocab[j], replies[j], *plan.service);
      ds.candidates[j].text = replies[j].text;
      ds.candidates[j].model_version = replies[j].model_version;
    }
  }

  if (plan.filter) {
    parallel_for(jobs.size(), plan.jobs, [&](std::size_t j) {
      auto& c = ds.candidates[j];
      const Document& doc = labeled[jobs[j].example];
      c.verdict = apply_filter(c.text, c.destination, doc, in.classifier, *plan.filter);
    });
  }
  ds.manifest = build_manifest(ds, snapshot, orientations);
  return ds;
}

// Dataset output -----------------------------------------------------------------

inline nlohmann::json original_record(const Document& d, const DomainRegistry& reg) {
  return {{"text", d.text},
          {"label", d.label ? nlohmann::json(*d.label) : nlohmann::json(nullptr)},
          {"domain", reg.name(d.domain)},
          {"source", "original"},
          {"origin_id", detail::origin_ref(d)},
          {"orientation", nullptr},
          {"accepted", true},
          {"reject_reasons", nlohmann::json::array()}};
}

inline nlohmann::json candidate_record(const CounterfactualCandidate& c, GenerationMode mode,
                                       const DomainRegistry& reg) {
  nlohmann::json j{{"text", c.text},
                   {"label", c.label ? nlohmann::json(*c.label) : nlohmann::json(nullptr)},
                   {"domain", reg.name(c.destination)},
                   {"source", to_string(mode)},
                   {"origin_id", c.origin_ref},
                   {"orientation", c.orientation ? nlohmann::json(c.orientation->word) : nlohmann::json(nullptr)},
                   {"accepted", c.accepted()},
                   {"reject_reasons", nlohmann::json::array()}};
  if (c.verdict) {
    for (auto r : c.verdict->reasons) j["reject_reasons"].push_back(to_string(r));
    j["predicted_domain"] =
        c.verdict->predicted ? nlohmann::json(reg.name(*c.verdict->predicted)) : nlohmann::json(nullptr);
    j["overlap"] = c.verdict->overlap;
  }
  j["origin_domain"] = reg.name(c.origin_domain);
  j["orientation_index"] = c.orientation ? nlohmann::json(c.orientation->index) : nlohmann::json(nullptr);
  j["token_count"] = c.masked.token_count;
  std::vector<std::size_t> positions;
  for (const auto& s : c.masked.masked_spans) {
    for (std::size_t i = s.begin; i < s.end; ++i) positions.push_back(i);
  }
  j["masked_positions"] = positions;
  j["template"] = c.masked.render();
  j["degenerate"] = c.degenerate;
  j["model_version"] = c.model_version;
  if (c.retrieved) j["retrieved_id"] = *c.retrieved;
  return j;
}

inline std::string dataset_jsonl(const AugmentedDataset& ds, const DomainRegistry& reg) {
  std::string out;
  for (std::size_t rep = 0; rep < std::max<std::size_t>(1, ds.plan.duplicate_originals); ++rep) {
    for (const auto& d : ds.originals) out += original_record(d, reg).dump() + '\n';
  }
  for (const auto& c : ds.candidates) out += candidate_record(c, ds.plan.mode, reg).dump() + '\n';
  return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << content;
  if (!out) throw ConfigError("failed writing " + path);
}

// Rebuilds candidates (enough for reporting) from dataset JSONL rows. Original
// rows are returned as documents with their domain and label.
inline AugmentedDataset read_dataset_jsonl(const std::string& path, const DomainRegistry& reg,
                                           const CorpusConfig& tokenizer = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  AugmentedDataset ds;
  std::string line;
  std::size_t lineno = 0;
  std::set<std::string> seen_originals;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      const std::string source = j.at("source").get<std::string>();
      std::optional<std::string> label;
      if (!j.at("label").is_null()) label = j.at("label").get<std::string>();
      if (source == "original") {
        if (!seen_originals.insert(j.at("origin_id").get<std::string>()).second) continue;
        auto d = make_document(ds.originals.size(), reg.id(j.at("domain").get<std::string>()),
                               j.at("text").get<std::string>(), tokenizer);
        d.label = label;
        d.external_id = j.at("origin_id").get<std::string>();
        ds.originals.push_back(std::move(d));
        continue;
      }
      ds.plan.mode = parse_generation_mode(source);
      CounterfactualCandidate c;
      c.origin_ref = j.at("origin_id").get<std::string>();
      c.label = label;
      c.text = j.at("text").get<std::string>();
      c.destination = reg.id(j.at("domain").get<std::string>());
      c.origin_domain = reg.id(j.at("origin_domain").get<std::string>());
      c.masked.origin_domain = c.origin_domain;
      c.masked.destination_domain = c.destination;
      c.masked.token_count = j.at("token_count").get<std::size_t>();
      for (auto p : j.at("masked_positions").get<std::vector<std::size_t>>()) {
        MaskedSpan s;
        s.begin = p;
        s.end = p + 1;
        c.masked.masked_spans.push_back(s);
      }
      if (!j.at("orientation").is_null()) {
        c.orientation = OrientationDescriptor{c.destination, j.at("orientation").get<std::string>(), "",
                                              j.value("orientation_index", std::size_t{0})};
      }
      const auto reasons = j.at("reject_reasons").get<std::vector<std::string>>();
      if (j.contains("predicted_domain") || !reasons.empty() || !j.at("accepted").get<bool>()) {
        FilterVerdict v;
        for (const auto& r : reasons) {
          if (r == "too-short") v.reasons.push_back(RejectReason::kTooShort);
          else if (r == "low-overlap") v.reasons.push_back(RejectReason::kLowOverlap);
          else if (r == "domain-mismatch") v.reasons.push_back(RejectReason::kDomainMismatch);
          else throw ConfigError("unknown reject reason '" + r + "'");
        }
        v.accepted = v.reasons.empty();
        if (j.contains("predicted_domain") && !j["predicted_domain"].is_null()) {
          v.predicted = reg.id(j["predicted_domain"].get<std::string>());
        }
        v.overlap = j.value("overlap", 0.0);
        c.verdict = v;
      }
      c.degenerate = j.value("degenerate", false);
      ds.candidates.push_back(std::move(c));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path, lineno, e.what());
    } catch (const ConfigError& e) {
      throw ParseError(path, lineno, e.what());
    }
  }
  return ds;
}

// Report ---------------------------------------------------------------------------

struct Report {
  std::vector<std::string> domains;
  // [origin][destination] percent of tokens masked; nullopt where no template.
  std::vector<std::vector<std::optional<double>>> masking_rate;
  std::vector<std::vector<std::size_t>> template_count;
  std::size_t generated = 0;
  std::size_t accepted = 0;
  std::map<std::string, std::size_t> rejections;   // by reason combination
  std::map<std::string, std::size_t> reason_hits;  // each reason counted once per candidate
  struct Destination {
    std::size_t generated = 0;
    std::size_t accepted = 0;
  };
  std::map<std::string, Destination> per_destination;
  std::optional<double> mean_destination_affinity;  // over accepted candidates

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["domains"] = domains;
    nlohmann::json rates = nlohmann::json::array();
    for (const auto& row : masking_rate) {
      nlohmann::json r = nlohmann::json::array();
      for (const auto& cell : row) r.push_back(cell ? nlohmann::json(*cell) : nlohmann::json(nullptr));
      rates.push_back(std::move(r));
    }
    j["masking_rate"] = rates;
    j["template_count"] = template_count;
    j["generated"] = generated;
    j["accepted"] = accepted;
    j["rejections"] = rejections;
    j["reason_hits"] = reason_hits;
    nlohmann::json per = nlohmann::json::object();
    for (const auto& [name, d] : per_destination) {
      per[name] = {{"generated", d.generated},
                   {"accepted", d.accepted},
                   {"acceptance_rate", d.generated ? static_cast<double>(d.accepted) / static_cast<double>(d.generated) : 0.0}};
    }
    j["per_destination"] = per;
    j["mean_destination_affinity"] =
        mean_destination_affinity ? nlohmann::json(*mean_destination_affinity) : nlohmann::json(nullptr);
    return j;
  }

  std::string to_text() const {
    std::string out = "masking rate (% of tokens), rows = origin, columns = destination\n";
    auto pad = [](std::string s, std::size_t w) {
      if (s.size() < w) s.insert(0, w - s.size(), ' ');
      return s;
    };
    std::size_t w = 8;
    for (const auto& d : domains) w = std::max(w, d.size() + 1);
    out += pad("", w);
    for (const auto& d : domains) out += pad(d, w);
    out += '\n';
    for (std::size_t o = 0; o < domains.size(); ++o) {
      out += pad(domains[o], w);
      for (const auto& cell : masking_rate[o]) {
        char buf[32];
        if (cell) std::snprintf(buf, sizeof buf, "%.1f", *cell);
        out += pad(cell ? buf : "-", w);
      }
      out += '\n';
    }
    out += "generated " + std::to_string(generated) + ", accepted " + std::to_string(accepted) + '\n';
    for (const auto& [key, n] : rejections) out += "  rejected (" + key + "): " + std::to_string(n) + '\n';
    for (const auto& [name, d] : per_destination) {
      out += "  -> " + name + ": " + std::to_string(d.accepted) + "/" + std::to_string(d.generated) + " accepted\n";
    }
    if (mean_destination_affinity) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "mean destination affinity of accepted: %.5f\n", *mean_destination_affinity);
      out += buf;
    }
    return out;
  }
};

inline Report report(const AugmentedDataset& ds, const StatsSnapshot& snapshot,
                     const CorpusConfig& tokenizer = {}) {
  const auto& reg = snapshot.registry();
  const std::size_t n = reg.size();
  Report r;
  r.domains = reg.names();
  std::vector<std::vector<std::size_t>> masked(n, std::vector<std::size_t>(n, 0));
  std::vector<std::vector<std::size_t>> tokens(n, std::vector<std::size_t>(n, 0));
  r.template_count.assign(n, std::vector<std::size_t>(n, 0));
  double affinity_sum = 0.0;
  std::size_t affinity_n = 0;
  for (const auto& c : ds.candidates) {
    const auto o = to_index(c.origin_domain);
    const auto d = to_index(c.destination);
    if (o >= n || d >= n) throw ConfigError("candidate domain outside the snapshot registry");
    if (!c.retrieved) {
      masked[o][d] += c.masked.masked_token_count();
      tokens[o][d] += c.masked.token_count;
      ++r.template_count[o][d];
    }
    ++r.generated;
    auto& dest = r.per_destination[reg.name(c.destination)];
    ++dest.generated;
    if (c.accepted()) {
      ++r.accepted;
      ++dest.accepted;
      auto stems = tokenize(c.text, tokenizer, std::numeric_limits<std::size_t>::max()).stems;
      double sum = 0.0;
      std::size_t words = 0;
      for (const auto& s : stems) {
        if (is_punctuation(s)) continue;
        sum += affinity(snapshot, s, c.destination);
        ++words;
      }
      if (words) {
        affinity_sum += sum / static_cast<double>(words);
        ++affinity_n;
      }
    } else {
      std::string key;
      for (auto reason : c.verdict->reasons) {
        key += (key.empty() ? "" : "+") + std::string(to_string(reason));
        ++r.reason_hits[to_string(reason)];
      }
      ++r.rejections[key];
    }
  }
  r.masking_rate.assign(n, std::vector<std::optional<double>>(n));
  for (std::size_t o = 0; o < n; ++o) {
    for (std::size_t d = 0; d < n; ++d) {
      if (r.template_count[o][d] == 0) continue;
      r.masking_rate[o][d] = tokens[o][d] ? 100.0 * static_cast<double>(masked[o][d]) / static_cast<double>(tokens[o][d]) : 0.0;
    }
  }
  if (affinity_n) r.mean_destination_affinity = affinity_sum / static_cast<double>(affinity_n);
  return r;
}

// Percent of tokens masked for every (origin, destination) pair when each
// document of the origin domain is masked toward the destination with
// `config`. Diagonal cells only see the extra random masking.
inline std::vector<std::vector<double>> masking_rate_matrix(const DomainCorpus& corpus,
                                                            const StatsSnapshot& snapshot,
                                                            const CorruptionConfig& config,
                                                            std::size_t jobs = 1) {
  const std::size_t n = snapshot.domain_count();
  if (!(corpus.registry == snapshot.registry())) throw ConfigError("corpus and snapshot domains differ");
  std::vector<std::vector<double>> out(n, std::vector<double>(n, 0.0));
  parallel_for(n * n, jobs, [&](std::size_t cell) {
    const std::size_t o = cell / n;
    const std::size_t d = cell % n;
    std::vector<MaskedTemplate> ts;
    for (const auto& doc : corpus.docs[o]) ts.push_back(mask(doc, domain_at(d), snapshot, config));
    out[o][d] = ts.empty() ? 0.0 : masking_rate(ts);
  });
  return out;
}

}  // namespace dcgen
