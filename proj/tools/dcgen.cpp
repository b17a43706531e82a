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

// dcgen: command-line front end for building domain statistics, masking,
// orienting, generating, filtering and assembling augmented datasets.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dcgen/corpus.hpp"
#include "dcgen/corruption.hpp"
#include "dcgen/domain_stats.hpp"
#include "dcgen/filter.hpp"
#include "dcgen/orientation.hpp"
#include "dcgen/pipeline.hpp"
#include "dcgen/reconstruct.hpp"
#include "dcgen/snapshot_io.hpp"

namespace {

constexpr const char* kServiceEnv = "DCGEN_SERVICE_URL";

struct Globals {
  double tau = 0.08;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::size_t truncate = 96;
  std::string stemmer = "snowball-english";

  dcgen::CorpusConfig corpus() const {
    dcgen::CorpusConfig c;
    c.truncation_limit = truncate;
    c.stemmer = stemmer;
    c.validate();
    return c;
  }
};

using NamedPaths = std::vector<std::pair<std::string, std::string>>;

NamedPaths parse_named_paths(const std::vector<std::string>& specs) {
  NamedPaths out;
  for (const auto& s : specs) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == s.size()) {
      throw dcgen::ConfigError("expected NAME=PATH, got '" + s + "'");
    }
    out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  return out;
}

// CLI11 validator for NAME=PATH arguments whose PATH must exist.
const CLI::Validator kNamedExistingFile(
    [](std::string& value) -> std::string {
      auto eq = value.find('=');
      if (eq == std::string::npos || eq == 0) return "expected NAME=PATH, got '" + value + "'";
      return CLI::ExistingFile(value.substr(eq + 1));
    },
    "NAME=PATH");

// Loads NAME=PATH corpora in the snapshot's domain order.
dcgen::DomainCorpus load_for_snapshot(const std::vector<std::string>& specs,
                                      const dcgen::StatsSnapshot& s, const dcgen::CorpusConfig& cfg) {
  std::map<std::string, std::string> by_name;
  for (auto& [name, path] : parse_named_paths(specs)) {
    by_name[dcgen::detail::ascii_lower(name)] = path;
  }
  NamedPaths ordered;
  for (const auto& name : s.registry().names()) {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw dcgen::ConfigError("no --corpus given for domain '" + name + "'");
    ordered.emplace_back(name, it->second);
    by_name.erase(it);
  }
  if (!by_name.empty()) {
    throw dcgen::ConfigError("--corpus names a domain the snapshot lacks: '" + by_name.begin()->first + "'");
  }
  return dcgen::load_domain_corpus(ordered, cfg);
}

std::string service_url(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kServiceEnv)) return env;
  return "";
}

struct OrientationArgs {
  std::string file;
  std::size_t k = 4;
};

dcgen::LoadedOrientations orientations_for(const OrientationArgs& a, const dcgen::StatsSnapshot& s,
                                           const Globals& g) {
  if (!a.file.empty()) {
    auto loaded = dcgen::orientation_from_json(dcgen::read_json_file(a.file));
    if (!(loaded.set.registry() == s.registry())) {
      throw dcgen::ConfigError(a.file + ": orientation domains differ from the snapshot's");
    }
    return loaded;
  }
  return {dcgen::build_orientations(s, a.k, {}, g.stemmer), {}};
}

std::vector<dcgen::DomainId> destinations_for(const std::vector<std::string>& names,
                                              const dcgen::StatsSnapshot& s, dcgen::DomainId origin) {
  std::vector<dcgen::DomainId> out;
  if (names.empty()) {
    for (auto d : s.registry().ids()) {
      if (d != origin) out.push_back(d);
    }
    return out;
  }
  for (const auto& n : names) out.push_back(s.registry().id(dcgen::detail::ascii_lower(n)));
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw dcgen::ConfigError("cannot write " + path);
  return out;
}

// build-stats -----------------------------------------------------------------

struct BuildStatsArgs {
  std::vector<std::string> corpora;
  std::string out;
  std::vector<double> alpha{1.0, 5.0, 7.0};
  std::uint32_t min_df = 10;
  std::size_t max_order = 3;
};

int cmd_build_stats(const BuildStatsArgs& a, const Globals& g) {
  dcgen::StatsConfig cfg;
  if (a.alpha.size() != 3) throw dcgen::ConfigError("--alpha takes three values");
  cfg.alpha = {a.alpha[0], a.alpha[1], a.alpha[2]};
  cfg.min_doc_frequency = a.min_df;
  cfg.max_order = a.max_order;
  cfg.validate();
  auto corpus = dcgen::load_domain_corpus(parse_named_paths(a.corpora), g.corpus());
  auto s = dcgen::build_stats(corpus, cfg, g.jobs);
  dcgen::save_snapshot(s, a.out);
  std::size_t unigrams = 0;
  for (const auto& [key, e] : s.entries()) unigrams += dcgen::ngram_order(key) == 1 ? 1 : 0;
  std::cout << "domains: " << s.domain_count() << "\n";
  for (auto d : s.registry().ids()) {
    std::cout << "  " << s.registry().name(d) << ": " << s.n_docs()[dcgen::to_index(d)] << " documents\n";
  }
  std::cout << "n-grams kept: " << s.size() << " (unigram vocabulary " << unigrams << ")\n"
            << "fingerprint: " << s.fingerprint() << "\n";
  return 0;
}

// orient ----------------------------------------------------------------------

struct OrientArgs {
  std::string stats;
  std::size_t k = 4;
  std::string overrides;
  std::vector<std::string> corpora;
  std::string out;
};

int cmd_orient(const OrientArgs& a, const Globals& g) {
  auto s = dcgen::load_snapshot(a.stats);
  dcgen::OrientationOverrides ov;
  if (!a.overrides.empty()) ov = dcgen::load_orientation_overrides(a.overrides);
  auto set = dcgen::build_orientations(s, a.k, ov, g.stemmer);
  std::optional<dcgen::CooccurrenceIndex> cooc;
  if (!a.corpora.empty()) cooc = dcgen::build_cooccurrence(load_for_snapshot(a.corpora, s, g.corpus()), set);
  for (auto d : set.registry().ids()) {
    std::cout << set.registry().name(d) << ":";
    for (const auto& desc : set.descriptors(d)) std::cout << " " << desc.word;
    std::cout << "\n";
  }
  if (!a.out.empty()) open_out(a.out) << dcgen::orientation_to_json(set, cooc ? &*cooc : nullptr).dump(2) << "\n";
  return 0;
}

// mask ------------------------------------------------------------------------

struct MaskArgs {
  std::string stats;
  std::string input;
  std::string domain;
  std::string to;
  bool training = false;
  std::string orientations;
  double extra = -1.0;  // negative: 0 at inference, 0.05 with --training
  std::optional<double> random_fraction;
  std::string out;
};

nlohmann::json template_json(const dcgen::MaskedTemplate& t, const dcgen::Document& doc,
                             const dcgen::DomainRegistry& reg) {
  nlohmann::json spans = nlohmann::json::array();
  for (const auto& s : t.masked_spans) {
    spans.push_back({{"begin", s.begin}, {"end", s.end}, {"key", s.key}, {"order", s.order},
                     {"score", s.score}, {"reason", dcgen::to_string(s.reason)}});
  }
  return {{"origin_id", doc.external_id.value_or(std::to_string(doc.id))},
          {"origin_domain", reg.name(t.origin_domain)},
          {"destination", reg.name(t.destination_domain)},
          {"text", doc.text},
          {"template", t.render()},
          {"token_count", t.token_count},
          {"slots", t.slot_count()},
          {"masked_spans", spans}};
}

int cmd_mask(const MaskArgs& a, const Globals& g) {
  auto s = dcgen::load_snapshot(a.stats);
  const auto origin = s.registry().id(dcgen::detail::ascii_lower(a.domain));
  auto docs = dcgen::load_corpus(a.input, origin, g.corpus());
  dcgen::CorruptionConfig cfg;
  cfg.tau = g.tau;
  cfg.seed = g.seed;
  cfg.extra_mask_fraction = a.extra >= 0.0 ? a.extra : (a.training ? 0.05 : 0.0);
  cfg.validate();
  std::optional<dcgen::LoadedOrientations> orient;
  if (a.training && !a.orientations.empty()) orient = orientations_for({a.orientations, 4}, s, g);
  if (!a.training && !a.random_fraction && a.to.empty()) {
    throw dcgen::ConfigError("mask needs --to, --training or --random-fraction");
  }
  auto out = open_out(a.out);
  std::vector<dcgen::MaskedTemplate> all;
  for (const auto& doc : docs) {
    dcgen::Rng rng = dcgen::derive_rng(g.seed, {doc.id, 0x6d61736bu});
    nlohmann::json row;
    if (a.random_fraction) {
      auto t = dcgen::mask_random(doc, *a.random_fraction, rng);
      if (!a.to.empty()) t.destination_domain = s.registry().id(dcgen::detail::ascii_lower(a.to));
      row = template_json(t, doc, s.registry());
      all.push_back(std::move(t));
    } else if (a.training) {
      auto [t, fake] = dcgen::mask_for_training(doc, s, cfg, rng);
      row = template_json(t, doc, s.registry());
      row["fake_destination"] = s.registry().name(fake);
      if (orient) {
        const auto& o = dcgen::sample_training_orientation(doc, orient->set, rng);
        row["orientation"] = o.word;
        row["orientation_index"] = o.index;
      }
      all.push_back(std::move(t));
    } else {
      auto t = dcgen::mask(doc, s.registry().id(dcgen::detail::ascii_lower(a.to)), s, cfg);
      row = template_json(t, doc, s.registry());
      all.push_back(std::move(t));
    }
    row["seed"] = g.seed;
    out << row.dump() << "\n";
  }
  std::cout << "masked " << all.size() << " documents";
  if (!all.empty()) std::cout << ", " << dcgen::masking_rate(all) << "% of tokens";
  std::cout << "\n";
  return 0;
}

// generate --------------------------------------------------------------------

struct GenerateArgs {
  std::string stats;
  std::string input;
  std::string domain;
  std::string to;
  OrientationArgs orientation;
  std::optional<std::size_t> orientation_index;
  std::string reconstructor;  // empty: external when --service is given, else native
  std::string service;
  double boost = 4.0;
  double timeout = 60.0;
  std::size_t max_in_flight = 4;
  std::string out;
};

int cmd_generate(const GenerateArgs& a, const Globals& g) {
  auto s = dcgen::load_snapshot(a.stats);
  const auto& reg = s.registry();
  const auto origin = reg.id(dcgen::detail::ascii_lower(a.domain));
  const auto dest = reg.id(dcgen::detail::ascii_lower(a.to));
  const std::string reconstructor =
      !a.reconstructor.empty() ? a.reconstructor : (a.service.empty() ? "native" : "external");
  std::optional<dcgen::GenerationClient> client;
  dcgen::ServiceConfig svc;
  if (reconstructor == "external") {
    svc.url = service_url(a.service);
    if (svc.url.empty()) {
      throw dcgen::ConfigError(std::string("external reconstruction needs --service or ") + kServiceEnv);
    }
    svc.timeout_seconds = a.timeout;
    svc.max_in_flight = a.max_in_flight;
    svc.corpus = g.corpus();
    client.emplace(svc);
  }
  auto orient = orientations_for(a.orientation, s, g);
  auto docs = dcgen::load_corpus(a.input, origin, g.corpus());
  dcgen::CorruptionConfig cfg;
  cfg.tau = g.tau;
  cfg.seed = g.seed;
  cfg.validate();
  const auto admitted = dcgen::score_admitted_words(s, dest, g.tau);
  std::vector<std::size_t> indices;
  if (a.orientation_index) {
    indices.push_back(*a.orientation_index);
  } else {
    for (std::size_t i = 0; i < orient.set.k(); ++i) indices.push_back(i);
  }

  struct Item {
    const dcgen::Document* doc;
    dcgen::MaskedTemplate t;
    dcgen::AllowedVocabulary v;
    const dcgen::OrientationDescriptor* o;
  };
  std::vector<Item> items;
  for (const auto& doc : docs) {
    auto t = dcgen::mask(doc, dest, s, cfg);
    for (auto i : indices) {
      items.push_back({&doc, t, dcgen::make_allowed_vocabulary(dest, g.tau, admitted, doc), &orient.set.at(dest, i)});
    }
  }
  std::vector<nlohmann::json> rows(items.size());
  auto row_for = [&](const Item& it, const std::string& text, bool degenerate, const std::string& version) {
    return nlohmann::json{{"origin_id", it.doc->external_id.value_or(std::to_string(it.doc->id))},
                          {"origin_domain", reg.name(origin)},
                          {"domain", reg.name(dest)},
                          {"label", it.doc->label ? nlohmann::json(*it.doc->label) : nlohmann::json(nullptr)},
                          {"original_text", it.doc->text},
                          {"template", it.t.render()},
                          {"orientation", it.o->word},
                          {"orientation_index", it.o->index},
                          {"text", text},
                          {"degenerate", degenerate},
                          {"model_version", version},
                          {"seed", g.seed}};
  };
  if (client) {
    std::vector<dcgen::GenerationRequest> reqs;
    for (const auto& it : items) reqs.push_back(dcgen::make_generation_request(it.t, *it.o, it.v, reg, svc));
    auto replies = client->generate_all(reqs);
    for (std::size_t i = 0; i < items.size(); ++i) {
      dcgen::check_generation_reply(items[i].t, items[i].v, replies[i], svc);
      rows[i] = row_for(items[i], replies[i].text, false, replies[i].model_version);
    }
  } else {
    dcgen::NativeFillOptions opts{reconstructor == "native", a.boost};
    dcgen::parallel_for(items.size(), g.jobs, [&](std::size_t i) {
      const auto& it = items[i];
      auto rng = dcgen::derive_rng(g.seed, {it.doc->id, dcgen::to_index(dest), it.o->index, 2});
      auto r = dcgen::fill_native(it.t, it.o, s, it.v, &orient.cooccurrence, rng, opts);
      rows[i] = row_for(it, r.text(), r.degenerate, "native");
    });
  }
  auto out = open_out(a.out);
  for (const auto& r : rows) out << r.dump() << "\n";
  std::cout << "generated " << rows.size() << " candidates toward " << reg.name(dest) << "\n";
  return 0;
}

// filter ----------------------------------------------------------------------

struct FilterArgs {
  std::string input;
  std::string classifier;
  std::vector<std::string> corpora;
  std::string save_classifier;
  std::size_t min_words = 4;
  double min_overlap = 0.25;
  bool no_domain_check = false;
  std::string out;
};

std::optional<dcgen::NaiveBayesModel> classifier_for(const std::string& file,
                                                     const std::vector<std::string>& corpora,
                                                     const std::string& save, const Globals& g,
                                                     const dcgen::DomainRegistry* expected) {
  std::optional<dcgen::NaiveBayesModel> m;
  if (!file.empty()) {
    m = dcgen::load_classifier(file);
  } else if (!corpora.empty()) {
    dcgen::DomainCorpus c = dcgen::load_domain_corpus(parse_named_paths(corpora), g.corpus());
    m = dcgen::train_domain_classifier(c, 1.0, g.corpus());
  }
  if (m && expected) {
    for (const auto& name : expected->names()) {
      if (!m->registry().find(name)) throw dcgen::ConfigError("classifier does not know domain '" + name + "'");
    }
  }
  if (m && !save.empty()) dcgen::save_classifier(*m, save);
  return m;
}

dcgen::FilterConfig filter_config(std::size_t min_words, double min_overlap, bool no_domain_check,
                                  const Globals& g) {
  dcgen::FilterConfig f;
  f.min_words = min_words;
  f.min_overlap = min_overlap;
  f.require_domain_agreement = !no_domain_check;
  f.tokenizer = g.corpus();
  f.validate();
  return f;
}

int cmd_filter(const FilterArgs& a, const Globals& g) {
  auto cfg = filter_config(a.min_words, a.min_overlap, a.no_domain_check, g);
  auto model = classifier_for(a.classifier, a.corpora, a.save_classifier, g, nullptr);
  if (cfg.require_domain_agreement && !model) {
    throw dcgen::ConfigError("domain checking needs --classifier or --corpus (or pass --no-domain-check)");
  }
  std::ifstream in(a.input);
  if (!in) throw dcgen::ConfigError("cannot open " + a.input);
  auto out = open_out(a.out);
  std::size_t total = 0, kept = 0, lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json row;
    std::string text, original, domain;
    try {
      row = nlohmann::json::parse(line);
      text = row.at("text").get<std::string>();
      original = row.at("original_text").get<std::string>();
      domain = row.at("domain").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw dcgen::ParseError(a.input, lineno, e.what());
    }
    auto doc = dcgen::make_document(0, dcgen::domain_at(0), original, g.corpus());
    dcgen::DomainId dest{};
    if (model) {
      auto id = model->registry().find(dcgen::detail::ascii_lower(domain));
      if (!id) throw dcgen::ParseError(a.input, lineno, "classifier does not know domain '" + domain + "'");
      dest = *id;
    }
    auto v = dcgen::apply_filter(text, dest, doc, model ? &*model : nullptr, cfg);
    row["accepted"] = v.accepted;
    row["reject_reasons"] = nlohmann::json::array();
    for (auto r : v.reasons) row["reject_reasons"].push_back(dcgen::to_string(r));
    row["overlap"] = v.overlap;
    row["predicted_domain"] = v.predicted ? nlohmann::json(model->registry().name(*v.predicted)) : nlohmann::json(nullptr);
    out << row.dump() << "\n";
    ++total;
    kept += v.accepted ? 1 : 0;
  }
  std::cout << "accepted " << kept << " of " << total << " candidates\n";
  return 0;
}

// augment ---------------------------------------------------------------------

struct AugmentArgs {
  std::string stats;
  OrientationArgs orientation;
  std::string input;
  std::string domain;
  std::vector<std::string> to;
  std::string mode = "docogen";
  std::vector<std::string> pool;
  std::string classifier;
  std::vector<std::string> corpora;
  std::string save_classifier;
  std::size_t min_words = 4;
  double min_overlap = 0.25;
  bool no_domain_check = false;
  bool filter = false;
  double random_fraction = 0.15;
  double boost = 4.0;
  std::string service;
  double timeout = 60.0;
  std::size_t max_in_flight = 4;
  std::size_t duplicate_originals = 1;
  std::string out;
  std::string manifest;
  std::string report;
};

int cmd_augment(const AugmentArgs& a, const Globals& g) {
  auto s = dcgen::load_snapshot(a.stats);
  const auto& reg = s.registry();
  const auto origin = reg.id(dcgen::detail::ascii_lower(a.domain));
  dcgen::GenerationPlan plan;
  plan.mode = dcgen::parse_generation_mode(a.mode);
  plan.k = a.orientation.k;
  plan.destinations = destinations_for(a.to, s, origin);
  plan.corruption.tau = g.tau;
  plan.corruption.seed = g.seed;
  plan.random_mask_fraction = a.random_fraction;
  plan.native.boost = a.boost;
  plan.seed = g.seed;
  plan.jobs = g.jobs;
  plan.duplicate_originals = a.duplicate_originals;
  const bool filtering = a.filter || plan.mode == dcgen::GenerationMode::kFDocogen;
  if (filtering) plan.filter = filter_config(a.min_words, a.min_overlap, a.no_domain_check, g);
  const std::string url = service_url(a.service);
  if (!a.service.empty() || (!url.empty() && (plan.mode == dcgen::GenerationMode::kDocogen ||
                                               plan.mode == dcgen::GenerationMode::kFDocogen ||
                                               plan.mode == dcgen::GenerationMode::kRmOv))) {
    plan.service = dcgen::ServiceConfig{};
    plan.service->url = url;
    plan.service->timeout_seconds = a.timeout;
    plan.service->max_in_flight = a.max_in_flight;
    plan.service->corpus = g.corpus();
  }

  auto orient = orientations_for(a.orientation, s, g);
  std::optional<dcgen::DomainCorpus> corpora;
  if (!a.corpora.empty()) corpora = load_for_snapshot(a.corpora, s, g.corpus());
  if (orient.cooccurrence.entries().empty() && corpora) {
    orient.cooccurrence = dcgen::build_cooccurrence(*corpora, orient.set);
  }
  std::optional<dcgen::NaiveBayesModel> model;
  if (filtering && plan.filter->require_domain_agreement) {
    if (!a.classifier.empty()) {
      model = classifier_for(a.classifier, {}, a.save_classifier, g, &reg);
    } else if (corpora) {
      model = dcgen::train_domain_classifier(*corpora, 1.0, g.corpus());
      if (!a.save_classifier.empty()) dcgen::save_classifier(*model, a.save_classifier);
    }
    if (model && !(model->registry() == reg)) {
      throw dcgen::ConfigError("classifier domains must match the snapshot's, in the same order");
    }
  }
  std::optional<dcgen::DomainCorpus> pool;
  if (!a.pool.empty()) {
    dcgen::DomainCorpus p{reg, std::vector<std::vector<dcgen::Document>>(reg.size())};
    dcgen::DocId next = 1u << 30;
    for (auto& [name, path] : parse_named_paths(a.pool)) {
      const auto d = reg.id(dcgen::detail::ascii_lower(name));
      auto docs = dcgen::load_corpus(path, d, g.corpus(), next);
      next += docs.size();
      for (auto& doc : docs) p.docs[dcgen::to_index(d)].push_back(std::move(doc));
    }
    pool = std::move(p);
  }
  auto labeled = dcgen::load_corpus(a.input, origin, g.corpus());
  auto ds = dcgen::augment(labeled, s, orient.set, plan,
                           {&orient.cooccurrence, model ? &*model : nullptr, pool ? &*pool : nullptr});
  dcgen::write_text_file(a.out, dcgen::dataset_jsonl(ds, reg));
  if (!a.manifest.empty()) dcgen::write_text_file(a.manifest, ds.manifest.dump(2) + "\n");
  auto r = dcgen::report(ds, s, g.corpus());
  if (!a.report.empty()) dcgen::write_text_file(a.report, r.to_json().dump(2) + "\n");
  std::cout << labeled.size() << " labeled examples, " << plan.candidates_per_example()
            << " candidates each, " << ds.candidates.size() << " generated, " << ds.accepted().size()
            << " accepted\n";
  return 0;
}

// report ----------------------------------------------------------------------

struct ReportArgs {
  std::string stats;
  std::string dataset;
  std::vector<std::string> corpora;
  double extra = 0.05;
  std::string out;
};

int cmd_report(const ReportArgs& a, const Globals& g) {
  auto s = dcgen::load_snapshot(a.stats);
  dcgen::AugmentedDataset ds;
  if (!a.dataset.empty()) ds = dcgen::read_dataset_jsonl(a.dataset, s.registry(), g.corpus());
  auto r = dcgen::report(ds, s, g.corpus());
  nlohmann::json j = r.to_json();
  if (!a.corpora.empty()) {
    dcgen::CorruptionConfig cfg = dcgen::CorruptionConfig::training();
    cfg.tau = g.tau;
    cfg.seed = g.seed;
    cfg.extra_mask_fraction = a.extra;
    cfg.validate();
    auto corpus = load_for_snapshot(a.corpora, s, g.corpus());
    auto matrix = dcgen::masking_rate_matrix(corpus, s, cfg, g.jobs);
    for (std::size_t o = 0; o < matrix.size(); ++o) {
      for (std::size_t d = 0; d < matrix.size(); ++d) {
        r.masking_rate[o][d] = matrix[o][d];
        r.template_count[o][d] = corpus.docs[o].size();
      }
    }
    j = r.to_json();
    j["masking_rate_source"] = "corpus";
    j["extra_mask_fraction"] = a.extra;
  } else {
    j["masking_rate_source"] = "dataset";
  }
  j["seed"] = g.seed;
  j["tau"] = g.tau;
  std::cout << r.to_text();
  if (!a.out.empty()) dcgen::write_text_file(a.out, j.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dcgen: domain-counterfactual generation for domain adaptation"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--tau", g.tau, "masking / vocabulary threshold, in (-1, 1)")
      ->check(CLI::Range(-1.0, 1.0))
      ->capture_default_str();
  app.add_option("--seed", g.seed, "random seed, recorded in outputs")->capture_default_str();
  app.add_option("--jobs", g.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--truncate", g.truncate, "tokens kept per document")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--stemmer", g.stemmer, "snowball-english or none")
      ->check(CLI::IsMember({"snowball-english", "none"}))
      ->capture_default_str();

  BuildStatsArgs bs;
  auto* build = app.add_subcommand("build-stats", "count n-gram document frequencies per domain");
  build->add_option("--corpus", bs.corpora, "domain corpus NAME=PATH (JSONL, repeat per domain)")
      ->required()
      ->check(kNamedExistingFile);
  build->add_option("--out", bs.out, "snapshot file to write")->required();
  build->add_option("--alpha", bs.alpha, "smoothing for uni/bi/trigrams")->delimiter(',')->expected(3)->capture_default_str();
  build->add_option("--min-df", bs.min_df, "minimum document frequency")->capture_default_str();
  build->add_option("--max-order", bs.max_order, "largest n-gram order")->check(CLI::Range(1, 3))->capture_default_str();

  OrientArgs oa;
  auto* orient = app.add_subcommand("orient", "choose K orientation words per domain");
  orient->add_option("--stats", oa.stats, "snapshot file")->required()->check(CLI::ExistingFile);
  orient->add_option("--k", oa.k, "descriptors per domain")->check(CLI::PositiveNumber)->capture_default_str();
  orient->add_option("--overrides", oa.overrides, "JSON: domain -> K-1 words")->check(CLI::ExistingFile);
  orient->add_option("--corpus", oa.corpora, "NAME=PATH corpora for co-occurrence sets")->check(kNamedExistingFile);
  orient->add_option("--out", oa.out, "orientation JSON to write");

  MaskArgs ma;
  auto* mask = app.add_subcommand("mask", "corrupt documents toward a destination domain");
  mask->add_option("--stats", ma.stats, "snapshot file")->required()->check(CLI::ExistingFile);
  mask->add_option("--input", ma.input, "JSONL documents")->required()->check(CLI::ExistingFile);
  mask->add_option("--domain", ma.domain, "domain of the input documents")->required();
  mask->add_option("--to", ma.to, "destination domain");
  mask->add_flag("--training", ma.training, "training masks: random fake destination, 5% extra noise");
  mask->add_option("--orientations", ma.orientations, "orientation JSON; with --training samples an orientation per row")
      ->check(CLI::ExistingFile);
  mask->add_option("--extra", ma.extra, "extra random mask fraction (default 0, or 0.05 with --training)");
  mask->add_option("--random-fraction", ma.random_fraction, "mask this fraction at random instead")->check(CLI::Range(0.0, 1.0));
  mask->add_option("--out", ma.out, "JSONL templates to write")->required();

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "mask and reconstruct documents toward a destination");
  gen->add_option("--stats", ga.stats, "snapshot file")->required()->check(CLI::ExistingFile);
  gen->add_option("--input", ga.input, "JSONL documents")->required()->check(CLI::ExistingFile);
  gen->add_option("--domain", ga.domain, "domain of the input documents")->required();
  gen->add_option("--to", ga.to, "destination domain")->required();
  gen->add_option("--orientations", ga.orientation.file, "orientation JSON from `orient`")->check(CLI::ExistingFile);
  gen->add_option("--k", ga.orientation.k, "descriptors per domain when no orientation file is given")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  gen->add_option("--orientation-index", ga.orientation_index, "only this descriptor (default: all K)");
  gen->add_option("--reconstructor", ga.reconstructor, "native, native-unoriented or external (default: external with --service, else native)")
      ->check(CLI::IsMember({"native", "native-unoriented", "external"}));
  gen->add_option("--service", ga.service, std::string("generation service URL (default $") + kServiceEnv + ")");
  gen->add_option("--boost", ga.boost, "weight multiplier for orientation co-occurring words")->capture_default_str();
  gen->add_option("--timeout", ga.timeout, "per-request timeout, seconds")->capture_default_str();
  gen->add_option("--max-in-flight", ga.max_in_flight, "concurrent service requests")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--out", ga.out, "JSONL candidates to write")->required();

  FilterArgs fa;
  auto* filt = app.add_subcommand("filter", "apply the length, overlap and domain rules to candidates");
  filt->add_option("--input", fa.input, "JSONL candidates (from generate)")->required()->check(CLI::ExistingFile);
  filt->add_option("--classifier", fa.classifier, "saved classifier JSON")->check(CLI::ExistingFile);
  filt->add_option("--corpus", fa.corpora, "NAME=PATH corpora to train the classifier on")->check(kNamedExistingFile);
  filt->add_option("--save-classifier", fa.save_classifier, "write the trained classifier here");
  filt->add_option("--min-words", fa.min_words, "minimum non-punctuation words")->capture_default_str();
  filt->add_option("--min-overlap", fa.min_overlap, "minimum share of original stems kept")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  filt->add_flag("--no-domain-check", fa.no_domain_check, "skip the classifier agreement rule");
  filt->add_option("--out", fa.out, "JSONL with verdicts")->required();

  AugmentArgs aa;
  auto* aug = app.add_subcommand("augment", "build an augmented labeled dataset");
  aug->add_option("--stats", aa.stats, "snapshot file")->required()->check(CLI::ExistingFile);
  aug->add_option("--input", aa.input, "labeled JSONL examples")->required()->check(CLI::ExistingFile);
  aug->add_option("--domain", aa.domain, "domain of the labeled examples")->required();
  aug->add_option("--to", aa.to, "destination domain (repeat; default all others)");
  aug->add_option("--mode", aa.mode, "docogen, f-docogen, no-ov, rm-ov, rm-rr or oracle")
      ->check(CLI::IsMember({"docogen", "f-docogen", "no-ov", "rm-ov", "rm-rr", "oracle"}))
      ->capture_default_str();
  aug->add_option("--k", aa.orientation.k, "orientations per destination")->check(CLI::PositiveNumber)->capture_default_str();
  aug->add_option("--orientations", aa.orientation.file, "orientation JSON from `orient`")->check(CLI::ExistingFile);
  aug->add_option("--corpus", aa.corpora, "NAME=PATH unlabeled corpora (classifier, co-occurrence)")->check(kNamedExistingFile);
  aug->add_option("--pool", aa.pool, "NAME=PATH labeled target examples for oracle mode")->check(kNamedExistingFile);
  aug->add_option("--classifier", aa.classifier, "saved classifier JSON")->check(CLI::ExistingFile);
  aug->add_option("--save-classifier", aa.save_classifier, "write the trained classifier here");
  aug->add_flag("--filter", aa.filter, "filter candidates in any mode (always on for f-docogen)");
  aug->add_option("--min-words", aa.min_words, "filter: minimum words")->capture_default_str();
  aug->add_option("--min-overlap", aa.min_overlap, "filter: minimum overlap")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  aug->add_flag("--no-domain-check", aa.no_domain_check, "filter: skip classifier agreement");
  aug->add_option("--random-fraction", aa.random_fraction, "mask fraction for rm-ov / rm-rr")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  aug->add_option("--boost", aa.boost, "native filler orientation boost")->capture_default_str();
  aug->add_option("--service", aa.service, std::string("generation service URL (default $") + kServiceEnv + ")");
  aug->add_option("--timeout", aa.timeout, "per-request timeout, seconds")->capture_default_str();
  aug->add_option("--max-in-flight", aa.max_in_flight, "concurrent service requests")->check(CLI::PositiveNumber)->capture_default_str();
  aug->add_option("--duplicate-originals", aa.duplicate_originals, "write each original this many times")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  aug->add_option("--out", aa.out, "dataset JSONL to write")->required();
  aug->add_option("--manifest", aa.manifest, "manifest JSON to write");
  aug->add_option("--report", aa.report, "report JSON to write");

  ReportArgs ra;
  auto* rep = app.add_subcommand("report", "masking-rate matrix and filter summary");
  rep->add_option("--stats", ra.stats, "snapshot file")->required()->check(CLI::ExistingFile);
  rep->add_option("--dataset", ra.dataset, "dataset JSONL from augment")->check(CLI::ExistingFile);
  rep->add_option("--corpus", ra.corpora, "NAME=PATH corpora: compute the full masking matrix")->check(kNamedExistingFile);
  rep->add_option("--extra", ra.extra, "extra random mask fraction used with --corpus")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  rep->add_option("--out", ra.out, "report JSON to write");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (!(g.tau > -1.0 && g.tau < 1.0)) {
    std::cerr << "dcgen: --tau must lie strictly inside (-1, 1)\n";
    return 2;
  }
  try {
    if (*build) return cmd_build_stats(bs, g);
    if (*orient) return cmd_orient(oa, g);
    if (*mask) return cmd_mask(ma, g);
    if (*gen) return cmd_generate(ga, g);
    if (*filt) return cmd_filter(fa, g);
    if (*aug) return cmd_augment(aa, g);
    if (*rep) return cmd_report(ra, g);
  } catch (const dcgen::TransportError& e) {
    std::cerr << "dcgen: transport error: " << e.what() << "\n";
    return 3;
  } catch (const dcgen::ConfigError& e) {
    std::cerr << "dcgen: " << e.what() << "\n";
    return 2;
  } catch (const dcgen::ParseError& e) {
    std::cerr << "dcgen: " << e.what() << "\n";
    return 2;
  } catch (const dcgen::Error& e) {
    std::cerr << "dcgen: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
