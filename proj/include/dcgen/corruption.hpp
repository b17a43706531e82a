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

// Domain corruption: hierarchical n-gram masking M(x) toward a destination
// domain, the random maskers used by the ablations, and masking-rate
// accounting.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iterator>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dcgen/corpus.hpp"
#include "dcgen/domain_stats.hpp"
#include "dcgen/errors.hpp"
#include "dcgen/random.hpp"

namespace dcgen {

struct CorruptionConfig {
  double tau = 0.08;
  // Fraction of each example's tokens masked at random after the threshold
  // passes. 0 at inference; see training().
  double extra_mask_fraction = 0.0;
  std::size_t max_order = 3;
  std::uint64_t seed = 0;

  static CorruptionConfig training() {
    CorruptionConfig c;
    c.extra_mask_fraction = 0.05;
    return c;
  }

  void validate() const {
    if (!(tau > -1.0 && tau < 1.0)) throw ConfigError("tau must lie in (-1, 1)");
    if (!(extra_mask_fraction >= 0.0 && extra_mask_fraction <= 1.0)) {
      throw ConfigError("extra mask fraction must lie in [0, 1]");
    }
    if (max_order < 1 || max_order > 3) throw ConfigError("max order must be in 1..3");
  }
};

enum class MaskReason { kThreshold, kExtraNoise };

inline const char* to_string(MaskReason r) {
  return r == MaskReason::kThreshold ? "threshold" : "extra-noise";
}

struct MaskedSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string key;
  std::size_t order = 1;
  double score = 0.0;
  MaskReason reason = MaskReason::kThreshold;
  std::vector<std::string> surface;

  std::size_t size() const noexcept { return end - begin; }
};

struct KeepSegment {
  std::size_t begin = 0;
  std::vector<std::string> tokens;
};

struct SlotSegment {
  std::size_t index = 0;
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
};

using Segment = std::variant<KeepSegment, SlotSegment>;

// A corrupted example: kept token runs interleaved with numbered fill slots.
// Adjacent masked positions share one slot even when they come from
// different masked spans.
struct MaskedTemplate {
  DocId origin_doc = 0;
  DomainId origin_domain{};
  DomainId destination_domain{};
  std::size_t token_count = 0;
  std::vector<Segment> segments;
  std::vector<MaskedSpan> masked_spans;  // ordered by position

  std::size_t slot_count() const {
    return static_cast<std::size_t>(std::count_if(segments.begin(), segments.end(), [](const Segment& s) {
      return std::holds_alternative<SlotSegment>(s);
    }));
  }

  std::size_t masked_token_count() const {
    std::size_t n = 0;
    for (const auto& s : masked_spans) n += s.size();
    return n;
  }

  std::vector<const SlotSegment*> slots() const {
    std::vector<const SlotSegment*> out;
    for (const auto& s : segments) {
      if (const auto* slot = std::get_if<SlotSegment>(&s)) out.push_back(slot);
    }
    return out;
  }

  // Kept tokens joined by spaces, slots rendered as <extra_id_k>.
  std::string render() const {
    std::string out;
    auto append = [&](const std::string& piece) {
      if (!out.empty()) out += ' ';
      out += piece;
    };
    for (const auto& seg : segments) {
      if (const auto* keep = std::get_if<KeepSegment>(&seg)) {
        for (const auto& t : keep->tokens) append(t);
      } else {
        append(sentinel(std::get<SlotSegment>(seg).index));
      }
    }
    return out;
  }

  // Only the kept tokens, space-joined: what a zero-slot template renders to.
  std::string kept_text() const {
    std::string out;
    for (const auto& seg : segments) {
      if (const auto* keep = std::get_if<KeepSegment>(&seg)) {
        for (const auto& t : keep->tokens) {
          if (!out.empty()) out += ' ';
          out += t;
        }
      }
    }
    return out;
  }

  // Kept runs and masked surface spans merged back in position order.
  std::vector<std::string> original_tokens() const {
    std::vector<std::string> out(token_count);
    for (const auto& seg : segments) {
      if (const auto* keep = std::get_if<KeepSegment>(&seg)) {
        std::copy(keep->tokens.begin(), keep->tokens.end(),
                  out.begin() + static_cast<std::ptrdiff_t>(keep->begin));
      }
    }
    for (const auto& span : masked_spans) {
      std::copy(span.surface.begin(), span.surface.end(),
                out.begin() + static_cast<std::ptrdiff_t>(span.begin));
    }
    return out;
  }

  static std::string sentinel(std::size_t k) { return "<extra_id_" + std::to_string(k) + ">"; }
};

namespace detail {

inline MaskedTemplate assemble_template(const Document& doc, DomainId destination,
                                        std::vector<MaskedSpan> spans) {
  MaskedTemplate t;
  t.origin_doc = doc.id;
  t.origin_domain = doc.domain;
  t.destination_domain = destination;
  t.token_count = doc.surface.size();
  std::sort(spans.begin(), spans.end(),
            [](const MaskedSpan& a, const MaskedSpan& b) { return a.begin < b.begin; });
  std::vector<bool> masked(t.token_count, false);
  for (auto& span : spans) {
    span.surface.assign(doc.surface.begin() + static_cast<std::ptrdiff_t>(span.begin),
                        doc.surface.begin() + static_cast<std::ptrdiff_t>(span.end));
    for (std::size_t i = span.begin; i < span.end; ++i) masked[i] = true;
  }
  t.masked_spans = std::move(spans);
  std::size_t i = 0;
  std::size_t slot = 0;
  while (i < t.token_count) {
    std::size_t j = i;
    while (j < t.token_count && masked[j] == masked[i]) ++j;
    if (masked[i]) {
      t.segments.emplace_back(SlotSegment{slot++, i, j});
    } else {
      t.segments.emplace_back(KeepSegment{
          i, {doc.surface.begin() + static_cast<std::ptrdiff_t>(i),
              doc.surface.begin() + static_cast<std::ptrdiff_t>(j)}});
    }
    i = j;
  }
  return t;
}

// Masks `count` currently unmasked positions chosen uniformly at random.
inline void add_random_positions(const Document& doc, std::vector<bool>& masked,
                                 std::size_t count, Rng& rng,
                                 const std::function<double(std::size_t)>& score,
                                 std::vector<MaskedSpan>& spans) {
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < masked.size(); ++i) {
    if (!masked[i]) free.push_back(i);
  }
  std::vector<std::size_t> chosen;
  std::sample(free.begin(), free.end(), std::back_inserter(chosen),
              std::min(count, free.size()), rng);
  for (std::size_t i : chosen) {
    masked[i] = true;
    spans.push_back({i, i + 1, doc.stems[i], 1, score(i), MaskReason::kExtraNoise, {}});
  }
}

inline std::size_t rounded_count(double fraction, std::size_t total) {
  return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total)));
}

}  // namespace detail

// Hierarchical masking with an explicit random stream (used only for the
// extra-noise positions).
inline MaskedTemplate mask_with_rng(const Document& doc, DomainId destination,
                                    const StatsSnapshot& snapshot,
                                    const CorruptionConfig& config, Rng& rng) {
  config.validate();
  if (!snapshot.registry().contains(destination)) {
    throw ConfigError("unknown destination domain id " + std::to_string(to_index(destination)));
  }
  if (!snapshot.registry().contains(doc.domain)) {
    throw ConfigError("document domain is not in the snapshot registry");
  }
  const std::size_t n = doc.stems.size();
  std::vector<bool> masked(n, false);
  std::vector<MaskedSpan> spans;

  struct Candidate {
    double score;
    std::size_t begin;
    std::string key;
  };
  for (std::size_t order = 1; order <= config.max_order; ++order) {
    std::vector<Candidate> candidates;
    for (std::size_t b = 0; b + order <= n; ++b) {
      bool clear = true;
      for (std::size_t k = b; k < b + order && clear; ++k) clear = !masked[k];
      if (!clear) continue;
      std::string key = join_key(doc.stems, b, b + order);
      const double m = masking_score(snapshot, key, doc.domain, destination);
      if (m > config.tau) candidates.push_back({m, b, std::move(key)});
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) {
                       return a.score != b.score ? a.score > b.score : a.begin < b.begin;
                     });
    for (auto& c : candidates) {
      bool clear = true;
      for (std::size_t k = c.begin; k < c.begin + order && clear; ++k) clear = !masked[k];
      if (!clear) continue;  // overlaps a span taken earlier in this pass
      for (std::size_t k = c.begin; k < c.begin + order; ++k) masked[k] = true;
      spans.push_back({c.begin, c.begin + order, std::move(c.key), order, c.score,
                       MaskReason::kThreshold, {}});
    }
  }

  if (config.extra_mask_fraction > 0.0) {
    detail::add_random_positions(
        doc, masked, detail::rounded_count(config.extra_mask_fraction, n), rng,
        [&](std::size_t i) {
          return masking_score(snapshot, doc.stems[i], doc.domain, destination);
        },
        spans);
  }
  return detail::assemble_template(doc, destination, std::move(spans));
}

// Masks doc toward `destination`. The random stream for extra noise is
// derived from (config.seed, doc id, destination), so the result depends on
// nothing else.
inline MaskedTemplate mask(const Document& doc, DomainId destination,
                           const StatsSnapshot& snapshot, const CorruptionConfig& config) {
  Rng rng = derive_rng(config.seed, {doc.id, to_index(destination)});
  return mask_with_rng(doc, destination, snapshot, config, rng);
}

// Training-time corruption: origin and destination coincide, so the masking
// score would vanish; a different domain is drawn uniformly to score against,
// and the reconstruction target stays the origin domain.
inline std::pair<MaskedTemplate, DomainId> mask_for_training(const Document& doc,
                                                             const StatsSnapshot& snapshot,
                                                             const CorruptionConfig& config,
                                                             Rng& rng) {
  const std::size_t n = snapshot.domain_count();
  if (n < 2) throw ConfigError("training masking needs at least two domains");
  if (!snapshot.registry().contains(doc.domain)) {
    throw ConfigError("document domain is not in the snapshot registry");
  }
  std::uniform_int_distribution<std::size_t> pick(0, n - 2);
  std::size_t k = pick(rng);
  if (k >= to_index(doc.domain)) ++k;
  const DomainId fake = domain_at(k);
  MaskedTemplate t = mask_with_rng(doc, fake, snapshot, config, rng);
  t.destination_domain = doc.domain;
  return {std::move(t), fake};
}

// Masks round(fraction * T) uniformly random positions.
inline MaskedTemplate mask_random(const Document& doc, double fraction, Rng& rng) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw ConfigError("mask fraction must lie in [0, 1]");
  }
  std::vector<bool> masked(doc.stems.size(), false);
  std::vector<MaskedSpan> spans;
  detail::add_random_positions(doc, masked,
                               detail::rounded_count(fraction, doc.stems.size()), rng,
                               [](std::size_t) { return 0.0; }, spans);
  return detail::assemble_template(doc, doc.domain, std::move(spans));
}

// 100 * masked positions / token positions over a collection.
inline double masking_rate(const std::vector<MaskedTemplate>& templates) {
  if (templates.empty()) throw UndefinedInputError("masking rate of an empty collection");
  std::size_t masked = 0, total = 0;
  for (const auto& t : templates) {
    masked += t.masked_token_count();
    total += t.token_count;
  }
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(masked) / static_cast<double>(total);
}

}  // namespace dcgen
