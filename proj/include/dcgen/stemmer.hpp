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

// English Snowball stemmer (the classic "Porter2" algorithm).
//
// Input is expected to be lowercase. Bytes outside ASCII are treated as
// consonants, so UTF-8 words pass through without being split.

#include <array>
#include <string>
#include <string_view>
#include <utility>

namespace dcgen {

namespace porter2_detail {

inline bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}

inline bool ends_with(const std::string& w, std::string_view s) {
  return w.size() >= s.size() &&
         std::string_view(w).substr(w.size() - s.size()) == s;
}

// Working state: the word plus the start offsets of regions R1 and R2.
struct Word {
  std::string s;
  std::size_t r1 = 0;
  std::size_t r2 = 0;

  bool in_r1(std::size_t suffix_len) const {
    return s.size() >= suffix_len && s.size() - suffix_len >= r1;
  }
  bool in_r2(std::size_t suffix_len) const {
    return s.size() >= suffix_len && s.size() - suffix_len >= r2;
  }
  void replace(std::size_t suffix_len, std::string_view with) {
    s.resize(s.size() - suffix_len);
    s.append(with);
  }
};

// Offset just past the first non-vowel that follows a vowel, at or after
// `from`; the word length when there is none.
inline std::size_t region_start(const std::string& w, std::size_t from) {
  for (std::size_t i = from + 1; i < w.size(); ++i) {
    if (!is_vowel(w[i]) && is_vowel(w[i - 1])) return i + 1;
  }
  return w.size();
}

// True when the word ends in a short syllable.
inline bool ends_short_syllable(const std::string& w) {
  const std::size_t n = w.size();
  if (n == 2) return is_vowel(w[0]) && !is_vowel(w[1]);
  if (n < 3) return false;
  const char last = w[n - 1];
  return !is_vowel(w[n - 3]) && is_vowel(w[n - 2]) && !is_vowel(last) &&
         last != 'w' && last != 'x' && last != 'Y';
}

// Longest suffix of `w` out of `suffixes`; empty view when none matches.
template <std::size_t N>
std::string_view longest_suffix(const std::string& w,
                                const std::array<std::string_view, N>& suffixes) {
  std::string_view best;
  for (auto suf : suffixes) {
    if (suf.size() > best.size() && ends_with(w, suf)) best = suf;
  }
  return best;
}

inline bool exception1(std::string& w) {
  static constexpr std::array<std::pair<std::string_view, std::string_view>, 18>
      kExceptions{{{"skis", "ski"},     {"skies", "sky"},   {"dying", "die"},
                   {"lying", "lie"},    {"tying", "tie"},   {"idly", "idl"},
                   {"gently", "gentl"}, {"ugly", "ugli"},   {"early", "earli"},
                   {"only", "onli"},    {"singly", "singl"}, {"sky", "sky"},
                   {"news", "news"},    {"howe", "howe"},   {"atlas", "atlas"},
                   {"cosmos", "cosmos"}, {"bias", "bias"},  {"andes", "andes"}}};
  for (const auto& [from, to] : kExceptions) {
    if (w == from) {
      w = std::string(to);
      return true;
    }
  }
  return false;
}

inline bool exception2(const std::string& w) {
  static constexpr std::array<std::string_view, 8> kInvariant{
      "inning", "outing", "canning", "herring",
      "earring", "proceed", "exceed", "succeed"};
  for (auto x : kInvariant) {
    if (w == x) return true;
  }
  return false;
}

inline void step0(Word& w) {
  static constexpr std::array<std::string_view, 3> kSuffixes{"'s'", "'s", "'"};
  auto suf = longest_suffix(w.s, kSuffixes);
  if (!suf.empty()) w.replace(suf.size(), "");
}

inline void step1a(Word& w) {
  static constexpr std::array<std::string_view, 6> kSuffixes{
      "sses", "ied", "ies", "s", "us", "ss"};
  auto suf = longest_suffix(w.s, kSuffixes);
  if (suf == "sses") {
    w.replace(4, "ss");
  } else if (suf == "ied" || suf == "ies") {
    w.replace(3, w.s.size() > 4 ? "i" : "ie");
  } else if (suf == "s") {
    // Needs a vowel somewhere before the letter preceding the "s".
    for (std::size_t i = 0; i + 2 < w.s.size(); ++i) {
      if (is_vowel(w.s[i])) {
        w.replace(1, "");
        break;
      }
    }
  }
}

inline void step1b(Word& w) {
  static constexpr std::array<std::string_view, 6> kSuffixes{
      "eed", "eedly", "ed", "edly", "ing", "ingly"};
  auto suf = longest_suffix(w.s, kSuffixes);
  if (suf.empty()) return;
  if (suf == "eed" || suf == "eedly") {
    if (w.in_r1(suf.size())) w.replace(suf.size(), "ee");
    return;
  }
  const std::size_t stem_len = w.s.size() - suf.size();
  bool has_vowel = false;
  for (std::size_t i = 0; i < stem_len; ++i) has_vowel |= is_vowel(w.s[i]);
  if (!has_vowel) return;
  w.replace(suf.size(), "");
  if (ends_with(w.s, "at") || ends_with(w.s, "bl") || ends_with(w.s, "iz")) {
    w.s += 'e';
  } else if (w.s.size() >= 2 && w.s.back() == w.s[w.s.size() - 2] &&
             std::string_view("bdfgmnprt").find(w.s.back()) !=
                 std::string_view::npos) {
    w.s.pop_back();
  } else if (w.r1 >= w.s.size() && ends_short_syllable(w.s)) {
    w.s += 'e';
  }
}

inline void step1c(Word& w) {
  const std::size_t n = w.s.size();
  if (n > 2 && (w.s[n - 1] == 'y' || w.s[n - 1] == 'Y') && !is_vowel(w.s[n - 2])) {
    w.s[n - 1] = 'i';
  }
}

// What happens to R2 when a step 2/3 suffix is rewritten but was not wholly
// inside R2. The reference implementation tracks regions as strings and
// resets them in these cases; kept so stems agree with it exactly
// ("quantization" -> "quantize", not "quantiz").
enum class R2Fallback { kKeep, kEmpty, kFinalE };

struct SuffixRule {
  std::string_view suffix;
  std::string_view replacement;
  R2Fallback fallback;
};

template <std::size_t N>
const SuffixRule* longest_rule(const std::string& w,
                               const std::array<SuffixRule, N>& rules) {
  const SuffixRule* best = nullptr;
  for (const auto& rule : rules) {
    if (ends_with(w, rule.suffix) &&
        (!best || rule.suffix.size() > best->suffix.size())) {
      best = &rule;
    }
  }
  return best;
}

inline void apply_rule(Word& w, const SuffixRule& rule) {
  const bool was_in_r2 = w.in_r2(rule.suffix.size());
  w.replace(rule.suffix.size(), rule.replacement);
  if (was_in_r2) return;
  switch (rule.fallback) {
    case R2Fallback::kKeep:
      break;
    case R2Fallback::kEmpty:
      w.r2 = w.s.size();
      break;
    case R2Fallback::kFinalE:
      w.r2 = w.s.size() - 1;
      break;
  }
}

inline void step2(Word& w) {
  using enum R2Fallback;
  static constexpr std::array<SuffixRule, 24> kRules{{
      {"tional", "tion", kKeep},    {"enci", "ence", kKeep},
      {"anci", "ance", kKeep},      {"abli", "able", kKeep},
      {"entli", "ent", kKeep},      {"izer", "ize", kEmpty},
      {"ization", "ize", kEmpty},   {"ational", "ate", kFinalE},
      {"ation", "ate", kFinalE},    {"ator", "ate", kFinalE},
      {"alism", "al", kEmpty},      {"aliti", "al", kEmpty},
      {"alli", "al", kEmpty},       {"fulness", "ful", kKeep},
      {"ousli", "ous", kEmpty},     {"ousness", "ous", kEmpty},
      {"iveness", "ive", kFinalE},  {"iviti", "ive", kFinalE},
      {"biliti", "ble", kEmpty},    {"bli", "ble", kEmpty},
      {"ogi", "og", kKeep},         {"fulli", "ful", kKeep},
      {"lessli", "less", kKeep},    {"li", "", kKeep}}};
  const SuffixRule* rule = longest_rule(w.s, kRules);
  if (!rule || !w.in_r1(rule->suffix.size())) return;
  const std::size_t n = w.s.size();
  if (rule->suffix == "ogi" && !(n >= 4 && w.s[n - 4] == 'l')) return;
  if (rule->suffix == "li" &&
      !(n >= 3 && std::string_view("cdeghkmnrt").find(w.s[n - 3]) !=
                      std::string_view::npos)) {
    return;
  }
  apply_rule(w, *rule);
}

inline void step3(Word& w) {
  using enum R2Fallback;
  static constexpr std::array<SuffixRule, 9> kRules{{
      {"tional", "tion", kKeep}, {"ational", "ate", kEmpty},
      {"alize", "al", kKeep},    {"icate", "ic", kEmpty},
      {"iciti", "ic", kEmpty},   {"ical", "ic", kEmpty},
      {"ful", "", kKeep},        {"ness", "", kKeep},
      {"ative", "", kKeep}}};
  const SuffixRule* rule = longest_rule(w.s, kRules);
  if (!rule || !w.in_r1(rule->suffix.size())) return;
  if (rule->suffix == "ative" && !w.in_r2(5)) return;
  apply_rule(w, *rule);
}

inline void step4(Word& w) {
  static constexpr std::array<std::string_view, 18> kSuffixes{
      "al",  "ance", "ence", "er",  "ic",  "able", "ible", "ant", "ement",
      "ment", "ent", "ism",  "ate", "iti", "ous",  "ive",  "ize", "ion"};
  auto suf = longest_suffix(w.s, kSuffixes);
  if (suf.empty() || !w.in_r2(suf.size())) return;
  if (suf == "ion") {
    const std::size_t n = w.s.size();
    if (n < 4 || (w.s[n - 4] != 's' && w.s[n - 4] != 't')) return;
  }
  w.replace(suf.size(), "");
}

inline void step5(Word& w) {
  if (w.s.empty()) return;
  if (w.s.back() == 'e') {
    if (w.in_r2(1)) {
      w.s.pop_back();
    } else if (w.in_r1(1) && !ends_short_syllable(w.s.substr(0, w.s.size() - 1))) {
      w.s.pop_back();
    }
  } else if (w.s.back() == 'l') {
    if (w.in_r2(1) && w.s.size() >= 2 && w.s[w.s.size() - 2] == 'l') w.s.pop_back();
  }
}

}  // namespace porter2_detail

// Stems one lowercase word. Words of one or two bytes come back unchanged.
inline std::string stem_english(std::string_view word) {
  using namespace porter2_detail;
  Word w{std::string(word)};
  if (w.s.size() <= 2) return w.s;
  if (exception1(w.s)) return w.s;
  if (w.s.front() == '\'') w.s.erase(0, 1);
  if (w.s.empty()) return w.s;

  if (w.s[0] == 'y') w.s[0] = 'Y';
  for (std::size_t i = 1; i < w.s.size(); ++i) {
    if (w.s[i] == 'y' && is_vowel(w.s[i - 1])) w.s[i] = 'Y';
  }

  if (w.s.starts_with("gener") || w.s.starts_with("arsen")) {
    w.r1 = 5;
  } else if (w.s.starts_with("commun")) {
    w.r1 = 6;
  } else {
    w.r1 = region_start(w.s, 0);
  }
  w.r2 = region_start(w.s, w.r1);

  step0(w);
  step1a(w);
  if (!exception2(w.s)) {
    step1b(w);
    step1c(w);
    step2(w);
    step3(w);
    step4(w);
    step5(w);
  }
  for (auto& c : w.s) {
    if (c == 'Y') c = 'y';
  }
  return w.s;
}

}  // namespace dcgen
