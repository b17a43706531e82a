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

// Snapshot files: the canonical body followed by its 32-byte SHA-256.

#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "dcgen/binary_io.hpp"
#include "dcgen/domain_stats.hpp"
#include "dcgen/errors.hpp"

namespace dcgen {

inline std::string encode_snapshot(const StatsSnapshot& s) {
  std::string body = detail::encode_snapshot_body(s);
  const auto digest = sha256(body);
  body.append(reinterpret_cast<const char*>(digest.data()), digest.size());
  return body;
}

inline StatsSnapshot decode_snapshot(std::string_view bytes) {
  if (bytes.size() < detail::kSnapshotMagic.size() + 32) {
    throw FormatError("snapshot file is truncated");
  }
  if (bytes.substr(0, detail::kSnapshotMagic.size()) != detail::kSnapshotMagic) {
    throw FormatError("not a snapshot file (bad magic)");
  }
  const std::string_view body = bytes.substr(0, bytes.size() - 32);
  ByteReader r(body);
  r.get_raw(detail::kSnapshotMagic.size());
  const auto version = r.get<std::uint32_t>();
  if (version != detail::kSnapshotVersion) {
    throw FormatError("unsupported snapshot version " + std::to_string(version));
  }
  const auto digest = sha256(body);
  if (bytes.substr(body.size()) !=
      std::string_view(reinterpret_cast<const char*>(digest.data()), digest.size())) {
    throw FormatError("snapshot checksum mismatch (file corrupted or truncated)");
  }

  StatsConfig cfg;
  cfg.max_order = r.get<std::uint8_t>();
  for (auto& a : cfg.alpha) a = r.get<double>();
  cfg.min_doc_frequency = r.get<std::uint32_t>();
  const auto n = r.get<std::uint32_t>();
  if (n < 2 || n > r.remaining()) throw FormatError("bad domain count");
  std::vector<std::string> names;
  std::vector<std::uint64_t> n_docs;
  for (std::uint32_t i = 0; i < n; ++i) {
    names.push_back(r.get_string());
    n_docs.push_back(r.get<std::uint64_t>());
  }
  if (cfg.max_order < 1 || cfg.max_order > 3) throw FormatError("bad max order");

  DocFreqTable table;
  for (std::size_t order = 1; order <= cfg.max_order; ++order) {
    if (r.get<std::uint8_t>() != order) throw FormatError("n-gram sections out of order");
    const double alpha = r.get<double>();
    if (alpha != cfg.alpha_for(order)) {
      throw FormatError("smoothing value of order " + std::to_string(order) +
                        " disagrees with the header");
    }
    const auto count = r.get<std::uint64_t>();
    if (count > r.remaining()) throw FormatError("bad entry count");
    for (std::uint64_t k = 0; k < count; ++k) {
      std::string key = r.get_string();
      if (ngram_order(key) != order) throw FormatError("n-gram filed under the wrong order");
      std::vector<std::uint32_t> df(n);
      for (auto& c : df) c = r.get<std::uint32_t>();
      if (!table.emplace(std::move(key), std::move(df)).second) {
        throw FormatError("duplicate n-gram key");
      }
    }
  }
  std::map<std::string, std::string, std::less<>> surfaces;
  const auto n_surfaces = r.get<std::uint64_t>();
  if (n_surfaces > r.remaining()) throw FormatError("bad surface-form count");
  for (std::uint64_t k = 0; k < n_surfaces; ++k) {
    std::string key = r.get_string();
    surfaces.emplace(std::move(key), r.get_string());
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes after snapshot body");

  try {
    StatsSnapshot s(DomainRegistry(std::move(names)), std::move(n_docs), cfg, table,
                    std::move(surfaces));
    if (std::string_view(s.fingerprint()) != to_hex(digest)) {
      throw FormatError("snapshot body is not in canonical form");
    }
    return s;
  } catch (const ConfigError& e) {
    throw FormatError(std::string("invalid snapshot contents: ") + e.what());
  }
}

inline void save_snapshot(const StatsSnapshot& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write snapshot file '" + path + "'");
  const std::string bytes = encode_snapshot(s);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("failed writing snapshot file '" + path + "'");
}

inline StatsSnapshot load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open snapshot file '" + path + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

}  // namespace dcgen
