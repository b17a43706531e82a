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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dcgen {

// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or violated precondition on caller-supplied inputs.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A corpus record that cannot be parsed. Carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::string path, std::size_t line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const noexcept { return path_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

// Corrupted, truncated or version-mismatched serialized artifact.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Input on which a quantity is undefined (empty collections, empty documents).
class UndefinedInputError : public Error {
 public:
  using Error::Error;
};

// Network failure or timeout talking to the generation service. Retriable.
class TransportError : public Error {
 public:
  using Error::Error;
};

// The generation service reported a failure. Not retriable.
class GenerationError : public Error {
 public:
  GenerationError(int status, const std::string& what)
      : Error("generation service error (" + std::to_string(status) +
              "): " + what),
        status_(status) {}

  int status() const noexcept { return status_; }

 private:
  int status_;
};

// The generation service replied with a body that breaks the wire contract.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// A generated text used words outside the allowed vocabulary.
class VocabularyViolation : public Error {
 public:
  explicit VocabularyViolation(std::vector<std::string> words)
      : Error(describe(words)), words_(std::move(words)) {}

  const std::vector<std::string>& words() const noexcept { return words_; }

 private:
  static std::string describe(const std::vector<std::string>& words) {
    std::string msg = "generated words outside the allowed vocabulary:";
    for (const auto& w : words) msg += " " + w;
    return msg;
  }

  std::vector<std::string> words_;
};

}  // namespace dcgen
