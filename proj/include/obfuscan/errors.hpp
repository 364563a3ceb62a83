/*
 * Copyright (C) 2026 The Obfuscan Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace obfuscan {

/// Base class for every typed error the toolkit raises. Analysis entry
/// points never let anything else escape on malformed input.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- container / bytecode ingestion ---

class CorruptArchive : public Error {
 public:
  using Error::Error;
};

class BadMagic : public Error {
 public:
  using Error::Error;
};

class UnsupportedVersion : public Error {
 public:
  using Error::Error;
};

class TruncatedSection : public Error {
 public:
  TruncatedSection(std::string section, const std::string& what)
      : Error(section + ": " + what), section_(std::move(section)) {}
  const std::string& section() const { return section_; }

 private:
  std::string section_;
};

class MalformedUleb128 : public Error {
 public:
  using Error::Error;
};

// --- textual IR ---

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, const std::string& reason)
      : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_ = 0;
};

class InvariantError : public Error {
 public:
  using Error::Error;
};

// --- feature/model ---

class MixedCharsets : public Error {
 public:
  using Error::Error;
};

class SingleClass : public Error {
 public:
  using Error::Error;
};

class BadModelFile : public Error {
 public:
  using Error::Error;
};

class ModelCharsetMismatch : public Error {
 public:
  using Error::Error;
};

// --- detectors ---

class EmptyMethod : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class BadSignatureDb : public Error {
 public:
  using Error::Error;
};

}  // namespace obfuscan
