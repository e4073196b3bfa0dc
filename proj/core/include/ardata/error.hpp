// Copyright 2026 The ardata Authors
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

#include <stdexcept>
#include <string>

namespace ardata {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text input (JSON lines, token strings, trace text).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Binary file layout mismatch (bad magic, wrong payload length).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Missing or unreadable/unwritable file.
class IoError : public Error {
 public:
  using Error::Error;
};

// Invalid mixture or pipeline configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ardata
