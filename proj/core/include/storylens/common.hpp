/* Copyright 2026 The Storylens Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef STORYLENS_COMMON_HPP_
#define STORYLENS_COMMON_HPP_

#include <stdexcept>
#include <string>

namespace storylens {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input (bad JSON line, unreadable file).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that violates a type invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Bad configuration: missing credentials, unknown template, bad flags.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Remote call failed after all retries.
class TransportError : public Error {
 public:
  using Error::Error;
};

// A judge reply could not be interpreted even after a reprompt.
class JudgeError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// SHA-256 of `data`, lowercase hex.
std::string sha256_hex(const std::string& data);

}  // namespace storylens

#endif  // STORYLENS_COMMON_HPP_
