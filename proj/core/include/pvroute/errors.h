// Copyright 2026 The pvroute Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PVROUTE_ERRORS_H_
#define PVROUTE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace pvroute {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector lengths disagree (horizon, feature count, branch count).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Invalid or inconsistent configuration. The CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input file lacks a required column or is otherwise malformed.
class SchemaError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Input data violates an invariant (e.g. non-monotone timestamps).
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace pvroute

#endif  // PVROUTE_ERRORS_H_
