// Copyright 2026 The entangle-bench Authors
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

namespace entangle {

/// Base for every error raised by the library. Each subclass maps to one
/// failure category exposed at the API boundary.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string &what) : Error("invalid argument: " + what) {}
};

/// A correlator handed to the CHSH evaluator returned a value outside [-1, 1].
class InvalidModel : public Error {
 public:
  explicit InvalidModel(const std::string &what) : Error("invalid model: " + what) {}
};

class InvalidBench : public Error {
 public:
  explicit InvalidBench(const std::string &what) : Error("invalid bench: " + what) {}
};

class InvalidComparison : public Error {
 public:
  explicit InvalidComparison(const std::string &what) : Error("invalid comparison: " + what) {}
};

class ModelNotFound : public Error {
 public:
  explicit ModelNotFound(const std::string &name) : Error("model not found: '" + name + "'") {}
};

}  // namespace entangle
