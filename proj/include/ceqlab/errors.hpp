// Copyright 2026 The ceqlab Authors.
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

#ifndef CEQLAB_ERRORS_HPP_
#define CEQLAB_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ceqlab {

// Shape or dimension mismatch between arguments.
class InvalidArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A documented precondition of an operation does not hold.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Non-finite value produced inside a numeric routine.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, std::size_t layer)
      : std::runtime_error(what + " (layer " + std::to_string(layer) + ")"),
        layer_(layer) {}
  explicit NumericError(const std::string& what)
      : std::runtime_error(what), layer_(kNoLayer) {}

  static constexpr std::size_t kNoLayer = static_cast<std::size_t>(-1);
  std::size_t layer() const { return layer_; }

 private:
  std::size_t layer_;
};

// Malformed user input (files, flags). Maps to exit code 2 in the CLI.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Something that cannot happen for valid inputs.
class InternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ceqlab

#endif  // CEQLAB_ERRORS_HPP_
