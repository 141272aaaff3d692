// Copyright 2026 The catdiv Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CATDIV_ERROR_HPP_
#define CATDIV_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace catdiv {

// Argument outside the mathematical domain of an operation (non-positive
// concentration, empty sample for an estimator that needs data, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Inputs whose sizes or category counts do not agree.
class ShapeError : public std::invalid_argument {
 public:
  explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed count file or configuration.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace catdiv

#endif  // CATDIV_ERROR_HPP_
