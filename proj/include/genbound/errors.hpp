//
// Copyright 2026 The genbound Authors
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
//
#ifndef GENBOUND_ERRORS_HPP_
#define GENBOUND_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace genbound {

// Invalid argument, failed precondition, or schema/validation failure.
// The CLI maps this to exit code 2.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Requested enumeration exceeds the configured cap. Exit code 2.
class CapacityError : public DomainError {
 public:
  explicit CapacityError(const std::string& what) : DomainError(what) {}
};

// Filesystem / stream failure. Exit code 3.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace genbound

#endif  // GENBOUND_ERRORS_HPP_
