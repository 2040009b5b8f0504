// Copyright 2026 The qconsensus Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qconsensus {

enum class ErrorKind {
  kInvalidArgument,
  kOutOfRange,
  kNotNormalized,
  kMaximallyMixed,
  kParallelStates,
  kAntipodalStates,
  kIncompatibleTopology,
  kDisconnectedTopology,
  kDimensionTooLarge,
  kNumericalBreakdown,
  kUnknownMetric,
  kConfig,
  kIo,
};

std::string_view to_string(ErrorKind kind);

// Every failure the library reports. The kind is stable and is what the CLI
// emits in its error JSON.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qconsensus
