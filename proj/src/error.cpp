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

#include "qconsensus/error.hpp"

namespace qconsensus {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid_argument";
    case ErrorKind::kOutOfRange: return "out_of_range";
    case ErrorKind::kNotNormalized: return "not_normalized";
    case ErrorKind::kMaximallyMixed: return "maximally_mixed";
    case ErrorKind::kParallelStates: return "parallel_states";
    case ErrorKind::kAntipodalStates: return "antipodal_states";
    case ErrorKind::kIncompatibleTopology: return "incompatible_topology";
    case ErrorKind::kDisconnectedTopology: return "disconnected_topology";
    case ErrorKind::kDimensionTooLarge: return "dimension_too_large";
    case ErrorKind::kNumericalBreakdown: return "numerical_breakdown";
    case ErrorKind::kUnknownMetric: return "unknown_metric";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace qconsensus
