// Copyright 2026 The eprsim authors
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

namespace eprsim {

/// Precondition violation (bad dimension, negative rate, zero vector, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Linear-algebra failure (ill-conditioned innovation, lost physicality).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Riccati step too coarse: refine dt.
class StepSizeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Requested entanglement target cannot be reached by the coupling solver.
class InfeasibleTarget : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Config document is malformed or violates an invariant.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace eprsim
