// Copyright 2026 The weakval Authors
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

namespace weakval {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad dimensions, unknown names, invalid parameters.
class ConfigError : public Error {
   public:
    using Error::Error;
};

/// The requested physics is ill-defined for the given states or settings.
class PhysicsError : public Error {
   public:
    using Error::Error;
};

/// Pre- and post-selected states are (numerically) orthogonal.
class DegeneratePostselection : public PhysicsError {
   public:
    using PhysicsError::PhysicsError;
};

/// Every outcome branch has zero amplitude between pre- and post-selection.
class InconsistentSelection : public PhysicsError {
   public:
    using PhysicsError::PhysicsError;
};

class InsufficientStatistics : public PhysicsError {
   public:
    using PhysicsError::PhysicsError;
};

/// Pointer width is incompatible with the requested measurement regime.
class RegimeError : public PhysicsError {
   public:
    using PhysicsError::PhysicsError;
};

}  // namespace weakval
