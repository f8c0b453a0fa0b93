// Copyright 2026 The hshadow Authors
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
#include <utility>

namespace hshadow {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Caller passed arguments that violate an operation's usage rules
/// (empty lists, zero shots, nonpositive tolerances).
class UsageError : public Error {
   public:
    using Error::Error;
};

/// An input violates a mathematical precondition (non-unitary U,
/// non-Hermitian H, mismatched dimensions).
class ContractViolation : public Error {
   public:
    using Error::Error;
};

/// Requested size exceeds the dense-simulation cap.
class CapacityError : public Error {
   public:
    using Error::Error;
};

/// A computed probability or trace left its admissible range.
class NumericalConsistencyError : public Error {
   public:
    using Error::Error;
};

/// Every supplied evolution time was below the cosine cutoff.
class NoInformationError : public Error {
   public:
    using Error::Error;
};

/// Malformed text input. `line` is 1-based; 0 when no line applies.
class ConfigError : public Error {
   public:
    ConfigError(std::string source, std::size_t line, const std::string &message)
        : Error(source + ":" + std::to_string(line) + ": " + message),
          source_(std::move(source)),
          line_(line) {
    }

    const std::string &source() const {
        return source_;
    }
    std::size_t line() const {
        return line_;
    }

   private:
    std::string source_;
    std::size_t line_;
};

}  // namespace hshadow
