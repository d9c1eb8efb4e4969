// SPDX-License-Identifier: Apache-2.0
//
// relayopt - robust transceiver design for multi-hop AF MIMO relay chains
// Copyright (C) 2026 The relayopt authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace relayopt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: wrong dimensions, out-of-range parameters, malformed config.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Numerical failure while evaluating a well-formed input.
class NumericalError : public Error {
public:
    using Error::Error;
};

class NotPsdError : public NumericalError {
public:
    NotPsdError(const std::string& what, double min_eigenvalue)
        : NumericalError(what), min_eigenvalue_(min_eigenvalue) {}
    double min_eigenvalue() const noexcept { return min_eigenvalue_; }

private:
    double min_eigenvalue_;
};

class ConditioningError : public NumericalError {
public:
    ConditioningError(const std::string& what, double min_eigenvalue)
        : NumericalError(what), min_eigenvalue_(min_eigenvalue) {}
    double min_eigenvalue() const noexcept { return min_eigenvalue_; }

private:
    double min_eigenvalue_;
};

/// Argument outside the domain of a scalar objective (e.g. log of a non-positive value).
class DomainError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Every stream of a hop has zero effective gain; no power allocation exists.
class DegenerateChannelError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InfeasibleStructureError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// An internal identity that must hold by construction was violated. Always a bug.
class ConsistencyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace relayopt
