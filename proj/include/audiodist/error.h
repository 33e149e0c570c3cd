// Copyright 2026 The Audiodist Authors. All Rights Reserved.
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

#ifndef AUDIODIST_ERROR_H_
#define AUDIODIST_ERROR_H_

#include <stdexcept>
#include <string>

namespace audiodist {

// Base of every error raised by the toolkit. Subclasses name the failure
// class so callers (and the CLI's exit-code mapping) can dispatch on type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed file contents (bad magic, unsupported dtype, truncated data).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Data violates a value invariant (NaN/Inf, score out of range, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Dimension or length mismatch between operands.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class InsufficientSamplesError : public Error {
 public:
  using Error::Error;
};

// Eigendecomposition failure or a result outside its rounding tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Invalid user-supplied configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// All frames identical, so no bandwidth can be derived.
class DegenerateBandwidthError : public Error {
 public:
  using Error::Error;
};

// Correlation of fewer than 3 points or of a constant series.
class UndefinedCorrelationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// More than the tolerated share of evaluation pairs could not be scored.
class TooManyFailuresError : public Error {
 public:
  using Error::Error;
};

}  // namespace audiodist

#endif  // AUDIODIST_ERROR_H_
