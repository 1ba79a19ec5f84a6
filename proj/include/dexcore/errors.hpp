// Copyright 2026 The dexcore Authors
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

#ifndef DEXCORE_ERRORS_HPP
#define DEXCORE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace dexcore {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad index, entry outside [0,1], unknown family, parse error.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The operation needs a guarantee the instance does not carry
/// (e.g. a supergradient on a non-concave utility).
class Unsupported : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an algorithm does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A configured size or iteration budget was exhausted.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// An iterative solver could not certify its answer within tolerance.
class ToleranceExceeded : public Error {
 public:
  using Error::Error;
};

/// An internal structural guarantee failed (matrix construction bug,
/// empty candidate set, degenerate pivot).
class StructuralError : public Error {
 public:
  using Error::Error;
};

}  // namespace dexcore

#endif  // DEXCORE_ERRORS_HPP
