// Copyright 2026 The kpzlab Authors
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

namespace kpz {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric parameter lies outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// An index or lattice point lies outside the domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A scaled query maps to negative lattice coordinates.
class FrameError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A TASEP particle tried to leave the simulated window.
class BoundaryError : public Error {
 public:
  using Error::Error;
};

/// The operation declines to run (size cap, degenerate input, wrong regime).
class RefusalError : public Error {
 public:
  using Error::Error;
};

/// A quadrature self-consistency check failed. Carries both estimates.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double coarse, double fine)
      : Error(what + " (coarse=" + std::to_string(coarse) +
              ", fine=" + std::to_string(fine) + ")"),
        coarse_(coarse),
        fine_(fine) {}

  double coarse() const noexcept { return coarse_; }
  double fine() const noexcept { return fine_; }

 private:
  double coarse_;
  double fine_;
};

/// The discretized operator 1 - K is not invertible, or its determinant is
/// outside (0, 1].
class InvertibilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace kpz
