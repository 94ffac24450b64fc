// Copyright 2026 The turbosmooth Authors
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

#ifndef TURBOSMOOTH_ERRORS_HPP
#define TURBOSMOOTH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace turbosmooth {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A precision matrix could not be inverted (typically a vacuous message
/// used where moments are required).
class SingularPrecision : public Error {
 public:
  using Error::Error;
};

class DegenerateCovariance : public Error {
 public:
  using Error::Error;
};

class NonPositiveNoise : public Error {
 public:
  using Error::Error;
};

class EmptyMixture : public Error {
 public:
  using Error::Error;
};

/// Every particle weight underflowed or was not finite.
class AllWeightsZero : public Error {
 public:
  using Error::Error;
};

class NonFiniteJacobian : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

/// Raised by a pass-level routine when one of its steps fails; carries the
/// time index at which the failure happened.
class StepFailure : public Error {
 public:
  StepFailure(std::size_t step, const std::string& what)
      : Error("step " + std::to_string(step) + ": " + what), step_{step} {}

  [[nodiscard]] std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace turbosmooth

#endif  // TURBOSMOOTH_ERRORS_HPP
