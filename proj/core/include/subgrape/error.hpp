// Copyright 2026 The Subgrape Authors
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

#ifndef SUBGRAPE_ERROR_HPP
#define SUBGRAPE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace subgrape {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Input violates a structural invariant (shape, Hermiticity, grid, ...).
/// `field()` names the offending field so callers can report it.
class InvalidArgument : public Error {
   public:
    InvalidArgument(std::string field, const std::string &message)
        : Error(field + ": " + message), field_(std::move(field)), message_(message) {}

    const std::string &field() const { return field_; }
    /// The message without the field prefix.
    const std::string &message() const { return message_; }

   private:
    std::string field_;
    std::string message_;
};

/// Numerical breakdown: non-finite values, quadrature that fails to converge.
class NumericalError : public Error {
   public:
    using Error::Error;
};

}  // namespace subgrape

#endif
