/*
 * Copyright 2026 The segdist Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SEGDIST_ERROR_HPP_
#define SEGDIST_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace segdist {

// Every failure raised by the core library derives from Error. The C API maps
// each kind onto one status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Zero-sized grid or mismatched operand dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Run lengths that do not describe a width x height grid.
class MalformedMaskError : public Error {
 public:
  using Error::Error;
};

// An overlap ratio with a zero denominator.
class UndefinedRatioError : public Error {
 public:
  using Error::Error;
};

// Bad parameters or inputs that violate a type invariant.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// Input data that fails validation (itemized diagnostics in the message).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Missing files, unreadable or unparsable documents, wrong JSON shape.
class IoError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace segdist

#endif  // SEGDIST_ERROR_HPP_
