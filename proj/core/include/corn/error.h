// Copyright 2026 The CORN Authors
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

#ifndef CORN_ERROR_H_
#define CORN_ERROR_H_

#include <stdexcept>
#include <string>

namespace corn {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller violated a documented precondition (length mismatch, bad shape).
class ContractError : public Error {
 public:
  using Error::Error;
};

// The inputs are well-formed but the requested value does not exist
// (zero-energy reference, no positive mixing gain).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A file was readable but its contents are malformed.
class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// An external oracle (e.g. the PESQ executable) is missing or failed.
class UnavailableError : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite loss or gradient.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A fitted distribution has zero variance.
class DegenerateDistributionError : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace corn

#endif  // CORN_ERROR_H_
