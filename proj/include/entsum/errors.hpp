// Copyright 2026 The entsum Authors
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

namespace entsum {

// Operands live in different ambient groups.
class IncompatibleGroupError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A size cap was exceeded.  Never silently truncated.
class InstanceTooLargeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// An operation was called outside its documented domain (entropy deficit
// too large, zero-probability event, non-proper progression, ...).
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A file or literal does not match the expected schema.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A bounded search found nothing.
class SearchExhaustedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical routine missed its requested accuracy.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internal invariant failed.  Seeing one of these is a bug.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace entsum
