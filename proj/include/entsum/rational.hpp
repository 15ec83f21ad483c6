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

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace entsum {

// Exact probability masses.  Always kept canonical (gmpxx canonicalizes
// after every arithmetic operation).
using Rational = mpq_class;
using BigInt = mpz_class;

Rational make_rational(std::int64_t num, std::int64_t den);
Rational make_rational(const BigInt& num, const BigInt& den);

// Natural log of a positive rational; accurate even when the value
// underflows a double.
double log_of(const Rational& r);
double log_of(const BigInt& z);

double to_double(const Rational& r);

// x log(1/x), with F(0) = 0.
double f_of(const Rational& r);

std::string to_string(const Rational& r);

}  // namespace entsum
