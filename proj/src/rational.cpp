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

#include "entsum/rational.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace entsum {

Rational make_rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rational r(BigInt(std::to_string(num)), BigInt(std::to_string(den)));
  r.canonicalize();
  return r;
}

Rational make_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

double log_of(const BigInt& z) {
  if (sgn(z) <= 0) throw std::domain_error("log of non-positive integer");
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp) * std::numbers::ln2;
}

double log_of(const Rational& r) {
  if (sgn(r) <= 0) throw std::domain_error("log of non-positive rational");
  return log_of(r.get_num()) - log_of(r.get_den());
}

double to_double(const Rational& r) { return r.get_d(); }

double f_of(const Rational& r) {
  if (sgn(r) == 0) return 0.0;
  const double p = r.get_d();
  if (p == 0.0) return 0.0;  // below double range; contribution is negligible
  return -p * log_of(r);
}

std::string to_string(const Rational& r) { return r.get_str(); }

}  // namespace entsum
