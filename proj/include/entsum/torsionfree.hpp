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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "entsum/dist.hpp"
#include "entsum/report.hpp"

namespace entsum {

// ---- Binomial experiments -------------------------------------------------

inline constexpr int kBinomialCap = 4096;

// Law of eps_1 + ... + eps_n with independent fair signs; support step 2.
Dist binomial_dist(int n);

// Ent(X_n), computed from exact coefficients (no cap beyond 2 * kBinomialCap * 2).
double binomial_entropy(int n);

// Ent(X_n) - (log sqrt(2 pi n) + 1/2).
double binomial_entropy_gap(int n);

// Same gap against the spacing-corrected normal approximation
// log sqrt(2 pi n) + 1/2 - log 2, which is what the lattice law tends to.
double binomial_lattice_gap(int n);

// exp(Ent(X_{2n}) - Ent(X_n)), using X_n + X'_n ~ X_{2n}.
double doubling_experiment(int n);

// Ent(S_{k+1}) - Ent(S_k) - log(sqrt(k+1)/sqrt(k)) with S_k = X_{nk}.
double entxx_explore(int n, int k);

// ---- Univariate polynomials and piecewise densities ------------------------

// Ascending coefficients in the absolute variable t.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<Rational> coeffs);
  static Polynomial constant(const Rational& c) { return Polynomial({c}); }
  static Polynomial affine(const Rational& a, const Rational& b) { return Polynomial({a, b}); }

  const std::vector<Rational>& coeffs() const noexcept { return c_; }
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
  bool is_zero() const noexcept { return c_.empty(); }

  Rational operator()(const Rational& t) const;
  double eval(double t) const;
  Polynomial antiderivative() const;
  // P(alpha + beta t)
  Polynomial substitute(const Rational& alpha, const Rational& beta) const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  std::vector<Rational> c_;
  void trim();
};

/**
 * Density that equals pieces[i] on [breaks[i], breaks[i+1]) and 0 outside
 * [breaks.front(), breaks.back()).  Non-negative, total mass exactly one.
 */
class PiecewiseDensity {
 public:
  PiecewiseDensity() = default;
  // Throws PreconditionError for unsorted breaks, negative values or mass != 1.
  PiecewiseDensity(std::vector<Rational> breaks, std::vector<Polynomial> pieces);

  static PiecewiseDensity uniform(const Rational& a, const Rational& b);
  // Step density taking weights[i] / (sum * width) on consecutive unit-free cells.
  static PiecewiseDensity steps(const Rational& start, const Rational& width,
                                const std::vector<Rational>& weights);

  const std::vector<Rational>& breaks() const noexcept { return breaks_; }
  const std::vector<Polynomial>& pieces() const noexcept { return pieces_; }
  int max_degree() const noexcept;
  Rational mass() const;
  double density(double t) const;

  PiecewiseDensity translate(const Rational& c) const;

 private:
  std::vector<Rational> breaks_;
  std::vector<Polynomial> pieces_;
};

// Exact convolution; degrees add plus one.
PiecewiseDensity convolve(const PiecewiseDensity& f, const PiecewiseDensity& g);

// Integral of F(f(t)) dt.  Closed form on pieces of degree <= 1, adaptive
// Gauss-Kronrod quadrature to 1e-9 absolute elsewhere.
double continuous_entropy(const PiecewiseDensity& f);

struct BridgeResult {
  PiecewiseDensity density;  // law of X + U, U uniform on [0, 1)
  double continuous = 0.0;
  double discrete = 0.0;
  MetricReport report;       // identity continuous == discrete
};
BridgeResult bridge_entropy(const Dist& p);

// Ent(f * g) >= (Ent f + Ent g)/2 + log(2)/2.  This report is reversed:
// lhs = Ent(f * g), rhs = the bound, slack = lhs - rhs.
MetricReport abbn_check(const PiecewiseDensity& f, const PiecewiseDensity& g);

// ---- Fourier smooth-shift search ------------------------------------------

inline constexpr std::size_t kSpectrumCap = 300000;

struct SpectrumReport {
  std::vector<std::int64_t> box;     // N_i
  std::vector<std::int64_t> moduli;  // 3 N_i
  std::vector<std::complex<double>> coefficients;  // row-major over prod Z/3N_i
  double mu = 0.0;
  std::vector<std::vector<std::int64_t>> lambda;   // large spectrum
  double lambda_bound = 0.0;                       // ||p^||_2^2 / mu^2
  double parseval_lhs = 0.0;                       // sum |p^|^2
  double parseval_rhs = 0.0;                       // |G'| sum p^2
  std::int64_t search_radius = 0;                  // ceil(d / mu^3), before clamping to N_i - 1
  std::vector<std::int64_t> shift;                 // r
  bool chira_satisfied = false;                    // |chi(r) - 1| <= mu^2 on lambda
  double max_character_defect = 0.0;               // max over lambda of |chi(r) - 1|
  double realized_tv = 0.0;                        // sum |s(x) - s(x - r)|, s = p * p
};

/**
 * p must be supported in the box prod [0, N_i) of Z^d; the box is taken
 * from `box` or, when empty, from the support.  Searches non-zero r with
 * |r|_inf <= min(ceil(d / mu^3), N - 1) in increasing max norm for the first
 * r meeting |chi(r) - 1| <= mu^2 on the large spectrum.  When none does, r
 * minimises sum |p^|^4 |chi(r) - 1|^2 instead (chira_satisfied = false).
 * Throws SearchExhaustedError when every admissible shift leaves p * p
 * disjoint from its translate.
 */
SpectrumReport smooth_shift_search(const Dist& p, double mu, std::vector<std::int64_t> box = {});

// ---- Fibering -------------------------------------------------------------

// Ent(X) == Ent(X mod m) + sum_w P(W = w) Ent(X | W = w) on a rank-1 Z law.
MetricReport fibering_check(const Dist& p, std::int64_t m);

}  // namespace entsum
