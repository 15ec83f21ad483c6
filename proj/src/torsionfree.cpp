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


#include "entsum/torsionfree.hpp"

#include <fftw3.h>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <set>
#include <string>

#include "entsum/errors.hpp"

namespace entsum {

// ---------------------------------------------------------------------------
// Binomial experiments.

namespace {

constexpr int kBinomialEntropyCap = 4 * kBinomialCap;

void check_binomial(int n, int cap) {
  if (n < 0) throw PreconditionError("binomial parameter must be non-negative");
  if (n > cap) {
    throw InstanceTooLargeError("binomial parameter " + std::to_string(n) + " above cap " +
                                std::to_string(cap));
  }
}

}  // namespace

Dist binomial_dist(int n) {
  check_binomial(n, kBinomialCap);
  BigInt total;
  mpz_ui_pow_ui(total.get_mpz_t(), 2, static_cast<unsigned long>(n));
  std::vector<Atom> atoms;
  BigInt c = 1;
  for (int k = 0; k <= n; ++k) {
    atoms.emplace_back(GroupElement{2 * k - n}, Rational(c, total));
    c = c * (n - k) / (k + 1);
  }
  return Dist::from_atoms(GroupSpec::integers(1), std::move(atoms));
}

double binomial_entropy(int n) {
  check_binomial(n, kBinomialEntropyCap);
  const double log_total = n * std::numbers::ln2;
  CompensatedSum h;
  BigInt c = 1;
  for (int k = 0; k <= n; ++k) {
    const double lm = log_of(c) - log_total;
    h.add(-std::exp(lm) * lm);
    c = c * (n - k) / (k + 1);
  }
  return h.value();
}

double binomial_entropy_gap(int n) {
  if (n < 1) throw PreconditionError("binomial gap needs n >= 1");
  return binomial_entropy(n) - (0.5 * std::log(2.0 * std::numbers::pi * n) + 0.5);
}

double binomial_lattice_gap(int n) { return binomial_entropy_gap(n) + std::numbers::ln2; }

double doubling_experiment(int n) {
  check_binomial(n, kBinomialCap / 2);
  return std::exp(binomial_entropy(2 * n) - binomial_entropy(n));
}

double entxx_explore(int n, int k) {
  if (k < 1 || k > 8) throw PreconditionError("entxx needs 1 <= k <= 8");
  if (n < 1 || static_cast<long>(n) * k > 8192) throw InstanceTooLargeError("entxx needs n k <= 8192");
  return binomial_entropy(n * (k + 1)) - binomial_entropy(n * k) -
         0.5 * std::log(static_cast<double>(k + 1) / k);
}

// ---------------------------------------------------------------------------
// Polynomials.

Polynomial::Polynomial(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

void Polynomial::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Rational Polynomial::operator()(const Rational& t) const {
  Rational acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + *it;
  return acc;
}

double Polynomial::eval(double t) const {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + to_double(*it);
  return acc;
}

Polynomial Polynomial::antiderivative() const {
  std::vector<Rational> out(c_.size() + 1);
  for (std::size_t k = 0; k < c_.size(); ++k) out[k + 1] = c_[k] / static_cast<long>(k + 1);
  return Polynomial(std::move(out));
}

Polynomial Polynomial::substitute(const Rational& alpha, const Rational& beta) const {
  const Polynomial lin = Polynomial::affine(alpha, beta);
  Polynomial acc;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * lin + Polynomial::constant(*it);
  return acc;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<Rational> out(std::max(a.c_.size(), b.c_.size()));
  for (std::size_t k = 0; k < a.c_.size(); ++k) out[k] += a.c_[k];
  for (std::size_t k = 0; k < b.c_.size(); ++k) out[k] += b.c_[k];
  return Polynomial(std::move(out));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
  std::vector<Rational> out(std::max(a.c_.size(), b.c_.size()));
  for (std::size_t k = 0; k < a.c_.size(); ++k) out[k] += a.c_[k];
  for (std::size_t k = 0; k < b.c_.size(); ++k) out[k] -= b.c_[k];
  return Polynomial(std::move(out));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rational> out(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
  return Polynomial(std::move(out));
}

// ---------------------------------------------------------------------------
// Piecewise densities.

namespace {

constexpr int kPositivityGrid = 64;

void check_nonnegative(const Polynomial& p, const Rational& a, const Rational& b) {
  if (p(a) < 0 || p(b) < 0) throw PreconditionError("density is negative at a breakpoint");
  if (p.degree() <= 1) return;
  if (p.degree() == 2) {
    const auto& c = p.coeffs();
    const Rational vertex = -c[1] / (2 * c[2]);
    if (vertex > a && vertex < b && p(vertex) < 0) throw PreconditionError("density is negative");
    return;
  }
  const double lo = to_double(a), hi = to_double(b);
  const double scale = std::max(std::abs(to_double(p(a))), std::abs(to_double(p(b))));
  for (int i = 1; i < kPositivityGrid; ++i) {
    if (p.eval(lo + (hi - lo) * i / kPositivityGrid) < -1e-12 * std::max(1.0, scale)) {
      throw PreconditionError("density is negative inside a piece");
    }
  }
}

}  // namespace

PiecewiseDensity::PiecewiseDensity(std::vector<Rational> breaks, std::vector<Polynomial> pieces)
    : breaks_(std::move(breaks)), pieces_(std::move(pieces)) {
  if (breaks_.size() != pieces_.size() + 1 || pieces_.empty()) {
    throw PreconditionError("piecewise density needs one more breakpoint than pieces");
  }
  for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
    if (!(breaks_[i] < breaks_[i + 1])) throw PreconditionError("breakpoints must increase strictly");
    check_nonnegative(pieces_[i], breaks_[i], breaks_[i + 1]);
  }
  if (mass() != 1) throw PreconditionError("density does not integrate to one");
}

PiecewiseDensity PiecewiseDensity::uniform(const Rational& a, const Rational& b) {
  return PiecewiseDensity({a, b}, {Polynomial::constant(1 / (b - a))});
}

PiecewiseDensity PiecewiseDensity::steps(const Rational& start, const Rational& width,
                                         const std::vector<Rational>& weights) {
  Rational total = 0;
  for (const auto& w : weights) total += w;
  std::vector<Rational> breaks{start};
  std::vector<Polynomial> pieces;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    breaks.push_back(start + width * static_cast<long>(i + 1));
    pieces.push_back(Polynomial::constant(weights[i] / (total * width)));
  }
  return PiecewiseDensity(std::move(breaks), std::move(pieces));
}

int PiecewiseDensity::max_degree() const noexcept {
  int d = 0;
  for (const auto& p : pieces_) d = std::max(d, p.degree());
  return d;
}

Rational PiecewiseDensity::mass() const {
  Rational m = 0;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const Polynomial anti = pieces_[i].antiderivative();
    m += anti(breaks_[i + 1]) - anti(breaks_[i]);
  }
  return m;
}

double PiecewiseDensity::density(double t) const {
  if (t < to_double(breaks_.front()) || t >= to_double(breaks_.back())) return 0.0;
  std::size_t lo = 0, hi = pieces_.size();
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (to_double(breaks_[mid]) <= t) lo = mid; else hi = mid;
  }
  return std::max(pieces_[lo].eval(t), 0.0);
}

PiecewiseDensity PiecewiseDensity::translate(const Rational& c) const {
  std::vector<Rational> breaks;
  std::vector<Polynomial> pieces;
  for (const auto& b : breaks_) breaks.push_back(b + c);
  for (const auto& p : pieces_) pieces.push_back(p.substitute(-c, 1));
  return PiecewiseDensity(std::move(breaks), std::move(pieces));
}

PiecewiseDensity convolve(const PiecewiseDensity& f, const PiecewiseDensity& g) {
  std::set<Rational> sums;
  for (const auto& a : f.breaks())
    for (const auto& b : g.breaks()) sums.insert(a + b);
  const std::vector<Rational> s(sums.begin(), sums.end());

  // Coefficients in t of g_j(s - t): entry l is a polynomial in s.
  std::vector<std::vector<Polynomial>> g_shifted;
  for (const auto& gj : g.pieces()) {
    const auto& c = gj.coeffs();
    std::vector<Polynomial> by_power(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
      BigInt binom;
      for (std::size_t l = 0; l <= k; ++l) {
        mpz_bin_uiui(binom.get_mpz_t(), k, l);
        std::vector<Rational> mono(k - l + 1);
        mono[k - l] = c[k] * Rational(binom) * (l % 2 ? -1 : 1);
        by_power[l] = by_power[l] + Polynomial(std::move(mono));
      }
    }
    g_shifted.push_back(std::move(by_power));
  }

  std::vector<Polynomial> pieces;
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    const Rational mid = (s[k] + s[k + 1]) / 2;
    Polynomial total;
    for (std::size_t i = 0; i < f.pieces().size(); ++i) {
      const Rational& a = f.breaks()[i];
      const Rational& b = f.breaks()[i + 1];
      for (std::size_t j = 0; j < g.pieces().size(); ++j) {
        const Rational& c = g.breaks()[j];
        const Rational& d = g.breaks()[j + 1];
        // t ranges over [max(a, s - d), min(b, s - c)]
        const bool lower_const = a >= mid - d;
        const bool upper_const = b <= mid - c;
        const Rational lm = lower_const ? a : mid - d;
        const Rational um = upper_const ? b : mid - c;
        if (!(lm < um)) continue;
        // integrand sum_q H_q(s) t^q
        const auto& fc = f.pieces()[i].coeffs();
        const auto& gl = g_shifted[j];
        if (fc.empty() || gl.empty()) continue;
        std::vector<Polynomial> h(fc.size() + gl.size() - 1);
        for (std::size_t m = 0; m < fc.size(); ++m)
          for (std::size_t l = 0; l < gl.size(); ++l) h[m + l] = h[m + l] + Polynomial::constant(fc[m]) * gl[l];
        auto at = [&](bool is_const, const Rational& cst, const Rational& off) {
          // antiderivative evaluated at t = cst or t = s + off
          const Polynomial tpos = is_const ? Polynomial::constant(cst) : Polynomial::affine(off, 1);
          Polynomial acc, power = tpos;
          for (std::size_t q = 0; q < h.size(); ++q) {
            acc = acc + h[q] * power * Polynomial::constant(Rational(1, static_cast<long>(q + 1)));
            power = power * tpos;
          }
          return acc;
        };
        total = total + at(upper_const, b, -c) - at(lower_const, a, -d);
      }
    }
    pieces.push_back(std::move(total));
  }
  return PiecewiseDensity(s, std::move(pieces));
}

namespace {

double f_of_double(double u) { return u > 0.0 ? -u * std::log(u) : 0.0; }

// u^2 (1/4 - log(u)/2), an antiderivative of -u log u.
double big_f(double u) { return u > 0.0 ? u * u * (0.25 - 0.5 * std::log(u)) : 0.0; }

double quadrature(const Polynomial& p, double a, double b) {
  double err = 0.0;
  auto integrand = [&](double t) { return f_of_double(p.eval(t)); };
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, a, b, 20,
                                                                                  1e-13, &err);
  if (err > 1e-9) throw NumericalError("quadrature missed 1e-9 on a density piece");
  return v;
}

}  // namespace

double continuous_entropy(const PiecewiseDensity& f) {
  CompensatedSum h;
  for (std::size_t i = 0; i < f.pieces().size(); ++i) {
    const auto& p = f.pieces()[i];
    const Rational& a = f.breaks()[i];
    const Rational& b = f.breaks()[i + 1];
    const double len = to_double(b - a);
    switch (p.degree()) {
      case -1:
        break;
      case 0:
        h.add(len * f_of(p.coeffs()[0]) );
        break;
      case 1: {
        const double u0 = to_double(p(a)), u1 = to_double(p(b));
        if (std::abs(u1 - u0) > 1e-6 * std::max(u0, u1)) {
          h.add(len * (big_f(u1) - big_f(u0)) / (u1 - u0));
        } else {
          h.add(quadrature(p, to_double(a), to_double(b)));
        }
        break;
      }
      default:
        h.add(quadrature(p, to_double(a), to_double(b)));
    }
  }
  return h.value();
}

BridgeResult bridge_entropy(const Dist& p) {
  const auto& g = p.group();
  if (g.rank() != 1 || g.modulus(0) != 0) throw IncompatibleGroupError("bridge needs a law on Z");
  std::vector<Rational> breaks;
  std::vector<Polynomial> pieces;
  for (const auto& [x, m] : p.atoms()) {
    const Rational left(BigInt(static_cast<long>(x[0])));
    if (!breaks.empty() && breaks.back() != left) {
      pieces.push_back({});
      breaks.push_back(left);
    }
    if (breaks.empty()) breaks.push_back(left);
    pieces.push_back(Polynomial::constant(m));
    breaks.push_back(left + 1);
  }
  BridgeResult r;
  r.density = PiecewiseDensity(std::move(breaks), std::move(pieces));
  r.continuous = continuous_entropy(r.density);
  r.discrete = entropy(p);
  r.report = make_identity_report("bridge", r.continuous, r.discrete);
  return r;
}

MetricReport abbn_check(const PiecewiseDensity& f, const PiecewiseDensity& g) {
  const double lhs = continuous_entropy(convolve(f, g));
  const double rhs = 0.5 * (continuous_entropy(f) + continuous_entropy(g)) + 0.5 * std::numbers::ln2;
  MetricReport r = make_report("abbn", lhs, rhs);
  r.slack = lhs - rhs;
  return r;
}

// ---------------------------------------------------------------------------
// Smooth-shift search.

namespace {

// 0, 1, -1, 2, -2, ...
std::int64_t zigzag(std::int64_t v) { return v >= 0 ? 2 * v : -2 * v - 1; }

double defect(const std::vector<std::int64_t>& xi, const std::vector<std::int64_t>& r,
              const std::vector<std::int64_t>& moduli) {
  double frac = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const std::int64_t m = moduli[i];
    const std::int64_t t = ((xi[i] % m) * (((r[i] % m) + m) % m)) % m;
    frac += static_cast<double>(t) / static_cast<double>(m);
  }
  frac -= std::floor(frac);
  return 2.0 * std::abs(std::sin(std::numbers::pi * frac));
}

}  // namespace

SpectrumReport smooth_shift_search(const Dist& p, double mu, std::vector<std::int64_t> box) {
  const auto& g = p.group();
  if (!g.torsion_free() || g.rank() == 0) throw IncompatibleGroupError("smooth-shift search needs Z^d");
  if (!(mu > 0.0 && mu < 1.0)) throw PreconditionError("mu must lie in (0, 1)");
  const std::size_t d = g.rank();
  if (box.empty()) {
    box.assign(d, 1);
    for (const auto& [x, m] : p.atoms())
      for (std::size_t i = 0; i < d; ++i) box[i] = std::max(box[i], x[i] + 1);
  }
  if (box.size() != d) throw PreconditionError("box rank differs from the group rank");
  for (const auto& [x, m] : p.atoms())
    for (std::size_t i = 0; i < d; ++i)
      if (x[i] < 0 || x[i] >= box[i]) throw PreconditionError("distribution leaves the box");

  SpectrumReport rep;
  rep.box = box;
  rep.mu = mu;
  std::size_t total = 1;
  std::vector<int> dims;
  for (auto n : box) {
    rep.moduli.push_back(3 * n);
    total *= static_cast<std::size_t>(3 * n);
    dims.push_back(static_cast<int>(3 * n));
    if (total > kSpectrumCap) throw InstanceTooLargeError("character group above the spectrum cap");
  }

  auto flat_index = [&](const std::vector<std::int64_t>& x) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < d; ++i) idx = idx * rep.moduli[i] + static_cast<std::size_t>(x[i]);
    return idx;
  };
  fftw_complex* in = fftw_alloc_complex(total);
  fftw_complex* out = fftw_alloc_complex(total);
  std::fill(reinterpret_cast<double*>(in), reinterpret_cast<double*>(in) + 2 * total, 0.0);
  double sum_sq = 0.0;
  for (const auto& [x, m] : p.atoms()) {
    const double v = to_double(m);
    in[flat_index(x)][0] = v;
    sum_sq += v * v;
  }
  // The FFTW planner is not reentrant; only fftw_execute is.
  static std::mutex planner;
  fftw_plan plan;
  {
    const std::lock_guard<std::mutex> lock(planner);
    plan = fftw_plan_dft(static_cast<int>(d), dims.data(), in, out, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  rep.coefficients.resize(total);
  for (std::size_t k = 0; k < total; ++k) rep.coefficients[k] = {out[k][0], out[k][1]};
  {
    const std::lock_guard<std::mutex> lock(planner);
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);

  for (const auto& c : rep.coefficients) rep.parseval_lhs += std::norm(c);
  rep.parseval_rhs = static_cast<double>(total) * sum_sq;
  if (std::abs(rep.parseval_lhs - rep.parseval_rhs) > 1e-9 * std::max(1.0, rep.parseval_rhs)) {
    throw InvariantError("Parseval identity failed on the spectrum");
  }

  std::vector<std::int64_t> xi(d, 0);
  for (std::size_t k = 0; k < total; ++k) {
    if (std::abs(rep.coefficients[k]) >= mu) rep.lambda.push_back(xi);
    for (std::size_t i = d; i-- > 0;) {
      if (++xi[i] < rep.moduli[i]) break;
      xi[i] = 0;
    }
  }
  rep.lambda_bound = rep.parseval_lhs / (mu * mu);
  if (static_cast<double>(rep.lambda.size()) > rep.lambda_bound * (1 + 1e-12)) {
    throw InvariantError("large spectrum exceeds its l2 bound");
  }

  rep.search_radius = static_cast<std::int64_t>(std::ceil(static_cast<double>(d) / (mu * mu * mu)));
  std::vector<std::vector<std::int64_t>> candidates;
  {
    std::vector<std::int64_t> lim(d);
    for (std::size_t i = 0; i < d; ++i) lim[i] = std::min(rep.search_radius, box[i] - 1);
    std::vector<std::int64_t> r(d);
    for (std::size_t i = 0; i < d; ++i) r[i] = -lim[i];
    while (true) {
      if (std::any_of(r.begin(), r.end(), [](std::int64_t v) { return v != 0; })) candidates.push_back(r);
      std::size_t i = d;
      while (i-- > 0) {
        if (++r[i] <= lim[i]) break;
        r[i] = -lim[i];
      }
      if (i == static_cast<std::size_t>(-1)) break;
    }
    auto key = [](const std::vector<std::int64_t>& v) {
      std::int64_t norm = 0;
      std::vector<std::int64_t> z;
      for (auto c : v) {
        norm = std::max(norm, std::abs(c));
        z.push_back(zigzag(c));
      }
      return std::make_pair(norm, z);
    };
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](const auto& a, const auto& b) { return key(a) < key(b); });
  }
  if (candidates.empty()) throw SearchExhaustedError("box admits no non-zero shift");

  auto max_defect = [&](const std::vector<std::int64_t>& r) {
    double worst = 0.0;
    for (const auto& x : rep.lambda) worst = std::max(worst, defect(x, r, rep.moduli));
    return worst;
  };

  const Dist s = convolve(p, p);
  bool found = false;
  for (const auto& r : candidates) {
    const double w = max_defect(r);
    if (w <= mu * mu) {
      rep.shift = r;
      rep.max_character_defect = w;
      rep.chira_satisfied = true;
      found = true;
      break;
    }
  }
  if (!found) {
    // sum |p^|^4 |chi(r) - 1|^2 = |G'| ||s - s(. - r)||^2 since shifts stay inside 3N.
    double best = std::numeric_limits<double>::infinity();
    const std::vector<std::int64_t>* arg = nullptr;
    for (const auto& r : candidates) {
      const Dist shifted = s.translate(r);
      double acc = 0.0;
      for (const auto& [x, m] : s.atoms()) {
        const double v = to_double(m - shifted.mass(x));
        acc += v * v;
      }
      for (const auto& [x, m] : shifted.atoms()) {
        if (s.mass(x) == 0) acc += to_double(m) * to_double(m);
      }
      if (acc < best) {
        best = acc;
        arg = &r;
      }
    }
    const Dist shifted = s.translate(*arg);
    bool overlap = false;
    for (const auto& [x, m] : shifted.atoms()) {
      if (s.mass(x) != 0) {
        overlap = true;
        break;
      }
    }
    if (!overlap) {
      throw SearchExhaustedError("no shift within radius " + std::to_string(rep.search_radius) +
                                 " meets the character condition on " +
                                 std::to_string(rep.lambda.size()) +
                                 " large coefficients, and every shift is disjoint");
    }
    rep.shift = *arg;
    rep.max_character_defect = max_defect(*arg);
  }
  rep.realized_tv = tv_distance(s.translate(rep.shift), s);
  return rep;
}

MetricReport fibering_check(const Dist& p, std::int64_t m) {
  const auto& g = p.group();
  if (g.rank() != 1 || g.modulus(0) != 0) throw IncompatibleGroupError("fibering needs a law on Z");
  if (m < 1) throw PreconditionError("fibering modulus must be positive");
  std::map<std::int64_t, std::vector<Atom>> fibres;
  std::map<std::int64_t, Rational> wmass;
  for (const auto& [x, w] : p.atoms()) {
    const std::int64_t r = ((x[0] % m) + m) % m;
    fibres[r].emplace_back(x, w);
    wmass[r] += w;
  }
  std::vector<Atom> wa;
  CompensatedSum inner;
  for (auto& [r, atoms] : fibres) {
    wa.emplace_back(GroupElement{r}, wmass[r]);
    inner.add(to_double(wmass[r]) * entropy(Dist::normalized(g, std::move(atoms))));
  }
  const double hw = entropy(Dist::from_atoms(GroupSpec::cyclic(m), std::move(wa)));
  return make_identity_report("fibering", entropy(p), hw + inner.value());
}

}  // namespace entsum
