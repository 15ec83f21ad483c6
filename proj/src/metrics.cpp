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

#include "entsum/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "entsum/errors.hpp"
#include "entsum/scalar.hpp"

namespace entsum {

double ruzsa_distance(const Dist& p, const Dist& q) {
  return entropy(convolve(p, q, Sign::kMinus)) - 0.5 * entropy(p) - 0.5 * entropy(q);
}

double log_doubling(const Dist& p) { return entropy(convolve(p, p)) - entropy(p); }

double doubling_constant(const Dist& p) { return std::exp(log_doubling(p)); }

namespace {

Dist capped_convolve(const Dist& a, const Dist& b, Sign sign = Sign::kPlus) {
  if (a.size() * b.size() > 40 * kEseSupportCap) {
    throw InstanceTooLargeError("convolution of supports " + std::to_string(a.size()) + " x " +
                                std::to_string(b.size()) + " exceeds the work cap");
  }
  Dist out = convolve(a, b, sign);
  if (out.size() > kEseSupportCap) {
    throw InstanceTooLargeError("convolution support " + std::to_string(out.size()) +
                                " exceeds the cap");
  }
  return out;
}

Dist capped_power(const Dist& p, int k) {
  Dist out = p;
  for (int i = 1; i < k; ++i) out = capped_convolve(out, p);
  return out;
}

}  // namespace

std::vector<MetricReport> check_ese_suite(const Dist& p, const Dist& q, const Dist& r, int n) {
  if (n < 1 || n > kMaxIteratedN) {
    throw PreconditionError("iteration depth must lie in [1, " + std::to_string(kMaxIteratedN) + "]");
  }
  const double hp = entropy(p), hq = entropy(q), hr = entropy(r);
  const Dist p_minus_q = capped_convolve(p, q, Sign::kMinus);
  const Dist p_plus_q = capped_convolve(p, q, Sign::kPlus);
  const double h_pmq = entropy(p_minus_q), h_ppq = entropy(p_plus_q);
  const double d_pq = h_pmq - 0.5 * hp - 0.5 * hq;
  const double d_qr = entropy(capped_convolve(q, r, Sign::kMinus)) - 0.5 * hq - 0.5 * hr;
  const double d_pr = entropy(capped_convolve(p, r, Sign::kMinus)) - 0.5 * hp - 0.5 * hr;
  const double d_p_negq = h_ppq - 0.5 * hp - 0.5 * hq;

  std::vector<MetricReport> out;
  out.push_back(make_report("ese.triangle", d_pr, d_pq + d_qr));
  out.push_back(make_report("ese.condit", d_p_negq, 3.0 * d_pq));
  out.push_back(make_report("ese.entpm", h_ppq, 3.0 * h_pmq - hp - hq));

  const Dist iterated = capped_power(p_plus_q, n + 1);
  out.push_back(make_report("ese.iterated", entropy(iterated),
                            (2.0 * n + 1.0) * h_ppq - n * (hp + hq)));

  const Dist pp = capped_convolve(p, p);
  const double log_sigma = entropy(pp) - hp;
  const Dist power = capped_power(pp, n + 1);  // p^{*(2n+2)}
  out.push_back(make_report("ese.plunnecke", entropy(power), hp + (2.0 * n + 1.0) * log_sigma));
  return out;
}

double plunnecke_constant(const Dist& p, int n, int m) {
  if (n + m < 1) throw PreconditionError("need at least one summand");
  const double log_sigma = log_doubling(p);
  Dist acc = n > 0 ? capped_power(p, n) : Dist::point(p.group(), zero(p.group()));
  for (int i = 0; i < m; ++i) acc = capped_convolve(acc, p, Sign::kMinus);
  if (log_sigma <= kEntropyTol) return 0.0;
  return (entropy(acc) - entropy(p)) / ((n + m) * log_sigma);
}

MetricReport check_mmt(const Dist& p, const Dist& q, const Dist& r) {
  const Dist pq = capped_convolve(p, q);
  const double lhs = entropy(capped_convolve(pq, r));
  const double rhs = 0.5 * (entropy(pq) + entropy(capped_convolve(q, r)) + entropy(capped_convolve(r, p)));
  return make_report("mmt", lhs, rhs);
}

std::vector<MetricReport> check_trivial_dependent(const JointDist& pair) {
  if (pair.arity() != 2) throw PreconditionError("expected a pair law");
  const double hx = entropy(pair.marginal_dist(0));
  const double hy = entropy(pair.marginal_dist(1));
  std::vector<MetricReport> out;
  out.push_back(make_report("triv.ent_sum_plus",
                            entropy(pair.with_sum(0, 1, Sign::kPlus).marginal_dist(2)), hx + hy));
  out.push_back(make_report("triv.ent_sum_minus",
                            entropy(pair.with_sum(0, 1, Sign::kMinus).marginal_dist(2)), hx + hy));
  return out;
}

std::vector<MetricReport> check_trivial_independent(const Dist& p, const Dist& q) {
  const double hp = entropy(p), hq = entropy(q);
  const double hplus = entropy(convolve(p, q, Sign::kPlus));
  const double hminus = entropy(convolve(p, q, Sign::kMinus));
  std::vector<MetricReport> out;
  out.push_back(make_report("triv.ent_lower_plus", std::max(hp, hq), hplus));
  out.push_back(make_report("triv.ent_lower_minus", std::max(hp, hq), hminus));
  out.push_back(make_report("triv.ruzsa_nonneg", 0.0, hminus - 0.5 * hp - 0.5 * hq));
  return out;
}

std::vector<MetricReport> check_lipschitz(const Dist& x, const Dist& x2, const Dist& y,
                                          const Dist& y2, const TransportOracle& oracle) {
  const double txx = oracle(x, x2);
  const double tyy = oracle(y, y2);
  const double d = ruzsa_distance(x, y);
  const double d2 = ruzsa_distance(x2, y2);
  const double ls = log_doubling(x);
  const double ls2 = log_doubling(x2);
  std::vector<MetricReport> out;
  out.push_back(make_report("lip.rrt", std::abs(d2 - d), 1.5 * (txx + tyy)));
  out.push_back(make_report("lip.doubtrans", std::abs(ls - ls2), 3.0 * txx));
  out.push_back(make_identity_report("lip.dubdub", ls, ruzsa_distance(x, x.negate())));
  return out;
}

double sumset_increase_lhs(const Dist& p, const Dist& q) {
  const Dist s = convolve(p, q);
  const auto& g = p.group();
  CompensatedSum total;
  for (const auto& [y, qy] : q.atoms()) {
    CompensatedSum inner;
    for (const auto& [x, px] : p.atoms()) {
      // z = x + y, p_{X+y}(z) = p(x)
      const Rational sz = s.mass(add(g, x, y));
      if (px > sz) inner.add(to_double(px) * (log_of(px) - log_of(sz)));
    }
    total.add(to_double(qy) * inner.value());
  }
  return total.value();
}

MetricReport check_xysim(const Dist& p, const Dist& q) {
  const double l = sumset_increase_lhs(p, q);
  const double gap = entropy(convolve(p, q)) - entropy(p);
  return make_report("xysim", std::abs(l - gap), 1.0);
}

JensenLevels jensen_level_sets(const Dist& p, const std::vector<GroupElement>& ambient, double log_k) {
  std::set<GroupElement> a(ambient.begin(), ambient.end());
  if (a.empty()) throw PreconditionError("empty ambient set");
  for (const auto& x : p.support()) {
    if (!a.count(x)) throw PreconditionError("distribution not supported on the ambient set");
  }
  const double log_a = std::log(static_cast<double>(a.size()));
  const double h = entropy(p);
  if (h < log_a - log_k - kEntropyTol) {
    throw PreconditionError("entropy deficit exceeds log K");
  }

  JensenLevels out;
  out.log_k = log_k;
  out.levels.assign(1, {});
  out.level_mass.assign(1, Rational(0));
  const BigInt size(static_cast<unsigned long>(a.size()));
  for (const auto& x : a) {
    const Rational px = p.mass(x);
    const Rational scaled = px * size;
    std::size_t k = 0;
    if (scaled >= 2) {
      // smallest k >= 1 with scaled < 2^{2^k}
      k = 1;
      while (true) {
        BigInt bound;
        mpz_ui_pow_ui(bound.get_mpz_t(), 2, 1UL << k);
        if (scaled < bound) break;
        ++k;
      }
    }
    if (out.levels.size() <= k) {
      out.levels.resize(k + 1);
      out.level_mass.resize(k + 1, Rational(0));
    }
    out.levels[k].push_back(x);
    out.level_mass[k] += px;
  }
  CompensatedSum sharp, weighted;
  for (std::size_t k = 1; k < out.levels.size(); ++k) {
    const double mass = to_double(out.level_mass[k]);
    const double w = std::ldexp(1.0, static_cast<int>(k) - 1) * std::numbers::ln2 - 1.0;
    sharp.add(std::max(w, 0.0) * mass);
    weighted.add(std::ldexp(1.0, static_cast<int>(k)) * mass);
  }
  out.sharpened_sum = sharp.value();
  out.weighted_sum = weighted.value();
  out.report = make_report("jensen.levels", out.sharpened_sum, log_k);
  return out;
}

std::vector<MetricReport> check_conditional_suite(const JointDist& xyz) {
  if (xyz.arity() != 3) throw PreconditionError("expected a triple law");
  // coordinates: 0 X, 1 Y, 2 Z, 3 X+Y, 4 X+Z, 5 2X
  const JointDist j = xyz.with_sum(0, 1).with_sum(0, 2).with_sum(0, 0);
  const double hx = joint_entropy(j, {0});
  const double hy = joint_entropy(j, {1});
  const double hxy = joint_entropy(j, {0, 1});
  const double hx_y = conditional_entropy(j, {0}, {1});
  const bool independent = conditionally_independent(j, {0}, {1}, {});
  const bool equal = std::abs(hx - hx_y) <= kEntropyTol;

  std::vector<MetricReport> out;
  out.push_back(make_identity_report("cond.eident", hx_y, hxy - hy));
  out.push_back(make_report("cond.ento", hx_y, hx));
  out.push_back(make_identity_report("cond.ento_equality", independent ? 1.0 : 0.0, equal ? 1.0 : 0.0));
  out.push_back(make_report("cond.ent_sum", hxy, hx + hy));
  out.push_back(make_report("cond.entyx", joint_entropy(j, {3}), hxy));
  out.push_back(make_report("cond.ent0_x", hx, hxy));
  out.push_back(make_report("cond.ent0_y", hy, hxy));
  out.push_back(make_report("cond.esob_lower", hx - hy, hx_y));
  out.push_back(make_report("cond.esob_upper", hx_y, hx));
  out.push_back(make_identity_report("cond.yush", conditional_entropy(j, {0}, {5}),
                                     hx - joint_entropy(j, {5})));
  out.push_back(make_report("cond.fsqueeze", conditional_entropy(j, {4}, {2}),
                            conditional_entropy(j, {0}, {2})));
  out.push_back(make_report("cond.ent_subadd", conditional_entropy(j, {0, 1}, {2}),
                            conditional_entropy(j, {0}, {2}) + conditional_entropy(j, {1}, {2})));
  return out;
}

MetricReport submodularity_check(const JointDist& j) {
  if (j.arity() != 4) throw PreconditionError("expected a joint over (X0, X1, X2, X12)");
  if (!determines(j, {1}, {0})) throw PreconditionError("X1 does not determine X0");
  if (!determines(j, {2}, {0})) throw PreconditionError("X2 does not determine X0");
  if (!determines(j, {1, 2}, {3})) throw PreconditionError("(X1, X2) does not determine X12");
  return make_report("submodularity", joint_entropy(j, {3}) + joint_entropy(j, {0}),
                     joint_entropy(j, {1}) + joint_entropy(j, {2}));
}

}  // namespace entsum
