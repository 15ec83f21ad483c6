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


#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "entsum/errors.hpp"
#include "entsum/metrics.hpp"
#include "entsum/scalar.hpp"
#include "helpers.hpp"
#include "oracle.hpp"

using namespace entsum;
using namespace testing_util;

namespace {

constexpr double kLog2 = std::numbers::ln2;

const MetricReport& find(const std::vector<MetricReport>& rs, const std::string& name) {
  for (const auto& r : rs) {
    if (r.name == name) return r;
  }
  throw std::runtime_error("missing report " + name);
}

Dist random_dist(std::mt19937_64& rng, const GroupSpec& g, int max_support) {
  const int s = 1 + static_cast<int>(rng() % max_support);
  std::vector<Atom> atoms;
  for (int i = 0; i < s; ++i) {
    GroupElement x;
    for (auto m : g.moduli()) x.push_back(static_cast<std::int64_t>(rng() % (m == 0 ? 6 : m)));
    atoms.emplace_back(x, Rational(static_cast<long>(1 + rng() % 9)));
  }
  return Dist::normalized(g, atoms);
}

double oracle_ruzsa(const Dist& p, const Dist& q) {
  const auto a = oracle::pmf(p), b = oracle::pmf(q);
  return oracle::entropy(oracle::convolve(a, b, p.group().moduli(), -1)) - 0.5 * oracle::entropy(a) -
         0.5 * oracle::entropy(b);
}

}  // namespace

TEST(Ruzsa, Examples) {
  const Dist h = uniform_range(Zm(4), 0, 4, 2);
  EXPECT_NEAR(ruzsa_distance(h, h), 0.0, 1e-15);
  const Dist u = uniform_range(Z, 0, 2);
  EXPECT_NEAR(ruzsa_distance(u, u), 0.346574, 1e-6);
  EXPECT_NEAR(ruzsa_distance(u, u), oracle_ruzsa(u, u), 1e-15);
  EXPECT_NEAR(ruzsa_distance(Dist::point(Z, {0}), Dist::point(Z, {5})), 0.0, 1e-15);
}

TEST(Doubling, Examples) {
  const Dist coset = make(Zm(4), {{{1}, 1, 2}, {{3}, 1, 2}});
  EXPECT_NEAR(doubling_constant(coset), 1.0, 1e-12);
  // exp(1.5 log 2 - log 2)
  EXPECT_NEAR(doubling_constant(uniform_range(Z, 0, 2)), std::sqrt(2.0), 1e-12);
}

TEST(EseSuite, UniformBitsOnIntegers) {
  const Dist u = uniform_range(Z, 0, 2);
  const auto rs = check_ese_suite(u, u, u, 1);
  for (const auto& r : rs) EXPECT_GE(r.slack, -1e-12) << r.name;
  // Both X + Y and X - Y are (1/4, 1/2, 1/4): slack = 3(1.5 log 2) - 2 log 2 - 1.5 log 2.
  const double h_sum = oracle::entropy({{{0}, 0.25}, {{1}, 0.5}, {{2}, 0.25}});
  EXPECT_NEAR(find(rs, "ese.entpm").slack, 3 * h_sum - 2 * kLog2 - h_sum, 1e-12);
  EXPECT_NEAR(find(rs, "ese.entpm").slack, kLog2, 1e-12);
}

TEST(EseSuite, SubgroupCaseIsTight) {
  // Every entropy in sight is log 2, so each bound holds with equality.
  const Dist u = uniform_range(Zm(2), 0, 2);
  for (int n = 1; n <= 3; ++n) {
    for (const auto& r : check_ese_suite(u, u, u, n)) EXPECT_NEAR(r.slack, 0.0, 1e-12) << r.name << " n=" << n;
  }
}

TEST(EseSuite, AgreesWithOracleEntropies) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 40; ++t) {
    const GroupSpec g = t % 2 ? GroupSpec({0}) : GroupSpec({8});
    const Dist p = random_dist(rng, g, 5), q = random_dist(rng, g, 5), r = random_dist(rng, g, 5);
    const int n = 1 + t % 3;
    const auto rs = check_ese_suite(p, q, r, n);
    const auto& m = g.moduli();
    const auto a = oracle::pmf(p), b = oracle::pmf(q);
    const double hp = oracle::entropy(a), hq = oracle::entropy(b);
    const auto s = oracle::convolve(a, b, m);
    const double hs = oracle::entropy(s);
    EXPECT_NEAR(find(rs, "ese.iterated").lhs, oracle::entropy(oracle::power(s, n + 1, m)), 1e-10);
    EXPECT_NEAR(find(rs, "ese.iterated").rhs, (2 * n + 1) * hs - n * (hp + hq), 1e-10);
    EXPECT_NEAR(find(rs, "ese.triangle").lhs, oracle_ruzsa(p, r), 1e-12);
    EXPECT_NEAR(find(rs, "ese.triangle").rhs, oracle_ruzsa(p, q) + oracle_ruzsa(q, r), 1e-12);
    const auto pp = oracle::convolve(a, a, m);
    EXPECT_NEAR(find(rs, "ese.plunnecke").lhs, oracle::entropy(oracle::power(pp, n + 1, m)), 1e-10);
    for (const auto& rep : rs) EXPECT_FALSE(rep.violated()) << rep.name;
  }
}

TEST(EseSuite, RejectsBadDepthAndHugeInstances) {
  const Dist u = uniform_range(Z, 0, 2);
  EXPECT_THROW(check_ese_suite(u, u, u, 0), PreconditionError);
  EXPECT_THROW(check_ese_suite(u, u, u, kMaxIteratedN + 1), PreconditionError);
  std::vector<GroupElement> pts;
  for (std::int64_t i = 0; i < 600; ++i) pts.push_back({i * i * 1000});
  const Dist sparse = Dist::uniform(Z, pts);
  EXPECT_THROW(check_ese_suite(sparse, sparse, sparse, 1), InstanceTooLargeError);
}

TEST(Mmt, MatchesOracle) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 40; ++t) {
    const GroupSpec g({0});
    const Dist p = random_dist(rng, g, 5), q = random_dist(rng, g, 5), r = random_dist(rng, g, 5);
    const auto a = oracle::pmf(p), b = oracle::pmf(q), c = oracle::pmf(r);
    const auto& m = g.moduli();
    const MetricReport rep = check_mmt(p, q, r);
    EXPECT_NEAR(rep.lhs, oracle::entropy(oracle::convolve(oracle::convolve(a, b, m), c, m)), 1e-12);
    EXPECT_NEAR(rep.rhs,
                0.5 * (oracle::entropy(oracle::convolve(a, b, m)) + oracle::entropy(oracle::convolve(b, c, m)) +
                       oracle::entropy(oracle::convolve(c, a, m))),
                1e-12);
    EXPECT_FALSE(rep.violated());
  }
}

TEST(Trivial, DependentAndIndependent) {
  const auto corr = pair(Zm(2), {{{0, 0}, {1, 2}}, {{1, 1}, {1, 2}}});
  const auto dep = check_trivial_dependent(corr);
  // X + X on Z/2 is 0: Ent 0 against 2 log 2.
  EXPECT_NEAR(find(dep, "triv.ent_sum_plus").lhs, 0.0, 1e-15);
  EXPECT_NEAR(find(dep, "triv.ent_sum_plus").rhs, 2 * kLog2, 1e-15);
  const Dist u = uniform_range(Z, 0, 2);
  const auto ind = check_trivial_independent(u, u);
  EXPECT_NEAR(find(ind, "triv.ruzsa_nonneg").rhs, 0.5 * kLog2, 1e-12);
  for (const auto& r : ind) EXPECT_FALSE(r.violated());
}

TEST(Lipschitz, TranslationInvariance) {
  const Dist x = make(Z, {{{0}, 1, 2}, {{1}, 1, 3}, {{3}, 1, 6}});
  const Dist y = make(Z, {{{0}, 1, 4}, {{2}, 3, 4}});
  const GroupElement c{5};
  double calls = 0.0;
  const TransportOracle zero = [&](const Dist& a, const Dist& b) {
    EXPECT_TRUE(dist_equal(a.translate(c), b));
    calls += 1;
    return 0.0;
  };
  const auto rs = check_lipschitz(x, x.translate(c), y, y.translate(c), zero);
  EXPECT_EQ(calls, 2.0);
  EXPECT_NEAR(find(rs, "lip.rrt").lhs, 0.0, 1e-12);
  EXPECT_NEAR(find(rs, "lip.doubtrans").lhs, 0.0, 1e-12);
  EXPECT_FALSE(find(rs, "lip.dubdub").violated());
}

TEST(Xysim, Examples) {
  const Dist p = make(Z, {{{0}, 1, 2}, {{1}, 1, 3}, {{3}, 1, 6}});
  EXPECT_NEAR(sumset_increase_lhs(p, Dist::point(Z, {4})), 0.0, 1e-15);
  const Dist u = uniform_range(Z, 0, 2);
  // 2 (1/2) [ (1/2) log+(2) + (1/2) log+(1) ]
  EXPECT_NEAR(sumset_increase_lhs(u, u), 0.5 * kLog2, 1e-15);
  const MetricReport r = check_xysim(u, u);
  EXPECT_NEAR(r.lhs, 0.0, 1e-15);
  EXPECT_EQ(r.rhs, 1.0);
}

TEST(Xysim, OracleFormula) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 50; ++t) {
    const Dist p = random_dist(rng, Zm(8), 6), q = random_dist(rng, Zm(8), 6);
    const auto a = oracle::pmf(p), b = oracle::pmf(q);
    const auto s = oracle::convolve(a, b, {8});
    double l = 0.0;
    for (const auto& [y, qy] : b) {
      for (const auto& [x, px] : a) {
        const double sz = s.at({oracle::wrap(x[0] + y[0], 8)});
        l += qy * px * std::max(std::log(px / sz), 0.0);
      }
    }
    EXPECT_NEAR(sumset_increase_lhs(p, q), l, 1e-12);
    EXPECT_FALSE(check_xysim(p, q).violated());
  }
}

TEST(Jensen, UniformHasNoHeavyLevels) {
  std::vector<GroupElement> a;
  for (std::int64_t i = 0; i < 16; ++i) a.push_back({i});
  const auto lv = jensen_level_sets(Dist::uniform(Z, a), a, 0.0);
  for (std::size_t k = 1; k < lv.levels.size(); ++k) EXPECT_TRUE(lv.levels[k].empty());
  EXPECT_EQ(lv.sharpened_sum, 0.0);
  EXPECT_FALSE(lv.report.violated());
}

TEST(Jensen, HeavyAtomOnSixteenPoints) {
  std::vector<GroupElement> a;
  std::vector<testing_util::A> atoms{{{0}, 1, 2}};
  for (std::int64_t i = 0; i < 16; ++i) a.push_back({i});
  for (std::int64_t i = 1; i < 16; ++i) atoms.push_back({{i}, 1, 30});
  const Dist p = make(Z, atoms);
  const double log_k = std::log(16.0) - (0.5 * kLog2 + 0.5 * std::log(30.0));
  const auto lv = jensen_level_sets(p, a, log_k);
  // 16 * 1/2 = 8 lies in [2^2, 2^4): level 2.  The tail 16/30 < 2 stays at level 0.
  ASSERT_EQ(lv.levels.size(), 3u);
  EXPECT_EQ(lv.levels[2], (std::vector<GroupElement>{{0}}));
  EXPECT_TRUE(lv.levels[1].empty());
  EXPECT_NEAR(lv.sharpened_sum, 0.5 * (2 * kLog2 - 1), 1e-15);
  EXPECT_NEAR(lv.weighted_sum, 2.0, 1e-15);
  EXPECT_FALSE(lv.report.violated());
  EXPECT_THROW(jensen_level_sets(p, a, log_k - 0.1), PreconditionError);
}

TEST(ConditionalSuite, FairBitsAndCorrelation) {
  const GroupSpec g = Zm(2);
  std::vector<std::pair<std::vector<GroupElement>, Rational>> t;
  for (std::int64_t x = 0; x < 2; ++x) t.push_back({{{x}, {x}, {1 - x}}, Rational(1, 2)});
  const auto rs = check_conditional_suite(JointDist::from_tuples({g, g, g}, t));
  for (const auto& r : rs) EXPECT_FALSE(r.violated()) << r.name;
  EXPECT_NEAR(find(rs, "cond.esob_upper").lhs, 0.0, 1e-15);
  EXPECT_EQ(find(rs, "cond.ento_equality").lhs, 0.0);  // dependent
}

TEST(ConditionalSuite, IndependenceGivesEquality) {
  const GroupSpec g = Zm(3);
  std::vector<std::pair<std::vector<GroupElement>, Rational>> t;
  for (std::int64_t x = 0; x < 3; ++x) {
    for (std::int64_t y = 0; y < 2; ++y) t.push_back({{{x}, {y}, {0}}, Rational(1, 6)});
  }
  const auto rs = check_conditional_suite(JointDist::from_tuples({g, g, g}, t));
  EXPECT_EQ(find(rs, "cond.ento_equality").lhs, 1.0);
  EXPECT_EQ(find(rs, "cond.ento_equality").rhs, 1.0);
  EXPECT_NEAR(find(rs, "cond.ento").slack, 0.0, 1e-15);
  EXPECT_NEAR(find(rs, "cond.ent_subadd").slack, 0.0, 1e-15);
}

TEST(Submodularity, Examples) {
  const GroupSpec b = Zm(2), b3({2, 2, 2}), b2({2, 2});
  std::vector<std::pair<std::vector<GroupElement>, Rational>> t;
  for (std::int64_t a = 0; a < 2; ++a) {
    for (std::int64_t bb = 0; bb < 2; ++bb) {
      for (std::int64_t c = 0; c < 2; ++c) {
        t.push_back({{{bb}, {a, bb}, {bb, c}, {a, bb, c}}, Rational(1, 8)});
      }
    }
  }
  const MetricReport r = submodularity_check(JointDist::from_tuples({b, b2, b2, b3}, t));
  EXPECT_NEAR(r.slack, 0.0, 1e-15);
  EXPECT_NEAR(r.lhs, 4 * kLog2, 1e-15);

  std::vector<std::pair<std::vector<GroupElement>, Rational>> same;
  for (std::int64_t x = 0; x < 3; ++x) same.push_back({{{x}, {x}, {x}, {x}}, Rational(1, 3)});
  const GroupSpec z3 = Zm(3);
  EXPECT_NEAR(submodularity_check(JointDist::from_tuples({z3, z3, z3, z3}, same)).slack, 0.0, 1e-15);

  std::vector<std::pair<std::vector<GroupElement>, Rational>> bad;
  for (std::int64_t x = 0; x < 2; ++x) bad.push_back({{{x}, {0, 0}, {0, 0}, {0, 0, 0}}, Rational(1, 2)});
  EXPECT_THROW(submodularity_check(JointDist::from_tuples({b, b2, b2, b3}, bad)), PreconditionError);
}

TEST(Scalar, Examples) {
  const double inv_e = 1.0 / std::numbers::e;
  EXPECT_NEAR(scalar::f(inv_e), inv_e, 1e-15);
  EXPECT_EQ(scalar::f(0.0), 0.0);
  EXPECT_EQ(scalar::f(1.0), 0.0);
  for (double x : {0.001, 0.1, 0.3, 0.5, 1.0}) {
    for (double y : {0.002, 0.2, 0.3, 0.9}) {
      for (const auto& r : scalar::check_all(x, y)) EXPECT_FALSE(r.violated()) << r.name << " " << x << " " << y;
    }
  }
  // sub_bound identity for y >= x: y log(y/x) + (x - y)
  const auto rs = scalar::check_all(0.1, 0.3);
  EXPECT_NEAR(find(rs, "scalar.sub_bound").lhs, 0.3 * std::log(3.0) - 0.2, 1e-15);
}
