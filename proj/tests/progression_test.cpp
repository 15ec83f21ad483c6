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
#include <random>

#include "entsum/errors.hpp"
#include "entsum/progression.hpp"
#include "helpers.hpp"

using namespace entsum;
using namespace testing_util;

namespace {

CosetProgression interval(const GroupSpec& g, std::int64_t step, std::int64_t n) {
  return CosetProgression{g, {{0}}, {0}, {{step}}, {n}};
}

}  // namespace

TEST(Enumerate, Examples) {
  EXPECT_EQ(enumerate(interval(Z, 1, 5)), (std::vector<GroupElement>{{0}, {1}, {2}, {3}, {4}}));
  const CosetProgression coset{Zm(4), {{0}, {2}}, {1}, {}, {}};
  EXPECT_EQ(enumerate(coset), (std::vector<GroupElement>{{1}, {3}}));
  EXPECT_EQ(enumerate(interval(Zm(4), 2, 3)), (std::vector<GroupElement>{{0}, {2}}));
}

TEST(Enumerate, CapAndValidation) {
  EXPECT_THROW(enumerate(interval(Z, 1, 200000)), InstanceTooLargeError);
  EXPECT_THROW(CosetProgression({Zm(4), {{0}, {1}}, {0}, {}, {}}).validate(), PreconditionError);
  EXPECT_THROW(interval(Z, 1, 0).validate(), PreconditionError);
  EXPECT_EQ(interval(Z, 3, 7).nominal_size(), 7);
}

TEST(Proper, Examples) {
  EXPECT_TRUE(is_t_proper(interval(Z, 1, 5), Rational(2)));
  EXPECT_FALSE(is_t_proper(interval(Zm(4), 2, 3), Rational(1)));
  EXPECT_TRUE(is_t_proper(interval(Zm(8), 1, 3), Rational(2)));
  EXPECT_FALSE(is_t_proper(interval(Zm(8), 1, 3), Rational(3)));
  EXPECT_TRUE(is_proper(CosetProgression{Zm(4), {{0}, {2}}, {1}, {}, {}}));
}

TEST(Proper, MonotoneInT) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 200; ++t) {
    const std::int64_t m = 2 + static_cast<std::int64_t>(rng() % 30);
    const GroupSpec g({m, 0});
    const CosetProgression cp{g,
                              {{0, 0}},
                              {static_cast<std::int64_t>(rng() % m), 0},
                              {{static_cast<std::int64_t>(rng() % m), static_cast<std::int64_t>(rng() % 2)},
                               {static_cast<std::int64_t>(rng() % m), 0}},
                              {1 + static_cast<std::int64_t>(rng() % 4), 1 + static_cast<std::int64_t>(rng() % 4)}};
    bool seen_false = false;
    for (int k = 2; k <= 8; ++k) {
      const bool proper = is_t_proper(cp, Rational(k, 2));
      if (seen_false) EXPECT_FALSE(proper);
      seen_false = seen_false || !proper;
    }
  }
}

TEST(UniformOn, Examples) {
  EXPECT_NEAR(entropy(uniform_on(interval(Z, 1, 5))), std::log(5.0), 1e-12);
  EXPECT_NEAR(entropy(uniform_on(interval(Zm(4), 2, 3))), std::log(2.0), 1e-12);
}

TEST(BoxEmbedding, IntervalTable) {
  const auto e = box_embedding(interval(Z, 1, 5), true);
  ASSERT_EQ(e.box_points().size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(e.images()[i], (GroupElement{static_cast<std::int64_t>(i)}));
    EXPECT_EQ(e.backward(e.images()[i]), e.box_points()[i]);
  }
  EXPECT_EQ(e.box_group(), GroupSpec({0, 0}));
}

TEST(BoxEmbedding, RankTwoSumsStayDistinct) {
  const GroupSpec z2({0, 0});
  const CosetProgression box{z2, {{0, 0}}, {0, 0}, {{1, 0}, {0, 1}}, {4, 4}};
  const auto e = box_embedding(box, true);
  EXPECT_EQ(e.images().size(), 16u);
  // Doubled box [0, 8)^2 of the same progression is still injective.
  EXPECT_TRUE(is_t_proper(box, Rational(2)));
  const Dist u = uniform_on(box);
  EXPECT_TRUE(dist_equal(e.pushforward(e.pullback(u)), u));
}

TEST(BoxEmbedding, NonProperIsRejectedWhenRequired) {
  EXPECT_THROW(box_embedding(interval(Zm(4), 2, 3), true), PreconditionError);
  const auto e = box_embedding(interval(Zm(4), 2, 3), false);
  EXPECT_FALSE(e.proper());
  EXPECT_EQ(e.images().size(), 3u);
}
