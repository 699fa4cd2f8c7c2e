// Copyright 2026 The z2frob Authors
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

#include "oracles.hpp"

namespace z2frob {
namespace {

using testing::Rng;

ChartPtr chart_xtte(int kj = 3, int kb = 4) {
    return Chart::make(2, {{"x", {0, 0}}, {"t1", {0, 1}}, {"t2", {1, 0}}, {"e", {1, 1}}}, {kj, kb});
}

GradedSeries c(const ChartPtr& ch, const std::string& name) { return GradedSeries::coordinate(ch, name); }
GradedSeries k(const ChartPtr& ch, Rational q) { return GradedSeries::constant(ch, q); }

TEST(RowReducer, ReportsIndependence) {
    RowReducer r(3);
    EXPECT_TRUE(r.add({1, 2, 0}));
    EXPECT_TRUE(r.add({0, 1, 1}));
    EXPECT_FALSE(r.add({1, 4, 2}));
    EXPECT_TRUE(r.add({0, 0, 5}));
    EXPECT_EQ(r.rank(), 3u);
}

TEST(InvertRational, InverseAndSingular) {
    auto inv = invert_rational({{2, 1}, {1, 1}});
    ASSERT_TRUE(inv);
    EXPECT_EQ((*inv)[0][0], 1);
    EXPECT_EQ((*inv)[0][1], -1);
    EXPECT_EQ((*inv)[1][0], -1);
    EXPECT_EQ((*inv)[1][1], 2);
    EXPECT_FALSE(invert_rational({{1, 2}, {2, 4}}));
}

TEST(InvertModJ, GeometricSeriesInEvenSquare) {
    auto ch = chart_xtte(6, 4);
    DegreeVector zero = ch->zero_degree();
    auto e = c(ch, "e");
    GradedMatrix t(ch, {zero}, {zero}, {{k(ch, 1) + e * e}});
    GradedMatrix inv = invert_mod_J(t);
    GradedSeries expected = k(ch, 1) - e * e + e * e * e * e - e * e * e * e * e * e;
    EXPECT_TRUE(equal_in_box(inv(0, 0), expected));
    EXPECT_EQ((t * inv).boxed(), GradedMatrix::identity(ch, {zero}));
}

TEST(InvertModJ, MixedDegreeBlock) {
    auto ch = chart_xtte(3, 4);
    std::vector<DegreeVector> ds{ch->zero_degree(), ch->degree_of(3)};
    auto e = c(ch, "e");
    GradedMatrix t(ch, ds, ds, {{k(ch, 1), e}, {e, k(ch, 1)}});
    GradedMatrix inv = invert_mod_J(t);
    // (1 - e^2)^{-1} [[1, -e], [-e, 1]] cut at J-degree 3
    GradedSeries diag = k(ch, 1) + e * e;
    GradedSeries off = -e - e * e * e;
    EXPECT_TRUE(equal_in_box(inv(0, 0), diag));
    EXPECT_TRUE(equal_in_box(inv(1, 1), diag));
    EXPECT_TRUE(equal_in_box(inv(0, 1), off));
    EXPECT_TRUE(equal_in_box(inv(1, 0), off));
}

TEST(InvertModJ, IdentityIsFixed) {
    auto ch = chart_xtte();
    std::vector<DegreeVector> ds{ch->zero_degree(), ch->degree_of(1)};
    auto id = GradedMatrix::identity(ch, ds);
    EXPECT_EQ(invert_mod_J(id), id);
}

TEST(InvertModJ, Errors) {
    auto ch = chart_xtte();
    DegreeVector zero = ch->zero_degree();
    GradedMatrix nil(ch, {zero}, {zero}, {{c(ch, "t1") * c(ch, "t2") * c(ch, "e")}});
    EXPECT_THROW(invert_mod_J(nil), NotInvertibleModJ);
    nil.set(0, 0, c(ch, "x"));
    EXPECT_THROW(invert_mod_J(nil), NotInvertibleModJ);
    GradedMatrix rect(ch, {zero}, {zero, zero});
    EXPECT_THROW(invert_mod_J(rect), DimensionError);
    GradedMatrix mixed(ch, {zero}, {ch->degree_of(1)});
    EXPECT_THROW(invert_mod_J(mixed), HomogeneityError);
    EXPECT_THROW(GradedMatrix(ch, {zero}, {zero}, {{c(ch, "t1")}}), HomogeneityError);
}

TEST(InvertModJ, RandomInverseProperty) {
    Rng rng(11);
    auto ch = chart_xtte(3, 3);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t n = static_cast<std::size_t>(testing::uniform(rng, 1, 3));
        std::vector<DegreeVector> ds;
        for (std::size_t i = 0; i < n; ++i) ds.push_back(testing::random_degree(rng, 2));
        GradedMatrix t(ch, ds, ds);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                GradedSeries s = testing::random_series(rng, ch, ds[i] + ds[j], 2, 3, true);
                if (i == j) s += k(ch, testing::uniform(rng, 1, 3));
                t.set(i, j, std::move(s));
            }
        GradedMatrix inv = invert_mod_J(t);
        auto id = GradedMatrix::identity(ch, ds);
        EXPECT_EQ((t * inv).boxed(), id) << "trial " << trial;
        EXPECT_EQ((inv * t).boxed(), id) << "trial " << trial;
    }
}

TangentVector tv(const ChartPtr& ch, std::size_t u, Rational c) { return {ch->degree_of(u), {{u, c}}}; }

TEST(CompleteBasis, Examples) {
    auto ch = chart_xtte();
    EXPECT_EQ(complete_basis({tv(ch, 0, 1)}, ch), (std::vector<std::string>{"t1", "t2", "e"}));
    EXPECT_EQ(complete_basis({tv(ch, 1, 2)}, ch), (std::vector<std::string>{"x", "t2", "e"}));
    EXPECT_EQ(complete_basis({}, ch), (std::vector<std::string>{"x", "t1", "t2", "e"}));
    EXPECT_THROW(complete_basis({tv(ch, 0, 1), tv(ch, 0, 3)}, ch), DependentAtPoint);
    TangentVector bad{ch->zero_degree(), {{1, 1}}};
    EXPECT_THROW(complete_basis({bad}, ch), HomogeneityError);
}

TEST(CompleteBasis, FullRankProperty) {
    Rng rng(5);
    auto ch = Chart::make(1, {{"x", {0}}, {"y", {0}}, {"z", {0}}, {"s", {1}}, {"r", {1}}}, {2, 2});
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<TangentVector> vs;
        RowReducer check(ch->size());
        for (int m = testing::uniform(rng, 0, 3); m > 0; --m) {
            DegreeVector d(1, static_cast<std::uint32_t>(testing::uniform(rng, 0, 1)));
            TangentVector v{d, {}};
            std::vector<Rational> row(ch->size(), 0);
            for (std::size_t u = 0; u < ch->size(); ++u)
                if (ch->degree_of(u) == d && testing::uniform(rng, 0, 1)) {
                    v.components[u] = testing::small_rational(rng);
                    row[u] = v.components[u];
                }
            if (!check.add(row)) continue;
            vs.push_back(std::move(v));
        }
        auto added = complete_basis(vs, ch);
        ASSERT_EQ(added.size() + vs.size(), ch->size());
        RowReducer all(ch->size());
        for (const auto& v : vs) {
            std::vector<Rational> row(ch->size(), 0);
            for (const auto& [u, q] : v.components) row[u] = q;
            EXPECT_TRUE(all.add(row));
        }
        for (const auto& name : added) {
            std::vector<Rational> row(ch->size(), 0);
            row[ch->index_of(name)] = 1;
            EXPECT_TRUE(all.add(row));
        }
    }
}

}  // namespace
}  // namespace z2frob
