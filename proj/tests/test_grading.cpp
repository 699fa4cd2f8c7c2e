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

#include "z2frob/grading.hpp"

namespace z2frob {
namespace {

TEST(DegreeVector, ScalarProductExamples) {
    EXPECT_EQ(scalar_product({0, 0}, {1, 1}), 0);
    EXPECT_EQ(scalar_product({1, 0}, {1, 1}), 1);
    EXPECT_EQ(scalar_product({1, 1}, {1, 1}), 0);
}

TEST(DegreeVector, ParityExamples) {
    EXPECT_EQ(parity({0, 0}), Parity::even);
    EXPECT_EQ(parity({0, 1}), Parity::odd);
    EXPECT_EQ(parity({1, 1}), Parity::even);
    EXPECT_FALSE(is_odd({1, 1}));
}

TEST(DegreeVector, LengthMismatchIsDimensionError) {
    EXPECT_THROW(scalar_product({1, 0}, {1, 0, 1}), DimensionError);
    EXPECT_THROW(DegreeVector({1, 0}) + DegreeVector({1}), DimensionError);
}

TEST(DegreeVector, RejectsBadComponents) {
    EXPECT_THROW(DegreeVector({0, 2}), DimensionError);
    EXPECT_THROW(DegreeVector(std::vector<int>{}), DimensionError);
    EXPECT_THROW(DegreeVector(2, 4u), DimensionError);
}

TEST(DegreeVector, AdditionAndRendering) {
    DegreeVector a{1, 0, 1}, b{1, 1, 0};
    EXPECT_EQ(a + b, DegreeVector({0, 1, 1}));
    EXPECT_EQ(a.to_string(), "(1,0,1)");
    EXPECT_EQ(a.components(), (std::vector<int>{1, 0, 1}));
    EXPECT_TRUE(DegreeVector::zero(3).is_zero());
    EXPECT_EQ(koszul_sign({0, 1}, {1, 1}), -1);
    EXPECT_EQ(koszul_sign({1, 0}, {0, 1}), 1);
}

// Exhaustive over n <= 4.
TEST(DegreeVector, PairingIsSymmetricAndBilinear) {
    for (int n = 1; n <= 4; ++n) {
        const std::uint32_t top = 1u << n;
        for (std::uint32_t x = 0; x < top; ++x)
            for (std::uint32_t y = 0; y < top; ++y) {
                DegreeVector a(n, x), b(n, y);
                EXPECT_EQ(scalar_product(a, b), scalar_product(b, a));
                for (std::uint32_t z = 0; z < top; ++z) {
                    DegreeVector c(n, z);
                    EXPECT_EQ(scalar_product(a + b, c), (scalar_product(a, c) + scalar_product(b, c)) % 2);
                }
            }
    }
}

TEST(DegreeVector, ParityOfSumIsSumOfParities) {
    for (int n = 1; n <= 4; ++n)
        for (std::uint32_t x = 0; x < (1u << n); ++x)
            for (std::uint32_t y = 0; y < (1u << n); ++y) {
                DegreeVector a(n, x), b(n, y);
                EXPECT_EQ(is_odd(a + b), is_odd(a) != is_odd(b));
            }
}

TEST(DegreeVector, OrderingIsTotalAndLexicographic) {
    EXPECT_LT(DegreeVector({0, 1}), DegreeVector({1, 0}));
    EXPECT_LT(DegreeVector({0, 0}), DegreeVector({0, 1}));
    EXPECT_EQ(DegreeVector({1, 1}) <=> DegreeVector({1, 1}), std::strong_ordering::equal);
}

}  // namespace
}  // namespace z2frob
