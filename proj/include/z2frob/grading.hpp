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

#ifndef Z2FROB_GRADING_HPP
#define Z2FROB_GRADING_HPP

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "errors.hpp"

namespace z2frob {

enum class Parity { even, odd };

/// An element of (Z_2)^n. Bit i of the mask is the i-th component.
class DegreeVector {
   public:
    static constexpr int max_n = 32;

    DegreeVector() = default;
    explicit DegreeVector(int n, std::uint32_t bits = 0) : bits_(bits), n_(n) {
        if (n < 1 || n > max_n) throw DimensionError("degree vector length must lie in [1, 32]");
        if (n < max_n && (bits >> n) != 0) throw DimensionError("degree bits exceed vector length");
    }
    DegreeVector(std::initializer_list<int> components) : DegreeVector(std::vector<int>(components)) {}
    explicit DegreeVector(const std::vector<int>& components) : n_(static_cast<int>(components.size())) {
        if (n_ < 1 || n_ > max_n) throw DimensionError("degree vector length must lie in [1, 32]");
        for (int i = 0; i < n_; ++i) {
            if (components[i] != 0 && components[i] != 1)
                throw DimensionError("degree vector components must be 0 or 1");
            if (components[i]) bits_ |= (1u << i);
        }
    }

    static DegreeVector zero(int n) { return DegreeVector(n); }

    int size() const noexcept { return n_; }
    std::uint32_t bits() const noexcept { return bits_; }
    int operator[](int i) const { return (bits_ >> i) & 1u; }
    bool is_zero() const noexcept { return bits_ == 0; }

    std::vector<int> components() const {
        std::vector<int> out(n_);
        for (int i = 0; i < n_; ++i) out[i] = (*this)[i];
        return out;
    }

    DegreeVector& operator+=(const DegreeVector& other) {
        check_same_length(*this, other);
        bits_ ^= other.bits_;
        return *this;
    }
    friend DegreeVector operator+(DegreeVector a, const DegreeVector& b) { return a += b; }
    friend bool operator==(const DegreeVector&, const DegreeVector&) = default;
    friend auto operator<=>(const DegreeVector& a, const DegreeVector& b) {
        if (auto c = a.n_ <=> b.n_; c != 0) return c;
        // lexicographic on components, first component most significant
        for (int i = 0; i < a.n_; ++i)
            if (auto c = a[i] <=> b[i]; c != 0) return c;
        return std::strong_ordering::equal;
    }

    /// "(1,0)" style rendering.
    std::string to_string() const {
        std::string s = "(";
        for (int i = 0; i < n_; ++i) {
            if (i) s += ',';
            s += char('0' + (*this)[i]);
        }
        return s + ")";
    }

    static void check_same_length(const DegreeVector& a, const DegreeVector& b) {
        if (a.n_ != b.n_)
            throw DimensionError("degree vectors of different lengths: " + a.to_string() + " vs " + b.to_string());
    }

   private:
    std::uint32_t bits_ = 0;
    int n_ = 1;
};

/// The pairing <a,b> = sum a_i b_i mod 2 that drives every Koszul sign.
inline int scalar_product(const DegreeVector& a, const DegreeVector& b) {
    DegreeVector::check_same_length(a, b);
    return std::popcount(a.bits() & b.bits()) & 1;
}

/// Raw-mask variant used in inner loops where lengths are known to agree.
inline int scalar_product_bits(std::uint32_t a, std::uint32_t b) noexcept { return std::popcount(a & b) & 1; }

inline Parity parity(const DegreeVector& a) { return scalar_product(a, a) ? Parity::odd : Parity::even; }

inline bool is_odd(const DegreeVector& a) { return parity(a) == Parity::odd; }

/// (-1)^<a,b>
inline int koszul_sign(const DegreeVector& a, const DegreeVector& b) { return scalar_product(a, b) ? -1 : 1; }

}  // namespace z2frob

#endif  // Z2FROB_GRADING_HPP
