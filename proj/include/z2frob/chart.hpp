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

#ifndef Z2FROB_CHART_HPP
#define Z2FROB_CHART_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "grading.hpp"

namespace z2frob {

struct Coordinate {
    std::string name;
    DegreeVector degree;

    friend bool operator==(const Coordinate&, const Coordinate&) = default;
};

enum class CoordinateKind { base, odd, even_nonzero };

/// Reported truncation: a monomial is reported when its J-degree (total
/// exponent of nonzero-degree coordinates) is at most `j_order` and its base
/// degree is at most `base_order`.
struct Truncation {
    int j_order = 4;
    int base_order = 6;

    friend bool operator==(const Truncation&, const Truncation&) = default;
};

/// Extra orders carried beyond the reported box.
///
/// Storage keeps every monomial with J <= j_order + j and
/// 2*B + J <= 2*base_order + j_order + weight. Both bounds are respected by
/// products and by centered degree-preserving substitutions, so everything
/// except differentiation is exact on the stored set. A derivation lowers J by
/// at most one and 2B+J by at most two, which the guard absorbs.
struct Guard {
    int j = 2;
    int weight = 4;

    friend bool operator==(const Guard&, const Guard&) = default;
};

class Chart;
using ChartPtr = std::shared_ptr<const Chart>;

/// Coordinates of a chart centered at the base point, together with the
/// enumeration of every storable monomial.
///
/// Monomial indices follow the canonical order: by total degree B+J, then by
/// exponent vector in decreasing lexicographic order (chart order of
/// coordinates). Index 0 is the constant monomial.
class Chart {
   public:
    struct MonomialInfo {
        std::vector<std::uint8_t> exponents;
        int j_degree = 0;
        int base_degree = 0;
        std::uint32_t degree = 0;
        std::uint32_t odd_mask = 0;  // bit u set when odd coordinate u is present
        std::uint64_t code = 0;
        bool in_box = true;
        // support: (coordinate, exponent) pairs with exponent > 0, chart order
        std::vector<std::pair<int, int>> support;
        // suffix[u] = sum over coordinates v > u of e_v * deg(v), as a mask
        std::vector<std::uint32_t> suffix;
    };

    struct Product {
        int index;
        bool negative;
    };

    static ChartPtr make(int n, std::vector<Coordinate> coordinates, Truncation truncation = {}, Guard guard = {}) {
        return std::shared_ptr<const Chart>(new Chart(n, std::move(coordinates), truncation, guard));
    }

    /// Same coordinates at a different truncation.
    ChartPtr with_truncation(Truncation truncation) const { return make(n_, coordinates_, truncation, guard_); }
    ChartPtr with_truncation(Truncation truncation, Guard guard) const {
        return make(n_, coordinates_, truncation, guard);
    }

    int n() const noexcept { return n_; }
    std::size_t size() const noexcept { return coordinates_.size(); }
    const std::vector<Coordinate>& coordinates() const noexcept { return coordinates_; }
    const Coordinate& coordinate(std::size_t u) const { return coordinates_.at(u); }
    const DegreeVector& degree_of(std::size_t u) const { return coordinates_.at(u).degree; }
    CoordinateKind kind(std::size_t u) const { return kinds_.at(u); }
    bool is_base(std::size_t u) const { return kind(u) == CoordinateKind::base; }
    bool is_odd(std::size_t u) const { return kind(u) == CoordinateKind::odd; }
    const Truncation& truncation() const noexcept { return truncation_; }
    const Guard& guard() const noexcept { return guard_; }
    int max_j() const noexcept { return truncation_.j_order + guard_.j; }
    int max_weight() const noexcept { return 2 * truncation_.base_order + truncation_.j_order + guard_.weight; }

    std::size_t index_of(const std::string& name) const {
        for (std::size_t u = 0; u < coordinates_.size(); ++u)
            if (coordinates_[u].name == name) return u;
        throw UnknownCoordinate("unknown coordinate '" + name + "'");
    }
    std::optional<std::size_t> find(const std::string& name) const {
        for (std::size_t u = 0; u < coordinates_.size(); ++u)
            if (coordinates_[u].name == name) return u;
        return std::nullopt;
    }

    DegreeVector zero_degree() const { return DegreeVector(n_); }
    DegreeVector degree_from_mask(std::uint32_t bits) const { return DegreeVector(n_, bits); }

    /// Coordinates grouped by degree, each group in chart order.
    std::vector<std::pair<DegreeVector, std::vector<std::size_t>>> degree_classes() const {
        std::vector<std::pair<DegreeVector, std::vector<std::size_t>>> out;
        for (std::size_t u = 0; u < size(); ++u) {
            auto it = std::find_if(out.begin(), out.end(), [&](auto& p) { return p.first == degree_of(u); });
            if (it == out.end())
                out.push_back({degree_of(u), {u}});
            else
                it->second.push_back(u);
        }
        return out;
    }

    // --- monomial table ---------------------------------------------------

    std::size_t monomial_count() const noexcept { return monomials_.size(); }
    const MonomialInfo& monomial(int index) const { return monomials_[static_cast<std::size_t>(index)]; }

    std::optional<int> index_of_exponents(std::span<const int> exps) const {
        if (exps.size() != size()) return std::nullopt;
        std::uint64_t code = 0;
        int j = 0, b = 0;
        for (std::size_t u = 0; u < size(); ++u) {
            int e = exps[u];
            if (e < 0) return std::nullopt;
            if (is_odd(u) && e > 1) return std::nullopt;
            if (e > max_exponent_[u]) return std::nullopt;
            (is_base(u) ? b : j) += e;
            code += static_cast<std::uint64_t>(e) * radix_weight_[u];
        }
        if (j > max_j() || 2 * b + j > max_weight()) return std::nullopt;
        auto it = by_code_.find(code);
        if (it == by_code_.end()) return std::nullopt;
        return it->second;
    }

    int coordinate_monomial(std::size_t u) const { return coordinate_index_.at(u); }

    /// Index of the monomial with the exponent of `u` changed by `delta`.
    std::optional<int> adjust(int index, std::size_t u, int delta) const {
        const MonomialInfo& m = monomials_[static_cast<std::size_t>(index)];
        int e = m.exponents[u] + delta;
        if (e < 0 || e > max_exponent_[u]) return std::nullopt;
        int j = m.j_degree + (is_base(u) ? 0 : delta);
        int b = m.base_degree + (is_base(u) ? delta : 0);
        if (j > max_j() || 2 * b + j > max_weight()) return std::nullopt;
        auto it = by_code_.find(m.code + static_cast<std::uint64_t>(static_cast<std::int64_t>(delta)) * radix_weight_[u]);
        if (it == by_code_.end()) return std::nullopt;
        return it->second;
    }

    /// Canonical product of two monomials, or nullopt when it vanishes (odd
    /// square) or leaves the stored set.
    std::optional<Product> multiply(int a, int b) const {
        const MonomialInfo& ma = monomials_[static_cast<std::size_t>(a)];
        const MonomialInfo& mb = monomials_[static_cast<std::size_t>(b)];
        if (ma.odd_mask & mb.odd_mask) return std::nullopt;
        int j = ma.j_degree + mb.j_degree;
        if (j > max_j()) return std::nullopt;
        if (2 * (ma.base_degree + mb.base_degree) + j > max_weight()) return std::nullopt;
        auto it = by_code_.find(ma.code + mb.code);
        if (it == by_code_.end()) return std::nullopt;
        // Moving each factor of b leftwards past the factors of a on coordinates
        // later in chart order.
        unsigned sign = 0;
        for (auto [u, e] : mb.support)
            if (e & 1) sign ^= static_cast<unsigned>(scalar_product_bits(coordinates_[static_cast<std::size_t>(u)].degree.bits(), ma.suffix[static_cast<std::size_t>(u)]));
        return Product{it->second, sign != 0};
    }

    bool same_as(const Chart& other) const {
        return this == &other || (n_ == other.n_ && coordinates_ == other.coordinates_ &&
                                  truncation_ == other.truncation_ && guard_ == other.guard_);
    }
    /// Same coordinate list, truncation ignored.
    bool same_coordinates(const Chart& other) const {
        return this == &other || (n_ == other.n_ && coordinates_ == other.coordinates_);
    }

   private:
    Chart(int n, std::vector<Coordinate> coordinates, Truncation truncation, Guard guard)
        : n_(n), coordinates_(std::move(coordinates)), truncation_(truncation), guard_(guard) {
        if (n_ < 1 || n_ > DegreeVector::max_n) throw DimensionError("chart grading length must lie in [1, 32]");
        if (truncation_.j_order < 1 || truncation_.base_order < 1)
            throw ChartError("truncation orders must be positive");
        if (guard_.j < 0 || guard_.weight < 0) throw ChartError("guard orders must be nonnegative");
        if (coordinates_.empty()) throw ChartError("chart needs at least one coordinate");
        if (coordinates_.size() > 32) throw ChartError("at most 32 coordinates per chart");
        for (std::size_t u = 0; u < coordinates_.size(); ++u) {
            const auto& c = coordinates_[u];
            if (c.degree.size() != n_)
                throw DimensionError("coordinate '" + c.name + "' has degree of length " +
                                     std::to_string(c.degree.size()) + ", chart has n = " + std::to_string(n_));
            if (!valid_identifier(c.name)) throw ChartError("invalid coordinate name '" + c.name + "'");
            for (std::size_t v = 0; v < u; ++v)
                if (coordinates_[v].name == c.name) throw ChartError("duplicate coordinate name '" + c.name + "'");
            kinds_.push_back(c.degree.is_zero() ? CoordinateKind::base
                             : z2frob::is_odd(c.degree) ? CoordinateKind::odd
                                                        : CoordinateKind::even_nonzero);
        }
        build_table();
    }

   public:
    static bool valid_identifier(const std::string& s) {
        if (s.empty()) return false;
        auto alpha = [](char ch) { return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || ch == '_'; };
        if (!alpha(s[0])) return false;
        return std::all_of(s.begin(), s.end(), [&](char ch) { return alpha(ch) || (ch >= '0' && ch <= '9'); });
    }

   private:
    void build_table() {
        const std::size_t m = size();
        max_exponent_.resize(m);
        radix_weight_.resize(m);
        const int max_b = max_weight() / 2;
        std::uint64_t w = 1;
        for (std::size_t u = m; u-- > 0;) {
            max_exponent_[u] = is_odd(u) ? 1 : is_base(u) ? max_b : max_j();
            radix_weight_[u] = w;
            // digits never carry when two stored exponents are added
            std::uint64_t radix = 2 * static_cast<std::uint64_t>(max_exponent_[u]) + 1;
            if (w > UINT64_MAX / radix) throw ChartError("chart too large for monomial encoding");
            w *= radix;
        }

        std::vector<int> exps(m, 0);
        std::vector<std::vector<int>> all;
        enumerate(0, 0, 0, exps, all);
        std::sort(all.begin(), all.end(), [&](const std::vector<int>& a, const std::vector<int>& b) {
            int ta = 0, tb = 0;
            for (std::size_t u = 0; u < m; ++u) ta += a[u], tb += b[u];
            if (ta != tb) return ta < tb;
            return a > b;
        });

        monomials_.reserve(all.size());
        for (const auto& e : all) {
            MonomialInfo info;
            info.exponents.assign(e.begin(), e.end());
            info.suffix.assign(m, 0);
            std::uint32_t acc = 0;
            for (std::size_t u = m; u-- > 0;) {
                info.suffix[u] = acc;
                if (e[u] & 1) acc ^= coordinates_[u].degree.bits();
            }
            info.degree = acc;
            for (std::size_t u = 0; u < m; ++u) {
                if (e[u] == 0) continue;
                info.support.push_back({static_cast<int>(u), e[u]});
                (is_base(u) ? info.base_degree : info.j_degree) += e[u];
                if (is_odd(u)) info.odd_mask |= (1u << u);
                info.code += static_cast<std::uint64_t>(e[u]) * radix_weight_[u];
            }
            info.in_box = info.j_degree <= truncation_.j_order && info.base_degree <= truncation_.base_order;
            by_code_.emplace(info.code, static_cast<int>(monomials_.size()));
            monomials_.push_back(std::move(info));
        }

        coordinate_index_.resize(m, -1);
        for (std::size_t u = 0; u < m; ++u) {
            std::vector<int> unit(m, 0);
            unit[u] = 1;
            auto idx = index_of_exponents(unit);
            if (!idx) throw ChartError("truncation too small to hold coordinate '" + coordinates_[u].name + "'");
            coordinate_index_[u] = *idx;
        }
    }

    void enumerate(std::size_t u, int j, int b, std::vector<int>& exps, std::vector<std::vector<int>>& out) const {
        if (u == size()) {
            out.push_back(exps);
            return;
        }
        for (int e = 0; e <= max_exponent_[u]; ++e) {
            int nj = j + (is_base(u) ? 0 : e);
            int nb = b + (is_base(u) ? e : 0);
            if (nj > max_j() || 2 * nb + nj > max_weight()) break;
            exps[u] = e;
            enumerate(u + 1, nj, nb, exps, out);
        }
        exps[u] = 0;
    }

    int n_;
    std::vector<Coordinate> coordinates_;
    std::vector<CoordinateKind> kinds_;
    Truncation truncation_;
    Guard guard_;

    std::vector<int> max_exponent_;
    std::vector<std::uint64_t> radix_weight_;
    std::vector<MonomialInfo> monomials_;
    std::unordered_map<std::uint64_t, int> by_code_;
    std::vector<int> coordinate_index_;
};

inline void require_same_chart(const ChartPtr& a, const ChartPtr& b) {
    if (!a || !b || !a->same_as(*b)) throw ChartError("operands live on different charts");
}

}  // namespace z2frob

#endif  // Z2FROB_CHART_HPP
