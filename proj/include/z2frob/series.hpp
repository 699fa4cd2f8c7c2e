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

#ifndef Z2FROB_SERIES_HPP
#define Z2FROB_SERIES_HPP

#include <algorithm>
#include <climits>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "chart.hpp"
#include "errors.hpp"
#include "grading.hpp"

namespace z2frob {

using Rational = mpq_class;

inline std::string to_string(const Rational& q) { return q.get_str(); }

/// Rationals built from a numerator/denominator pair are not reduced by GMP.
inline Rational canonical(Rational q) {
    q.canonicalize();
    return q;
}

/// A truncated formal series on a chart: a finite sum of canonical monomials
/// with exact rational coefficients. Terms are kept sorted by monomial index
/// and never hold a zero coefficient.
class GradedSeries {
   public:
    struct Term {
        int index;
        Rational coeff;
    };

    GradedSeries() = default;
    explicit GradedSeries(ChartPtr chart) : chart_(std::move(chart)) {
        if (!chart_) throw ChartError("series needs a chart");
    }

    static GradedSeries constant(const ChartPtr& chart, const Rational& c) {
        GradedSeries s(chart);
        if (c != 0) s.terms_.push_back({0, canonical(c)});
        return s;
    }
    static GradedSeries coordinate(const ChartPtr& chart, std::size_t u) {
        GradedSeries s(chart);
        s.terms_.push_back({chart->coordinate_monomial(u), Rational(1)});
        return s;
    }
    static GradedSeries coordinate(const ChartPtr& chart, const std::string& name) {
        return coordinate(chart, chart->index_of(name));
    }
    /// c * (monomial with the given exponents); zero when the monomial is not
    /// storable.
    static GradedSeries monomial(const ChartPtr& chart, std::span<const int> exponents, const Rational& c = 1) {
        GradedSeries s(chart);
        if (c == 0) return s;
        if (auto idx = chart->index_of_exponents(exponents)) s.terms_.push_back({*idx, canonical(c)});
        return s;
    }
    /// Builds from unsorted (index, coeff) pairs, merging duplicates.
    static GradedSeries from_terms(const ChartPtr& chart, std::vector<Term> terms) {
        GradedSeries s(chart);
        std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.index < b.index; });
        for (auto& t : terms) {
            t.coeff.canonicalize();
            if (!s.terms_.empty() && s.terms_.back().index == t.index)
                s.terms_.back().coeff += t.coeff;
            else
                s.terms_.push_back(std::move(t));
        }
        s.drop_zeros();
        return s;
    }

    const ChartPtr& chart() const noexcept { return chart_; }
    std::span<const Term> terms() const noexcept { return terms_; }
    std::size_t term_count() const noexcept { return terms_.size(); }
    bool is_zero() const noexcept { return terms_.empty(); }

    Rational coefficient_at(int index) const {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), index,
                                   [](const Term& t, int i) { return t.index < i; });
        return (it != terms_.end() && it->index == index) ? it->coeff : Rational(0);
    }
    Rational coefficient(std::span<const int> exponents) const {
        auto idx = chart_->index_of_exponents(exponents);
        return idx ? coefficient_at(*idx) : Rational(0);
    }
    Rational constant_term() const { return coefficient_at(0); }

    /// Degree shared by every term; nullopt for zero or inhomogeneous series.
    std::optional<DegreeVector> degree() const {
        if (terms_.empty()) return std::nullopt;
        std::uint32_t d = chart_->monomial(terms_.front().index).degree;
        for (const auto& t : terms_)
            if (chart_->monomial(t.index).degree != d) return std::nullopt;
        return chart_->degree_from_mask(d);
    }
    bool is_homogeneous() const { return terms_.empty() || degree().has_value(); }
    /// Zero counts as homogeneous of every degree.
    bool is_homogeneous_of(const DegreeVector& d) const {
        for (const auto& t : terms_)
            if (chart_->monomial(t.index).degree != d.bits()) return false;
        return true;
    }

    /// Smallest J-degree among the terms (INT_MAX for zero): f lies in J^k iff
    /// j_valuation() >= k.
    int j_valuation() const {
        int v = INT_MAX;
        for (const auto& t : terms_) v = std::min(v, chart_->monomial(t.index).j_degree);
        return v;
    }

    GradedSeries operator-() const {
        GradedSeries r = *this;
        for (auto& t : r.terms_) t.coeff = -t.coeff;
        return r;
    }

    GradedSeries& operator+=(const GradedSeries& other) { return *this = combine(*this, other, false); }
    GradedSeries& operator-=(const GradedSeries& other) { return *this = combine(*this, other, true); }
    GradedSeries& operator*=(const Rational& c) {
        if (c == 0) {
            terms_.clear();
            return *this;
        }
        const Rational k = canonical(c);
        for (auto& t : terms_) t.coeff *= k;
        return *this;
    }

    friend GradedSeries operator+(const GradedSeries& a, const GradedSeries& b) { return combine(a, b, false); }
    friend GradedSeries operator-(const GradedSeries& a, const GradedSeries& b) { return combine(a, b, true); }
    friend GradedSeries operator*(GradedSeries a, const Rational& c) { return a *= c; }
    friend GradedSeries operator*(const Rational& c, GradedSeries a) { return a *= c; }
    friend GradedSeries operator*(const GradedSeries& a, const GradedSeries& b) { return multiply(a, b); }

    friend bool operator==(const GradedSeries& a, const GradedSeries& b) {
        if (a.terms_.size() != b.terms_.size()) return false;
        if (!a.terms_.empty()) require_same_chart(a.chart_, b.chart_);
        for (std::size_t i = 0; i < a.terms_.size(); ++i)
            if (a.terms_[i].index != b.terms_[i].index || a.terms_[i].coeff != b.terms_[i].coeff) return false;
        return true;
    }

    /// Koszul-signed product. `dropped` is set when a nonzero product term
    /// fell outside the stored set.
    friend GradedSeries multiply(const GradedSeries& a, const GradedSeries& b, bool* dropped = nullptr) {
        require_same_chart(a.chart_, b.chart_);
        const Chart& ch = *a.chart_;
        GradedSeries r(a.chart_);
        if (a.terms_.empty() || b.terms_.empty()) return r;
        std::vector<int> slot(ch.monomial_count(), -1);
        std::vector<Term>& out = r.terms_;
        Rational prod;
        for (const auto& ta : a.terms_) {
            for (const auto& tb : b.terms_) {
                auto p = ch.multiply(ta.index, tb.index);
                if (!p) {
                    if (dropped && !(ch.monomial(ta.index).odd_mask & ch.monomial(tb.index).odd_mask))
                        *dropped = true;
                    continue;
                }
                mpq_mul(prod.get_mpq_t(), ta.coeff.get_mpq_t(), tb.coeff.get_mpq_t());
                int& s = slot[static_cast<std::size_t>(p->index)];
                if (s < 0) {
                    s = static_cast<int>(out.size());
                    out.push_back({p->index, p->negative ? Rational(-prod) : prod});
                } else if (p->negative) {
                    out[static_cast<std::size_t>(s)].coeff -= prod;
                } else {
                    out[static_cast<std::size_t>(s)].coeff += prod;
                }
            }
        }
        std::sort(out.begin(), out.end(), [](const Term& x, const Term& y) { return x.index < y.index; });
        r.drop_zeros();
        return r;
    }

    /// Keeps only the terms accepted by `keep(monomial_info)`.
    template <class Pred>
    GradedSeries filtered(Pred keep) const {
        GradedSeries r(chart_);
        for (const auto& t : terms_)
            if (keep(chart_->monomial(t.index))) r.terms_.push_back(t);
        return r;
    }

    // Appends a term with index larger than every stored one; used by
    // builders that already produce sorted output.
    void push_sorted(int index, Rational c) {
        if (c != 0) terms_.push_back({index, std::move(c)});
    }

   private:
    static GradedSeries combine(const GradedSeries& a, const GradedSeries& b, bool subtract) {
        if (a.terms_.empty()) return subtract ? -b : b;
        if (b.terms_.empty()) return a;
        require_same_chart(a.chart_, b.chart_);
        GradedSeries r(a.chart_);
        r.terms_.reserve(a.terms_.size() + b.terms_.size());
        std::size_t i = 0, j = 0;
        while (i < a.terms_.size() || j < b.terms_.size()) {
            if (j == b.terms_.size() || (i < a.terms_.size() && a.terms_[i].index < b.terms_[j].index)) {
                r.terms_.push_back(a.terms_[i++]);
            } else if (i == a.terms_.size() || b.terms_[j].index < a.terms_[i].index) {
                r.terms_.push_back({b.terms_[j].index, subtract ? Rational(-b.terms_[j].coeff) : b.terms_[j].coeff});
                ++j;
            } else {
                Rational c = subtract ? Rational(a.terms_[i].coeff - b.terms_[j].coeff)
                                      : Rational(a.terms_[i].coeff + b.terms_[j].coeff);
                if (c != 0) r.terms_.push_back({a.terms_[i].index, std::move(c)});
                ++i, ++j;
            }
        }
        return r;
    }

    void drop_zeros() {
        terms_.erase(std::remove_if(terms_.begin(), terms_.end(), [](const Term& t) { return t.coeff == 0; }),
                     terms_.end());
    }

    ChartPtr chart_;
    std::vector<Term> terms_;
};

// --- derivations --------------------------------------------------------------

/// Graded left derivative: d_u(v w) = d_u(v) w + (-1)^<deg u, deg v> v d_u(w).
inline GradedSeries derive(std::size_t u, const GradedSeries& f) {
    const Chart& ch = *f.chart();
    if (u >= ch.size()) throw UnknownCoordinate("coordinate index out of range");
    const std::uint32_t du = ch.degree_of(u).bits();
    std::vector<GradedSeries::Term> out;
    for (const auto& t : f.terms()) {
        const auto& m = ch.monomial(t.index);
        int e = m.exponents[u];
        if (e == 0) continue;
        auto idx = ch.adjust(t.index, u, -1);
        if (!idx) throw InternalInconsistency("derivative left the monomial table");
        std::uint32_t prefix = m.degree ^ m.suffix[u] ^ ((e & 1) ? du : 0u);
        Rational c = t.coeff * e;
        if (scalar_product_bits(du, prefix)) c = -c;
        out.push_back({*idx, std::move(c)});
    }
    return GradedSeries::from_terms(f.chart(), std::move(out));
}

inline GradedSeries derive(const std::string& name, const GradedSeries& f) {
    return derive(f.chart()->index_of(name), f);
}

struct AntiderivativeResult {
    GradedSeries series;
    /// Some term of the antiderivative fell outside the stored set.
    bool truncation_loss = false;
};

/// Antiderivative in an even coordinate, normalized to have no u-free part
/// (it vanishes on u = 0), so that derive(u, result) == f.
inline AntiderivativeResult antiderivative(std::size_t u, const GradedSeries& f) {
    const Chart& ch = *f.chart();
    if (u >= ch.size()) throw UnknownCoordinate("coordinate index out of range");
    if (ch.is_odd(u))
        throw OddIntegrationError("cannot integrate in odd coordinate '" + ch.coordinate(u).name + "'");
    const std::uint32_t du = ch.degree_of(u).bits();
    AntiderivativeResult r{GradedSeries(f.chart()), false};
    std::vector<GradedSeries::Term> out;
    for (const auto& t : f.terms()) {
        const auto& m = ch.monomial(t.index);
        int e = m.exponents[u];
        auto idx = ch.adjust(t.index, u, +1);
        if (!idx) {
            r.truncation_loss = true;
            continue;
        }
        std::uint32_t prefix = m.degree ^ m.suffix[u] ^ ((e & 1) ? du : 0u);
        Rational c = t.coeff / (e + 1);
        if (scalar_product_bits(du, prefix)) c = -c;
        out.push_back({*idx, std::move(c)});
    }
    r.series = GradedSeries::from_terms(f.chart(), std::move(out));
    return r;
}

inline AntiderivativeResult antiderivative(const std::string& name, const GradedSeries& f) {
    return antiderivative(f.chart()->index_of(name), f);
}

// --- reduction and truncation ---------------------------------------------------

/// Image mod J: drops every term containing a nonzero-degree coordinate.
inline GradedSeries reduce_mod_J(const GradedSeries& f) {
    return f.filtered([](const Chart::MonomialInfo& m) { return m.j_degree == 0; });
}

/// Value at the base point.
inline Rational reduce_at_point(const GradedSeries& f) { return f.constant_term(); }

/// Projection onto the reported box of the chart's truncation.
inline GradedSeries box(const GradedSeries& f) {
    return f.filtered([](const Chart::MonomialInfo& m) { return m.in_box; });
}

/// Projection onto J <= j_order, B <= base_order.
inline GradedSeries truncate_to(const GradedSeries& f, const Truncation& t) {
    return f.filtered([&](const Chart::MonomialInfo& m) {
        return m.j_degree <= t.j_order && m.base_degree <= t.base_order;
    });
}

inline bool equal_in_box(const GradedSeries& a, const GradedSeries& b) { return box(a - b).is_zero(); }

/// Moves a series to another chart with the same coordinates, dropping terms
/// the target cannot store.
inline GradedSeries retruncate(const GradedSeries& f, const ChartPtr& target) {
    if (!f.chart()->same_coordinates(*target)) throw ChartError("retruncate needs identical coordinates");
    std::vector<GradedSeries::Term> out;
    std::vector<int> exps(target->size());
    for (const auto& t : f.terms()) {
        const auto& m = f.chart()->monomial(t.index);
        for (std::size_t u = 0; u < exps.size(); ++u) exps[u] = m.exponents[u];
        if (auto idx = target->index_of_exponents(exps)) out.push_back({*idx, t.coeff});
    }
    return GradedSeries::from_terms(target, std::move(out));
}

// --- substitution -----------------------------------------------------------------

/// Checks that `images` can be substituted for the coordinates of `chart`:
/// one homogeneous image per coordinate, of the coordinate's degree,
/// vanishing at the base point.
inline void check_substitution(const ChartPtr& chart, std::span<const GradedSeries> images) {
    if (images.size() != chart->size())
        throw DimensionError("substitution needs one image per coordinate");
    for (std::size_t u = 0; u < images.size(); ++u) {
        require_same_chart(chart, images[u].chart());
        const auto& c = chart->coordinate(u);
        if (!images[u].is_homogeneous_of(c.degree)) {
            auto d = images[u].degree();
            throw HomogeneityError("image of '" + c.name + "' must have degree " + c.degree.to_string() +
                                   (d ? ", got " + d->to_string() : std::string(", got an inhomogeneous series")));
        }
        if (images[u].constant_term() != 0)
            throw CenteringError("image of '" + c.name + "' does not vanish at the base point");
    }
}

namespace detail {

// Horner evaluation over coordinates in chart order:
// sum_e P_u^e S_e = S_0 + P_u (S_1 + P_u (S_2 + ...)).
inline GradedSeries substitute_rec(const ChartPtr& chart, std::span<const GradedSeries> images,
                                   std::vector<const GradedSeries::Term*>& terms, std::size_t u) {
    GradedSeries zero(chart);
    if (terms.empty()) return zero;
    if (u == chart->size()) {
        Rational c = 0;
        for (auto* t : terms) c += t->coeff;
        return GradedSeries::constant(chart, c);
    }
    int max_e = 0;
    for (auto* t : terms) max_e = std::max<int>(max_e, chart->monomial(t->index).exponents[u]);
    if (max_e == 0) return substitute_rec(chart, images, terms, u + 1);
    std::vector<std::vector<const GradedSeries::Term*>> parts(static_cast<std::size_t>(max_e) + 1);
    for (auto* t : terms) parts[chart->monomial(t->index).exponents[u]].push_back(t);
    GradedSeries acc = substitute_rec(chart, images, parts[static_cast<std::size_t>(max_e)], u + 1);
    for (int e = max_e - 1; e >= 0; --e) {
        acc = multiply(images[u], acc);
        if (!parts[static_cast<std::size_t>(e)].empty())
            acc += substitute_rec(chart, images, parts[static_cast<std::size_t>(e)], u + 1);
    }
    return acc;
}

}  // namespace detail

/// Formal composition f(images): every coordinate u is replaced by images[u].
inline GradedSeries substitute(const GradedSeries& f, std::span<const GradedSeries> images) {
    check_substitution(f.chart(), images);
    std::vector<const GradedSeries::Term*> terms;
    terms.reserve(f.term_count());
    for (const auto& t : f.terms()) terms.push_back(&t);
    return detail::substitute_rec(f.chart(), images, terms, 0);
}

/// Identity images for a chart.
inline std::vector<GradedSeries> identity_images(const ChartPtr& chart) {
    std::vector<GradedSeries> out;
    for (std::size_t u = 0; u < chart->size(); ++u) out.push_back(GradedSeries::coordinate(chart, u));
    return out;
}

}  // namespace z2frob

#endif  // Z2FROB_SERIES_HPP
