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

#ifndef Z2FROB_FIELDS_HPP
#define Z2FROB_FIELDS_HPP

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "chart.hpp"
#include "errors.hpp"
#include "linalg.hpp"
#include "series.hpp"

namespace z2frob {

/// Homogeneous derivation sum_u a_u d/du of the chart ring; a_u has degree
/// deg(X) + deg(u).
class VectorField {
   public:
    VectorField() = default;
    VectorField(ChartPtr chart, DegreeVector degree, std::vector<GradedSeries> coefficients)
        : chart_(std::move(chart)), degree_(degree), coeffs_(std::move(coefficients)) {
        if (!chart_) throw ChartError("vector field needs a chart");
        if (degree_.size() != chart_->n()) throw DimensionError("field degree has wrong length");
        if (coeffs_.size() != chart_->size()) throw DimensionError("field needs one coefficient per coordinate");
        for (std::size_t u = 0; u < coeffs_.size(); ++u) {
            require_same_chart(chart_, coeffs_[u].chart());
            DegreeVector want = degree_ + chart_->degree_of(u);
            if (!coeffs_[u].is_homogeneous_of(want))
                throw HomogeneityError("coefficient on '" + chart_->coordinate(u).name + "' must have degree " +
                                       want.to_string() + " for a field of degree " + degree_.to_string());
        }
    }

    static VectorField zero(const ChartPtr& chart, const DegreeVector& degree) {
        return VectorField(chart, degree, std::vector<GradedSeries>(chart->size(), GradedSeries(chart)));
    }
    /// The coordinate derivation d/du.
    static VectorField coordinate(const ChartPtr& chart, std::size_t u) {
        std::vector<GradedSeries> c(chart->size(), GradedSeries(chart));
        c[u] = GradedSeries::constant(chart, 1);
        return VectorField(chart, chart->degree_of(u), std::move(c));
    }
    static VectorField coordinate(const ChartPtr& chart, const std::string& name) {
        return coordinate(chart, chart->index_of(name));
    }
    /// Degree inferred from the nonzero coefficients; the zero field gets degree 0.
    static VectorField infer(const ChartPtr& chart, std::vector<GradedSeries> coefficients) {
        std::optional<DegreeVector> d;
        for (std::size_t u = 0; u < coefficients.size() && u < chart->size(); ++u) {
            if (coefficients[u].is_zero()) continue;
            auto cd = coefficients[u].degree();
            if (!cd) throw HomogeneityError("coefficient on '" + chart->coordinate(u).name + "' is inhomogeneous");
            DegreeVector fd = *cd + chart->degree_of(u);
            if (d && *d != fd) throw HomogeneityError("coefficients imply different field degrees");
            d = fd;
        }
        return VectorField(chart, d.value_or(chart->zero_degree()), std::move(coefficients));
    }

    const ChartPtr& chart() const noexcept { return chart_; }
    const DegreeVector& degree() const noexcept { return degree_; }
    const std::vector<GradedSeries>& coefficients() const noexcept { return coeffs_; }
    const GradedSeries& coefficient(std::size_t u) const { return coeffs_.at(u); }
    const GradedSeries& coefficient(const std::string& name) const { return coeffs_.at(chart_->index_of(name)); }

    bool is_zero() const {
        for (const auto& c : coeffs_)
            if (!c.is_zero()) return false;
        return true;
    }

    VectorField boxed() const {
        VectorField r = *this;
        for (auto& c : r.coeffs_) c = box(c);
        return r;
    }

    friend VectorField operator+(VectorField a, const VectorField& b) {
        a.check_compatible(b);
        for (std::size_t u = 0; u < a.coeffs_.size(); ++u) a.coeffs_[u] += b.coeffs_[u];
        return a;
    }
    friend VectorField operator-(VectorField a, const VectorField& b) {
        a.check_compatible(b);
        for (std::size_t u = 0; u < a.coeffs_.size(); ++u) a.coeffs_[u] -= b.coeffs_[u];
        return a;
    }
    VectorField operator-() const {
        VectorField r = *this;
        for (auto& c : r.coeffs_) c = -c;
        return r;
    }
    /// (f X)(g) = f X(g); f must be homogeneous.
    friend VectorField operator*(const GradedSeries& f, const VectorField& x) {
        require_same_chart(f.chart(), x.chart_);
        if (f.is_zero()) return zero(x.chart_, x.degree_);
        auto d = f.degree();
        if (!d) throw HomogeneityError("cannot scale a field by an inhomogeneous series");
        std::vector<GradedSeries> c;
        c.reserve(x.coeffs_.size());
        for (const auto& a : x.coeffs_) c.push_back(f * a);
        return VectorField(x.chart_, *d + x.degree_, std::move(c));
    }
    friend VectorField operator*(const Rational& q, VectorField x) {
        for (auto& c : x.coeffs_) c *= q;
        return x;
    }
    friend bool operator==(const VectorField& a, const VectorField& b) {
        if (a.is_zero() && b.is_zero()) return true;
        return a.degree_ == b.degree_ && a.coeffs_ == b.coeffs_;
    }

   private:
    void check_compatible(const VectorField& b) const {
        require_same_chart(chart_, b.chart_);
        if (degree_ != b.degree_ && !b.is_zero() && !is_zero())
            throw HomogeneityError("adding fields of degrees " + degree_.to_string() + " and " + b.degree_.to_string());
    }

    ChartPtr chart_;
    DegreeVector degree_;
    std::vector<GradedSeries> coeffs_;
};

inline bool equal_in_box(const VectorField& a, const VectorField& b) {
    require_same_chart(a.chart(), b.chart());
    for (std::size_t u = 0; u < a.chart()->size(); ++u)
        if (!equal_in_box(a.coefficient(u), b.coefficient(u))) return false;
    return true;
}

/// X(f) = sum_u a_u d_u f.
inline GradedSeries apply(const VectorField& x, const GradedSeries& f) {
    require_same_chart(x.chart(), f.chart());
    GradedSeries out(f.chart());
    for (std::size_t u = 0; u < x.chart()->size(); ++u) {
        if (x.coefficient(u).is_zero()) continue;
        GradedSeries d = derive(u, f);
        if (!d.is_zero()) out += x.coefficient(u) * d;
    }
    return out;
}

/// Graded commutator [X,Y] = XY - (-1)^<deg X, deg Y> YX, coefficient-wise:
/// [X,Y]_v = X(b_v) - (-1)^<X,Y> Y(a_v).
inline VectorField bracket(const VectorField& x, const VectorField& y) {
    require_same_chart(x.chart(), y.chart());
    const bool negative = scalar_product(x.degree(), y.degree()) != 0;
    std::vector<GradedSeries> c;
    c.reserve(x.chart()->size());
    for (std::size_t v = 0; v < x.chart()->size(); ++v) {
        GradedSeries xy = apply(x, y.coefficient(v));
        GradedSeries yx = apply(y, x.coefficient(v));
        c.push_back(negative ? xy + yx : xy - yx);
    }
    return VectorField(x.chart(), x.degree() + y.degree(), std::move(c));
}

inline TangentVector tangent_at_point(const VectorField& x) {
    TangentVector t{x.degree(), {}};
    for (std::size_t u = 0; u < x.chart()->size(); ++u) {
        Rational c = x.coefficient(u).constant_term();
        if (c != 0) t.components[u] = c;
    }
    return t;
}

// --- coordinate changes --------------------------------------------------------------

/// A centered, degree-preserving change of coordinates on one chart.
///
/// `forward()[v]` expresses the new coordinate v in the old coordinates;
/// `inverse()[u]` expresses the old coordinate u in the new ones. Old and new
/// coordinates share names and degrees.
class CoordinateChange {
   public:
    static CoordinateChange identity(const ChartPtr& chart) {
        auto id = identity_images(chart);
        return CoordinateChange(chart, id, id);
    }

    static CoordinateChange from_forward(std::vector<GradedSeries> forward) {
        if (forward.empty()) throw DimensionError("coordinate change needs images");
        ChartPtr chart = forward.front().chart();
        check_substitution(chart, forward);
        auto inverse = invert_images(chart, forward);
        return CoordinateChange(chart, std::move(forward), std::move(inverse));
    }
    static CoordinateChange from_inverse(std::vector<GradedSeries> inverse) {
        CoordinateChange c = from_forward(std::move(inverse));
        std::swap(c.forward_, c.inverse_);
        return c;
    }
    /// Trusts the caller that the two directions are mutually inverse.
    static CoordinateChange from_pair(std::vector<GradedSeries> forward, std::vector<GradedSeries> inverse) {
        ChartPtr chart = forward.at(0).chart();
        check_substitution(chart, forward);
        check_substitution(chart, inverse);
        return CoordinateChange(chart, std::move(forward), std::move(inverse));
    }

    const ChartPtr& chart() const noexcept { return chart_; }
    const std::vector<GradedSeries>& forward() const noexcept { return forward_; }
    const std::vector<GradedSeries>& inverse() const noexcept { return inverse_; }

    bool is_identity() const {
        for (std::size_t u = 0; u < chart_->size(); ++u)
            if (forward_[u] != GradedSeries::coordinate(chart_, u)) return false;
        return true;
    }

    /// Constant-term Jacobian d(new v)/d(old u), restricted to one degree class.
    static RationalMatrix linear_block(const ChartPtr& chart, const std::vector<GradedSeries>& images,
                                       const std::vector<std::size_t>& coords) {
        RationalMatrix m(coords.size(), std::vector<Rational>(coords.size(), 0));
        for (std::size_t a = 0; a < coords.size(); ++a)
            for (std::size_t b = 0; b < coords.size(); ++b)
                m[a][b] = images[coords[a]].coefficient_at(chart->coordinate_monomial(coords[b]));
        return m;
    }

   private:
    CoordinateChange(ChartPtr chart, std::vector<GradedSeries> forward, std::vector<GradedSeries> inverse)
        : chart_(std::move(chart)), forward_(std::move(forward)), inverse_(std::move(inverse)) {}

    // Solves forward(psi) = id by the fixed point psi = L^{-1}(y - N(psi)),
    // where L is the linear part and N the remainder of order >= 2. Each round
    // gains one step of the 2B+J filtration.
    static std::vector<GradedSeries> invert_images(const ChartPtr& chart, const std::vector<GradedSeries>& fwd) {
        const std::size_t m = chart->size();
        std::vector<GradedSeries> nonlinear = fwd;
        std::vector<std::vector<std::pair<std::size_t, Rational>>> linv(m);  // row u of L^{-1}
        for (const auto& [degree, coords] : chart->degree_classes()) {
            RationalMatrix block = linear_block(chart, fwd, coords);
            auto inv = invert_rational(block);
            if (!inv)
                throw JacobianSingular("Jacobian block of degree " + degree.to_string() +
                                       " is singular at the base point");
            for (std::size_t a = 0; a < coords.size(); ++a) {
                for (std::size_t b = 0; b < coords.size(); ++b) {
                    if (block[a][b] != 0)
                        nonlinear[coords[a]] -= block[a][b] * GradedSeries::coordinate(chart, coords[b]);
                    if ((*inv)[a][b] != 0) linv[coords[a]].push_back({coords[b], (*inv)[a][b]});
                }
            }
        }
        auto solve = [&](const std::vector<GradedSeries>& rhs) {
            std::vector<GradedSeries> out(m, GradedSeries(chart));
            for (std::size_t u = 0; u < m; ++u)
                for (const auto& [v, c] : linv[u]) out[u] += c * rhs[v];
            return out;
        };
        std::vector<GradedSeries> y = identity_images(chart);
        std::vector<GradedSeries> psi = solve(y);
        bool all_linear = true;
        for (const auto& n : nonlinear) all_linear = all_linear && n.is_zero();
        if (all_linear) return psi;
        const int cap = chart->max_weight() + chart->max_j() + 2;
        for (int round = 0; round <= cap; ++round) {
            std::vector<GradedSeries> rhs = y;
            for (std::size_t v = 0; v < m; ++v)
                if (!nonlinear[v].is_zero()) rhs[v] -= substitute(nonlinear[v], psi);
            std::vector<GradedSeries> next = solve(rhs);
            if (next == psi) return psi;
            psi = std::move(next);
        }
        throw InternalInconsistency("inverse of coordinate change failed to converge");
    }

    ChartPtr chart_;
    std::vector<GradedSeries> forward_;
    std::vector<GradedSeries> inverse_;
};

inline GradedSeries substitute(const GradedSeries& f, const CoordinateChange& change) {
    return substitute(f, change.forward());
}

inline CoordinateChange invert_change(const CoordinateChange& change) {
    return CoordinateChange::from_pair(change.inverse(), change.forward());
}

/// First `first`, then `then`: new = then(first(old)).
inline CoordinateChange compose(const CoordinateChange& first, const CoordinateChange& then) {
    require_same_chart(first.chart(), then.chart());
    const std::size_t m = first.chart()->size();
    std::vector<GradedSeries> fwd, inv;
    fwd.reserve(m);
    inv.reserve(m);
    for (std::size_t v = 0; v < m; ++v) fwd.push_back(substitute(then.forward()[v], first.forward()));
    for (std::size_t u = 0; u < m; ++u) inv.push_back(substitute(first.inverse()[u], then.inverse()));
    return CoordinateChange::from_pair(std::move(fwd), std::move(inv));
}

/// X expressed in the new coordinates: Y(v) = X(forward_v) rewritten through
/// the inverse.
inline VectorField pushforward(const CoordinateChange& change, const VectorField& x) {
    require_same_chart(change.chart(), x.chart());
    std::vector<GradedSeries> c;
    c.reserve(x.chart()->size());
    for (std::size_t v = 0; v < x.chart()->size(); ++v) {
        GradedSeries image = apply(x, change.forward()[v]);
        c.push_back(image.is_zero() ? image : substitute(image, change.inverse()));
    }
    return VectorField(x.chart(), x.degree(), std::move(c));
}

}  // namespace z2frob

#endif  // Z2FROB_FIELDS_HPP
