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

#ifndef Z2FROB_DISTRIBUTION_HPP
#define Z2FROB_DISTRIBUTION_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chart.hpp"
#include "errors.hpp"
#include "fields.hpp"
#include "linalg.hpp"
#include "series.hpp"

namespace z2frob {

/// A distribution on a chart, given by generators whose tangent vectors at
/// the base point are independent.
class Distribution {
   public:
    Distribution(ChartPtr chart, std::vector<VectorField> generators)
        : chart_(std::move(chart)), generators_(std::move(generators)) {
        for (const auto& g : generators_) require_same_chart(chart_, g.chart());
    }

    const ChartPtr& chart() const noexcept { return chart_; }
    const std::vector<VectorField>& generators() const noexcept { return generators_; }
    std::size_t size() const noexcept { return generators_.size(); }

   private:
    ChartPtr chart_;
    std::vector<VectorField> generators_;
};

/// Generator count per degree.
struct Rank {
    std::map<DegreeVector, int> counts;

    int total() const {
        int t = 0;
        for (const auto& [d, c] : counts) t += c;
        return t;
    }
    friend bool operator==(const Rank&, const Rank&) = default;
};

inline Rank rank_of(const Distribution& d) {
    std::vector<TangentVector> tangents;
    for (const auto& g : d.generators()) tangents.push_back(tangent_at_point(g));
    complete_basis(tangents, d.chart());  // throws DependentAtPoint
    Rank r;
    for (const auto& g : d.generators()) ++r.counts[g.degree()];
    return r;
}

/// Generators in the form X_k = d/d(pivot_k) + terms on non-pivot coordinates.
struct NormalizedDistribution {
    Distribution distribution;
    /// pivot coordinate of each normalized generator, increasing chart order
    std::vector<std::size_t> pivots;
    /// normalized_k = sum_j recombination(k, j) * original_j
    GradedMatrix recombination;
    /// original generator index behind column j of `recombination`
    std::vector<std::size_t> original_order;
};

/// Pivot choice: within each degree class, columns are scanned with the
/// `preferred` coordinates first and then in chart order; a column becomes a
/// pivot when it raises the rank of the constant-term matrix.
inline NormalizedDistribution normalize_generators(const Distribution& d,
                                                   const std::vector<std::size_t>& preferred = {}) {
    const ChartPtr& chart = d.chart();
    const auto& gens = d.generators();
    std::vector<std::size_t> scan;
    for (std::size_t u : preferred) scan.push_back(u);
    for (std::size_t u = 0; u < chart->size(); ++u)
        if (std::find(scan.begin(), scan.end(), u) == scan.end()) scan.push_back(u);

    std::vector<std::size_t> row_order;     // generators grouped by degree class
    std::vector<std::size_t> pivot_columns;  // matching pivots, class by class
    std::vector<bool> used(gens.size(), false);
    for (const auto& [degree, coords] : chart->degree_classes()) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < gens.size(); ++i)
            if (gens[i].degree() == degree) rows.push_back(i), used[i] = true;
        if (rows.empty()) continue;
        RowReducer reducer(rows.size());
        std::vector<std::size_t> chosen;
        for (std::size_t u : scan) {
            if (chart->degree_of(u) != degree) continue;
            std::vector<Rational> column(rows.size());
            for (std::size_t r = 0; r < rows.size(); ++r) column[r] = gens[rows[r]].coefficient(u).constant_term();
            if (reducer.add(std::move(column))) chosen.push_back(u);
            if (chosen.size() == rows.size()) break;
        }
        if (chosen.size() < rows.size())
            throw DependentAtPoint("generators of degree " + degree.to_string() + " are dependent at the base point");
        std::sort(chosen.begin(), chosen.end());
        row_order.insert(row_order.end(), rows.begin(), rows.end());
        pivot_columns.insert(pivot_columns.end(), chosen.begin(), chosen.end());
    }
    for (std::size_t i = 0; i < gens.size(); ++i)
        if (!used[i]) throw DependentAtPoint("generator of degree " + gens[i].degree().to_string() +
                                             " vanishes at the base point");

    std::vector<DegreeVector> degrees;
    for (std::size_t i : row_order) degrees.push_back(gens[i].degree());
    GradedMatrix t0(chart, degrees, degrees);
    for (std::size_t r = 0; r < row_order.size(); ++r)
        for (std::size_t c = 0; c < pivot_columns.size(); ++c)
            t0.set(r, c, gens[row_order[r]].coefficient(pivot_columns[c]));
    GradedMatrix inv = invert_mod_J(t0);

    std::vector<std::pair<std::size_t, VectorField>> normalized;
    for (std::size_t k = 0; k < row_order.size(); ++k) {
        VectorField acc = VectorField::zero(chart, degrees[k]);
        for (std::size_t j = 0; j < row_order.size(); ++j)
            if (!inv(k, j).is_zero()) acc = acc + inv(k, j) * gens[row_order[j]];
        // pin the pivot block to the identity exactly
        std::vector<GradedSeries> coeffs = acc.coefficients();
        for (std::size_t c = 0; c < pivot_columns.size(); ++c)
            coeffs[pivot_columns[c]] = c == k ? GradedSeries::constant(chart, 1) : GradedSeries(chart);
        normalized.push_back({pivot_columns[k], VectorField(chart, degrees[k], std::move(coeffs))});
    }
    // reorder by pivot, permuting the recombination rows alike
    std::vector<std::size_t> perm(normalized.size());
    for (std::size_t k = 0; k < perm.size(); ++k) perm[k] = k;
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return normalized[a].first < normalized[b].first; });
    std::vector<VectorField> out;
    std::vector<std::size_t> pivots;
    std::vector<DegreeVector> out_degrees;
    for (std::size_t k : perm) {
        out.push_back(normalized[k].second);
        pivots.push_back(normalized[k].first);
        out_degrees.push_back(degrees[k]);
    }
    GradedMatrix recombination(chart, out_degrees, degrees);
    for (std::size_t k = 0; k < perm.size(); ++k)
        for (std::size_t j = 0; j < degrees.size(); ++j) recombination.set(k, j, inv(perm[k], j));
    return NormalizedDistribution{Distribution(chart, std::move(out)), std::move(pivots), std::move(recombination),
                                  std::move(row_order)};
}

struct Membership {
    bool member = false;
    /// X = sum_t coefficients[t] * generator_t (original generators of D)
    std::vector<GradedSeries> coefficients;
    /// first coordinate carrying a residual, with the residual coefficient
    std::optional<std::pair<std::size_t, GradedSeries>> obstruction;
    /// X minus its projection onto D, restricted to the reported box
    std::optional<VectorField> residual;
};

/// Membership against an already normalized distribution; coefficients refer
/// to the normalized generators.
inline Membership membership(const VectorField& x, const NormalizedDistribution& nd) {
    const auto& gens = nd.distribution.generators();
    Membership m;
    VectorField rest = x;
    for (std::size_t t = 0; t < gens.size(); ++t) {
        GradedSeries f = x.coefficient(nd.pivots[t]);
        m.coefficients.push_back(f);
        if (!f.is_zero()) rest = rest - f * gens[t];
    }
    VectorField residual = rest.boxed();
    m.member = residual.is_zero();
    if (!m.member) {
        for (std::size_t u = 0; u < residual.chart()->size(); ++u)
            if (!residual.coefficient(u).is_zero()) {
                m.obstruction = {u, residual.coefficient(u)};
                break;
            }
        m.residual = std::move(residual);
    }
    return m;
}

/// Solves X = sum f_t g_t over the generators of D as given.
inline Membership membership(const VectorField& x, const Distribution& d) {
    if (d.size() == 0) {
        Membership m;
        m.member = x.boxed().is_zero();
        if (!m.member) {
            VectorField r = x.boxed();
            for (std::size_t u = 0; u < r.chart()->size(); ++u)
                if (!r.coefficient(u).is_zero()) {
                    m.obstruction = {u, r.coefficient(u)};
                    break;
                }
            m.residual = r;
        }
        return m;
    }
    NormalizedDistribution nd = normalize_generators(d);
    Membership m = membership(x, nd);
    // back to the original generators: g_j = sum_t f_t R(t, j)
    std::vector<GradedSeries> original(d.size(), GradedSeries(d.chart()));
    for (std::size_t t = 0; t < m.coefficients.size(); ++t) {
        if (m.coefficients[t].is_zero()) continue;
        for (std::size_t j = 0; j < nd.original_order.size(); ++j)
            original[nd.original_order[j]] += m.coefficients[t] * nd.recombination(t, j);
    }
    m.coefficients = std::move(original);
    return m;
}

struct InvolutivityWitness {
    std::size_t first;
    std::size_t second;
    VectorField bracket;
    std::size_t obstruction_coordinate;
    GradedSeries obstruction;
};

struct Involutivity {
    bool involutive = true;
    std::optional<InvolutivityWitness> witness;
};

/// Closure of the generators under the graded bracket, up to the reported box.
/// Pairs are scanned in order (i <= j); a generator is paired with itself
/// only when it is odd, since [X,X] vanishes identically for even X.
inline Involutivity is_involutive(const Distribution& d) {
    rank_of(d);
    Involutivity out;
    if (d.size() == 0) return out;
    NormalizedDistribution nd = normalize_generators(d);
    const auto& gens = d.generators();
    for (std::size_t i = 0; i < gens.size(); ++i) {
        for (std::size_t j = i; j < gens.size(); ++j) {
            if (i == j && !is_odd(gens[i].degree())) continue;
            VectorField b = bracket(gens[i], gens[j]);
            Membership m = membership(b, nd);
            if (!m.member) {
                out.involutive = false;
                out.witness = InvolutivityWitness{i, j, b.boxed(), m.obstruction->first, m.obstruction->second};
                return out;
            }
        }
    }
    return out;
}

}  // namespace z2frob

#endif  // Z2FROB_DISTRIBUTION_HPP
