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

#ifndef Z2FROB_FROBENIUS_HPP
#define Z2FROB_FROBENIUS_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chart.hpp"
#include "distribution.hpp"
#include "errors.hpp"
#include "fields.hpp"
#include "linalg.hpp"
#include "series.hpp"

namespace z2frob {

/// One intermediate change recorded for auditing.
struct Step {
    std::string label;
    CoordinateChange change;
    /// an antiderivative dropped terms outside the stored set
    bool truncation_loss = false;
};

/// A change of coordinates after which the field is d/d(pivot).
struct Straightening {
    CoordinateChange change;
    std::size_t pivot;
    std::vector<Step> steps;
};

class InvolutivityViolation : public NotInvolutive {
   public:
    InvolutivityViolation(const std::string& what, InvolutivityWitness witness)
        : NotInvolutive(what), witness_(std::move(witness)) {}
    const InvolutivityWitness& witness() const noexcept { return witness_; }

   private:
    InvolutivityWitness witness_;
};

class CommutationViolation : public NotCommuting {
   public:
    CommutationViolation(const std::string& what, std::size_t first, std::size_t second, VectorField bracket)
        : NotCommuting(what), first_(first), second_(second), bracket_(std::move(bracket)) {}
    std::size_t first() const noexcept { return first_; }
    std::size_t second() const noexcept { return second_; }
    const VectorField& bracket() const noexcept { return bracket_; }

   private:
    std::size_t first_, second_;
    VectorField bracket_;
};

namespace detail {

inline GradedSeries reciprocal(const GradedSeries& f) {
    const ChartPtr& chart = f.chart();
    const DegreeVector zero = chart->zero_degree();
    GradedMatrix m(chart, {zero}, {zero});
    m.set(0, 0, f);
    return invert_mod_J(m)(0, 0);
}

inline GradedSeries keep_j_at_least(const GradedSeries& f, int k) {
    return f.filtered([k](const Chart::MonomialInfo& m) { return m.j_degree >= k; });
}

inline GradedSeries drop_coordinate(const GradedSeries& f, std::size_t u) {
    return f.filtered([u](const Chart::MonomialInfo& m) { return m.exponents[u] == 0; });
}

/// sum_k weight(k) * x_p^(k + shift) * D^k(f), stopped once the power of x_p
/// leaves the stored set.
template <class Weight>
GradedSeries lie_series(const VectorField& d, GradedSeries f, std::size_t p, int shift, Weight weight) {
    const ChartPtr& chart = f.chart();
    GradedSeries xp = GradedSeries::coordinate(chart, p);
    GradedSeries power = GradedSeries::constant(chart, 1);
    for (int s = 0; s < shift; ++s) power = power * xp;
    GradedSeries acc(chart);
    for (int k = 0; !power.is_zero() && !f.is_zero(); ++k) {
        acc += weight(k) * (power * f);
        f = apply(d, f);
        power = power * xp;
    }
    return acc;
}

inline Rational factorial(int k) {
    Rational r = 1;
    for (int i = 2; i <= k; ++i) r *= i;
    return r;
}

inline bool is_identity_images(const ChartPtr& chart, const std::vector<GradedSeries>& images) {
    for (std::size_t u = 0; u < chart->size(); ++u)
        if (images[u] != GradedSeries::coordinate(chart, u)) return false;
    return true;
}

inline void require_straight(const CoordinateChange& change, const VectorField& x, std::size_t pivot) {
    VectorField y = pushforward(change, x);
    if (!equal_in_box(y, VectorField::coordinate(x.chart(), pivot)))
        throw InternalInconsistency("straightening did not reach d/d" + x.chart()->coordinate(pivot).name);
}

/// Correction y' = y + a with a_u = -int gamma_u d(pivot), where gamma is the
/// part of J-order >= k of the deviation of X from d/d(pivot).
inline std::optional<Step> correction_step(const CoordinateChange& current, const VectorField& x, std::size_t pivot,
                                           int k) {
    const ChartPtr& chart = x.chart();
    VectorField y = pushforward(current, x);
    std::vector<GradedSeries> images = identity_images(chart);
    bool any = false, loss = false;
    for (std::size_t u = 0; u < chart->size(); ++u) {
        GradedSeries gamma = y.coefficient(u);
        if (u == pivot) gamma -= GradedSeries::constant(chart, 1);
        gamma = keep_j_at_least(gamma, k);
        if (gamma.is_zero()) continue;
        AntiderivativeResult a = antiderivative(pivot, gamma);
        loss = loss || a.truncation_loss;
        if (a.series.is_zero()) continue;
        images[u] -= a.series;
        any = true;
    }
    if (!any) return std::nullopt;
    return Step{"correction J^" + std::to_string(k), CoordinateChange::from_forward(std::move(images)), loss};
}

}  // namespace detail

/// Degree-zero field with X_m != 0 becomes d/d(x^p), p the first base
/// coordinate whose coefficient is nonzero at the base point.
inline Straightening straighten_deg0(const VectorField& x) {
    const ChartPtr& chart = x.chart();
    if (!x.degree().is_zero()) throw NonzeroDegree("straighten_deg0 needs a degree zero field, got " + x.degree().to_string());
    std::optional<std::size_t> pivot;
    for (std::size_t u = 0; u < chart->size() && !pivot; ++u)
        if (chart->is_base(u) && x.coefficient(u).constant_term() != 0) pivot = u;
    if (!pivot) throw DegenerateAtPoint("field vanishes at the base point");
    const std::size_t p = *pivot;

    Straightening out{CoordinateChange::identity(chart), p, {}};
    auto record = [&](Step step) {
        out.change = compose(out.change, step.change);
        out.steps.push_back(std::move(step));
    };

    // (a) flow-box of the reduced field, in the base coordinates only
    {
        std::vector<GradedSeries> reduced(chart->size(), GradedSeries(chart));
        for (std::size_t u = 0; u < chart->size(); ++u)
            if (chart->is_base(u)) reduced[u] = reduce_mod_J(x.coefficient(u));
        GradedSeries inv = detail::reciprocal(reduced[p]);
        VectorField scaled = inv * VectorField(chart, x.degree(), reduced);
        std::vector<GradedSeries> images = identity_images(chart);
        for (std::size_t j = 0; j < chart->size(); ++j) {
            if (!chart->is_base(j)) continue;
            if (j == p)
                images[j] = detail::lie_series(scaled, inv, p, 1, [](int k) {
                    Rational w = 1 / detail::factorial(k + 1);
                    return k % 2 ? Rational(-w) : w;
                });
            else
                images[j] = detail::lie_series(scaled, GradedSeries::coordinate(chart, j), p, 0, [](int k) {
                    Rational w = 1 / detail::factorial(k);
                    return k % 2 ? Rational(-w) : w;
                });
        }
        if (!detail::is_identity_images(chart, images))
            record(Step{"reduced flow-box", CoordinateChange::from_forward(std::move(images))});
    }

    // (b) eta = g zeta with dg/dx^p = -g b, g(0) = I, b the linear part of
    // the coefficients along nonzero-degree coordinates
    {
        VectorField y = pushforward(out.change, x);
        std::vector<GradedSeries> images = identity_images(chart);
        bool loss = false;
        for (const auto& [degree, coords] : chart->degree_classes()) {
            if (degree.is_zero()) continue;
            const std::size_t q = coords.size();
            std::vector<DegreeVector> zeros(q, chart->zero_degree());
            GradedMatrix b(chart, zeros, zeros);
            std::map<std::size_t, std::size_t> slot;
            for (std::size_t a = 0; a < q; ++a) slot[coords[a]] = a;
            for (std::size_t r = 0; r < q; ++r) {
                std::vector<std::vector<GradedSeries::Term>> row(q);
                for (const auto& t : y.coefficient(coords[r]).terms()) {
                    const auto& info = chart->monomial(t.index);
                    if (info.j_degree != 1) continue;
                    for (std::size_t s = 0; s < q; ++s) {
                        if (info.exponents[coords[s]] != 1) continue;
                        auto base = chart->adjust(t.index, coords[s], -1);
                        if (base) row[s].push_back({*base, t.coeff});
                    }
                }
                for (std::size_t s = 0; s < q; ++s)
                    if (!row[s].empty()) b.set(r, s, GradedSeries::from_terms(chart, std::move(row[s])));
            }
            if (b.is_zero()) continue;
            GradedMatrix id = GradedMatrix::identity(chart, zeros);
            GradedMatrix g = id;
            const int cap = chart->max_weight() + 2;
            for (int round = 0;; ++round) {
                if (round > cap) throw InternalInconsistency("matrix equation for g did not settle");
                GradedMatrix gb = g * b;
                GradedMatrix next = id;
                for (std::size_t r = 0; r < q; ++r)
                    for (std::size_t s = 0; s < q; ++s) {
                        if (gb(r, s).is_zero()) continue;
                        AntiderivativeResult a = antiderivative(p, gb(r, s));
                        loss = loss || a.truncation_loss;
                        next.set(r, s, next(r, s) - a.series);
                    }
                if (next == g) break;
                g = std::move(next);
            }
            for (std::size_t r = 0; r < q; ++r) {
                GradedSeries eta(chart);
                for (std::size_t s = 0; s < q; ++s)
                    if (!g(r, s).is_zero()) eta += g(r, s) * GradedSeries::coordinate(chart, coords[s]);
                images[coords[r]] = std::move(eta);
            }
        }
        if (!detail::is_identity_images(chart, images))
            record(Step{"linear part", CoordinateChange::from_forward(std::move(images)), loss});
    }

    // (c) corrections in J^k, k = 2 .. K_J
    for (int k = 2; k <= chart->truncation().j_order; ++k)
        if (auto step = detail::correction_step(out.change, x, p, k)) record(std::move(*step));

    detail::require_straight(out.change, x, p);
    return out;
}

/// Nonzero-degree field becomes d/d(xi^sigma), sigma the first coordinate of
/// degree deg X whose coefficient is nonzero at the base point. Odd fields
/// must square to zero.
inline Straightening straighten_nonzero(const VectorField& chi) {
    const ChartPtr& chart = chi.chart();
    const DegreeVector& d = chi.degree();
    if (d.is_zero()) throw HomogeneityError("straighten_nonzero needs a field of nonzero degree");
    std::optional<std::size_t> pivot;
    for (std::size_t u = 0; u < chart->size() && !pivot; ++u)
        if (chart->degree_of(u) == d && chi.coefficient(u).constant_term() != 0) pivot = u;
    if (!pivot) throw DegenerateAtPoint("field vanishes at the base point");
    const std::size_t sigma = *pivot;
    if (is_odd(d) && !bracket(chi, chi).boxed().is_zero())
        throw OddSquareNonzero("odd field does not square to zero");

    Straightening out{CoordinateChange::identity(chart), sigma, {}};
    // old coordinates in terms of new: u = y^u + eta^sigma * c_u|, and
    // zeta^sigma = eta^sigma * a_sigma|, with | meaning eta^sigma set to 0
    {
        GradedSeries eta = GradedSeries::coordinate(chart, sigma);
        std::vector<GradedSeries> inverse = identity_images(chart);
        for (std::size_t u = 0; u < chart->size(); ++u) {
            GradedSeries c = detail::drop_coordinate(chi.coefficient(u), sigma);
            if (u == sigma)
                inverse[u] = eta * c;
            else if (!c.is_zero())
                inverse[u] += eta * c;
        }
        if (!detail::is_identity_images(chart, inverse)) {
            Step step{"first change", CoordinateChange::from_inverse(std::move(inverse))};
            out.change = step.change;
            out.steps.push_back(std::move(step));
        }
    }
    if (!is_odd(d)) {
        for (int k = 1; k <= chart->truncation().j_order; ++k)
            if (auto step = detail::correction_step(out.change, chi, sigma, k)) {
                out.change = compose(out.change, step->change);
                out.steps.push_back(std::move(*step));
            }
    }
    detail::require_straight(out.change, chi, sigma);
    return out;
}

/// Dispatches on the degree of the field.
inline Straightening straighten(const VectorField& x) {
    return x.degree().is_zero() ? straighten_deg0(x) : straighten_nonzero(x);
}

/// Result of triangularizing a commuting degree-zero family: after `change`,
/// X_j = d/d(pivot_j) + sum_{i<j} coefficients(j, i) d/d(pivot_i), and
/// sum_j recombination(i, j) X_j = d/d(pivot_i).
struct TriangularForm {
    CoordinateChange change;
    std::vector<std::size_t> pivots;
    GradedMatrix coefficients;
    GradedMatrix recombination;
    std::vector<Step> steps;
};

namespace detail {

inline VectorField without(const VectorField& y, const std::vector<std::size_t>& coords) {
    std::vector<GradedSeries> c = y.coefficients();
    for (std::size_t u : coords) c[u] = GradedSeries(y.chart());
    return VectorField(y.chart(), y.degree(), std::move(c));
}

}  // namespace detail

inline TriangularForm triangularize(const ChartPtr& chart, const std::vector<VectorField>& xs) {
    for (const auto& x : xs) {
        require_same_chart(chart, x.chart());
        if (!x.degree().is_zero()) throw NonzeroDegree("commuting family must have degree zero");
    }
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i + 1; j < xs.size(); ++j) {
            VectorField b = bracket(xs[i], xs[j]);
            if (!b.boxed().is_zero())
                throw CommutationViolation("fields " + std::to_string(i) + " and " + std::to_string(j) + " do not commute",
                                           i, j, b.boxed());
        }
    CoordinateChange change = CoordinateChange::identity(chart);
    std::vector<std::size_t> pivots;
    std::vector<Step> steps;
    for (const auto& x : xs) {
        VectorField rest = detail::without(pushforward(change, x), pivots);
        Straightening s = straighten_deg0(rest);
        change = compose(change, s.change);
        pivots.push_back(s.pivot);
        for (auto& st : s.steps) steps.push_back(std::move(st));
    }
    const std::size_t r = xs.size();
    std::vector<DegreeVector> zeros(r, chart->zero_degree());
    GradedMatrix a(chart, zeros, zeros);
    for (std::size_t j = 0; j < r; ++j) {
        VectorField y = pushforward(change, xs[j]);
        if (!detail::without(y, pivots).boxed().is_zero())
            throw InternalInconsistency("triangular form left components outside the adapted directions");
        for (std::size_t i = 0; i < r; ++i) a.set(j, i, box(y.coefficient(pivots[i])));
    }
    GradedMatrix inv = r ? invert_mod_J(a) : a;
    return TriangularForm{std::move(change), std::move(pivots), std::move(a), inv.boxed(), std::move(steps)};
}

inline CoordinateChange commuting_triangular(const std::vector<VectorField>& xs) {
    if (xs.empty()) throw DimensionError("commuting_triangular needs at least one field");
    return triangularize(xs.front().chart(), xs).change;
}

struct FrobeniusCertificate {
    CoordinateChange change;
    std::vector<std::string> adapted;
    /// generator index -> J-order of the first nonzero residual
    std::map<std::size_t, int> residuals;
    std::vector<Step> steps;
};

struct VerificationReport {
    bool ok = false;
    bool inverse_consistent = true;
    bool rank_match = false;
    bool spans = false;
    std::map<std::size_t, int> residuals;
    std::string message;
};

/// Pushes every generator through the change and checks that it lands in the
/// span of the adapted coordinate derivations, and that those derivations
/// are in turn spanned by the pushed generators.
inline VerificationReport verify_adapted(const Distribution& d, const FrobeniusCertificate& cert) {
    VerificationReport rep;
    const ChartPtr& chart = d.chart();
    if (!cert.change.chart()->same_coordinates(*chart)) {
        rep.message = "certificate chart differs from the distribution chart";
        return rep;
    }
    std::vector<std::size_t> adapted;
    for (const auto& name : cert.adapted) {
        auto u = chart->find(name);
        if (!u) {
            rep.message = "unknown adapted coordinate '" + name + "'";
            return rep;
        }
        adapted.push_back(*u);
    }
    Rank rank;
    try {
        rank = rank_of(d);
    } catch (const DependentAtPoint& e) {
        rep.message = e.what();
        return rep;
    }
    Rank counted;
    for (std::size_t u : adapted) ++counted.counts[chart->degree_of(u)];
    rep.rank_match = counted == rank;

    CoordinateChange change = cert.change;
    for (std::size_t u = 0; u < chart->size() && rep.inverse_consistent; ++u)
        if (!equal_in_box(substitute(change.forward()[u], change.inverse()), GradedSeries::coordinate(chart, u)))
            rep.inverse_consistent = false;
    try {
        if (!rep.inverse_consistent) change = CoordinateChange::from_forward(change.forward());
    } catch (const Error& e) {
        rep.message = e.what();
        return rep;
    }

    std::vector<VectorField> pushed;
    for (std::size_t t = 0; t < d.size(); ++t) {
        pushed.push_back(pushforward(change, d.generators()[t]));
        VectorField residual = detail::without(pushed.back(), adapted).boxed();
        if (!residual.is_zero()) {
            int order = chart->max_j() + 1;
            for (const auto& c : residual.coefficients())
                if (!c.is_zero()) order = std::min(order, c.j_valuation());
            rep.residuals[t] = order;
        }
    }
    if (rep.rank_match) {
        RowReducer reducer(adapted.size());
        for (const auto& y : pushed) {
            std::vector<Rational> row;
            for (std::size_t u : adapted) row.push_back(y.coefficient(u).constant_term());
            reducer.add(std::move(row));
        }
        rep.spans = reducer.rank() == adapted.size();
    }
    rep.ok = rep.rank_match && rep.spans && rep.residuals.empty();
    if (!rep.ok && rep.message.empty())
        rep.message = !rep.rank_match ? "adapted counts differ from the rank"
                      : !rep.residuals.empty() ? "a generator leaves the adapted span"
                                               : "adapted derivations are not spanned at the base point";
    return rep;
}

/// Adapted coordinates for an involutive distribution: the generators are
/// normalized, the degree-zero part is triangularized and the nonzero-degree
/// generators are straightened one at a time in the remaining coordinates.
inline FrobeniusCertificate adapted_coordinates(const Distribution& d) {
    const ChartPtr& chart = d.chart();
    FrobeniusCertificate cert{CoordinateChange::identity(chart), {}, {}, {}};
    rank_of(d);
    if (d.size() == 0) return cert;
    Involutivity inv = is_involutive(d);
    if (!inv.involutive) {
        const auto& w = *inv.witness;
        throw InvolutivityViolation("bracket of generators " + std::to_string(w.first) + " and " +
                                        std::to_string(w.second) + " leaves the distribution along " +
                                        chart->coordinate(w.obstruction_coordinate).name,
                                    w);
    }
    NormalizedDistribution nd = normalize_generators(d);
    std::vector<VectorField> even, other;
    for (const auto& g : nd.distribution.generators()) (g.degree().is_zero() ? even : other).push_back(g);

    std::vector<std::size_t> adapted;
    if (!even.empty()) {
        TriangularForm t = triangularize(chart, even);
        cert.change = t.change;
        adapted = t.pivots;
        for (auto& s : t.steps) cert.steps.push_back(std::move(s));
    }
    for (const auto& chi : other) {
        VectorField rest = detail::without(pushforward(cert.change, chi), adapted);
        Straightening s = [&] {
            try {
                return straighten_nonzero(rest);
            } catch (const OddSquareNonzero& e) {
                throw InternalInconsistency(std::string("odd generator of an involutive distribution: ") + e.what());
            }
        }();
        cert.change = compose(cert.change, s.change);
        adapted.push_back(s.pivot);
        for (auto& st : s.steps) cert.steps.push_back(std::move(st));
    }
    for (std::size_t u : adapted) cert.adapted.push_back(chart->coordinate(u).name);
    VerificationReport rep = verify_adapted(d, cert);
    if (!rep.ok) throw InternalInconsistency("adapted coordinates failed verification: " + rep.message);
    return cert;
}

}  // namespace z2frob

#endif  // Z2FROB_FROBENIUS_HPP
