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

#ifndef Z2FROB_LINALG_HPP
#define Z2FROB_LINALG_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chart.hpp"
#include "errors.hpp"
#include "series.hpp"

namespace z2frob {

// --- exact rational linear algebra --------------------------------------------

using RationalMatrix = std::vector<std::vector<Rational>>;

/// Row echelon elimination that records, in order, the columns which raise
/// the rank. Pivot = first nonzero entry in column order.
class RowReducer {
   public:
    explicit RowReducer(std::size_t cols) : cols_(cols) {}

    /// Adds a row; returns true when it was independent of the previous ones.
    bool add(std::vector<Rational> row) {
        for (std::size_t k = 0; k < basis_.size(); ++k) {
            const Rational& c = row[pivots_[k]];
            if (c == 0) continue;
            Rational f = c;
            for (std::size_t j = 0; j < cols_; ++j) row[j] -= f * basis_[k][j];
        }
        std::size_t p = 0;
        while (p < cols_ && row[p] == 0) ++p;
        if (p == cols_) return false;
        Rational inv = 1 / row[p];
        for (auto& x : row) x *= inv;
        // keep the stored basis fully reduced on the new pivot
        for (auto& b : basis_) {
            Rational f = b[p];
            if (f == 0) continue;
            for (std::size_t j = 0; j < cols_; ++j) b[j] -= f * row[j];
        }
        basis_.push_back(std::move(row));
        pivots_.push_back(p);
        return true;
    }

    std::size_t rank() const noexcept { return basis_.size(); }

   private:
    std::size_t cols_;
    RationalMatrix basis_;
    std::vector<std::size_t> pivots_;
};

/// Inverse of a square rational matrix, nullopt when singular.
inline std::optional<RationalMatrix> invert_rational(RationalMatrix a) {
    const std::size_t n = a.size();
    RationalMatrix inv(n, std::vector<Rational>(n, 0));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t p = col;
        while (p < n && a[p][col] == 0) ++p;
        if (p == n) return std::nullopt;
        std::swap(a[p], a[col]);
        std::swap(inv[p], inv[col]);
        Rational s = 1 / a[col][col];
        for (std::size_t j = 0; j < n; ++j) a[col][j] *= s, inv[col][j] *= s;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == col || a[i][col] == 0) continue;
            Rational f = a[i][col];
            for (std::size_t j = 0; j < n; ++j) a[i][j] -= f * a[col][j], inv[i][j] -= f * inv[col][j];
        }
    }
    return inv;
}

// --- graded matrices -------------------------------------------------------------

/// Matrix over the chart ring whose (i,j) entry is homogeneous of degree
/// row_degrees[i] + col_degrees[j].
class GradedMatrix {
   public:
    GradedMatrix(ChartPtr chart, std::vector<DegreeVector> row_degrees, std::vector<DegreeVector> col_degrees)
        : chart_(std::move(chart)), rows_(std::move(row_degrees)), cols_(std::move(col_degrees)) {
        entries_.assign(rows_.size() * cols_.size(), GradedSeries(chart_));
    }

    GradedMatrix(ChartPtr chart, std::vector<DegreeVector> row_degrees, std::vector<DegreeVector> col_degrees,
                 std::vector<std::vector<GradedSeries>> entries)
        : GradedMatrix(std::move(chart), std::move(row_degrees), std::move(col_degrees)) {
        if (entries.size() != rows_.size()) throw DimensionError("row count does not match row degrees");
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (entries[i].size() != cols_.size()) throw DimensionError("column count does not match column degrees");
            for (std::size_t j = 0; j < cols_.size(); ++j) set(i, j, std::move(entries[i][j]));
        }
    }

    static GradedMatrix identity(const ChartPtr& chart, const std::vector<DegreeVector>& degrees) {
        GradedMatrix m(chart, degrees, degrees);
        for (std::size_t i = 0; i < degrees.size(); ++i) m.set(i, i, GradedSeries::constant(chart, 1));
        return m;
    }

    const ChartPtr& chart() const noexcept { return chart_; }
    std::size_t rows() const noexcept { return rows_.size(); }
    std::size_t cols() const noexcept { return cols_.size(); }
    const std::vector<DegreeVector>& row_degrees() const noexcept { return rows_; }
    const std::vector<DegreeVector>& col_degrees() const noexcept { return cols_; }

    const GradedSeries& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols() + j]; }

    void set(std::size_t i, std::size_t j, GradedSeries value) {
        require_same_chart(chart_, value.chart());
        DegreeVector d = rows_[i] + cols_[j];
        if (!value.is_homogeneous_of(d))
            throw HomogeneityError("matrix entry (" + std::to_string(i) + "," + std::to_string(j) +
                                   ") must be homogeneous of degree " + d.to_string());
        entries_[i * cols() + j] = std::move(value);
    }

    /// Constant terms, i.e. the matrix evaluated at the base point.
    RationalMatrix at_point() const {
        RationalMatrix m(rows(), std::vector<Rational>(cols(), 0));
        for (std::size_t i = 0; i < rows(); ++i)
            for (std::size_t j = 0; j < cols(); ++j) m[i][j] = (*this)(i, j).constant_term();
        return m;
    }

    bool is_zero() const {
        for (const auto& e : entries_)
            if (!e.is_zero()) return false;
        return true;
    }

    friend GradedMatrix operator*(const GradedMatrix& a, const GradedMatrix& b) {
        require_same_chart(a.chart_, b.chart_);
        if (a.cols_ != b.rows_) throw DimensionError("inner matrix degrees do not match");
        GradedMatrix r(a.chart_, a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j) {
                GradedSeries acc(a.chart_);
                for (std::size_t k = 0; k < a.cols(); ++k)
                    if (!a(i, k).is_zero() && !b(k, j).is_zero()) acc += a(i, k) * b(k, j);
                r.entries_[i * r.cols() + j] = std::move(acc);
            }
        return r;
    }
    friend GradedMatrix operator+(GradedMatrix a, const GradedMatrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionError("matrix shapes differ");
        for (std::size_t k = 0; k < a.entries_.size(); ++k) a.entries_[k] += b.entries_[k];
        return a;
    }
    friend GradedMatrix operator-(GradedMatrix a, const GradedMatrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw DimensionError("matrix shapes differ");
        for (std::size_t k = 0; k < a.entries_.size(); ++k) a.entries_[k] -= b.entries_[k];
        return a;
    }
    GradedMatrix operator-() const {
        GradedMatrix r = *this;
        for (auto& e : r.entries_) e = -e;
        return r;
    }
    friend bool operator==(const GradedMatrix& a, const GradedMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
    }

    /// Entry-wise projection onto the reported box.
    GradedMatrix boxed() const {
        GradedMatrix r = *this;
        for (auto& e : r.entries_) e = box(e);
        return r;
    }

   private:
    ChartPtr chart_;
    std::vector<DegreeVector> rows_, cols_;
    std::vector<GradedSeries> entries_;
};

/// Inverse of a square graded matrix that is invertible at the base point.
///
/// With S the inverse of the constant part, S*T = I + X where X vanishes at
/// the base point, and T^{-1} = (sum_k (-X)^k) S. Each power of X gains at
/// least one filtration step, so the sum is finite on the stored set.
inline GradedMatrix invert_mod_J(const GradedMatrix& t) {
    if (t.rows() != t.cols()) throw DimensionError("invert_mod_J needs a square matrix");
    if (t.row_degrees() != t.col_degrees()) throw HomogeneityError("invert_mod_J needs row degrees equal to column degrees");
    const ChartPtr& chart = t.chart();
    auto s0 = invert_rational(t.at_point());
    if (!s0) throw NotInvertibleModJ("matrix is singular at the base point");
    GradedMatrix s(chart, t.row_degrees(), t.col_degrees());
    for (std::size_t i = 0; i < t.rows(); ++i)
        for (std::size_t j = 0; j < t.cols(); ++j) s.set(i, j, GradedSeries::constant(chart, (*s0)[i][j]));
    GradedMatrix id = GradedMatrix::identity(chart, t.row_degrees());
    GradedMatrix minus_x = id - s * t;
    GradedMatrix sum = id;
    GradedMatrix power = id;
    const int cap = chart->max_weight() + chart->max_j() + 2;
    for (int k = 1;; ++k) {
        power = power * minus_x;
        if (power.is_zero()) break;
        if (k > cap) throw InternalInconsistency("geometric series failed to terminate");
        sum = sum + power;
    }
    return sum * s;
}

// --- tangent vectors at the base point ------------------------------------------------

struct TangentVector {
    DegreeVector degree;
    /// coordinate index -> component
    std::map<std::size_t, Rational> components;
};

/// Coordinates whose derivations extend `vs` to a basis of the tangent space
/// at the base point, chosen greedily in chart order within each degree class.
inline std::vector<std::string> complete_basis(const std::vector<TangentVector>& vs, const ChartPtr& chart) {
    for (const auto& v : vs) {
        if (v.degree.size() != chart->n()) throw DimensionError("tangent vector degree has wrong length");
        for (const auto& [u, c] : v.components) {
            if (u >= chart->size()) throw UnknownCoordinate("tangent vector component out of range");
            if (c != 0 && chart->degree_of(u) != v.degree)
                throw HomogeneityError("tangent vector of degree " + v.degree.to_string() + " has a component on '" +
                                       chart->coordinate(u).name + "'");
        }
    }
    std::vector<bool> chosen(chart->size(), false);
    for (const auto& [degree, coords] : chart->degree_classes()) {
        RowReducer reducer(coords.size());
        for (const auto& v : vs) {
            if (v.degree != degree) continue;
            std::vector<Rational> row(coords.size(), 0);
            for (std::size_t k = 0; k < coords.size(); ++k) {
                auto it = v.components.find(coords[k]);
                if (it != v.components.end()) row[k] = it->second;
            }
            if (!reducer.add(std::move(row)))
                throw DependentAtPoint("tangent vectors of degree " + degree.to_string() +
                                       " are linearly dependent at the base point");
        }
        for (std::size_t k = 0; k < coords.size(); ++k) {
            std::vector<Rational> unit(coords.size(), 0);
            unit[k] = 1;
            if (reducer.add(std::move(unit))) chosen[coords[k]] = true;
        }
    }
    // a degree with no coordinates only admits the zero vector
    for (const auto& v : vs) {
        bool has_class = false;
        for (std::size_t u = 0; u < chart->size(); ++u) has_class = has_class || chart->degree_of(u) == v.degree;
        if (!has_class) throw DependentAtPoint("zero tangent vector at the base point");
    }
    std::vector<std::string> out;
    for (std::size_t u = 0; u < chart->size(); ++u)
        if (chosen[u]) out.push_back(chart->coordinate(u).name);
    return out;
}

}  // namespace z2frob

#endif  // Z2FROB_LINALG_HPP
