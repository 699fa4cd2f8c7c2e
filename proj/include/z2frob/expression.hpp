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

#ifndef Z2FROB_EXPRESSION_HPP
#define Z2FROB_EXPRESSION_HPP

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chart.hpp"
#include "errors.hpp"
#include "series.hpp"

namespace z2frob {

/// Parse failure with its position in the source text.
class SyntaxError : public ParseError {
   public:
    SyntaxError(const std::string& message, std::size_t offset, std::size_t line, std::size_t column)
        : ParseError(message + " at offset " + std::to_string(offset) + " (line " + std::to_string(line) + ", column " +
                     std::to_string(column) + ")"),
          offset_(offset),
          line_(line),
          column_(column) {}
    std::size_t offset() const noexcept { return offset_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

   private:
    std::size_t offset_, line_, column_;
};

/// Canonical text of a series: terms in monomial order, factors in chart
/// order, unit coefficients omitted except on a leading negative term.
inline std::string to_expression(const GradedSeries& f) {
    if (f.is_zero()) return "0";
    const Chart& chart = *f.chart();
    std::string out;
    bool first = true;
    for (const auto& t : f.terms()) {
        std::string mono;
        for (const auto& [u, e] : chart.monomial(t.index).support) {
            if (!mono.empty()) mono += '*';
            mono += chart.coordinate(static_cast<std::size_t>(u)).name;
            if (e > 1) mono += "^" + std::to_string(e);
        }
        const bool negative = t.coeff < 0;
        Rational mag = abs(t.coeff);
        std::string coeff = mag.get_str();
        if (first) {
            if (mono.empty())
                out += (negative ? "-" : "") + coeff;
            else if (negative)
                out += "-" + coeff + "*" + mono;  // "-x^2" would read as (-x)^2
            else
                out += mag == 1 ? mono : coeff + "*" + mono;
        } else {
            out += negative ? " - " : " + ";
            if (mono.empty())
                out += coeff;
            else
                out += mag == 1 ? mono : coeff + "*" + mono;
        }
        first = false;
    }
    return out;
}

struct ParsedSeries {
    GradedSeries series;
    std::vector<std::string> warnings;
};

namespace detail {

class ExpressionParser {
   public:
    ExpressionParser(std::string_view src, ChartPtr chart) : src_(src), chart_(std::move(chart)) {}

    GradedSeries parse() {
        GradedSeries f = expr();
        skip();
        if (pos_ < src_.size()) fail(std::string("unexpected '") + src_[pos_] + "'");
        return f;
    }
    bool dropped() const noexcept { return dropped_; }

   private:
    [[noreturn]] void fail(const std::string& message) const { fail_at(message, pos_); }
    [[noreturn]] void fail_at(const std::string& message, std::size_t at) const {
        auto [line, column] = position(at);
        throw SyntaxError(message, at, line, column);
    }
    std::pair<std::size_t, std::size_t> position(std::size_t at) const {
        std::size_t line = 1, column = 1;
        for (std::size_t i = 0; i < at && i < src_.size(); ++i) {
            if (src_[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        return {line, column};
    }

    void skip() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    std::string digits() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        return std::string(src_.substr(start, pos_ - start));
    }
    GradedSeries mul(const GradedSeries& a, const GradedSeries& b) {
        bool d = false;
        GradedSeries r = multiply(a, b, &d);
        dropped_ = dropped_ || d;
        return r;
    }

    GradedSeries expr() {
        GradedSeries f = term();
        for (;;) {
            if (eat('+'))
                f += term();
            else if (eat('-'))
                f -= term();
            else
                return f;
        }
    }
    GradedSeries term() {
        GradedSeries f = factor();
        while (eat('*')) f = mul(f, factor());
        return f;
    }
    GradedSeries factor() {
        GradedSeries base = atom();
        if (!eat('^')) return base;
        skip();
        std::size_t at = pos_;
        std::string n = digits();
        if (n.empty()) fail("expected a natural number after '^'");
        if (n.size() > 9) fail_at("exponent too large", at);
        unsigned long e = std::stoul(n);
        GradedSeries result = GradedSeries::constant(chart_, 1);
        while (e > 0 && !base.is_zero()) {
            if (e & 1) result = mul(result, base);
            e >>= 1;
            if (e) base = mul(base, base);
        }
        return e > 0 ? GradedSeries(chart_) : result;
    }
    GradedSeries atom() {
        skip();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string num = digits();
            if (pos_ < src_.size() && src_[pos_] == '/') {
                ++pos_;
                std::size_t at = pos_;
                std::string den = digits();
                if (den.empty()) fail("expected a denominator");
                mpz_class d(den);
                if (d == 0) fail_at("zero denominator", at);
                Rational q(mpz_class(num), d);
                q.canonicalize();
                return GradedSeries::constant(chart_, q);
            }
            return GradedSeries::constant(chart_, Rational(mpz_class(num)));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            std::string name(src_.substr(start, pos_ - start));
            auto u = chart_->find(name);
            if (!u) {
                auto [line, column] = position(start);
                throw UnknownCoordinate("unknown identifier '" + name + "' at offset " + std::to_string(start) +
                                        " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")");
            }
            return GradedSeries::coordinate(chart_, *u);
        }
        if (c == '(') {
            ++pos_;
            GradedSeries f = expr();
            if (!eat(')')) fail("expected ')'");
            return f;
        }
        if (c == '-') {
            ++pos_;
            return -atom();
        }
        fail(std::string("unexpected '") + c + "'");
    }

    std::string_view src_;
    ChartPtr chart_;
    std::size_t pos_ = 0;
    bool dropped_ = false;
};

}  // namespace detail

/// Parses `expr := term (('+'|'-') term)*`, `term := factor ('*' factor)*`,
/// `factor := atom ('^' nat)?`, `atom := rational | identifier | '(' expr ')'
/// | '-' atom`. Terms beyond the reported box are dropped with a warning;
/// with `working_precision` everything in the stored set is kept.
inline ParsedSeries parse_expression_with_warnings(std::string_view src, const ChartPtr& chart,
                                                   bool working_precision = false) {
    detail::ExpressionParser parser(src, chart);
    GradedSeries f = parser.parse();
    ParsedSeries out{f, {}};
    bool dropped = parser.dropped();
    if (!working_precision) {
        out.series = box(f);
        dropped = dropped || out.series.term_count() != f.term_count();
    }
    if (dropped) out.warnings.push_back("terms beyond the truncation order were dropped");
    return out;
}

inline GradedSeries parse_expression(std::string_view src, const ChartPtr& chart, bool working_precision = false) {
    return parse_expression_with_warnings(src, chart, working_precision).series;
}

}  // namespace z2frob

#endif  // Z2FROB_EXPRESSION_HPP
