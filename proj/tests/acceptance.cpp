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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "oracles.hpp"

namespace z2frob {
namespace {

using testing::Rng;
using testing::uniform;
using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass;
    std::string detail;
};

GradedSeries coord(const ChartPtr& ch, const std::string& name) { return GradedSeries::coordinate(ch, name); }
GradedSeries constant(const ChartPtr& ch, Rational q) { return GradedSeries::constant(ch, q); }
VectorField d(const ChartPtr& ch, const std::string& name) { return VectorField::coordinate(ch, name); }

ChartPtr chart_for(int n, int kj, int kb) {
    switch (n) {
        case 1: return Chart::make(1, {{"x", {0}}, {"y", {0}}, {"s", {1}}, {"r", {1}}}, {kj, kb});
        case 2: return Chart::make(2, {{"x", {0, 0}}, {"t1", {0, 1}}, {"t2", {1, 0}}, {"e", {1, 1}}}, {kj, kb});
        default:
            return Chart::make(3, {{"x", {0, 0, 0}}, {"a", {1, 0, 0}}, {"b", {0, 1, 1}}, {"c", {1, 1, 0}},
                                   {"f", {1, 1, 1}}}, {kj, kb});
    }
}

ChartPtr chart_xyte(int kj, int kb) {
    return Chart::make(2, {{"x", {0, 0}}, {"y", {0, 0}}, {"t1", {0, 1}}, {"t2", {1, 0}}, {"e", {1, 1}}}, {kj, kb});
}

Outcome criterion1() {
    Rng rng(1001);
    int ok = 0;
    const int total = 100;
    for (int trial = 0; trial < total; ++trial) {
        int n = uniform(rng, 1, 3);
        auto ch = chart_for(n, 4, 3);
        std::size_t size = static_cast<std::size_t>(uniform(rng, 1, 4));
        std::vector<DegreeVector> rows, cols;
        for (std::size_t i = 0; i < size; ++i) rows.push_back(testing::random_degree(rng, n));
        // T maps col degrees to row degrees; square blocks need matching degrees on the diagonal
        cols = rows;
        GradedMatrix t(ch, rows, cols);
        for (std::size_t i = 0; i < size; ++i)
            for (std::size_t j = 0; j < size; ++j) {
                GradedSeries s = testing::random_series(rng, ch, rows[i] + cols[j], 3, 4, true);
                if (i == j) s += constant(ch, Rational(uniform(rng, 1, 3)) * (uniform(rng, 0, 1) ? 1 : -1));
                t.set(i, j, std::move(s));
            }
        GradedMatrix inv = invert_mod_J(t);
        auto id = GradedMatrix::identity(ch, rows);
        if ((inv * t).boxed() == id && (t * inv).boxed() == id) ++ok;
    }
    return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " inverses exact"};
}

Outcome criterion2() {
    Rng rng(1002);
    auto ch = chart_for(2, 3, 3);
    int ok = 0;
    const int total = 100;
    for (int trial = 0; trial < total; ++trial) {
        auto dx = testing::random_degree(rng, 2), dy = testing::random_degree(rng, 2), dz = testing::random_degree(rng, 2);
        auto x = testing::random_field(rng, ch, dx, 3), y = testing::random_field(rng, ch, dy, 3),
             z = testing::random_field(rng, ch, dz, 3);
        Rational sxy = koszul_sign(dx, dy);
        bool anti = bracket(x, y) == -sxy * bracket(y, x);
        bool jacobi = bracket(x, bracket(y, z)) == bracket(bracket(x, y), z) + sxy * bracket(y, bracket(x, z));
        if (anti && jacobi) ++ok;
    }
    return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " triples satisfy both laws"};
}

Outcome criterion3() {
    Rng rng(1003);
    auto ch = chart_for(2, 4, 4);
    const int count = static_cast<int>(ch->monomial_count());
    int ok = 0;
    const int total = 200;
    for (int i = 0; i < total; ++i) {
        int ia = uniform(rng, 0, count - 1), ib = uniform(rng, 0, count - 1);
        std::vector<int> ea(ch->monomial(ia).exponents.begin(), ch->monomial(ia).exponents.end());
        std::vector<int> eb(ch->monomial(ib).exponents.begin(), ch->monomial(ib).exponents.end());
        auto want = testing::oracle_product(*ch, ea, eb);
        auto got = ch->multiply(ia, ib);
        std::optional<int> want_index;
        if (want) want_index = ch->index_of_exponents(want->first);
        if (!want_index) {
            ok += !got;
            continue;
        }
        if (got && got->index == *want_index && (got->negative ? -1 : 1) == want->second) ++ok;
    }
    return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " products agree with the oracle"};
}

Outcome criterion4() {
    auto ch = Chart::make(2, {{"z", {0, 0}}, {"e", {1, 1}}}, {3, 4});
    auto z = coord(ch, "z"), e = coord(ch, "e");
    VectorField x = d(ch, "z") + e * d(ch, "e");
    auto s = straighten_deg0(x);
    const GradedSeries& image = s.change.forward()[1];
    const Rational expected[] = {1, -1, Rational(1, 2), Rational(-1, 6), Rational(1, 24)};
    GradedSeries power = e;
    bool coeffs = true;
    std::ostringstream got;
    for (int k = 0; k <= 4; ++k, power = power * z) {
        Rational c = image.coefficient_at(power.terms().front().index);
        got << (k ? ", " : "") << c;
        coeffs = coeffs && c == expected[k];
    }
    // nothing else in the box besides the z^k e terms
    GradedSeries exact = GradedSeries(ch);
    power = e;
    for (int k = 0; k <= 4; ++k, power = power * z) exact += expected[k] * power;
    bool only = equal_in_box(image, exact);
    bool straight = equal_in_box(pushforward(s.change, x), d(ch, "z"));
    return {coeffs && only && straight, "e' coefficients " + got.str() + (straight ? "; pushforward is d/dy" : "; pushforward wrong")};
}

Outcome criterion5() {
    auto ch = Chart::make(2, {{"z", {0, 0}}, {"t1", {0, 1}}, {"e", {1, 1}}}, {3, 3});
    auto z = coord(ch, "z"), e = coord(ch, "e"), t1 = coord(ch, "t1");
    VectorField even = d(ch, "e") + e * d(ch, "z");
    auto s = straighten_nonzero(even);
    bool even_ok = box(s.change.forward()[0]) == z - Rational(1, 2) * e * e &&
                   equal_in_box(pushforward(s.change, even), d(ch, "e"));

    VectorField odd = (constant(ch, 1) + z) * d(ch, "t1");
    auto o = straighten_nonzero(odd);
    bool odd_ok = equal_in_box(pushforward(o.change, odd), d(ch, "t1"));
    GradedSeries power = t1;
    for (int k = 0; k <= 3; ++k, power = power * z)
        odd_ok = odd_ok && o.change.forward()[1].coefficient_at(power.terms().front().index) == (k % 2 ? -1 : 1);

    bool rejected = false;
    try {
        straighten_nonzero(d(ch, "t1") + t1 * d(ch, "z"));
    } catch (const OddSquareNonzero&) {
        rejected = true;
    }
    std::string detail = std::string("even ") + (even_ok ? "ok" : "wrong") + ", odd " + (odd_ok ? "ok" : "wrong") +
                         ", odd square " + (rejected ? "rejected" : "accepted");
    return {even_ok && odd_ok && rejected, detail};
}

Outcome criterion6() {
    auto ch = Chart::make(2, {{"x", {0, 0}}, {"t1", {0, 1}}, {"t2", {1, 0}}, {"e", {1, 1}}}, {3, 4});
    auto x = coord(ch, "x"), t1 = coord(ch, "t1"), t2 = coord(ch, "t2"), e = coord(ch, "e");
    auto start = Clock::now();
    Distribution flow(ch, {d(ch, "x") + t1 * t2 * d(ch, "e")});
    auto cert = adapted_coordinates(flow);
    bool first = box(cert.change.forward()[3]) == e - x * t1 * t2 && verify_adapted(flow, cert).ok;
    double t_first = std::chrono::duration<double>(Clock::now() - start).count();

    auto three = Chart::make(1, {{"x", {0}}, {"y", {0}}, {"z", {0}}}, {3, 3});
    start = Clock::now();
    bool second = false;
    try {
        adapted_coordinates(Distribution(three, {d(three, "x") + coord(three, "y") * d(three, "z"), d(three, "y")}));
    } catch (const InvolutivityViolation& err) {
        second = err.witness().bracket == Rational(-1) * d(three, "z");
    }
    double t_second = std::chrono::duration<double>(Clock::now() - start).count();
    bool fast = t_first < 5 && t_second < 5;
    std::ostringstream out;
    out << "certificate " << (first ? "ok" : "wrong") << " (" << t_first << " s), rejection "
        << (second ? "ok" : "wrong") << " (" << t_second << " s)";
    return {first && second && fast, out.str()};
}

// X = d/d(lead) + centered terms.
VectorField random_nondegenerate(Rng& rng, const ChartPtr& ch, std::size_t lead) {
    DegreeVector deg = ch->degree_of(lead);
    std::vector<GradedSeries> cs;
    for (std::size_t u = 0; u < ch->size(); ++u) {
        auto s = testing::random_series(rng, ch, deg + ch->degree_of(u), uniform(rng, 0, 2), 2, true);
        if (u == lead) s += GradedSeries::constant(ch, 1);
        cs.push_back(std::move(s));
    }
    return VectorField(ch, deg, std::move(cs));
}

Outcome criterion7() {
    Rng rng(1007);
    auto high = chart_xyte(5, 3);
    auto low = chart_xyte(3, 3);
    int ok = 0, losses = 0;
    const int total = 50;
    for (int trial = 0; trial < total; ++trial) {
        VectorField x = [&] {
            switch (trial % 3) {
                case 0: return random_nondegenerate(rng, high, 0);
                case 1: return random_nondegenerate(rng, high, high->index_of("e"));
                default: return pushforward(testing::random_change(rng, high, 1, 2), d(high, "t1"));
            }
        }();
        std::vector<GradedSeries> cs;
        for (const auto& a : x.coefficients()) cs.push_back(retruncate(a, low));
        VectorField x_low(low, x.degree(), std::move(cs));
        auto s_high = straighten(x);
        auto s_low = straighten(x_low);
        for (const auto& st : s_high.steps) losses += st.truncation_loss;
        bool same = s_high.pivot == s_low.pivot;
        for (std::size_t u = 0; u < low->size(); ++u) {
            same = same && box(retruncate(s_high.change.forward()[u], low)) == box(s_low.change.forward()[u]);
            same = same && box(retruncate(s_high.change.inverse()[u], low)) == box(s_low.change.inverse()[u]);
        }
        ok += same;
    }
    return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " certificates coherent (" +
                              std::to_string(losses) + " steps flagged an antiderivative loss)"};
}

Outcome criterion8() {
    Rng rng(1008);
    auto ch = chart_xyte(3, 3);
    int ok = 0;
    const int total = 50;
    auto start = Clock::now();
    std::string first_error;
    for (int trial = 0; trial < total; ++trial) {
        auto sigma = testing::random_change(rng, ch);
        std::vector<VectorField> gens;
        for (std::size_t u = 0; u < ch->size(); ++u)
            if (uniform(rng, 0, 1)) gens.push_back(pushforward(sigma, VectorField::coordinate(ch, u)));
        Distribution dist(ch, gens);
        try {
            auto cert = adapted_coordinates(dist);
            ok += verify_adapted(dist, cert).ok;
        } catch (const Error& e) {
            if (first_error.empty()) first_error = e.what();
        }
    }
    double secs = std::chrono::duration<double>(Clock::now() - start).count();
    std::ostringstream out;
    out << ok << "/" << total << " recovered and verified in " << secs << " s";
    if (!first_error.empty()) out << "; first error: " << first_error;
    return {ok == total && secs < 120, out.str()};
}

std::string random_expression(Rng& rng, const ChartPtr& ch, int depth) {
    auto name = [&] { return ch->coordinate(static_cast<std::size_t>(uniform(rng, 0, int(ch->size()) - 1))).name; };
    auto atom = [&]() -> std::string {
        switch (uniform(rng, 0, depth > 0 ? 4 : 2)) {
            case 0: return std::to_string(uniform(rng, 0, 5)) + (uniform(rng, 0, 1) ? "/" + std::to_string(uniform(rng, 1, 4)) : "");
            case 1:
            case 2: return name();
            case 3: return "(" + random_expression(rng, ch, depth - 1) + ")";
            default: return "-" + name();
        }
    };
    auto factor = [&] {
        std::string a = atom();
        if (uniform(rng, 0, 3) == 0) a += "^" + std::to_string(uniform(rng, 0, 3));
        return a;
    };
    auto term = [&] {
        std::string t = factor();
        for (int i = uniform(rng, 0, 2); i > 0; --i) t += "*" + factor();
        return t;
    };
    std::string s = term();
    for (int i = uniform(rng, 0, 3); i > 0; --i) s += (uniform(rng, 0, 1) ? " + " : " - ") + term();
    return s;
}

int cli_exit(const std::string& sample) {
    std::string cmd = std::string("\"") + Z2FROB_CLI_PATH + "\" --input \"" + Z2FROB_SAMPLES_DIR + "/" + sample +
                      "\" > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome criterion9() {
    Rng rng(1009);
    auto ch = chart_for(2, 3, 3);
    int fixpoints = 0;
    const int total = 100;
    for (int trial = 0; trial < total; ++trial) {
        GradedSeries f = parse_expression(random_expression(rng, ch, 2), ch);
        std::string printed = to_expression(f);
        GradedSeries g = parse_expression(printed, ch);
        fixpoints += g == f && to_expression(g) == printed;
    }
    int a = cli_exit("involutive.json"), b = cli_exit("not_involutive.json"), c = cli_exit("malformed.json");
    std::ostringstream out;
    out << fixpoints << "/" << total << " round trips; exit codes " << a << "/" << b << "/" << c << " (want 0/1/2)";
    return {fixpoints == total && a == 0 && b == 1 && c == 2, out.str()};
}

}  // namespace
}  // namespace z2frob

int main() {
    using namespace z2frob;
    struct Criterion {
        int number;
        double limit;  // seconds, 0 = none
        std::function<Outcome()> check;
    };
    const std::vector<Criterion> criteria{
        {1, 10, criterion1}, {2, 30, criterion2}, {3, 5, criterion3},  {4, 0, criterion4},  {5, 0, criterion5},
        {6, 10, criterion6}, {7, 0, criterion7},  {8, 120, criterion8}, {9, 0, criterion9},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        auto start = Clock::now();
        Outcome o{false, ""};
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(Clock::now() - start).count();
        bool pass = o.pass && (c.limit == 0 || secs < c.limit);
        failures += !pass;
        std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.number << ": " << o.detail << " [" << secs
                  << " s]" << std::endl;
    }
    return failures ? 1 : 0;
}
