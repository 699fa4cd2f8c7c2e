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

#ifndef Z2FROB_IO_HPP
#define Z2FROB_IO_HPP

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "chart.hpp"
#include "distribution.hpp"
#include "errors.hpp"
#include "expression.hpp"
#include "fields.hpp"
#include "frobenius.hpp"
#include "series.hpp"

namespace z2frob {

using Json = nlohmann::ordered_json;

struct FieldSpec {
    std::string name;
    std::optional<std::vector<int>> degree;
    std::vector<std::pair<std::string, std::string>> coefficients;
};

struct ProblemSpec {
    int n = 0;
    Truncation truncation;
    std::vector<Coordinate> coordinates;
    std::vector<FieldSpec> fields;
    std::string task;
    /// field names the task acts on; empty means all fields
    std::vector<std::string> arg_fields;
    /// certificate for task=verify, inline or read from `certificate_path`
    std::optional<Json> certificate;
    std::string certificate_path;
    std::filesystem::path base_dir;
};

struct Overrides {
    std::optional<std::string> task;
    std::optional<int> j_order;
    std::optional<int> base_order;
    std::optional<std::string> verify_path;
};

struct RunResult {
    Json report;
    int exit_code = 0;
};

inline const std::vector<std::string>& task_names() {
    static const std::vector<std::string> names{"bracket", "rank", "involutive", "straighten", "frobenius", "verify"};
    return names;
}

// --- serialization ----------------------------------------------------------

inline Json degree_to_json(const DegreeVector& d) { return Json(d.components()); }

inline Json images_to_json(const ChartPtr& chart, const std::vector<GradedSeries>& images) {
    Json out = Json::object();
    for (std::size_t u = 0; u < chart->size(); ++u) out[chart->coordinate(u).name] = to_expression(images[u]);
    return out;
}

inline Json field_to_json(const VectorField& x) {
    Json c = Json::object();
    for (std::size_t u = 0; u < x.chart()->size(); ++u)
        if (!x.coefficient(u).is_zero()) c[x.chart()->coordinate(u).name] = to_expression(x.coefficient(u));
    return Json{{"degree", degree_to_json(x.degree())}, {"coefficients", std::move(c)}};
}

inline Json rank_to_json(const Rank& r) {
    Json out = Json::object();
    for (const auto& [d, c] : r.counts) out[d.to_string()] = c;
    return out;
}

/// Change and inverse carry every stored term, so that re-verification sees
/// exactly the series that were certified.
inline Json certificate_to_json(const FrobeniusCertificate& cert, const std::vector<std::string>& generator_names) {
    const ChartPtr& chart = cert.change.chart();
    Json residuals = Json::object();
    for (const auto& [t, order] : cert.residuals)
        residuals[t < generator_names.size() ? generator_names[t] : std::to_string(t)] = order;
    Json steps = Json::array();
    for (const auto& s : cert.steps)
        steps.push_back(Json{{"label", s.label},
                             {"change", images_to_json(chart, s.change.forward())},
                             {"truncation_loss", s.truncation_loss}});
    return Json{{"change", images_to_json(chart, cert.change.forward())},
                {"inverse", images_to_json(chart, cert.change.inverse())},
                {"adapted", cert.adapted},
                {"residuals", std::move(residuals)},
                {"steps", std::move(steps)}};
}

namespace detail {

[[noreturn]] inline void format_error(const std::string& what) { throw ParseError(what); }

inline const Json& require(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) format_error(where + ": missing \"" + key + "\"");
    return j.at(key);
}

inline std::vector<GradedSeries> images_from_json(const Json& j, const ChartPtr& chart, const std::string& what,
                                                  std::vector<std::string>& warnings) {
    if (!j.is_object()) format_error(what + " must be an object of expressions");
    std::vector<GradedSeries> images = identity_images(chart);
    for (const auto& [name, expr] : j.items()) {
        auto u = chart->find(name);
        if (!u) throw UnknownCoordinate(what + ": unknown coordinate '" + name + "'");
        if (!expr.is_string()) format_error(what + ": expression for '" + name + "' must be a string");
        auto parsed = parse_expression_with_warnings(expr.get<std::string>(), chart, true);
        for (const auto& w : parsed.warnings) warnings.push_back(what + "." + name + ": " + w);
        images[*u] = std::move(parsed.series);
    }
    return images;
}

}  // namespace detail

/// Reads "change", "inverse" and "adapted", either at top level or under
/// "certificate". A missing inverse is recomputed from the change.
inline FrobeniusCertificate certificate_from_json(const Json& j, const ChartPtr& chart,
                                                  std::vector<std::string>* warnings = nullptr) {
    const Json& c = j.is_object() && j.contains("certificate") ? j.at("certificate") : j;
    std::vector<std::string> local;
    auto forward = detail::images_from_json(detail::require(c, "change", "certificate"), chart, "change", local);
    CoordinateChange change = c.contains("inverse")
                                  ? CoordinateChange::from_pair(
                                        forward, detail::images_from_json(c.at("inverse"), chart, "inverse", local))
                                  : CoordinateChange::from_forward(forward);
    FrobeniusCertificate cert{change, {}, {}, {}};
    const Json& adapted = detail::require(c, "adapted", "certificate");
    if (!adapted.is_array()) detail::format_error("certificate: \"adapted\" must be a list of names");
    for (const auto& a : adapted) {
        if (!a.is_string()) detail::format_error("certificate: adapted entries must be names");
        cert.adapted.push_back(a.get<std::string>());
    }
    if (warnings) warnings->insert(warnings->end(), local.begin(), local.end());
    return cert;
}

// --- problem files ------------------------------------------------------------

inline std::vector<int> int_list(const Json& j, const std::string& where) {
    if (!j.is_array()) detail::format_error(where + " must be a list of integers");
    std::vector<int> out;
    for (const auto& v : j) {
        if (!v.is_number_integer()) detail::format_error(where + " must be a list of integers");
        out.push_back(v.get<int>());
    }
    return out;
}

inline DegreeVector degree_from(const std::vector<int>& comps, int n, const std::string& where) {
    if (static_cast<int>(comps.size()) != n)
        throw DimensionError(where + ": degree has " + std::to_string(comps.size()) + " entries, expected " +
                             std::to_string(n));
    for (int c : comps)
        if (c != 0 && c != 1) throw DimensionError(where + ": degree entries must be 0 or 1");
    return DegreeVector(comps);
}

inline ProblemSpec problem_from_json(const Json& j) {
    if (!j.is_object()) detail::format_error("problem must be a JSON object");
    ProblemSpec spec;
    const Json& n = detail::require(j, "n", "problem");
    if (!n.is_number_integer() || n.get<int>() < 1 || n.get<int>() > 32)
        detail::format_error("problem: \"n\" must be an integer in [1, 32]");
    spec.n = n.get<int>();
    if (j.contains("truncation")) {
        const Json& t = j.at("truncation");
        if (!t.is_object()) detail::format_error("problem: \"truncation\" must be an object");
        auto read = [&](const char* key, int& dst) {
            if (!t.contains(key)) return;
            if (!t.at(key).is_number_integer() || t.at(key).get<int>() < 0)
                detail::format_error(std::string("truncation: \"") + key + "\" must be a nonnegative integer");
            dst = t.at(key).get<int>();
        };
        read("j_order", spec.truncation.j_order);
        read("base_order", spec.truncation.base_order);
    }
    const Json& coords = detail::require(j, "coordinates", "problem");
    if (!coords.is_array()) detail::format_error("problem: \"coordinates\" must be a list");
    for (const auto& c : coords) {
        const Json& name = detail::require(c, "name", "coordinate");
        if (!name.is_string()) detail::format_error("coordinate: \"name\" must be a string");
        spec.coordinates.push_back({name.get<std::string>(), degree_from(int_list(detail::require(c, "degree", "coordinate"),
                                                                                  "coordinate degree"),
                                                                         spec.n, "coordinate '" + name.get<std::string>() + "'")});
    }
    if (j.contains("fields")) {
        const Json& fields = j.at("fields");
        if (!fields.is_array()) detail::format_error("problem: \"fields\" must be a list");
        for (const auto& f : fields) {
            FieldSpec fs;
            const Json& name = detail::require(f, "name", "field");
            if (!name.is_string() || !Chart::valid_identifier(name.get<std::string>()))
                detail::format_error("field: \"name\" must be an identifier");
            fs.name = name.get<std::string>();
            for (const auto& other : spec.fields)
                if (other.name == fs.name) detail::format_error("duplicate field name '" + fs.name + "'");
            if (f.contains("degree")) fs.degree = int_list(f.at("degree"), "field degree");
            const Json& cs = detail::require(f, "coefficients", "field '" + fs.name + "'");
            if (!cs.is_object()) detail::format_error("field '" + fs.name + "': coefficients must be an object");
            for (const auto& [coord, expr] : cs.items()) {
                if (!expr.is_string())
                    detail::format_error("field '" + fs.name + "': coefficient on '" + coord + "' must be a string");
                fs.coefficients.push_back({coord, expr.get<std::string>()});
            }
            spec.fields.push_back(std::move(fs));
        }
    }
    if (j.contains("task")) {
        if (!j.at("task").is_string()) detail::format_error("problem: \"task\" must be a string");
        spec.task = j.at("task").get<std::string>();
    }
    if (j.contains("args")) {
        const Json& a = j.at("args");
        if (!a.is_object()) detail::format_error("problem: \"args\" must be an object");
        if (a.contains("fields")) {
            if (!a.at("fields").is_array()) detail::format_error("args: \"fields\" must be a list of names");
            for (const auto& f : a.at("fields")) {
                if (!f.is_string()) detail::format_error("args: \"fields\" must be a list of names");
                spec.arg_fields.push_back(f.get<std::string>());
            }
        }
        if (a.contains("certificate")) {
            if (a.at("certificate").is_string())
                spec.certificate_path = a.at("certificate").get<std::string>();
            else
                spec.certificate = a.at("certificate");
        }
    }
    return spec;
}

// --- driver -------------------------------------------------------------------

namespace detail {

inline bool format_kind(const std::string& kind) {
    return kind == "ParseError" || kind == "ChartError" || kind == "UnknownCoordinate" || kind == "DimensionError" ||
           kind == "HomogeneityError" || kind == "CenteringError";
}

struct Problem {
    ChartPtr chart;
    std::vector<std::string> names;
    std::vector<VectorField> fields;
    std::vector<std::string> warnings;

    const VectorField& field(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return fields[i];
        throw ParseError("unknown field '" + name + "'");
    }
};

inline Problem build_problem(const ProblemSpec& spec) {
    Problem p;
    p.chart = Chart::make(spec.n, spec.coordinates, spec.truncation);
    for (const auto& fs : spec.fields) {
        std::vector<GradedSeries> c(p.chart->size(), GradedSeries(p.chart));
        for (const auto& [coord, expr] : fs.coefficients) {
            auto u = p.chart->find(coord);
            if (!u) throw UnknownCoordinate("field '" + fs.name + "': unknown coordinate '" + coord + "'");
            ParsedSeries parsed = [&] {
                try {
                    return parse_expression_with_warnings(expr, p.chart);
                } catch (const SyntaxError& e) {
                    throw ParseError("field '" + fs.name + "', coefficient on '" + coord + "': " + e.what());
                }
            }();
            for (const auto& w : parsed.warnings) p.warnings.push_back(fs.name + "." + coord + ": " + w);
            c[*u] += parsed.series;
        }
        p.names.push_back(fs.name);
        p.fields.push_back(fs.degree ? VectorField(p.chart, degree_from(*fs.degree, spec.n, "field '" + fs.name + "'"),
                                                   std::move(c))
                                     : VectorField::infer(p.chart, std::move(c)));
    }
    return p;
}

inline std::vector<std::size_t> selected(const ProblemSpec& spec, const Problem& p) {
    std::vector<std::size_t> out;
    if (spec.arg_fields.empty()) {
        for (std::size_t i = 0; i < p.fields.size(); ++i) out.push_back(i);
        return out;
    }
    for (const auto& name : spec.arg_fields) {
        std::size_t i = 0;
        while (i < p.names.size() && p.names[i] != name) ++i;
        if (i == p.names.size()) throw ParseError("unknown field '" + name + "'");
        out.push_back(i);
    }
    return out;
}

inline Json witness_to_json(const ChartPtr& chart, const InvolutivityWitness& w, const std::vector<std::string>& names) {
    return Json{{"pair", {names.at(w.first), names.at(w.second)}},
                {"bracket", field_to_json(w.bracket)},
                {"obstruction", {{"coordinate", chart->coordinate(w.obstruction_coordinate).name},
                                 {"coefficient", to_expression(w.obstruction)}}}};
}

inline Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return Json::parse(ss.str());
}

}  // namespace detail

/// Executes one task. Exit code 0 is success or a positive answer, 1 a
/// negative answer or failed precondition, 2 a malformed problem.
inline RunResult run(const ProblemSpec& spec) {
    RunResult result;
    Json& report = result.report;
    report = Json::object();
    report["task"] = spec.task;
    std::vector<std::string> names;
    try {
        if (std::find(task_names().begin(), task_names().end(), spec.task) == task_names().end())
            throw ParseError("unknown task '" + spec.task + "'");
        detail::Problem p = detail::build_problem(spec);
        names = p.names;
        std::vector<std::size_t> sel = detail::selected(spec, p);
        std::vector<VectorField> chosen;
        std::vector<std::string> chosen_names;
        for (std::size_t i : sel) {
            chosen.push_back(p.fields[i]);
            chosen_names.push_back(p.names[i]);
        }
        names = chosen_names;
        Distribution d(p.chart, chosen);

        if (spec.task == "bracket") {
            if (chosen.size() != 2) throw ParseError("task bracket needs exactly two fields");
            report["bracket"] = field_to_json(bracket(chosen[0], chosen[1]).boxed());
        } else if (spec.task == "rank") {
            report["rank"] = rank_to_json(rank_of(d));
        } else if (spec.task == "involutive") {
            Involutivity inv = is_involutive(d);
            report["involutive"] = inv.involutive;
            if (!inv.involutive) {
                report["witness"] = detail::witness_to_json(p.chart, *inv.witness, chosen_names);
                result.exit_code = 1;
            }
        } else if (spec.task == "straighten") {
            if (chosen.size() != 1) throw ParseError("task straighten needs exactly one field");
            Straightening s = straighten(chosen[0]);
            report["pivot"] = p.chart->coordinate(s.pivot).name;
            auto boxed = [](std::vector<GradedSeries> images) {
                for (auto& f : images) f = box(f);
                return images;
            };
            report["change"] = images_to_json(p.chart, boxed(s.change.forward()));
            report["inverse"] = images_to_json(p.chart, boxed(s.change.inverse()));
            report["straightened"] = field_to_json(pushforward(s.change, chosen[0]).boxed());
        } else if (spec.task == "frobenius") {
            FrobeniusCertificate cert = adapted_coordinates(d);
            Json cj = certificate_to_json(cert, chosen_names);
            for (auto& [k, v] : cj.items()) report[k] = v;
            report["verified"] = true;
        } else {  // verify
            Json cj;
            if (spec.certificate)
                cj = *spec.certificate;
            else if (!spec.certificate_path.empty())
                cj = detail::read_json_file(std::filesystem::path(spec.certificate_path).is_absolute()
                                                ? std::filesystem::path(spec.certificate_path)
                                                : spec.base_dir / spec.certificate_path);
            else
                throw ParseError("task verify needs a certificate");
            FrobeniusCertificate cert = certificate_from_json(cj, p.chart, &p.warnings);
            VerificationReport rep = verify_adapted(d, cert);
            report["verified"] = rep.ok;
            report["inverse_consistent"] = rep.inverse_consistent;
            report["rank_match"] = rep.rank_match;
            report["spans"] = rep.spans;
            Json residuals = Json::object();
            for (const auto& [t, order] : rep.residuals) residuals[chosen_names.at(t)] = order;
            report["residuals"] = std::move(residuals);
            if (!rep.ok) {
                report["message"] = rep.message;
                result.exit_code = 1;
            }
        }
        if (!p.warnings.empty()) report["warnings"] = p.warnings;
    } catch (const InvolutivityViolation& e) {
        report["error_kind"] = e.kind();
        report["message"] = e.what();
        report["witness"] = detail::witness_to_json(e.witness().bracket.chart(), e.witness(), names);
        result.exit_code = 1;
    } catch (const CommutationViolation& e) {
        report["error_kind"] = e.kind();
        report["message"] = e.what();
        report["witness"] = Json{{"pair", {names.at(e.first()), names.at(e.second())}},
                                 {"bracket", field_to_json(e.bracket())}};
        result.exit_code = 1;
    } catch (const Error& e) {
        report["error_kind"] = e.kind();
        report["message"] = e.what();
        result.exit_code = detail::format_kind(e.kind()) ? 2 : 1;
    } catch (const Json::exception& e) {
        report["error_kind"] = "ParseError";
        report["message"] = e.what();
        result.exit_code = 2;
    }
    return result;
}

/// Parses a problem document, applies command-line overrides and runs it.
inline RunResult run_document(const std::string& text, const Overrides& overrides = {},
                              const std::filesystem::path& base_dir = {}) {
    ProblemSpec spec;
    try {
        spec = problem_from_json(Json::parse(text));
    } catch (const Json::exception& e) {
        return RunResult{Json{{"error_kind", "ParseError"}, {"message", e.what()}}, 2};
    } catch (const Error& e) {
        return RunResult{Json{{"error_kind", e.kind()}, {"message", e.what()}}, 2};
    }
    spec.base_dir = base_dir;
    if (overrides.task) spec.task = *overrides.task;
    if (overrides.j_order) spec.truncation.j_order = *overrides.j_order;
    if (overrides.base_order) spec.truncation.base_order = *overrides.base_order;
    if (overrides.verify_path) {
        spec.task = "verify";
        spec.certificate.reset();
        spec.certificate_path = *overrides.verify_path;
    }
    return run(spec);
}

}  // namespace z2frob

#endif  // Z2FROB_IO_HPP
