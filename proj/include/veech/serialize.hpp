#pragma once

#include "errors.hpp"
#include "exact.hpp"
#include "kz_connection.hpp"
#include "monodromy_rep.hpp"
#include "numeric.hpp"
#include "path.hpp"
#include "transport.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>
#include <string>

namespace veech {

using json = nlohmann::json;

namespace detail {

inline json real_to_json(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

inline double real_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw ParseError("bad real value '" + s + "'");
}

inline json int_to_json(const Int& v) {
    if (v >= std::numeric_limits<long long>::min() && v <= std::numeric_limits<long long>::max())
        return v.convert_to<long long>();
    return v.str();
}

inline Int int_from_json(const json& j) {
    if (j.is_number_integer()) return Int(j.get<long long>());
    return Int(j.get<std::string>());
}

} // namespace detail

inline json complex_to_json(cplx z) { return json::array({detail::real_to_json(z.real()), detail::real_to_json(z.imag())}); }
inline cplx complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw ParseError("complex value must be [re, im]");
    return {detail::real_from_json(j[0]), detail::real_from_json(j[1])};
}

inline int level_for_dim(std::size_t n) {
    for (int k = 1; k < 200; ++k)
        if (level_dimension(k) == n) return k;
    return 0;
}

inline json to_json(const IntMatrix& m, int level = 0) {
    json entries = json::array();
    for (const auto& v : m.data()) entries.push_back(detail::int_to_json(v));
    return {{"level", level ? level : level_for_dim(m.rows())}, {"dim", m.rows()}, {"exact", true}, {"entries", entries}};
}

inline json to_json(const CMatrix& m, int level = 0) {
    json entries = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) entries.push_back(complex_to_json(m(i, j)));
    return {{"level", level ? level : level_for_dim(std::size_t(m.rows()))},
            {"dim", m.rows()},
            {"exact", false},
            {"entries", entries}};
}

inline IntMatrix int_matrix_from_json(const json& j) {
    if (!j.at("exact").get<bool>()) throw ParseError("expected an exact matrix");
    const std::size_t n = j.at("dim").get<std::size_t>();
    const auto& e = j.at("entries");
    if (e.size() != n * n) throw ParseError("entry count does not match dimension");
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n * n; ++i) m(i / n, i % n) = detail::int_from_json(e[i]);
    return m;
}

inline CMatrix complex_matrix_from_json(const json& j) {
    const auto n = j.at("dim").get<Eigen::Index>();
    const auto& e = j.at("entries");
    if (e.size() != std::size_t(n * n)) throw ParseError("entry count does not match dimension");
    CMatrix m(n, n);
    const bool exact = j.at("exact").get<bool>();
    for (Eigen::Index i = 0; i < n * n; ++i)
        m(i / n, i % n) = exact ? cplx(detail::int_from_json(e[i]).convert_to<double>(), 0.0) : complex_from_json(e[i]);
    return m;
}

inline json to_json(const ResidueSet& rs) {
    json poles = json::array(), mats = json::array(), pairs = json::array();
    for (int i = 1; i <= 5; ++i) {
        poles.push_back(complex_to_json(zeta_power(i)));
        mats.push_back(to_json(rs.exact_at(i), rs.level));
        const auto& p = rs.pairs[i - 1];
        pairs.push_back({{p[0].first, p[0].second}, {p[1].first, p[1].second}});
    }
    return {{"level", rs.level}, {"poles", poles}, {"residues", mats}, {"pairs", pairs}};
}

inline ResidueSet residue_set_from_json(const json& j) {
    ResidueSet rs;
    rs.level = j.at("level").get<int>();
    for (int i = 0; i < 5; ++i) {
        rs.exact[i] = int_matrix_from_json(j.at("residues").at(i));
        const auto& p = j.at("pairs").at(i);
        rs.pairs[i] = {std::pair<int, int>{p[0][0].get<int>(), p[0][1].get<int>()},
                       std::pair<int, int>{p[1][0].get<int>(), p[1][1].get<int>()}};
    }
    return rs;
}

inline json to_json(const PathSpec& path) {
    json segs = json::array();
    for (const auto& s : path.segments) {
        json js;
        if (const auto* l = std::get_if<LineSegment>(&s.shape)) {
            js = {{"type", "line"}, {"from", complex_to_json(l->from)}, {"to", complex_to_json(l->to)}};
        } else {
            const auto& a = std::get<ArcSegment>(s.shape);
            js = {{"type", "arc"},
                  {"center", complex_to_json(a.center)},
                  {"radius", a.radius},
                  {"from_angle", a.from_angle},
                  {"to_angle", a.to_angle}};
        }
        if (s.pole_adjacent) js["pole_adjacent"] = true;
        segs.push_back(js);
    }
    return {{"segments", segs}};
}

inline PathSpec path_from_json(const json& j) {
    PathSpec p;
    for (const auto& js : j.at("segments")) {
        const auto type = js.at("type").get<std::string>();
        const bool adj = js.value("pole_adjacent", false);
        if (type == "line") p.segments.push_back(line(complex_from_json(js.at("from")), complex_from_json(js.at("to")), adj));
        else if (type == "arc")
            p.segments.push_back(arc(complex_from_json(js.at("center")), js.at("radius").get<double>(),
                                     js.at("from_angle").get<double>(), js.at("to_angle").get<double>(), adj));
        else throw ParseError("unknown segment type '" + type + "'");
    }
    return p;
}

inline json to_json(const TransportSettings& s) {
    return {{"rtol", s.rtol},
            {"atol", s.atol},
            {"max_word_length", s.max_word_length},
            {"nodes_per_panel", s.nodes_per_panel},
            {"series_cutoff", s.series_cutoff},
            {"clearance", s.clearance},
            {"scalar_tail", s.scalar_tail}};
}

inline json to_json(const RepResult& r) {
    json eps = json::array();
    for (const auto& row : r.epsilon_table)
        eps.push_back({{"eps", row.eps},
                       {"step_distance", detail::real_to_json(row.step_distance)},
                       {"series_distance", detail::real_to_json(row.series_distance)},
                       {"ode_error", detail::real_to_json(row.ode_error)}});
    json variants = json::array();
    for (const auto& v : r.variants)
        variants.push_back({{"m1_inverse", v.variant.m1_inverse},
                            {"sign", v.variant.sign},
                            {"d5", detail::real_to_json(v.defects.d5)},
                            {"d2", detail::real_to_json(v.defects.d2)},
                            {"distance_to_ode_limit", detail::real_to_json(v.distance_to_ode_limit)}});
    return {{"level", r.level},
            {"method", to_string(r.method)},
            {"rho_ST", to_json(r.rho_st, r.level)},
            {"rho_T", to_json(r.rho_t, r.level)},
            {"defects", {{"d5", detail::real_to_json(r.defects.d5)}, {"d2", detail::real_to_json(r.defects.d2)}}},
            {"epsilon_table", eps},
            {"epsilon_cauchy", r.epsilon_cauchy},
            {"method_distance", detail::real_to_json(r.method_distance)},
            {"truncation_bound", detail::real_to_json(r.truncation_bound)},
            {"truncation_warning", r.truncation_warning},
            {"selected", {{"m1_inverse", r.selected.m1_inverse}, {"sign", r.selected.sign}}},
            {"variants", variants},
            {"selection_note", r.selection_note},
            {"notes", r.notes}};
}

inline RepResult rep_result_from_json(const json& j) {
    RepResult r;
    r.level = j.at("level").get<int>();
    r.method = parse_method(j.at("method").get<std::string>());
    r.rho_st = complex_matrix_from_json(j.at("rho_ST"));
    r.rho_t = complex_matrix_from_json(j.at("rho_T"));
    r.defects.d5 = detail::real_from_json(j.at("defects").at("d5"));
    r.defects.d2 = detail::real_from_json(j.at("defects").at("d2"));
    for (const auto& row : j.at("epsilon_table"))
        r.epsilon_table.push_back({row.at("eps").get<double>(), detail::real_from_json(row.at("step_distance")),
                                   detail::real_from_json(row.at("series_distance")),
                                   detail::real_from_json(row.at("ode_error"))});
    r.epsilon_cauchy = j.at("epsilon_cauchy").get<bool>();
    r.method_distance = detail::real_from_json(j.at("method_distance"));
    r.truncation_bound = detail::real_from_json(j.at("truncation_bound"));
    r.truncation_warning = j.at("truncation_warning").get<bool>();
    r.selected = {j.at("selected").at("m1_inverse").get<bool>(), j.at("selected").at("sign").get<int>()};
    for (const auto& v : j.at("variants")) {
        VariantRecord rec;
        rec.variant = {v.at("m1_inverse").get<bool>(), v.at("sign").get<int>()};
        rec.defects = {detail::real_from_json(v.at("d5")), detail::real_from_json(v.at("d2"))};
        rec.distance_to_ode_limit = detail::real_from_json(v.at("distance_to_ode_limit"));
        r.variants.push_back(rec);
    }
    r.selection_note = j.at("selection_note").get<std::string>();
    r.notes = j.at("notes").get<std::vector<std::string>>();
    return r;
}

} // namespace veech
