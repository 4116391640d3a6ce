#pragma once

#include "errors.hpp"
#include "exact.hpp"
#include "kz_connection.hpp"
#include "local_frobenius.hpp"
#include "monomial.hpp"
#include "numeric.hpp"
#include "transport.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace veech {

struct GeneratorMatrices {
    IntMatrix m0;
    IntMatrix m1;
};

inline GeneratorMatrices generator_matrices() {
    return {IntMatrix::from_rows({{0, 0, -1, 1}, {0, 0, 0, -1}, {1, 0, -1, 0}, {1, 1, -1, 0}}),
            IntMatrix::from_rows({{0, 1, 0, 0}, {1, 0, 0, 0}, {1, 1, 0, -1}, {1, 1, -1, 0}})};
}

inline IntMatrix standard_symplectic_form() {
    return IntMatrix::from_rows({{0, 0, 1, 0}, {0, 0, 0, 1}, {-1, 0, 0, 0}, {0, -1, 0, 0}});
}

inline bool preserves_form(const IntMatrix& m, const IntMatrix& j) { return m.transpose() * j * m == j; }

// Smallest n <= limit with m^n = c Id, reported with c.
struct ProjectiveOrder {
    int order = 0;
    Int scalar = 0;
};

inline std::optional<ProjectiveOrder> projective_order(const IntMatrix& m, int limit = 12) {
    IntMatrix p = m;
    for (int n = 1; n <= limit; ++n) {
        if (auto c = p.scalar_multiple_of_identity(); c && *c != 0) return ProjectiveOrder{n, *c};
        p = p * m;
    }
    return std::nullopt;
}

struct GeneratorReport {
    Int det_m0, det_m1;
    bool m0_symplectic = false;
    bool m1_symplectic = false;
    std::optional<ProjectiveOrder> m0_order;
    std::optional<ProjectiveOrder> m1_order;
    std::optional<ProjectiveOrder> m0_m1inv_order;
};

inline GeneratorReport generator_report() {
    const auto g = generator_matrices();
    const IntMatrix j = standard_symplectic_form();
    GeneratorReport r;
    r.det_m0 = determinant(g.m0);
    r.det_m1 = determinant(g.m1);
    r.m0_symplectic = preserves_form(g.m0, j);
    r.m1_symplectic = preserves_form(g.m1, j);
    r.m0_order = projective_order(g.m0);
    r.m1_order = projective_order(g.m1);
    r.m0_m1inv_order = projective_order(g.m0 * integer_inverse(g.m1));
    return r;
}

// Action on the degree-k monomial basis induced by x_j -> sum_i M(i,j) x_i; column m is the image of monomial m.
template <class T>
DenseMatrix<T> sym_power(const DenseMatrix<T>& m, int k) {
    if (m.rows() != 4 || m.cols() != 4) throw InvalidArgument("sym_power expects a 4x4 matrix");
    const MonomialBasis b(k);
    DenseMatrix<T> out(b.size(), b.size());
    for (std::size_t col = 0; col < b.size(); ++col) {
        std::map<Monomial, T> poly{{Monomial{{0, 0, 0, 0}}, T(1)}};
        for (int j = 0; j < 4; ++j)
            for (int e = 0; e < b[col].exponents[j]; ++e) {
                std::map<Monomial, T> next;
                for (const auto& [mono, c] : poly)
                    for (int i = 0; i < 4; ++i) {
                        if (m(i, j) == 0) continue;
                        Monomial up = mono;
                        ++up.exponents[i];
                        next[up] += c * m(i, j);
                    }
                poly = std::move(next);
            }
        for (const auto& [mono, c] : poly)
            if (c != 0) out(b.index_of(mono), col) = c;
    }
    return out;
}

inline CMatrix sym_power(const CMatrix& m, int k) {
    if (m.rows() != 4 || m.cols() != 4) throw InvalidArgument("sym_power expects a 4x4 matrix");
    const MonomialBasis b(k);
    const Eigen::Index n = Eigen::Index(b.size());
    CMatrix out = CMatrix::Zero(n, n);
    for (std::size_t col = 0; col < b.size(); ++col) {
        std::map<Monomial, cplx> poly{{Monomial{{0, 0, 0, 0}}, 1.0}};
        for (int j = 0; j < 4; ++j)
            for (int e = 0; e < b[col].exponents[j]; ++e) {
                std::map<Monomial, cplx> next;
                for (const auto& [mono, c] : poly)
                    for (int i = 0; i < 4; ++i) {
                        Monomial up = mono;
                        ++up.exponents[i];
                        next[up] += c * m(i, j);
                    }
                poly = std::move(next);
            }
        for (const auto& [mono, c] : poly) out(Eigen::Index(b.index_of(mono)), Eigen::Index(col)) = c;
    }
    return out;
}

enum class Method { series, ode_limit, both };

inline std::string to_string(Method m) {
    switch (m) {
    case Method::series: return "series";
    case Method::ode_limit: return "ode-limit";
    case Method::both: return "both";
    }
    return "?";
}

inline Method parse_method(const std::string& s) {
    if (s == "series") return Method::series;
    if (s == "ode-limit" || s == "ode") return Method::ode_limit;
    if (s == "both") return Method::both;
    throw InvalidArgument("unknown method '" + s + "'");
}

// One choice of (M1 or its inverse) and the sign of the half-turn exponential.
struct Variant {
    bool m1_inverse = false;
    int sign = +1;

    std::string name() const { return std::string(m1_inverse ? "M1^-1" : "M1") + (sign > 0 ? ",+" : ",-"); }
    friend bool operator==(const Variant&, const Variant&) = default;
};

struct RelationDefects {
    double d5 = 0.0;
    double d2 = 0.0;
    bool ok() const { return d5 < 1e-4 && d2 < 1e-4; }
};

inline RelationDefects relation_defects(const CMatrix& rho_st, const CMatrix& rho_t) {
    const CMatrix id = identity(rho_st.rows());
    RelationDefects d;
    CMatrix p5 = rho_st;
    for (int i = 1; i < 5; ++i) p5 = (p5 * rho_st).eval();
    d.d5 = proj_distance(p5, id);
    const CMatrix s = rho_st * inverse(rho_t);
    d.d2 = proj_distance(s * s, id);
    return d;
}

struct VariantRecord {
    Variant variant;
    RelationDefects defects;
    double distance_to_ode_limit = -1.0; // negative when the limit was not computed
};

struct EpsilonRow {
    double eps = 0.0;
    double step_distance = -1.0;   // proj distance to the previous epsilon, negative for the first
    double series_distance = -1.0; // proj distance to the series result, negative if unavailable
    double ode_error = 0.0;
};

struct RepResult {
    int level = 0;
    Method method = Method::series;
    CMatrix rho_st;
    CMatrix rho_t;
    RelationDefects defects;
    std::vector<EpsilonRow> epsilon_table;
    bool epsilon_cauchy = true;
    double method_distance = -1.0;
    double truncation_bound = 0.0;
    bool truncation_warning = false;
    Variant selected;
    std::vector<VariantRecord> variants;
    std::string selection_note;
    std::vector<std::string> notes;
};

class AssemblyError : public Error {
public:
    AssemblyError(const std::string& what, RepResult partial) : Error(what), result_(std::move(partial)) {}
    const RepResult& result() const { return result_; }

private:
    RepResult result_;
};

struct AssemblySettings {
    TransportSettings transport;
    std::vector<double> epsilons{1e-2, 1e-3, 1e-4};
    double agreement_tol = 1e-5;
    bool throw_on_disagreement = true;
};

inline CMatrix series_rho_t(const CMatrix& phi, const CMatrix& m1k, const CMatrix& a_at_one, double hbar,
                            const Variant& v) {
    const CMatrix m = v.m1_inverse ? inverse(m1k) : m1k;
    return inverse(phi) * m * expm(cplx(0.0, v.sign * pi * hbar) * a_at_one) * phi;
}

// Proof-style product Phi_eps^-1 M1 S_eps Phi_eps, where S_eps is the anticlockwise local half turn
// from 1 - eps to 1 + eps.
inline CMatrix ode_limit_rho_t(const PulledBackConnection& conn, const CMatrix& m1k, double eps, bool m1_inverse,
                               const TransportSettings& settings, double* ode_error = nullptr) {
    const auto phi = ode_transport(conn, real_segment(0.0, 1.0 - eps, true), settings);
    const LocalSeries s = adaptive_q_series(conn, 5, eps, 1e-14);
    const CMatrix half = semicircle_transport(s, eps, +1, pi);
    const CMatrix m = m1_inverse ? inverse(m1k) : m1k;
    if (ode_error) *ode_error = phi.error_estimate;
    return inverse(phi.value) * m * half * phi.value;
}

inline std::vector<Variant> all_variants() { return {{false, +1}, {false, -1}, {true, +1}, {true, -1}}; }

inline RepResult assemble_rep(int k, Method method, const AssemblySettings& settings = {}) {
    settings.transport.validate();
    const PulledBackConnection conn(k);
    const auto gen = generator_matrices();
    const CMatrix m0k = to_complex(sym_power(gen.m0, k));
    const CMatrix m1k = to_complex(sym_power(gen.m1, k));
    const CMatrix a1 = conn.residue(5);
    const double hb = conn.hbar_value();

    RepResult rep;
    rep.level = k;
    rep.method = method;
    rep.rho_st = m0k;
    const Variant theorem{false, +1};

    std::optional<CMatrix> phi;
    if (method != Method::ode_limit) {
        const auto ser = phi_regularized(conn, settings.transport.max_word_length, settings.transport);
        phi = ser.value;
        rep.truncation_bound = ser.tail_bound;
        rep.truncation_warning = ser.truncation_warning;
        if (ser.truncation_warning) {
            std::ostringstream note;
            note << "series tail estimate " << std::scientific << std::setprecision(3) << ser.tail_bound
                 << " exceeds the cutoff " << settings.transport.series_cutoff;
            rep.notes.push_back(note.str());
        }
    }

    std::map<bool, CMatrix> limit_by_inverse; // value at the smallest epsilon
    if (method != Method::series) {
        for (bool inv : {false, true}) {
            std::optional<CMatrix> prev;
            for (double eps : settings.epsilons) {
                double err = 0.0;
                const CMatrix r = ode_limit_rho_t(conn, m1k, eps, inv, settings.transport, &err);
                if (!inv) {
                    EpsilonRow row;
                    row.eps = eps;
                    row.ode_error = err;
                    if (prev) row.step_distance = proj_distance(r, *prev);
                    if (phi) row.series_distance = proj_distance(r, series_rho_t(*phi, m1k, a1, hb, theorem));
                    rep.epsilon_table.push_back(row);
                }
                prev = r;
            }
            if (!prev) throw InvalidArgument("epsilon list is empty");
            limit_by_inverse[inv] = *prev;
        }
        for (std::size_t i = 2; i < rep.epsilon_table.size(); ++i)
            if (!(rep.epsilon_table[i].step_distance < rep.epsilon_table[i - 1].step_distance))
                rep.epsilon_cauchy = false;
        if (rep.epsilon_table.size() >= 2 && !(rep.epsilon_table.back().step_distance < settings.agreement_tol))
            rep.epsilon_cauchy = false;
    }

    // Score every variant; prefer ones passing the relations and agreeing with the limit.
    const auto variants = all_variants();
    std::optional<std::size_t> chosen;
    for (std::size_t vi = 0; vi < variants.size(); ++vi) {
        VariantRecord rec{variants[vi]};
        const bool inv = variants[vi].m1_inverse;
        const CMatrix rt = phi ? series_rho_t(*phi, m1k, a1, hb, variants[vi]) : limit_by_inverse.at(inv);
        rec.defects = relation_defects(m0k, rt);
        if (phi && limit_by_inverse.count(inv)) rec.distance_to_ode_limit = proj_distance(rt, limit_by_inverse.at(inv));
        const bool agrees = rec.distance_to_ode_limit < 0.0 || rec.distance_to_ode_limit < settings.agreement_tol;
        if (!chosen && rec.defects.ok() && agrees) chosen = vi;
        rep.variants.push_back(rec);
    }
    if (chosen) {
        rep.selected = variants[*chosen];
        rep.selection_note = "variant " + rep.selected.name() + " passes the relation check";
    } else {
        rep.selected = theorem;
        rep.selection_note = "no variant passes the relation check; keeping " + theorem.name();
    }

    const auto sel_index = std::size_t(std::find(variants.begin(), variants.end(), rep.selected) - variants.begin());
    rep.rho_t = phi ? series_rho_t(*phi, m1k, a1, hb, rep.selected) : limit_by_inverse.at(rep.selected.m1_inverse);
    rep.defects = rep.variants[sel_index].defects;
    if (method == Method::both) rep.method_distance = rep.variants[sel_index].distance_to_ode_limit;

    rep.rho_st = projective_normalize(rep.rho_st);
    rep.rho_t = projective_normalize(rep.rho_t);

    if (method == Method::both && settings.throw_on_disagreement && !(rep.method_distance < settings.agreement_tol)) {
        std::ostringstream os;
        os << "series and epsilon-limit results disagree: projective distance " << rep.method_distance
           << " (tolerance " << settings.agreement_tol << ")";
        throw AssemblyError(os.str(), rep);
    }
    return rep;
}

// Eigenvalues of rho(T) against those of M1^(k) exp(sign i pi hbar A) for the selected variant.
inline double spectral_invariant_defect(const RepResult& rep) {
    const PulledBackConnection conn(rep.level);
    const CMatrix m1k = to_complex(sym_power(generator_matrices().m1, rep.level));
    const CMatrix m = rep.selected.m1_inverse ? inverse(m1k) : m1k;
    const CMatrix ref = m * expm(cplx(0.0, rep.selected.sign * pi * conn.hbar_value()) * conn.residue(5));
    // rho_t is stored projectively normalized, so compare after matching determinants.
    const cplx det_ref = ref.determinant();
    const cplx det_rho = rep.rho_t.determinant();
    const double n = double(ref.rows());
    // Choose the n-th root of det_ref/det_rho that best matches the spectra.
    double best = std::numeric_limits<double>::infinity();
    const auto ev_ref = eigenvalues(ref);
    const auto ev_rho = eigenvalues(rep.rho_t);
    const cplx base = std::pow(det_ref / det_rho, 1.0 / n);
    for (int j = 0; j < int(n); ++j) {
        const cplx c = base * std::polar(1.0, 2.0 * pi * j / n);
        std::vector<cplx> scaled = ev_rho;
        for (auto& x : scaled) x *= c;
        best = std::min(best, multiset_distance(scaled, ev_ref));
    }
    return best;
}

inline RelationDefects relation_check(const RepResult& rep) { return relation_defects(rep.rho_st, rep.rho_t); }

// Letters: 'S', 'T' and their inverses 's', 't'.
struct GroupWord {
    std::vector<char> letters;

    static char inverse_of(char c) { return std::isupper(static_cast<unsigned char>(c)) ? char(std::tolower(c)) : char(std::toupper(c)); }

    void reduce() {
        std::vector<char> out;
        for (char c : letters) {
            if (!out.empty() && out.back() == inverse_of(c)) out.pop_back();
            else out.push_back(c);
        }
        letters = std::move(out);
    }

    std::string to_string() const { return std::string(letters.begin(), letters.end()); }
    bool empty() const { return letters.empty(); }
};

namespace detail {

struct WordParser {
    const std::string& text;
    std::size_t pos = 0;

    void skip() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    std::vector<char> sequence(int depth) {
        std::vector<char> out;
        while (true) {
            skip();
            if (pos >= text.size() || text[pos] == ')') break;
            std::vector<char> item;
            const char c = text[pos];
            if (c == 'S' || c == 'T' || c == 's' || c == 't') {
                item.push_back(c);
                ++pos;
            } else if (c == '(') {
                ++pos;
                item = sequence(depth + 1);
                skip();
                if (pos >= text.size() || text[pos] != ')') throw ParseError("unbalanced parenthesis in word");
                ++pos;
            } else {
                throw ParseError(std::string("unexpected character '") + c + "' in word");
            }
            skip();
            if (pos < text.size() && text[pos] == '^') {
                ++pos;
                skip();
                bool neg = false;
                if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) neg = text[pos++] == '-';
                const std::size_t start = pos;
                while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
                if (start == pos) throw ParseError("missing exponent after '^'");
                const int e = std::stoi(text.substr(start, pos - start));
                if (e > 10000) throw ParseError("exponent too large");
                std::vector<char> base = item;
                if (neg) {
                    std::reverse(base.begin(), base.end());
                    for (char& ch : base) ch = GroupWord::inverse_of(ch);
                }
                item.clear();
                for (int r = 0; r < e; ++r) item.insert(item.end(), base.begin(), base.end());
            }
            out.insert(out.end(), item.begin(), item.end());
        }
        if (depth == 0 && pos < text.size()) throw ParseError("unbalanced parenthesis in word");
        return out;
    }
};

} // namespace detail

inline GroupWord parse_word(const std::string& text) {
    detail::WordParser p{text};
    GroupWord w{p.sequence(0)};
    w.reduce();
    return w;
}

struct WordInvariants {
    std::string word;
    CMatrix matrix;             // projectively normalized product
    double normalized_trace = 0.0; // |tr M| / |det M|^{1/n}
    double spectral_ratio = 1.0;   // max |lambda| / min |lambda|
    std::vector<double> eigen_arguments; // arguments of lambda / det^{1/n}, sorted
    bool proportional_to_identity = false;
};

inline WordInvariants word_invariants(const std::string& label, const CMatrix& m) {
    WordInvariants inv;
    inv.word = label;
    inv.matrix = projective_normalize(m);
    const double n = double(m.rows());
    const cplx det = m.determinant();
    const cplx root = std::pow(det, 1.0 / n);
    inv.normalized_trace = std::abs(m.trace()) / std::abs(root);
    const auto ev = eigenvalues(m);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& x : ev) {
        lo = std::min(lo, std::abs(x));
        hi = std::max(hi, std::abs(x));
        inv.eigen_arguments.push_back(std::arg(x / root));
    }
    std::sort(inv.eigen_arguments.begin(), inv.eigen_arguments.end());
    inv.spectral_ratio = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    inv.proportional_to_identity = proj_distance(m, identity(m.rows())) < 1e-8;
    return inv;
}

inline CMatrix word_matrix(const GroupWord& word, const CMatrix& rho_st, const CMatrix& rho_t) {
    const CMatrix t_inv = inverse(rho_t);
    const CMatrix s = rho_st * t_inv;
    const CMatrix s_inv = inverse(s);
    CMatrix acc = identity(rho_st.rows());
    for (char c : word.letters) {
        switch (c) {
        case 'S': acc = (acc * s).eval(); break;
        case 's': acc = (acc * s_inv).eval(); break;
        case 'T': acc = (acc * rho_t).eval(); break;
        case 't': acc = (acc * t_inv).eval(); break;
        default: throw ParseError("bad letter");
        }
    }
    return acc;
}

inline WordInvariants evaluate_word(const GroupWord& word, const RepResult& rep) {
    return word_invariants(word.to_string(), word_matrix(word, rep.rho_st, rep.rho_t));
}

// Level one in exact integers: rho(T) = M1, rho(S) = M0 M1^-1.
struct ExactWordValue {
    IntMatrix matrix;
    Int trace;
    Int det;
};

inline ExactWordValue evaluate_word_level_one(const GroupWord& word) {
    const auto g = generator_matrices();
    const IntMatrix t_inv = integer_inverse(g.m1);
    const IntMatrix s = g.m0 * t_inv;
    const IntMatrix s_inv = integer_inverse(s);
    IntMatrix acc = IntMatrix::identity(4);
    for (char c : word.letters) {
        switch (c) {
        case 'S': acc = acc * s; break;
        case 's': acc = acc * s_inv; break;
        case 'T': acc = acc * g.m1; break;
        case 't': acc = acc * t_inv; break;
        default: throw ParseError("bad letter");
        }
    }
    return {acc, acc.trace(), determinant(acc)};
}

struct ResiduePermutation {
    std::array<int, 5> image{};        // best matching residue index for each i
    std::array<double, 5> distance{};  // ||M A_i M^-1 - A_j|| / ||A_i||
    bool found = false;
};

inline ResiduePermutation residue_permutation(int k, const CMatrix& m) {
    const PulledBackConnection conn(k);
    const CMatrix mi = inverse(m);
    ResiduePermutation out;
    out.found = true;
    for (int i = 1; i <= 5; ++i) {
        const CMatrix& a = conn.residue(i);
        const double na = a.norm();
        const CMatrix conj = m * a * mi;
        out.distance[i - 1] = std::numeric_limits<double>::infinity();
        for (int j = 1; j <= 5; ++j) {
            const double d = na == 0.0 ? (conj - conn.residue(j)).norm() : (conj - conn.residue(j)).norm() / na;
            if (d < out.distance[i - 1]) {
                out.distance[i - 1] = d;
                out.image[i - 1] = j;
            }
        }
        if (!(out.distance[i - 1] < 1e-10)) out.found = false;
    }
    return out;
}

} // namespace veech
