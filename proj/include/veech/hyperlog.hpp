#pragma once

#include "errors.hpp"
#include "numeric.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

namespace veech {

template <class Real>
struct ComplexOf {
    using type = std::complex<Real>;
};
template <>
struct ComplexOf<boost::multiprecision::cpp_bin_float_50> {
    using type = boost::multiprecision::cpp_complex_50;
};
template <>
struct ComplexOf<boost::multiprecision::cpp_bin_float_100> {
    using type = boost::multiprecision::cpp_complex_100;
};

// Letters are exponents 1..5 of zeta; letters[0] is the innermost integration.
struct Word {
    std::vector<int> letters;

    explicit Word(std::vector<int> l) : letters(std::move(l)) {
        if (letters.empty()) throw ContractViolation("a hyperlogarithm word needs at least one letter");
        for (int a : letters)
            if (a < 1 || a > 5) throw InvalidIndex("word letters must lie in 1..5, got " + std::to_string(a));
    }

    std::size_t size() const { return letters.size(); }
    int outermost() const { return letters.back(); }
    bool admissible_at_one() const { return outermost() != 5; }
};

// Gauss-Legendre rule on [-1,1] with the spectral cumulative-integration matrix of the node interpolant.
template <class Real>
struct PanelRule {
    int n;
    std::vector<Real> x, w, cumulative; // cumulative is n*n row-major

    explicit PanelRule(int nodes) : n(nodes), x(nodes), w(nodes), cumulative(std::size_t(nodes) * nodes) {
        if (nodes < 2) throw InvalidArgument("need at least two quadrature nodes per panel");
        const Real pi_r = boost::math::constants::pi<Real>();
        const Real tol = std::numeric_limits<Real>::epsilon() * 8;
        for (int i = 0; i < n; ++i) {
            using std::cos;
            using std::abs;
            Real t = cos(pi_r * (Real(i) + Real(0.75)) / (Real(n) + Real(0.5)));
            for (int it = 0; it < 100; ++it) {
                auto [p, dp] = legendre_with_derivative(t);
                const Real dt = p / dp;
                t -= dt;
                if (abs(dt) < tol) break;
            }
            auto [p, dp] = legendre_with_derivative(t);
            x[i] = t;
            w[i] = Real(2) / ((Real(1) - t * t) * dp * dp);
        }
        std::vector<Real> px(n + 1), pj(n + 1);
        for (int i = 0; i < n; ++i) {
            legendre_all(x[i], px);
            for (int j = 0; j < n; ++j) {
                legendre_all(x[j], pj);
                Real acc = (x[i] + Real(1)) / Real(2);
                for (int m = 1; m < n; ++m) acc += pj[m] * (px[m + 1] - px[m - 1]) / Real(2);
                cumulative[std::size_t(i) * n + j] = w[j] * acc;
            }
        }
    }

private:
    std::pair<Real, Real> legendre_with_derivative(const Real& t) const {
        Real p0 = 1, p1 = t;
        for (int m = 2; m <= n; ++m) {
            Real p2 = ((2 * m - 1) * t * p1 - (m - 1) * p0) / m;
            p0 = p1;
            p1 = p2;
        }
        const Real dp = n * (t * p1 - p0) / (t * t - Real(1));
        return {p1, dp};
    }

    void legendre_all(const Real& t, std::vector<Real>& out) const {
        out[0] = 1;
        if (out.size() > 1) out[1] = t;
        for (std::size_t m = 2; m < out.size(); ++m)
            out[m] = ((2 * Real(m) - 1) * t * out[m - 1] - (Real(m) - 1) * out[m - 2]) / Real(m);
    }
};

// Iterated integrals along the straight segment [0, upper] for all words over the five letters,
// sharing one node table per prefix.
template <class Real>
class HyperlogEngine {
public:
    using Complex = typename ComplexOf<Real>::type;

    HyperlogEngine(const Complex& upper, int nodes_per_panel, double endpoint_floor = 1e-16, double grading = 0.25)
        : rule_(nodes_per_panel), upper_(upper) {
        using std::abs;
        const Real pi_r = boost::math::constants::pi<Real>();
        for (int a = 1; a <= 5; ++a) {
            using std::cos;
            using std::sin;
            const Real th = 2 * pi_r * Real(a % 5) / 5;
            poles_[a - 1] = a == 5 ? Complex(Real(1), Real(0)) : Complex(cos(th), sin(th));
        }
        const Real len = abs(upper_);
        if (len == 0) throw PathError("hyperlogarithm upper limit must be nonzero");
        for (int a = 1; a <= 5; ++a) {
            if (abs(upper_ - poles_[a - 1]) < Real(1e-14)) {
                singular_letter_ = a;
                continue;
            }
            if (segment_distance(Real(0), Real(1), poles_[a - 1]) < Real(1e-14))
                throw PathError("integration segment passes through a pole");
        }

        // Panels carry both ends and their distances to u = 1, so nodes near a singular endpoint stay resolved.
        if (singular_letter_) {
            Real gap = 1;
            Real lo = 0;
            while (gap * len > Real(endpoint_floor)) {
                const Real next_gap = gap * Real(grading);
                refine(lo, Real(1) - next_gap, gap, next_gap, 0);
                lo = Real(1) - next_gap;
                gap = next_gap;
            }
            panels_.push_back({lo, Real(1), gap, Real(0)});
        } else {
            refine(Real(0), Real(1), Real(1), Real(0), 0);
        }

        const int n = rule_.n;
        const std::size_t total = panels_.size() * std::size_t(n);
        for (int a = 0; a < 5; ++a) kernel_[a].resize(total);
        for (std::size_t p = 0; p < panels_.size(); ++p) {
            const auto& pn = panels_[p];
            const Real half = (pn.hi - pn.lo) / 2;
            const Real rhalf = (pn.rlo - pn.rhi) / 2;
            for (int i = 0; i < n; ++i) {
                const Real u = pn.lo + half * (Real(1) + rule_.x[i]);
                const Real one_minus_u = pn.rlo - rhalf * (Real(1) + rule_.x[i]);
                const Complex s = upper_ * u;
                for (int a = 0; a < 5; ++a) {
                    const Complex diff = (a + 1 == singular_letter_) ? (upper_ - poles_[a]) - upper_ * one_minus_u
                                                                    : s - poles_[a];
                    kernel_[a][p * n + i] = upper_ * rhalf / diff;
                }
            }
        }
    }

    std::size_t panel_count() const { return panels_.size(); }
    std::size_t node_count() const { return panels_.size() * std::size_t(rule_.n); }
    int singular_letter() const { return singular_letter_; }
    const Complex& upper() const { return upper_; }

    std::vector<Complex> unit() const { return std::vector<Complex>(node_count(), Complex(Real(1), Real(0))); }

    // child(s) = int_0^s parent(u) du / (u - zeta^letter), tabulated at every node.
    void extend(const std::vector<Complex>& parent, int letter, std::vector<Complex>& child) const {
        const int n = rule_.n;
        const auto& ker = kernel_[letter - 1];
        child.resize(parent.size());
        Complex offset(Real(0), Real(0));
        Complex g[kMaxNodes];
        std::vector<Complex> gdyn;
        Complex* gp = g;
        if (n > kMaxNodes) {
            gdyn.resize(n);
            gp = gdyn.data();
        }
        for (std::size_t p = 0; p < panels_.size(); ++p) {
            const std::size_t base = p * n;
            Complex tot(Real(0), Real(0));
            for (int j = 0; j < n; ++j) {
                gp[j] = parent[base + j] * ker[base + j];
                tot += gp[j] * rule_.w[j];
            }
            for (int i = 0; i < n; ++i) {
                const Real* row = &rule_.cumulative[std::size_t(i) * n];
                Complex acc = offset;
                for (int j = 0; j < n; ++j) acc += gp[j] * row[j];
                child[base + i] = acc;
            }
            offset += tot;
        }
    }

    // int_0^upper parent(u) du / (u - zeta^letter)
    Complex total(const std::vector<Complex>& parent, int letter) const {
        if (letter == singular_letter_)
            throw DivergenceError("iterated integral diverges: outermost letter sits at the upper limit");
        const int n = rule_.n;
        const auto& ker = kernel_[letter - 1];
        Complex acc(Real(0), Real(0));
        for (std::size_t p = 0; p < panels_.size(); ++p) {
            const std::size_t base = p * n;
            for (int j = 0; j < n; ++j) acc += parent[base + j] * ker[base + j] * rule_.w[j];
        }
        return acc;
    }

    Complex evaluate(const Word& word) const {
        if (word.outermost() == singular_letter_)
            throw DivergenceError("iterated integral diverges: outermost letter sits at the upper limit");
        std::vector<Complex> cur = unit(), next;
        for (std::size_t i = 0; i + 1 < word.size(); ++i) {
            extend(cur, word.letters[i], next);
            std::swap(cur, next);
        }
        return total(cur, word.outermost());
    }

private:
    static constexpr int kMaxNodes = 64;

    Real segment_distance(const Real& a, const Real& b, const Complex& p) const {
        using std::abs;
        using std::real;
        using std::conj;
        const Complex from = upper_ * a;
        const Complex d = upper_ * (b - a);
        const Real len2 = real(d * conj(d));
        Real s = real((p - from) * conj(d)) / len2;
        if (s < 0) s = 0;
        if (s > 1) s = 1;
        return abs(p - (from + d * s));
    }

    void refine(const Real& a, const Real& b, const Real& ra, const Real& rb, int depth) {
        using std::abs;
        Real d = std::numeric_limits<Real>::max();
        for (int l = 1; l <= 5; ++l) {
            if (l == singular_letter_) {
                const Real gap = rb * abs(upper_);
                if (gap < d) d = gap;
                continue;
            }
            const Real dl = segment_distance(a, b, poles_[l - 1]);
            if (dl < d) d = dl;
        }
        const Real len = (ra - rb) * abs(upper_);
        if (depth >= 200 || len <= 2 * d) {
            panels_.push_back({a, b, ra, rb});
            return;
        }
        const Real m = (a + b) / 2;
        const Real rm = (ra + rb) / 2;
        refine(a, m, ra, rm, depth + 1);
        refine(m, b, rm, rb, depth + 1);
    }

    struct Panel {
        Real lo, hi, rlo, rhi; // rlo = 1 - lo, rhi = 1 - hi
    };

    PanelRule<Real> rule_;
    Complex upper_;
    std::array<Complex, 5> poles_{};
    int singular_letter_ = 0;
    std::vector<Panel> panels_;
    std::array<std::vector<Complex>, 5> kernel_;
};

inline cplx hyperlog(const Word& word, cplx upper, int nodes_per_panel = 32) {
    return HyperlogEngine<double>(upper, nodes_per_panel).evaluate(word);
}

// Extended precision evaluation; `digits` selects 50 or 100 decimal digits. Returns the value rounded to double
// together with its decimal string.
struct HyperlogMp {
    cplx value;
    std::string real_text;
    std::string imag_text;
};

template <class Real>
HyperlogMp hyperlog_mp(const Word& word, cplx upper, int nodes_per_panel, double floor) {
    using Complex = typename ComplexOf<Real>::type;
    const HyperlogEngine<Real> eng(Complex(Real(upper.real()), Real(upper.imag())), nodes_per_panel, floor);
    const Complex v = eng.evaluate(word);
    const Real re = v.real(), im = v.imag();
    return {cplx(re.template convert_to<double>(), im.template convert_to<double>()),
            re.str(std::numeric_limits<Real>::digits10), im.str(std::numeric_limits<Real>::digits10)};
}

inline HyperlogMp hyperlog_extended(const Word& word, cplx upper, int digits, int nodes_per_panel = 32) {
    if (digits <= 50)
        return hyperlog_mp<boost::multiprecision::cpp_bin_float_50>(word, upper, nodes_per_panel, 1e-45);
    if (digits <= 100)
        return hyperlog_mp<boost::multiprecision::cpp_bin_float_100>(word, upper, nodes_per_panel, 1e-90);
    throw InvalidArgument("extended precision supports at most 100 digits");
}

} // namespace veech
