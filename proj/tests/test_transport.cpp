#include <catch_amalgamated.hpp>

#include <veech/transport.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <functional>

using namespace veech;

namespace {

// Nested Gauss-Kronrod quadrature along the real segment, an independent oracle for short words.
cplx nested_oracle(const std::vector<int>& letters, double x) {
    using boost::math::quadrature::gauss_kronrod;
    std::function<cplx(double, std::size_t)> inner = [&](double s, std::size_t depth) -> cplx {
        if (depth == 0) return 1.0;
        const int a = letters[depth - 1];
        auto f = [&](double u) { return inner(u, depth - 1) / (u - zeta_power(a)); };
        return gauss_kronrod<double, 61>::integrate(f, 0.0, s, depth == letters.size() ? 10 : 0, 1e-14);
    };
    return inner(x, letters.size());
}

std::vector<std::vector<int>> all_words(int len) {
    std::vector<std::vector<int>> out{{}};
    for (int l = 0; l < len; ++l) {
        std::vector<std::vector<int>> next;
        for (const auto& w : out)
            for (int a = 1; a <= 5; ++a) {
                auto v = w;
                v.push_back(a);
                next.push_back(v);
            }
        out = std::move(next);
    }
    return out;
}

// Shuffle product of two words as a multiset of words.
void shuffles(const std::vector<int>& u, const std::vector<int>& v, std::vector<int>& prefix,
              std::vector<std::vector<int>>& out, std::size_t i = 0, std::size_t j = 0) {
    if (i == u.size() && j == v.size()) {
        out.push_back(prefix);
        return;
    }
    if (i < u.size()) {
        prefix.push_back(u[i]);
        shuffles(u, v, prefix, out, i + 1, j);
        prefix.pop_back();
    }
    if (j < v.size()) {
        prefix.push_back(v[j]);
        shuffles(u, v, prefix, out, i, j + 1);
        prefix.pop_back();
    }
}

} // namespace

TEST_CASE("single-letter hyperlogarithms") {
    for (double x : {0.1, 0.5, 0.9, 0.999}) CHECK(std::abs(hyperlog(Word({5}), x) - std::log(1.0 - x)) < 1e-13);
    for (int a = 1; a <= 4; ++a) {
        const cplx closed = std::log((zeta_power(a) - 1.0) / zeta_power(a));
        CHECK(std::abs(hyperlog(Word({a}), 1.0) - closed) < 1e-13);
        const cplx half = std::log(1.0 - 0.5 / zeta_power(a));
        CHECK(std::abs(hyperlog(Word({a}), 0.5) - half) < 1e-13);
    }
    CHECK_THROWS_AS(Word({}), ContractViolation);
    CHECK_THROWS_AS(Word({6}), InvalidIndex);
    CHECK_THROWS_AS(hyperlog(Word({1, 5}), 1.0), DivergenceError);
    CHECK_FALSE(Word({2, 5}).admissible_at_one());
    CHECK(Word({5, 2}).admissible_at_one());
}

TEST_CASE("hyperlogarithms against nested quadrature") {
    for (const auto& w : std::vector<std::vector<int>>{{1, 2}, {5, 3}, {2, 5, 1}, {4, 4}, {3, 1, 2}})
        for (double x : {0.3, 0.8}) {
            INFO("word size " << w.size() << " x " << x);
            CHECK(std::abs(hyperlog(Word(w), x) - nested_oracle(w, x)) < 1e-10);
        }
    for (int a = 1; a <= 5; ++a) {
        const cplx l1 = hyperlog(Word({a}), 0.7);
        CHECK(std::abs(hyperlog(Word({a, a}), 0.7) - l1 * l1 / 2.0) < 1e-13);
    }
}

TEST_CASE("letters at the endpoint converge when inner") {
    // L(5, 2 | 1) = int_0^1 log(1 - s) / (s - zeta^2) ds
    boost::math::quadrature::tanh_sinh<double> ts;
    auto re = [](double s, double xc) { return (std::log(xc > 0 ? xc : 1.0 - s) / (s - zeta_power(2))).real(); };
    auto im = [](double s, double xc) { return (std::log(xc > 0 ? xc : 1.0 - s) / (s - zeta_power(2))).imag(); };
    const cplx oracle{ts.integrate(re, 0.0, 1.0), ts.integrate(im, 0.0, 1.0)};
    CHECK(std::abs(hyperlog(Word({5, 2}), 1.0) - oracle) < 1e-11);
}

TEST_CASE("shuffle identities up to total length five") {
    const double x = 0.6;
    const HyperlogEngine<double> eng(cplx(x, 0.0), 32);
    std::map<std::vector<int>, cplx> memo;
    auto L = [&](const std::vector<int>& w) {
        auto it = memo.find(w);
        if (it != memo.end()) return it->second;
        return memo[w] = eng.evaluate(Word(w));
    };
    double worst = 0.0;
    for (int lu = 1; lu <= 4; ++lu)
        for (int lv = 1; lu + lv <= 5; ++lv) {
            if (lv < lu) continue;
            const auto us = all_words(lu);
            const auto vs = all_words(lv);
            for (std::size_t a = 0; a < us.size(); ++a)
                for (std::size_t b = 0; b < vs.size(); ++b) {
                    std::vector<std::vector<int>> sh;
                    std::vector<int> prefix;
                    shuffles(us[a], vs[b], prefix, sh);
                    cplx sum = 0.0;
                    for (const auto& w : sh) sum += L(w);
                    worst = std::max(worst, std::abs(L(us[a]) * L(vs[b]) - sum));
                }
        }
    INFO("worst shuffle defect " << worst);
    CHECK(worst < 1e-9);
}

TEST_CASE("extended precision hyperlog agrees with binary64") {
    const auto mp = hyperlog_extended(Word({2, 5, 1}), 0.5, 50, 64);
    CHECK(std::abs(mp.value - hyperlog(Word({2, 5, 1}), 0.5)) < 1e-13);
    const auto mp1 = hyperlog_extended(Word({5}), 0.5, 50, 64);
    CHECK(mp1.real_text.substr(0, 20) == "-0.69314718055994530");
}

TEST_CASE("ODE transport basics") {
    CHECK((ode_transport(2, PathSpec({line(0.3, 0.3)})).value - identity(10)).norm() == 0.0);
    CHECK((ode_transport(1, real_segment(0.0, 0.9)).value - identity(4)).norm() == 0.0);

    const PathSpec loop({arc(cplx(0.0, 0.0), 0.5, 0.0, 2 * pi)});
    CHECK((ode_transport(2, loop).value - identity(10)).norm() < 1e-8);

    const PathSpec p1({line(0.0, cplx(0.3, 0.2))});
    const PathSpec p2({line(cplx(0.3, 0.2), cplx(0.6, -0.1))});
    const CMatrix whole = ode_transport(2, p1.then(p2)).value;
    CHECK((whole - ode_transport(2, p2).value * ode_transport(2, p1).value).norm() < 1e-9);
    CHECK((ode_transport(2, p1.then(p2).reversed()).value * whole - identity(10)).norm() < 1e-9);
    CHECK((ode_transport(2, p1.then(p2).split(3)).value - whole).norm() < 1e-9);

    CHECK_THROWS_AS(ode_transport(2, real_segment(0.0, 0.9999)), PathError);
    CHECK_NOTHROW(ode_transport(2, real_segment(0.0, 0.9999, true)));
    CHECK_THROWS_AS(ode_transport(2, PathSpec({line(0.0, 0.3), line(0.4, 0.5)})), PathError);
}

TEST_CASE("stiffness is reported") {
    auto f = [](double t, const CMatrix& y) -> CMatrix { return y / std::pow(1.0 - t, 3.0); };
    OdeOptions o{1e-12, 1e-300, 200};
    CHECK_THROWS_AS(integrate_dopri5(f, 0.0, 1.0, identity(2), o), StiffnessError);
}

TEST_CASE("Chen series matches ODE transport") {
    const PulledBackConnection conn(2);
    CHECK((chen_series(conn, 0.5, 0).value - identity(10)).norm() == 0.0);
    CHECK((chen_series(1, 0.5, 8).value - identity(4)).norm() == 0.0);
    for (double x : {0.25, 0.5, 0.9}) {
        const auto cs = chen_series(conn, x, 8);
        const auto od = ode_transport(conn, real_segment(0.0, x));
        INFO("x = " << x);
        CHECK((cs.value - od.value).norm() < 1e-7);
        CHECK(cs.words == 488280);
    }
    CHECK_THROWS_AS(chen_series(conn, 1.0, 3), InvalidArgument);
}

TEST_CASE("Chen series with threads is deterministic") {
    const PulledBackConnection conn(2);
    TransportSettings one, many;
    many.threads = 3;
    const auto a = chen_series(conn, 0.5, 5, one);
    const auto b = chen_series(conn, 0.5, 5, many);
    CHECK((a.value - b.value).norm() == 0.0);
}

TEST_CASE("regularized series") {
    CHECK((phi_regularized(1, 8).value - identity(4)).norm() == 0.0);
    const PulledBackConnection conn(2);
    CMatrix expect = identity(10);
    for (int i = 1; i <= 4; ++i)
        expect += conn.hbar_value() * std::log((zeta_power(i) - 1.0) / zeta_power(i)) * conn.residue(i);
    CHECK((phi_regularized(conn, 1).value - expect).norm() < 1e-13);

    const auto p6 = phi_regularized(conn, 6);
    const auto p8 = phi_regularized(conn, 8);
    INFO("distance " << proj_distance(p6.value, p8.value) << " bound " << p6.tail_bound);
    CHECK(proj_distance(p6.value, p8.value) < p6.tail_bound);
    CHECK(p8.tail_bound < p6.tail_bound);
}
