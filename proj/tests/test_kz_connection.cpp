#include <catch_amalgamated.hpp>

#include <veech/kz_connection.hpp>

#include <boost/math/special_functions/binomial.hpp>

using namespace veech;

TEST_CASE("hbar values") {
    CHECK(hbar(1).value == Rational(-1, 48));
    CHECK(hbar(2).value == Rational(-1, 64));
    for (int k = 1; k <= 10; ++k) {
        CHECK(hbar(k).value < 0);
        CHECK(hbar(k).value == Rational(-1, 16 * k + 32));
    }
    CHECK_THROWS_AS(hbar(0), InvalidLevel);
}

TEST_CASE("Verlinde dimensions") {
    CHECK(verlinde_dim(2, 1) == 4);
    CHECK(verlinde_dim(2, 2) == 10);
    CHECK(verlinde_dim(2, 20) == 1771);
    for (int k = 1; k <= 20; ++k) {
        const auto v = verlinde_eval(2, k);
        CHECK(v.defect < 1e-6);
        CHECK(double(v.value) == boost::math::binomial_coefficient<double>(k + 3, 3));
    }
    CHECK(verlinde_dim(3, 1) == 8);
    CHECK_THROWS_AS(verlinde_dim(1, 2), InvalidArgument);
    CHECK_THROWS_AS(verlinde_dim(2, 0), InvalidLevel);
}

namespace {

Configuration sample_config() {
    return Configuration::finite({cplx(0.3, 0.1), cplx(-0.7, 0.4), cplx(1.1, -0.2), cplx(0.2, 0.9), cplx(-0.5, -0.8),
                                  cplx(1.4, 1.3)});
}

} // namespace

TEST_CASE("connection form evaluation") {
    const Tangent v{cplx(1, 0), cplx(0, 1), cplx(-1, 2), cplx(0.5, 0.5), cplx(2, -1), cplx(0.1, 0.3)};
    const Tangent zero{};
    const Tangent same{cplx(1, 2), cplx(1, 2), cplx(1, 2), cplx(1, 2), cplx(1, 2), cplx(1, 2)};
    CHECK(omega_eval(2, sample_config(), zero).norm() == 0.0);
    CHECK(omega_eval(2, sample_config(), same).norm() == 0.0);
    CHECK(omega_eval(1, sample_config(), v).norm() == 0.0);
    CHECK(omega_eval(2, sample_config(), v).norm() > 0.0);

    // Direct summation oracle.
    const ConnectionForm form(2);
    const auto z = sample_config().finite_points();
    CMatrix expect = CMatrix::Zero(10, 10);
    for (int i = 1; i <= 6; ++i)
        for (int j = i + 1; j <= 6; ++j)
            expect += to_complex(omega_family(2)->hat(i, j)) * ((v[i - 1] - v[j - 1]) / (z[i - 1] - z[j - 1]));
    expect *= -1.0 / 64.0;
    CHECK((omega_eval(2, sample_config(), v) - expect).norm() < 1e-13);

    auto coincident = sample_config();
    coincident.points[3] = coincident.points[0];
    CHECK_THROWS_AS(omega_eval(2, coincident, v), PoleError);
    auto at_inf = sample_config();
    at_inf.points[2] = ExtendedPoint::infinity();
    CHECK_THROWS_AS(omega_eval(2, at_inf, v), OutOfChartError);
}

TEST_CASE("residue partition") {
    const auto parts = residue_partition();
    using P = std::pair<int, int>;
    CHECK(parts[0][0] == P{1, 5});
    CHECK(parts[0][1] == P{2, 4});
    CHECK(parts[1][0] == P{2, 5});
    CHECK(parts[1][1] == P{3, 4});
    CHECK(parts[2][0] == P{1, 2});
    CHECK(parts[2][1] == P{3, 5});
    CHECK(parts[3][0] == P{1, 3});
    CHECK(parts[3][1] == P{4, 5});
    CHECK(parts[4][0] == P{1, 4});
    CHECK(parts[4][1] == P{2, 3});

    for (int k = 1; k <= 3; ++k) {
        const auto rs = residues(k);
        const auto fam = omega_family(k);
        CHECK(rs.exact_at(3) == fam->hat(1, 2) + fam->hat(3, 5));
        IntMatrix lhs(fam->dim(), fam->dim()), rhs(fam->dim(), fam->dim());
        for (int i = 1; i <= 5; ++i) lhs += rs.exact_at(i);
        for (int a = 1; a <= 5; ++a)
            for (int b = a + 1; b <= 5; ++b) rhs += fam->hat(a, b);
        CHECK(lhs == rhs);
    }
    for (const auto& a : residues(1).exact) CHECK(a.is_zero());
}

TEST_CASE("numeric residues match the partition rule") {
    for (int k = 1; k <= 3; ++k) {
        const auto rs = residues(k);
        for (int i = 1; i <= 5; ++i) {
            const CMatrix num = pullback_residue_at(k, zeta_power(i));
            const CMatrix exact = rs.at(i);
            INFO("level " << k << " pole " << i);
            if (k == 1) CHECK(num.norm() < 1e-12);
            else CHECK((num - exact).norm() <= 1e-10 * exact.norm());
        }
    }
    CHECK_THROWS_AS(pullback_residue_at(2, cplx(0.5, 0.0)), InvalidPole);
    CHECK(ResidueSet::index_of_pole(cplx(1.0, 0.0)) == 5);
}

TEST_CASE("pulled-back form equals residues plus the measured scalar tail") {
    for (int k = 1; k <= 3; ++k) {
        const ConnectionForm form(k);
        const PulledBackConnection with_tail(k, true);
        for (cplx t : {cplx(0.3, 0.2), cplx(-0.4, 0.7), cplx(2.0, -1.0), cplx(0.0, 0.0)}) {
            const CMatrix direct = pulled_back_form(form, t);
            const double scale = std::max(direct.norm(), 1e-12);
            CHECK((direct - with_tail(t)).norm() <= 1e-12 * scale);
        }
        CHECK(with_tail.ward_fixed_scalar() == -double(k * (k - 1)));
    }
}

TEST_CASE("PSL(2,C) invariance") {
    for (int k = 1; k <= 3; ++k) {
        const auto rep = psl2_invariance_check(k, sample_configurations(4));
        for (const auto& c : rep.checks) {
            INFO("level " << k << " " << c.kind << " diff " << c.difference << " defect " << c.identity_defect);
            CHECK(c.ok);
        }
        CHECK(rep.ok());
    }
    // The inversion defect is a nonzero scalar once k >= 2.
    const auto rep = psl2_invariance_check(2, sample_configurations(1));
    CHECK(std::abs(rep.checks[2].measured_scalar) > 1e-6);
    CHECK(rep.checks[2].identity_defect < 1e-10);
}

TEST_CASE("small configuration-space loops are trivial") {
    const auto samples = sample_configurations(2, 11);
    for (const auto& [config, v] : samples) {
        Tangent u2{};
        for (int i = 0; i < 6; ++i) u2[i] = cplx(0.0, 1.0) * v[5 - i];
        const auto r = config_loop_flatness(2, config, v, u2, 0.03);
        INFO("defect " << r.loop_defect);
        CHECK(r.ok);
    }
}
