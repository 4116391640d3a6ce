#include <catch_amalgamated.hpp>

#include <veech/local_frobenius.hpp>

using namespace veech;

TEST_CASE("local series coefficients") {
    const PulledBackConnection conn(2);
    const auto s = q_series(conn, 5, 12);
    CHECK((s.q[0] - identity(10)).norm() == 0.0);
    CHECK(s.order() == 12);
    CHECK(s.radius == Catch::Approx(std::abs(zeta_power(5) - zeta_power(1))).epsilon(1e-14));
    CHECK(detail::ad_spectral_bound(conn.hbar_value(), conn.residue(5)) < 1.0);

    const auto s1 = q_series(1, 3, 6);
    for (int r = 1; r <= 6; ++r) CHECK(s1.q[r].norm() == 0.0);

    CHECK_THROWS_AS(q_series(conn, 0, 4), InvalidPole);
    CHECK_THROWS_AS(q_series(conn, 6, 4), InvalidPole);
}

TEST_CASE("local series solves the recursion") {
    const PulledBackConnection conn(2);
    for (int pole : {5, 2}) {
        const auto s = q_series(conn, pole, 12);
        for (int m = 0; m < 6; ++m) {
            const cplx b = std::polar(1e-2, 0.4 + m);
            CHECK(frobenius_residual(s, conn, b).norm() < 1e-10);
        }
    }
    for (double r : {1e-3, 1e-2}) {
        const auto s = adaptive_q_series(conn, 5, r, 1e-14);
        for (int m = 0; m < 8; ++m) CHECK(frobenius_residual(s, conn, std::polar(r, 0.1 + 0.7 * m)).norm() < 1e-13);
    }
}

TEST_CASE("truncations share their coefficients") {
    const PulledBackConnection conn(3);
    const auto a = q_series(conn, 5, 10);
    const auto b = q_series(conn, 5, 16);
    for (int r = 0; r <= 10; ++r) CHECK((a.q[r] - b.q[r]).norm() <= 1e-13 * std::max(1.0, b.q[r].norm()));
}

TEST_CASE("branch conventions") {
    const PulledBackConnection conn(2);
    const CMatrix& a = conn.residue(5);
    const CMatrix e = conn.hbar_value() * a;
    CHECK((matrix_branch_power(1.0, e, BranchSpec::principal()) - identity(10)).norm() < 1e-15);
    CHECK((matrix_branch_power(cplx(0.3, 0.4), CMatrix::Zero(10, 10)) - identity(10)).norm() == 0.0);
    CHECK_THROWS_AS(matrix_branch_power(1.0, e), BranchError);
    CHECK_THROWS_AS(matrix_branch_power(cplx(-2.0, 0.0), e, BranchSpec::principal()), BranchError);
    CHECK_THROWS_AS(matrix_branch_power(0.0, e), SingularError);

    const double eps = 1e-3;
    const CMatrix up = matrix_branch_power(cplx(0.0, eps), e);
    const CMatrix down = matrix_branch_power(cplx(0.0, -eps), e);
    CHECK((down * inverse(up) - expm(cplx(0.0, pi) * e)).norm() < 1e-12);
}

TEST_CASE("semicircle transport agrees with the ODE") {
    const PulledBackConnection conn(2);
    for (int pole : {5, 3}) {
        const auto s = adaptive_q_series(conn, pole, 1e-2, 1e-14);
        for (int orientation : {+1, -1}) {
            const CMatrix local = semicircle_transport(s, 1e-2, orientation);
            const CMatrix ode = ode_transport(conn, semicircle_path(pole, 1e-2, orientation)).value;
            INFO("pole " << pole << " orientation " << orientation);
            CHECK((local - ode).norm() < 1e-7);
        }
        const CMatrix local_pi = semicircle_transport(s, 1e-2, +1, pi);
        const CMatrix ode_pi = ode_transport(conn, semicircle_path(pole, 1e-2, +1, pi)).value;
        CHECK((local_pi - ode_pi).norm() < 1e-7);
    }
    const auto sign = semicircle_sign_check(conn, 5, 1e-2);
    CHECK(sign.preferred_sign == +1);
    CHECK(sign.distance_plus < 1e-7);
}

TEST_CASE("small loops realize the local monodromy") {
    const PulledBackConnection conn(2);
    const auto s = adaptive_q_series(conn, 5, 1e-2, 1e-14);
    const CMatrix local = loop_transport(s, std::polar(1e-2, 0.3));
    const CMatrix ode = ode_transport(conn, loop_path(5, 1e-2, 0.3)).value;
    CHECK((local - ode).norm() < 1e-6);

    auto lam = eigenvalues(conn.residue(5));
    std::vector<cplx> expected;
    for (const auto& l : lam) expected.push_back(std::exp(cplx(0.0, 2.0 * pi * conn.hbar_value()) * l));
    CHECK(multiset_distance(eigenvalues(ode), expected) < 1e-8);
}

TEST_CASE("local radius is enforced") {
    const PulledBackConnection conn(2);
    const auto s = q_series(conn, 5, 8);
    CHECK_THROWS_AS(semicircle_transport(s, 0.7), SeriesRadiusError);
    CHECK_THROWS_AS(semicircle_transport(s, 0.0), SeriesRadiusError);
    CHECK_THROWS_AS(adaptive_q_series(conn, 5, 0.7, 1e-12), SeriesRadiusError);
    CHECK_THROWS_AS(semicircle_transport(s, 1e-2, 0), InvalidArgument);
}
