#include <catch_amalgamated.hpp>

#include <veech/monodromy_rep.hpp>

using namespace veech;

TEST_CASE("generator matrices") {
    const auto r = generator_report();
    CHECK(r.det_m0 == 1);
    CHECK(r.det_m1 == 1);
    CHECK(r.m0_symplectic);
    CHECK_FALSE(r.m1_symplectic);
    REQUIRE(r.m0_order);
    CHECK(r.m0_order->order == 5);
    REQUIRE(r.m1_order);
    CHECK(r.m1_order->order == 2);
    REQUIRE(r.m0_m1inv_order);
    CHECK(r.m0_m1inv_order->order == 2);

    const auto g = generator_matrices();
    CHECK(power(g.m0, 5) == IntMatrix::identity(4));
    CHECK(power(g.m1, 2) == IntMatrix::identity(4));
}

TEST_CASE("symmetric powers") {
    const auto g = generator_matrices();
    CHECK(sym_power(IntMatrix::identity(4), 3) == IntMatrix::identity(20));
    CHECK(sym_power(g.m0, 1) == g.m0);
    for (int k = 1; k <= 3; ++k) {
        CHECK(sym_power(g.m0 * g.m1, k) == sym_power(g.m0, k) * sym_power(g.m1, k));
        CHECK(determinant(sym_power(g.m0, k)) == 1);
    }
    // tr Sym^2 M = (tr(M)^2 + tr(M^2)) / 2
    const Int t = g.m0.trace();
    CHECK(sym_power(g.m0, 2).trace() * 2 == t * t + (g.m0 * g.m0).trace());

    const CMatrix c = to_complex(g.m1) * cplx(0.5, 0.25);
    CHECK((sym_power(c, 2) - to_complex(sym_power(g.m1, 2)) * std::pow(cplx(0.5, 0.25), 2)).norm() < 1e-14);
    CHECK_THROWS_AS(sym_power(IntMatrix::identity(3), 2), InvalidArgument);
}

TEST_CASE("projective distance") {
    const CMatrix a = to_complex(generator_matrices().m0);
    CHECK(proj_distance(a * cplx(0.0, 3.0), a) < 1e-15);
    CHECK(proj_distance(identity(4), a) > 0.1);
    CHECK_THROWS_AS(proj_distance(a, CMatrix::Zero(4, 4)), InvalidArgument);
    const CMatrix n = projective_normalize(a * cplx(-2.0, 1.0));
    CHECK(n.norm() == Catch::Approx(1.0).epsilon(1e-15));
    CHECK(proj_distance(n, a) < 1e-15);
}

TEST_CASE("level one representation is the integral one") {
    for (Method m : {Method::series, Method::ode_limit}) {
        const auto rep = assemble_rep(1, m);
        const auto g = generator_matrices();
        CHECK(proj_distance(rep.rho_t, to_complex(g.m1)) < 1e-12);
        CHECK(proj_distance(rep.rho_st, to_complex(g.m0)) < 1e-12);
        CHECK(rep.defects.d5 < 1e-12);
        CHECK(rep.defects.d2 < 1e-12);
    }
    const auto phi = phi_regularized(1, 8);
    CHECK((phi.value - identity(4)).norm() == 0.0);
}

TEST_CASE("method names") {
    CHECK(parse_method("series") == Method::series);
    CHECK(parse_method("ode-limit") == Method::ode_limit);
    CHECK(parse_method("both") == Method::both);
    CHECK(to_string(Method::ode_limit) == "ode-limit");
    CHECK_THROWS_AS(parse_method("fast"), InvalidArgument);
}

TEST_CASE("word parsing") {
    CHECK(parse_word("ST").to_string() == "ST");
    CHECK(parse_word("S T t s").empty());
    CHECK(parse_word("(ST)^3").to_string() == "STSTST");
    CHECK(parse_word("(ST)^-2").to_string() == "tsts");
    CHECK(parse_word("T^0").empty());
    CHECK(parse_word("S(Tt)S").to_string() == "SS");
    CHECK_THROWS_AS(parse_word("(ST"), ParseError);
    CHECK_THROWS_AS(parse_word("ST)"), ParseError);
    CHECK_THROWS_AS(parse_word("SX"), ParseError);
    CHECK_THROWS_AS(parse_word("S^"), ParseError);
}

TEST_CASE("word evaluation") {
    const auto v = evaluate_word_level_one(parse_word("TS"));
    const auto g = generator_matrices();
    CHECK(v.matrix == g.m1 * (g.m0 * integer_inverse(g.m1)));
    CHECK(v.det == 1);
    CHECK(evaluate_word_level_one(parse_word("(ST)^5")).matrix == IntMatrix::identity(4));

    const auto rep = assemble_rep(1, Method::series);
    const auto inv = evaluate_word(parse_word("(ST)^5"), rep);
    CHECK(inv.proportional_to_identity);
    const auto ts = evaluate_word(parse_word("TS"), rep);
    CHECK(proj_distance(ts.matrix, to_complex(v.matrix)) < 1e-12);
    CHECK(ts.normalized_trace == Catch::Approx(std::abs(double(v.trace))).margin(1e-12));
}

TEST_CASE("residue permutation search") {
    const CMatrix control = to_complex(
        sym_power(IntMatrix::from_rows({{1, 0, 0, 0}, {0, 0, 1, 0}, {0, 1, 0, 0}, {0, 0, 0, -1}}), 2));
    const auto pc = residue_permutation(2, control);
    CHECK(pc.found);
    CHECK(pc.image == std::array<int, 5>{4, 3, 2, 1, 5});

    const auto g = generator_matrices();
    const auto m0 = residue_permutation(2, to_complex(sym_power(g.m0, 2)));
    const auto m1 = residue_permutation(2, to_complex(sym_power(g.m1, 2)));
    CHECK_FALSE(m0.found);
    CHECK_FALSE(m1.found);
}

TEST_CASE("selected variant has the expected local spectrum") {
    const auto rep = assemble_rep(2, Method::series);
    CHECK(spectral_invariant_defect(rep) < 1e-8);
    CHECK(rep.variants.size() == 4);
    CHECK(rep.defects.d5 < 1e-9);
}
