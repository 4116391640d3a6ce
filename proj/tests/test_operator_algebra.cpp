#include <catch_amalgamated.hpp>

#include <veech/operator_algebra.hpp>

#include <map>

using namespace veech;

namespace {

using Poly = std::map<Monomial, Int>;

// Applies sum c x_i d_j to a polynomial by direct differentiation.
Poly apply_first_order(const std::vector<FirstOrderTerm>& terms, const Poly& p) {
    Poly out;
    for (const auto& [m, c] : p)
        for (const auto& t : terms) {
            const int e = m.exponents[t.j - 1];
            if (e == 0) continue;
            Monomial n = m;
            --n.exponents[t.j - 1];
            ++n.exponents[t.i - 1];
            out[n] += c * t.coef * e;
        }
    for (auto it = out.begin(); it != out.end();) it = it->second == 0 ? out.erase(it) : std::next(it);
    return out;
}

// sign * (D(D p) - D_{C^2} p) evaluated column by column.
IntMatrix oracle_omega_hat(int i, int j, int k) {
    const auto& g = omega_generator(i, j);
    const IntMatrix c = g.generator.coefficient_matrix();
    const IntMatrix c2 = c * c;
    std::vector<FirstOrderTerm> lin;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            if (c2(a, b) != 0) lin.push_back({c2(a, b).convert_to<int>(), a + 1, b + 1});
    const MonomialBasis basis(k);
    IntMatrix out(basis.size(), basis.size());
    for (std::size_t col = 0; col < basis.size(); ++col) {
        const Poly p{{basis[col], 1}};
        Poly dd = apply_first_order(g.generator.terms(), apply_first_order(g.generator.terms(), p));
        for (const auto& [m, v] : apply_first_order(lin, p)) dd[m] -= v;
        for (const auto& [m, v] : dd)
            if (v != 0) out(basis.index_of(m), col) += g.sign * v;
    }
    return out;
}

} // namespace

TEST_CASE("basis sizes and ordering") {
    CHECK(basis(1).size() == 4);
    CHECK(basis(2).size() == 10);
    CHECK(basis(3).size() == 20);
    for (int k = 1; k <= 6; ++k) CHECK(basis(k).size() == binomial(k + 3, 3));

    const auto b1 = basis(1);
    CHECK(b1[0] == Monomial{{1, 0, 0, 0}});
    CHECK(b1[1] == Monomial{{0, 1, 0, 0}});
    CHECK(b1[2] == Monomial{{0, 0, 1, 0}});
    CHECK(b1[3] == Monomial{{0, 0, 0, 1}});

    const auto b3 = basis(3);
    for (std::size_t i = 0; i + 1 < b3.size(); ++i) CHECK(b3[i + 1] < b3[i]);
    for (const auto& m : b3.monomials()) CHECK(m.degree() == 3);

    CHECK_THROWS_AS(basis(0), InvalidLevel);
    CHECK_THROWS_AS(basis(-3), InvalidLevel);
}

TEST_CASE("composition law") {
    const auto a = compose({1, 2}, {2, 3});
    CHECK(a.coefficient({{1, 2}, {2, 3}}) == 1);
    CHECK(a.coefficient({{1}, {3}}) == 1);
    CHECK(a.terms().size() == 2);

    const auto b = compose({1, 2}, {3, 4});
    CHECK(b.coefficient({{1, 3}, {2, 4}}) == 1);
    CHECK(b.terms().size() == 1);

    const auto c = compose({1, 1}, {1, 1});
    CHECK(c.coefficient({{1, 1}, {1, 1}}) == 1);
    CHECK(c.coefficient({{1}, {1}}) == 1);

    CHECK_THROWS_AS(compose({0, 1}, {1, 1}), InvalidIndex);
    CHECK_THROWS_AS(compose({1, 1}, {1, 5}), InvalidIndex);
}

TEST_CASE("composition matches the product of first-order matrices") {
    for (int k = 1; k <= 3; ++k)
        for (int i = 1; i <= 4; ++i)
            for (int j = 1; j <= 4; ++j)
                for (int p = 1; p <= 4; ++p)
                    for (int q = 1; q <= 4; ++q) {
                        const IntMatrix lhs = matrix_of(compose({i, j}, {p, q}), k);
                        const IntMatrix rhs = matrix_of(FirstOrderOp({{1, i, j}}), k) * matrix_of(FirstOrderOp({{1, p, q}}), k);
                        REQUIRE(lhs == rhs);
                    }
}

TEST_CASE("omega table entries") {
    const auto& g12 = omega_generator(1, 2);
    CHECK(g12.sign == -1);
    CHECK(g12.generator == FirstOrderOp({{1, 1, 1}, {1, 2, 2}, {-1, 3, 3}, {-1, 4, 4}}));
    const auto& g56 = omega_generator(5, 6);
    CHECK(g56.sign == -1);
    CHECK(g56.generator == FirstOrderOp({{1, 1, 1}, {-1, 2, 2}, {-1, 3, 3}, {1, 4, 4}}));

    CHECK(omega(1, 2) == Int(-1) * square(g12.generator));
    CHECK_THROWS_AS(omega(2, 1), InvalidPair);
    CHECK_THROWS_AS(omega(1, 7), InvalidPair);
    CHECK_THROWS_AS(omega(3, 3), InvalidPair);
    CHECK_THROWS_AS(omega(0, 2), InvalidPair);
}

TEST_CASE("degree-two parts against a direct differentiation oracle") {
    for (int k = 1; k <= 3; ++k)
        for (const auto& [i, j] : all_pairs()) {
            INFO("pair " << i << "," << j << " level " << k);
            CHECK(matrix_of(omega_hat_op(i, j), k) == oracle_omega_hat(i, j, k));
        }
}

TEST_CASE("diagonal action of the (1,2) operator") {
    for (int k = 1; k <= 4; ++k) {
        const IntMatrix m = matrix_of(omega_hat_op(1, 2), k);
        const MonomialBasis b(k);
        for (std::size_t c = 0; c < b.size(); ++c) {
            const auto& e = b[c].exponents;
            const Int s = e[0] + e[1] - e[2] - e[3];
            for (std::size_t r = 0; r < b.size(); ++r) CHECK(m(r, c) == (r == c ? Int(-(s * s - k)) : Int(0)));
        }
    }
    const IntMatrix m2 = matrix_of(omega_hat_op(1, 2), 2);
    const auto idx = basis(2).index_of(Monomial{{1, 1, 0, 0}});
    CHECK(m2(idx, idx) == -2);
}

TEST_CASE("level one vanishing and first-order parts") {
    for (const auto& [i, j] : all_pairs()) CHECK(matrix_of(omega_hat_op(i, j), 1).is_zero());
    CHECK(degree_two_part(SecondOrderOp::from_first_order(FirstOrderOp({{1, 1, 2}, {-1, 3, 4}}))).is_zero());
    const auto hat = omega_hat_op(3, 5);
    for (const auto& [key, c] : hat.terms()) {
        CHECK(key.xs.size() == 2);
        CHECK(key.ds.size() == 2);
    }
}

TEST_CASE("matrix_of rejects degree-changing operators") {
    SecondOrderOp op;
    op.add({{1, 2}, {3}}, 1);
    CHECK_THROWS_AS(matrix_of(op, 2), ContractViolation);
}

TEST_CASE("infinitesimal braid relations hold exactly") {
    for (int k = 1; k <= 4; ++k) {
        const auto rep = check_braid_relations(k);
        INFO("level " << k);
        CHECK(rep.checked == 165);
        CHECK(rep.ok());
    }
}

TEST_CASE("Ward scalars are measured") {
    for (int k = 1; k <= 4; ++k) {
        const auto w = ward_report(k);
        INFO("level " << k);
        CHECK(w.total_is_scalar);
        CHECK(w.fixed_scalars_agree());
        CHECK(w.total_scalar == -3 * k * (k - 1));
        CHECK(w.fixed_scalar[0] == -k * (k - 1));
        CHECK(w.quoted_total == 3 * Rational(-1, 16 * (k + 2)) * k * k);
        CHECK_FALSE(w.matches_quoted());
    }
    CHECK(ward_report(1).total_scalar == 0);
}

TEST_CASE("operator matrices are deterministic") {
    CHECK(matrix_of(omega_hat_op(2, 4), 3) == matrix_of(omega_hat_op(2, 4), 3));
    CHECK(omega_family(3)->hat(4, 2) == omega_family(3)->hat(2, 4));
}

TEST_CASE("exact helpers") {
    const IntMatrix m = IntMatrix::from_rows({{2, 1}, {7, 4}});
    CHECK(determinant(m) == 1);
    CHECK(integer_inverse(m) * m == IntMatrix::identity(2));
    CHECK_THROWS_AS(integer_inverse(IntMatrix::from_rows({{2, 0}, {0, 1}})), SingularError);
    CHECK_THROWS_AS(integer_inverse(IntMatrix::from_rows({{1, 2}, {2, 4}})), SingularError);
    CHECK(determinant(IntMatrix::from_rows({{0, 1, 2}, {1, 0, 3}, {4, -3, 8}})) == -2);
    CHECK(power(m, 3) == m * m * m);
    CHECK((IntMatrix::identity(3) * Int(5)).scalar_multiple_of_identity() == Int(5));
    CHECK_FALSE(m.scalar_multiple_of_identity());
}
