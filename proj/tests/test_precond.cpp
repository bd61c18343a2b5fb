#include "doctest.h"

#include "core/errors.hpp"
#include "core/precond.hpp"
#include "support.hpp"

using namespace mlbicgstabt;
using namespace mlbtest;

TEST_CASE("identity preconditioner") {
    Rng rng(1);
    const Vector v = rng.vector(5, true);
    const auto m = Preconditioner::identity(5);
    OpCounters c;
    CHECK(m.apply_inv(v, &c) == v);
    CHECK(m.apply_inv_adjoint(v, &c) == v);
    CHECK(c.precond_solves == 2);
    CHECK(m.kind() == Preconditioner::Kind::Identity);
}

TEST_CASE("jacobi preconditioner") {
    const Vector d{2.0, 4.0};
    const auto m = Preconditioner::jacobi(CsrMatrix::diagonal(d));
    const Vector v{2.0, 4.0};
    const Vector ones{1.0, 1.0};
    CHECK(m.apply_inv(v) == ones);
    const auto mc = Preconditioner::jacobi(CsrMatrix::diagonal(Vector{Scalar(0.0, 2.0)}));
    CHECK(mc.apply_inv_adjoint(Vector{1.0})[0] == Scalar(0.0, 0.5));
    CHECK_THROWS_AS(Preconditioner::jacobi(CsrMatrix::from_triplets(2, 2, {{0, 0, 1.0}})),
                    FactorizationError);
}

TEST_CASE("ilut with droptol 0 reproduces partial-pivoting LU") {
    Rng rng(42);
    for (int trial = 0; trial < 10; ++trial) {
        const Index n = trial < 5 ? 4 : 8;
        const bool cplx = trial % 2 == 0;
        const CsrMatrix a = random_sparse(rng, n, 1.0, 0.0, cplx);
        const auto m = Preconditioner::ilut(a, 0.0);
        const IlutFactors* f = m.ilut_factors();
        REQUIRE(f != nullptr);
        const Dense pa = permuted_rows(to_dense(a), f->perm);
        const Dense lu = dense_matmul(lower_with_unit_diag(*f), to_dense(f->upper));
        CHECK(frob_rel(lu, pa) < 1e-12);

        const DenseLu ref = dense_lu(to_dense(a));
        CHECK(f->perm == ref.perm);
        CHECK(frob_rel(to_dense(f->upper), ref.u) < 1e-12);
    }
}

TEST_CASE("ilut solve matches dense solve") {
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const CsrMatrix a = random_sparse(rng, 6, 0.6, 0.5, trial % 2 == 0);
        const auto m = Preconditioner::ilut(a, 0.0);
        const Vector v = rng.vector(6, true);
        CHECK(rel_diff(m.apply_inv(v), dense_solve(to_dense(a), v)) < 1e-10);
        CHECK(rel_diff(m.apply_inv_adjoint(v), dense_solve(dense_adjoint(to_dense(a)), v)) <
              1e-10);
    }
}

TEST_CASE("adjoint identity for every preconditioner kind") {
    Rng rng(9);
    const CsrMatrix a = random_sparse(rng, 6, 0.5, 1.0, true);
    const std::vector<Preconditioner> ms = {Preconditioner::identity(6),
                                            Preconditioner::jacobi(a),
                                            Preconditioner::ilut(a, 0.0),
                                            Preconditioner::ilut(a, 0.1)};
    for (const auto& m : ms) {
        const Vector u = rng.vector(6, true);
        const Vector w = rng.vector(6, true);
        const Scalar lhs = inner(m.apply_inv_adjoint(u), w);
        const Scalar rhs = inner(u, m.apply_inv(w));
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
    }
}

TEST_CASE("symmetric factorization without pivoting is self-adjoint") {
    Dense d(5, 5);
    for (Index i = 0; i < 5; ++i) {
        d(i, i) = 4.0;
        if (i + 1 < 5) {
            d(i, i + 1) = -1.0;
            d(i + 1, i) = -1.0;
        }
    }
    const auto m = Preconditioner::ilut(from_dense(d), 0.0, false);
    CHECK(m.ilut_factors()->perm == std::vector<Index>{0, 1, 2, 3, 4});
    Rng rng(2);
    const Vector v = rng.vector(5);
    CHECK(rel_diff(m.apply_inv_adjoint(v), m.apply_inv(v)) < 1e-14);
}

TEST_CASE("huge droptol leaves only the pivots") {
    Rng rng(5);
    const CsrMatrix a = random_sparse(rng, 7, 0.5, 4.0);
    const auto m = Preconditioner::ilut(a, 1e6);
    const IlutFactors* f = m.ilut_factors();
    CHECK(f->lower.nnz() == 0);
    CHECK(f->upper.nnz() == 7);
    const Dense ad = to_dense(a);
    for (Index k = 0; k < 7; ++k) {
        CHECK(f->upper_diag[static_cast<std::size_t>(k)] == ad(f->perm[static_cast<std::size_t>(k)], k));
    }
}

TEST_CASE("diagonal matrix factors as L = I, U = P A") {
    const Vector diag{3.0, -2.0, Scalar(0.0, 5.0)};
    const CsrMatrix a = CsrMatrix::diagonal(diag);
    const auto m = Preconditioner::ilut(a, 0.0);
    const IlutFactors* f = m.ilut_factors();
    CHECK(f->lower.nnz() == 0);
    CHECK(frob_rel(to_dense(f->upper), permuted_rows(to_dense(a), f->perm)) == 0.0);
}

TEST_CASE("unrecoverable zero pivot names the column") {
    // Column 1 is empty.
    const CsrMatrix a = CsrMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {1, 0, 1.0}});
    try {
        (void)Preconditioner::ilut(a, 0.0);
        FAIL("expected FactorizationError");
    } catch (const FactorizationError& e) {
        CHECK(e.row() == 1);
    }
}

TEST_CASE("from_spec parsing") {
    const CsrMatrix a = CsrMatrix::identity(3);
    CHECK(Preconditioner::from_spec(a, "none").kind() == Preconditioner::Kind::Identity);
    CHECK(Preconditioner::from_spec(a, "jacobi").kind() == Preconditioner::Kind::Jacobi);
    CHECK(Preconditioner::from_spec(a, "ilut:1e-3").kind() == Preconditioner::Kind::Ilut);
    CHECK_THROWS_AS(Preconditioner::from_spec(a, "ilut:"), std::invalid_argument);
    CHECK_THROWS_AS(Preconditioner::from_spec(a, "ilut:abc"), std::invalid_argument);
    CHECK_THROWS_AS(Preconditioner::from_spec(a, "ilu0"), std::invalid_argument);
}
