#include "doctest.h"

#include <cmath>
#include <random>

#include "core/errors.hpp"
#include "core/shadow.hpp"
#include "support.hpp"

using namespace mlbicgstabt;
using namespace mlbtest;

TEST_CASE("n = 1 gives the single column r0") {
    const Vector r0{1.0, Scalar(0.0, 2.0), -3.0};
    ShadowSpec spec;
    spec.n = 1;
    const DenseBlock q = build_shadow(r0, spec);
    CHECK(q.cols() == 1);
    CHECK(Vector(q.col(0).begin(), q.col(0).end()) == r0);
}

TEST_CASE("seeded blocks are deterministic and Rademacher") {
    Rng rng(3);
    const Vector r0 = rng.vector(20, true);
    ShadowSpec spec;
    spec.n = 4;
    spec.seed = 7;
    const DenseBlock a = build_shadow(r0, spec);
    const DenseBlock b = build_shadow(r0, spec);
    CHECK(a == b);
    CHECK(Vector(a.col(0).begin(), a.col(0).end()) == r0);
    for (Index j = 1; j < 4; ++j) {
        for (const auto& v : a.col(j)) {
            CHECK((v == Scalar(1.0) || v == Scalar(-1.0)));
        }
    }
    spec.seed = 8;
    CHECK(!(build_shadow(r0, spec) == a));
}

TEST_CASE("normal stream follows the documented Box-Muller recipe") {
    std::mt19937_64 gen(123);
    const auto z = shadow_normals(123, 50);
    for (double got : z) {
        const std::uint64_t x1 = gen();
        const std::uint64_t x2 = gen();
        const double u1 = std::ldexp(static_cast<double>((x1 >> 11) + 1), -53);
        const double u2 = std::ldexp(static_cast<double>(x2 >> 11), -53);
        const double want = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        CHECK(got == doctest::Approx(want).epsilon(1e-15));
    }
}

TEST_CASE("normal stream has unit variance") {
    const auto z = shadow_normals(99, 200000);
    double mean = 0.0;
    double sq = 0.0;
    for (double v : z) {
        mean += v;
        sq += v * v;
    }
    mean /= static_cast<double>(z.size());
    sq /= static_cast<double>(z.size());
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(sq - 1.0) < 0.02);
}

TEST_CASE("random shadow columns are linearly independent") {
    Rng rng(17);
    const Vector r0 = rng.vector(30);
    ShadowSpec spec;
    spec.n = 6;
    spec.seed = 1;
    const DenseBlock q = build_shadow(r0, spec);
    // Gram matrix of Q must be nonsingular: run Cholesky and watch pivots.
    const Index n = q.cols();
    Dense g(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            const Vector ci(q.col(i).begin(), q.col(i).end());
            const Vector cj(q.col(j).begin(), q.col(j).end());
            g(i, j) = inner(ci, cj);
        }
    }
    for (Index k = 0; k < n; ++k) {
        for (Index s = 0; s < k; ++s) {
            g(k, k) -= g(k, s) * std::conj(g(k, s));
        }
        REQUIRE(g(k, k).real() > 1e-6);
        const double d = std::sqrt(g(k, k).real());
        g(k, k) = d;
        for (Index i = k + 1; i < n; ++i) {
            for (Index s = 0; s < k; ++s) {
                g(i, k) -= g(i, s) * std::conj(g(k, s));
            }
            g(i, k) /= d;
        }
    }
}

TEST_CASE("zero r0 is reported distinctly") {
    ShadowSpec spec;
    spec.n = 3;
    CHECK_THROWS_AS(build_shadow(Vector(4, 0.0), spec), ZeroResidualError);
}

TEST_CASE("provided shadow block is used verbatim") {
    DenseBlock p(3, 2);
    p(0, 0) = 1.0;
    p(2, 1) = Scalar(0.0, 1.0);
    ShadowSpec spec;
    spec.n = 2;
    spec.mode = ShadowSpec::Mode::Provided;
    spec.provided = p;
    CHECK(build_shadow(Vector(3, 0.0), spec) == p);
    spec.n = 3;
    CHECK_THROWS_AS(build_shadow(Vector(3, 0.0), spec), DimensionError);
}

TEST_CASE("left Lanczos vectors") {
    Rng rng(4);
    const CsrMatrix a = random_sparse(rng, 5, 0.6, 1.0, true);
    DenseBlock q(5, 2);
    for (Index j = 0; j < 2; ++j) {
        for (auto& v : q.col(j)) {
            v = rng.scalar(true);
        }
    }
    const Vector q1(q.col(0).begin(), q.col(0).end());
    const Vector q2(q.col(1).begin(), q.col(1).end());
    CHECK(left_lanczos_vector(a, q, 1) == q1);
    CHECK(left_lanczos_vector(a, q, 2) == q2);

    const Dense d = to_dense(a);
    CHECK(rel_diff(left_lanczos_vector(a, q, 3), dense_mul_adjoint(d, q1)) < 1e-14);
    const Vector want5 = dense_mul_adjoint(d, dense_mul_adjoint(d, q1));
    OpCounters c;
    CHECK(rel_diff(left_lanczos_vector(a, q, 5, &c), want5) < 1e-14);
    CHECK(c.matvec_ah == 2);

    LeftLanczosSequence seq(a, q);
    for (Index k = 1; k <= 9; ++k) {
        CHECK(rel_diff(seq.next(), left_lanczos_vector(a, q, k)) < 1e-13);
    }
    CHECK_THROWS_AS(left_lanczos_vector(a, q, 0), std::invalid_argument);
}
