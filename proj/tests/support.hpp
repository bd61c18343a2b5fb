#pragma once

// Dense reference kernels and random problem generators. Nothing here uses
// the sparse kernels under test.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "core/linalg.hpp"
#include "core/precond.hpp"

namespace mlbtest {

using mlbicgstabt::CsrMatrix;
using mlbicgstabt::Index;
using mlbicgstabt::Scalar;
using mlbicgstabt::Triplet;
using mlbicgstabt::Vector;

struct Dense {
    Index rows = 0;
    Index cols = 0;
    std::vector<Scalar> v;  // row-major

    Dense() = default;
    Dense(Index r, Index c) : rows(r), cols(c), v(static_cast<std::size_t>(r * c)) {}
    Scalar& operator()(Index i, Index j) { return v[static_cast<std::size_t>(i * cols + j)]; }
    Scalar operator()(Index i, Index j) const { return v[static_cast<std::size_t>(i * cols + j)]; }
};

inline Dense to_dense(const CsrMatrix& a) {
    Dense d(a.rows(), a.cols());
    for (const auto& t : a.triplets()) {
        d(t.row, t.col) += t.value;
    }
    return d;
}

inline CsrMatrix from_dense(const Dense& d) {
    std::vector<Triplet> t;
    for (Index i = 0; i < d.rows; ++i) {
        for (Index j = 0; j < d.cols; ++j) {
            if (d(i, j) != Scalar(0.0)) {
                t.push_back({i, j, d(i, j)});
            }
        }
    }
    return CsrMatrix::from_triplets(d.rows, d.cols, std::move(t));
}

inline Vector dense_mul(const Dense& a, const Vector& x) {
    Vector y(static_cast<std::size_t>(a.rows));
    for (Index i = 0; i < a.rows; ++i) {
        Scalar s = 0.0;
        for (Index j = 0; j < a.cols; ++j) {
            s += a(i, j) * x[static_cast<std::size_t>(j)];
        }
        y[static_cast<std::size_t>(i)] = s;
    }
    return y;
}

inline Vector dense_mul_adjoint(const Dense& a, const Vector& x) {
    Vector y(static_cast<std::size_t>(a.cols));
    for (Index j = 0; j < a.cols; ++j) {
        Scalar s = 0.0;
        for (Index i = 0; i < a.rows; ++i) {
            s += std::conj(a(i, j)) * x[static_cast<std::size_t>(i)];
        }
        y[static_cast<std::size_t>(j)] = s;
    }
    return y;
}

inline Dense dense_matmul(const Dense& a, const Dense& b) {
    Dense c(a.rows, b.cols);
    for (Index i = 0; i < a.rows; ++i) {
        for (Index k = 0; k < a.cols; ++k) {
            for (Index j = 0; j < b.cols; ++j) {
                c(i, j) += a(i, k) * b(k, j);
            }
        }
    }
    return c;
}

inline Dense dense_adjoint(const Dense& a) {
    Dense h(a.cols, a.rows);
    for (Index i = 0; i < a.rows; ++i) {
        for (Index j = 0; j < a.cols; ++j) {
            h(j, i) = std::conj(a(i, j));
        }
    }
    return h;
}

// Gaussian elimination with partial pivoting on a copy.
inline Vector dense_solve(Dense a, Vector b) {
    const Index n = a.rows;
    for (Index k = 0; k < n; ++k) {
        Index p = k;
        for (Index i = k + 1; i < n; ++i) {
            if (std::abs(a(i, k)) > std::abs(a(p, k))) {
                p = i;
            }
        }
        if (a(p, k) == Scalar(0.0)) {
            throw std::runtime_error("dense_solve: singular");
        }
        if (p != k) {
            for (Index j = 0; j < n; ++j) {
                std::swap(a(k, j), a(p, j));
            }
            std::swap(b[static_cast<std::size_t>(k)], b[static_cast<std::size_t>(p)]);
        }
        for (Index i = k + 1; i < n; ++i) {
            const Scalar l = a(i, k) / a(k, k);
            for (Index j = k; j < n; ++j) {
                a(i, j) -= l * a(k, j);
            }
            b[static_cast<std::size_t>(i)] -= l * b[static_cast<std::size_t>(k)];
        }
    }
    Vector x(static_cast<std::size_t>(n));
    for (Index i = n - 1; i >= 0; --i) {
        Scalar s = b[static_cast<std::size_t>(i)];
        for (Index j = i + 1; j < n; ++j) {
            s -= a(i, j) * x[static_cast<std::size_t>(j)];
        }
        x[static_cast<std::size_t>(i)] = s / a(i, i);
    }
    return x;
}

inline double norm(const Vector& v) {
    double s = 0.0;
    for (const auto& z : v) {
        s += std::norm(z);
    }
    return std::sqrt(s);
}

inline Scalar inner(const Vector& u, const Vector& v) {
    Scalar s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        s += std::conj(u[i]) * v[i];
    }
    return s;
}

inline Vector sub(const Vector& a, const Vector& b) {
    Vector c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        c[i] = a[i] - b[i];
    }
    return c;
}

// ||a - b|| / max(||b||, floor)
inline double rel_diff(const Vector& a, const Vector& b, double floor = 1e-300) {
    return norm(sub(a, b)) / std::max(norm(b), floor);
}

// |u^H v| / (|u| |v|)
inline double cosine(const Vector& u, const Vector& v) {
    const double d = norm(u) * norm(v);
    return d == 0.0 ? 0.0 : std::abs(inner(u, v)) / d;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo = -1.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(gen_);
    }
    Scalar scalar(bool complex_values) {
        return complex_values ? Scalar(uniform(), uniform()) : Scalar(uniform(), 0.0);
    }
    Vector vector(Index n, bool complex_values = false) {
        Vector v(static_cast<std::size_t>(n));
        for (auto& z : v) {
            z = scalar(complex_values);
        }
        return v;
    }
    Index index(Index lo, Index hi) {
        return std::uniform_int_distribution<Index>(lo, hi)(gen_);
    }
    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

// Random sparse square matrix; `shift` is added to the diagonal so that it is
// comfortably nonsingular.
inline CsrMatrix random_sparse(Rng& rng, Index n, double density, double shift,
                               bool complex_values = false) {
    std::vector<Triplet> t;
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            if (i == j || rng.uniform(0.0, 1.0) < density) {
                Scalar v = rng.scalar(complex_values);
                if (i == j) {
                    v += shift;
                }
                t.push_back({i, j, v});
            }
        }
    }
    return CsrMatrix::from_triplets(n, n, std::move(t));
}

// Dense random matrix shift I + R / sqrt(n) with R uniform in [-1, 1]:
// eigenvalues cluster around `shift`, so Krylov methods behave well.
inline CsrMatrix random_well_conditioned(Rng& rng, Index n, double shift = 3.0,
                                         bool complex_values = false) {
    Dense d(n, n);
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            d(i, j) = rng.scalar(complex_values) * s;
        }
        d(i, i) += shift;
    }
    return from_dense(d);
}

inline Dense lower_with_unit_diag(const mlbicgstabt::IlutFactors& f) {
    Dense l = to_dense(f.lower);
    for (Index i = 0; i < l.rows; ++i) {
        l(i, i) += 1.0;
    }
    return l;
}

inline Dense permuted_rows(const Dense& a, const std::vector<Index>& perm) {
    Dense p(a.rows, a.cols);
    for (Index k = 0; k < a.rows; ++k) {
        for (Index j = 0; j < a.cols; ++j) {
            p(k, j) = a(perm[static_cast<std::size_t>(k)], j);
        }
    }
    return p;
}

inline double frob_rel(const Dense& x, const Dense& y) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < x.v.size(); ++i) {
        num += std::norm(x.v[i] - y.v[i]);
        den += std::norm(y.v[i]);
    }
    return std::sqrt(num / den);
}

// Textbook GEPP producing P, L, U, used to cross-check the factors and not
// just their product.
struct DenseLu {
    Dense l;
    Dense u;
    std::vector<Index> perm;
};

inline DenseLu dense_lu(Dense a) {
    const Index n = a.rows;
    DenseLu out{Dense(n, n), Dense(n, n), std::vector<Index>(static_cast<std::size_t>(n))};
    for (Index i = 0; i < n; ++i) {
        out.perm[static_cast<std::size_t>(i)] = i;
    }
    for (Index k = 0; k < n; ++k) {
        Index p = k;
        for (Index i = k + 1; i < n; ++i) {
            if (std::abs(a(i, k)) > std::abs(a(p, k))) {
                p = i;
            }
        }
        if (p != k) {
            for (Index j = 0; j < n; ++j) {
                std::swap(a(k, j), a(p, j));
                std::swap(out.l(k, j), out.l(p, j));
            }
            std::swap(out.perm[static_cast<std::size_t>(k)], out.perm[static_cast<std::size_t>(p)]);
        }
        for (Index i = k + 1; i < n; ++i) {
            const Scalar m = a(i, k) / a(k, k);
            out.l(i, k) = m;
            for (Index j = k; j < n; ++j) {
                a(i, j) -= m * a(k, j);
            }
        }
    }
    for (Index i = 0; i < n; ++i) {
        out.l(i, i) = 1.0;
        for (Index j = i; j < n; ++j) {
            out.u(i, j) = a(i, j);
        }
    }
    return out;
}

}  // namespace mlbtest

#ifdef DOCTEST_LIBRARY_INCLUDED
namespace doctest {
template <>
struct StringMaker<mlbicgstabt::OpCounters> {
    static String convert(const mlbicgstabt::OpCounters& c) {
        return ("{A " + std::to_string(c.matvec_a) + ", AH " + std::to_string(c.matvec_ah) +
                ", M " + std::to_string(c.precond_solves) + ", dot " +
                std::to_string(c.dot_products) + ", saxpy " + std::to_string(c.saxpys) +
                ", scale " + std::to_string(c.scalings) + "}")
            .c_str();
    }
};
}  // namespace doctest
#endif
