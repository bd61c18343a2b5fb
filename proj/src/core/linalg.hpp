#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace mlbicgstabt {

using Scalar = std::complex<double>;
using Vector = std::vector<Scalar>;
using Index = std::int64_t;

/// Work tallies for one solve. Kernels bump the matching field when handed a
/// non-null pointer; norms used only for stopping tests are not counted.
struct OpCounters {
    std::uint64_t matvec_a = 0;
    std::uint64_t matvec_ah = 0;
    std::uint64_t precond_solves = 0;
    std::uint64_t dot_products = 0;
    std::uint64_t saxpys = 0;
    std::uint64_t scalings = 0;

    friend bool operator==(const OpCounters&, const OpCounters&) = default;
    friend OpCounters operator-(const OpCounters& a, const OpCounters& b) {
        return {a.matvec_a - b.matvec_a,         a.matvec_ah - b.matvec_ah,
                a.precond_solves - b.precond_solves, a.dot_products - b.dot_products,
                a.saxpys - b.saxpys,             a.scalings - b.scalings};
    }
};

/// Column-major N x m block of vectors (the shadow block Q, the f-block F).
class DenseBlock {
public:
    DenseBlock() = default;
    DenseBlock(Index rows, Index cols);

    Index rows() const noexcept { return rows_; }
    Index cols() const noexcept { return cols_; }

    std::span<Scalar> col(Index j);
    std::span<const Scalar> col(Index j) const;

    Scalar& operator()(Index i, Index j) { return data_[static_cast<std::size_t>(j * rows_ + i)]; }
    const Scalar& operator()(Index i, Index j) const {
        return data_[static_cast<std::size_t>(j * rows_ + i)];
    }

    std::span<const Scalar> data() const noexcept { return data_; }

    friend bool operator==(const DenseBlock&, const DenseBlock&) = default;

private:
    Index rows_ = 0;
    Index cols_ = 0;
    std::vector<Scalar> data_;
};

struct Triplet {
    Index row;
    Index col;
    Scalar value;
};

/// Compressed sparse row matrix. Explicitly stored zeros are kept.
class CsrMatrix {
public:
    CsrMatrix() = default;
    /// Takes ownership of already-built CSR arrays; throws DimensionError if
    /// they are inconsistent.
    CsrMatrix(Index rows, Index cols, std::vector<Index> row_ptr, std::vector<Index> col_idx,
              std::vector<Scalar> values);

    /// Sorts by (row, col) and sums duplicate coordinates.
    static CsrMatrix from_triplets(Index rows, Index cols, std::vector<Triplet> entries);
    static CsrMatrix identity(Index n);
    static CsrMatrix diagonal(std::span<const Scalar> diag);

    Index rows() const noexcept { return rows_; }
    Index cols() const noexcept { return cols_; }
    Index nnz() const noexcept { return static_cast<Index>(values_.size()); }

    std::span<const Index> row_ptr() const noexcept { return row_ptr_; }
    std::span<const Index> col_idx() const noexcept { return col_idx_; }
    std::span<const Scalar> values() const noexcept { return values_; }

    std::vector<Triplet> triplets() const;

private:
    Index rows_ = 0;
    Index cols_ = 0;
    std::vector<Index> row_ptr_{0};
    std::vector<Index> col_idx_;
    std::vector<Scalar> values_;
};

void matvec(const CsrMatrix& a, std::span<const Scalar> v, std::span<Scalar> out,
            OpCounters* counters = nullptr);
Vector matvec(const CsrMatrix& a, std::span<const Scalar> v, OpCounters* counters = nullptr);

/// A^H v as a scatter over the rows of A; A^H is never formed.
void matvec_adjoint(const CsrMatrix& a, std::span<const Scalar> v, std::span<Scalar> out,
                    OpCounters* counters = nullptr);
Vector matvec_adjoint(const CsrMatrix& a, std::span<const Scalar> v,
                      OpCounters* counters = nullptr);

/// sum_i conj(u_i) v_i
Scalar dot_conj(std::span<const Scalar> u, std::span<const Scalar> v,
                OpCounters* counters = nullptr);

/// y += alpha * x
void axpy(Scalar alpha, std::span<const Scalar> x, std::span<Scalar> y,
          OpCounters* counters = nullptr);

/// y = x + alpha * y
void aypx(Scalar alpha, std::span<const Scalar> x, std::span<Scalar> y,
          OpCounters* counters = nullptr);

void scale(Scalar alpha, std::span<Scalar> y, OpCounters* counters = nullptr);

double norm2(std::span<const Scalar> v);

/// b - A x
Vector residual(const CsrMatrix& a, std::span<const Scalar> x, std::span<const Scalar> b,
                OpCounters* counters = nullptr);

}  // namespace mlbicgstabt
