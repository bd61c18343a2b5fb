#include "core/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/errors.hpp"

namespace mlbicgstabt {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* op) {
    if (a != b) {
        throw DimensionError(std::string(op) + ": length mismatch (" + std::to_string(a) +
                             " vs " + std::to_string(b) + ")");
    }
}

}  // namespace

DenseBlock::DenseBlock(Index rows, Index cols)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols)) {
    if (rows < 0 || cols < 0) {
        throw DimensionError("DenseBlock: negative dimension");
    }
}

std::span<Scalar> DenseBlock::col(Index j) {
    return std::span<Scalar>(data_).subspan(static_cast<std::size_t>(j * rows_),
                                            static_cast<std::size_t>(rows_));
}

std::span<const Scalar> DenseBlock::col(Index j) const {
    return std::span<const Scalar>(data_).subspan(static_cast<std::size_t>(j * rows_),
                                                  static_cast<std::size_t>(rows_));
}

CsrMatrix::CsrMatrix(Index rows, Index cols, std::vector<Index> row_ptr,
                     std::vector<Index> col_idx, std::vector<Scalar> values)
    : rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
    if (rows < 0 || cols < 0) {
        throw DimensionError("CsrMatrix: negative dimension");
    }
    if (row_ptr_.size() != static_cast<std::size_t>(rows + 1) || row_ptr_.front() != 0) {
        throw DimensionError("CsrMatrix: row pointer array must have rows+1 entries starting at 0");
    }
    if (col_idx_.size() != values_.size() ||
        row_ptr_.back() != static_cast<Index>(values_.size())) {
        throw DimensionError("CsrMatrix: nnz disagrees with last row pointer");
    }
    for (std::size_t i = 0; i + 1 < row_ptr_.size(); ++i) {
        if (row_ptr_[i + 1] < row_ptr_[i]) {
            throw DimensionError("CsrMatrix: row pointers must be non-decreasing");
        }
    }
    for (Index c : col_idx_) {
        if (c < 0 || c >= cols_) {
            throw DimensionError("CsrMatrix: column index " + std::to_string(c) + " out of range");
        }
    }
}

CsrMatrix CsrMatrix::from_triplets(Index rows, Index cols, std::vector<Triplet> entries) {
    for (const auto& t : entries) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
            throw DimensionError("CsrMatrix::from_triplets: entry (" + std::to_string(t.row) + ", " +
                                 std::to_string(t.col) + ") outside " + std::to_string(rows) +
                                 "x" + std::to_string(cols));
        }
    }
    std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    std::vector<Index> row_ptr(static_cast<std::size_t>(rows + 1), 0);
    std::vector<Index> col_idx;
    std::vector<Scalar> values;
    col_idx.reserve(entries.size());
    values.reserve(entries.size());
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto& t = entries[k];
        if (k > 0 && entries[k - 1].row == t.row && entries[k - 1].col == t.col) {
            values.back() += t.value;
            continue;
        }
        col_idx.push_back(t.col);
        values.push_back(t.value);
        ++row_ptr[static_cast<std::size_t>(t.row + 1)];
    }
    for (std::size_t i = 1; i < row_ptr.size(); ++i) {
        row_ptr[i] += row_ptr[i - 1];
    }
    return CsrMatrix(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

CsrMatrix CsrMatrix::identity(Index n) {
    std::vector<Scalar> ones(static_cast<std::size_t>(n), Scalar(1.0));
    return diagonal(ones);
}

CsrMatrix CsrMatrix::diagonal(std::span<const Scalar> diag) {
    const auto n = static_cast<Index>(diag.size());
    std::vector<Index> row_ptr(diag.size() + 1);
    std::vector<Index> col_idx(diag.size());
    for (Index i = 0; i < n; ++i) {
        row_ptr[static_cast<std::size_t>(i + 1)] = i + 1;
        col_idx[static_cast<std::size_t>(i)] = i;
    }
    return CsrMatrix(n, n, std::move(row_ptr), std::move(col_idx),
                     std::vector<Scalar>(diag.begin(), diag.end()));
}

std::vector<Triplet> CsrMatrix::triplets() const {
    std::vector<Triplet> out;
    out.reserve(values_.size());
    for (Index i = 0; i < rows_; ++i) {
        for (Index p = row_ptr_[static_cast<std::size_t>(i)];
             p < row_ptr_[static_cast<std::size_t>(i + 1)]; ++p) {
            out.push_back({i, col_idx_[static_cast<std::size_t>(p)],
                           values_[static_cast<std::size_t>(p)]});
        }
    }
    return out;
}

void matvec(const CsrMatrix& a, std::span<const Scalar> v, std::span<Scalar> out,
            OpCounters* counters) {
    require_same_length(static_cast<std::size_t>(a.cols()), v.size(), "matvec");
    require_same_length(static_cast<std::size_t>(a.rows()), out.size(), "matvec");
    const auto rp = a.row_ptr();
    const auto ci = a.col_idx();
    const auto va = a.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
        Scalar sum = 0.0;
        for (auto p = static_cast<std::size_t>(rp[i]); p < static_cast<std::size_t>(rp[i + 1]);
             ++p) {
            sum += va[p] * v[static_cast<std::size_t>(ci[p])];
        }
        out[i] = sum;
    }
    if (counters != nullptr) {
        ++counters->matvec_a;
    }
}

Vector matvec(const CsrMatrix& a, std::span<const Scalar> v, OpCounters* counters) {
    Vector out(static_cast<std::size_t>(a.rows()));
    matvec(a, v, out, counters);
    return out;
}

void matvec_adjoint(const CsrMatrix& a, std::span<const Scalar> v, std::span<Scalar> out,
                    OpCounters* counters) {
    require_same_length(static_cast<std::size_t>(a.rows()), v.size(), "matvec_adjoint");
    require_same_length(static_cast<std::size_t>(a.cols()), out.size(), "matvec_adjoint");
    std::fill(out.begin(), out.end(), Scalar(0.0));
    const auto rp = a.row_ptr();
    const auto ci = a.col_idx();
    const auto va = a.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Scalar vi = v[i];
        for (auto p = static_cast<std::size_t>(rp[i]); p < static_cast<std::size_t>(rp[i + 1]);
             ++p) {
            out[static_cast<std::size_t>(ci[p])] += std::conj(va[p]) * vi;
        }
    }
    if (counters != nullptr) {
        ++counters->matvec_ah;
    }
}

Vector matvec_adjoint(const CsrMatrix& a, std::span<const Scalar> v, OpCounters* counters) {
    Vector out(static_cast<std::size_t>(a.cols()));
    matvec_adjoint(a, v, out, counters);
    return out;
}

Scalar dot_conj(std::span<const Scalar> u, std::span<const Scalar> v, OpCounters* counters) {
    require_same_length(u.size(), v.size(), "dot_conj");
    Scalar sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        sum += std::conj(u[i]) * v[i];
    }
    if (counters != nullptr) {
        ++counters->dot_products;
    }
    return sum;
}

void axpy(Scalar alpha, std::span<const Scalar> x, std::span<Scalar> y, OpCounters* counters) {
    require_same_length(x.size(), y.size(), "axpy");
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] += alpha * x[i];
    }
    if (counters != nullptr) {
        ++counters->saxpys;
    }
}

void aypx(Scalar alpha, std::span<const Scalar> x, std::span<Scalar> y, OpCounters* counters) {
    require_same_length(x.size(), y.size(), "aypx");
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = x[i] + alpha * y[i];
    }
    if (counters != nullptr) {
        ++counters->saxpys;
    }
}

void scale(Scalar alpha, std::span<Scalar> y, OpCounters* counters) {
    for (auto& yi : y) {
        yi *= alpha;
    }
    if (counters != nullptr) {
        ++counters->scalings;
    }
}

double norm2(std::span<const Scalar> v) {
    double sum = 0.0;
    for (const auto& vi : v) {
        sum += std::norm(vi);
    }
    return std::sqrt(sum);
}

Vector residual(const CsrMatrix& a, std::span<const Scalar> x, std::span<const Scalar> b,
                OpCounters* counters) {
    require_same_length(static_cast<std::size_t>(a.rows()), b.size(), "residual");
    Vector r = matvec(a, x, counters);
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = b[i] - r[i];
    }
    return r;
}

}  // namespace mlbicgstabt
