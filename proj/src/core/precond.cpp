#include "core/precond.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <queue>
#include <sstream>

#include "core/errors.hpp"

namespace mlbicgstabt {

namespace {

void require_length(std::size_t got, Index want, const char* op) {
    if (got != static_cast<std::size_t>(want)) {
        throw DimensionError(std::string(op) + ": expected length " + std::to_string(want) +
                             ", got " + std::to_string(got));
    }
}

struct ColumnEntry {
    Index index;
    Scalar value;
};

// Column-compressed copy of A: for each column the (row, value) pairs.
std::vector<std::vector<ColumnEntry>> columns_of(const CsrMatrix& a) {
    std::vector<std::vector<ColumnEntry>> cols(static_cast<std::size_t>(a.cols()));
    const auto rp = a.row_ptr();
    const auto ci = a.col_idx();
    const auto va = a.values();
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index p = rp[static_cast<std::size_t>(i)]; p < rp[static_cast<std::size_t>(i + 1)]; ++p) {
            cols[static_cast<std::size_t>(ci[static_cast<std::size_t>(p)])].push_back(
                {i, va[static_cast<std::size_t>(p)]});
        }
    }
    return cols;
}

IlutFactors factorize(const CsrMatrix& a, double droptol, bool pivot) {
    if (a.rows() != a.cols()) {
        throw DimensionError("ilut: matrix must be square");
    }
    if (!(droptol >= 0.0)) {
        throw std::invalid_argument("ilut: droptol must be >= 0");
    }
    const Index n = a.rows();
    const auto un = static_cast<std::size_t>(n);
    const auto acols = columns_of(a);

    std::vector<Index> pinv(un, -1);  // original row -> pivot position
    std::vector<Index> perm(un, -1);  // pivot position -> original row
    std::vector<std::vector<ColumnEntry>> lcols(un);  // (original row, l) below pivot
    std::vector<Triplet> upper;
    Vector upper_diag(un);

    Vector work(un, Scalar(0.0));
    std::vector<Index> in_pattern(un, -1);
    std::vector<Index> queued(un, -1);
    std::vector<Index> pattern;

    for (Index j = 0; j < n; ++j) {
        const auto& col = acols[static_cast<std::size_t>(j)];
        double col_norm = 0.0;
        for (const auto& e : col) {
            col_norm += std::norm(e.value);
        }
        const double tau = droptol * std::sqrt(col_norm);

        pattern.clear();
        std::priority_queue<Index, std::vector<Index>, std::greater<>> heap;
        auto touch = [&](Index row) {
            const auto ur = static_cast<std::size_t>(row);
            if (in_pattern[ur] != j) {
                in_pattern[ur] = j;
                pattern.push_back(row);
            }
            const Index k = pinv[ur];
            if (k >= 0 && queued[static_cast<std::size_t>(k)] != j) {
                queued[static_cast<std::size_t>(k)] = j;
                heap.push(k);
            }
        };
        for (const auto& e : col) {
            touch(e.index);
            work[static_cast<std::size_t>(e.index)] += e.value;
        }

        // Eliminate with the already finished columns of L in pivot order.
        while (!heap.empty()) {
            const Index k = heap.top();
            heap.pop();
            const auto row = static_cast<std::size_t>(perm[static_cast<std::size_t>(k)]);
            const Scalar u = work[row];
            work[row] = 0.0;
            if (u == Scalar(0.0) || std::abs(u) < tau) {
                continue;
            }
            upper.push_back({k, j, u});
            for (const auto& l : lcols[static_cast<std::size_t>(k)]) {
                touch(l.index);
                work[static_cast<std::size_t>(l.index)] -= l.value * u;
            }
        }

        Index piv_row = -1;
        if (pivot) {
            double best = 0.0;
            for (Index row : pattern) {
                const auto ur = static_cast<std::size_t>(row);
                if (pinv[ur] >= 0) {
                    continue;
                }
                const double mag = std::abs(work[ur]);
                if (mag > best || (mag == best && mag > 0.0 && row < piv_row)) {
                    best = mag;
                    piv_row = row;
                }
            }
        } else if (in_pattern[static_cast<std::size_t>(j)] == j &&
                   work[static_cast<std::size_t>(j)] != Scalar(0.0)) {
            piv_row = j;
        }
        if (piv_row < 0) {
            for (Index row : pattern) {
                work[static_cast<std::size_t>(row)] = 0.0;
            }
            throw FactorizationError(j, "ilut: zero pivot in column " + std::to_string(j + 1) +
                                            " (row " + std::to_string(j + 1) + ")");
        }

        const Scalar d = work[static_cast<std::size_t>(piv_row)];
        pinv[static_cast<std::size_t>(piv_row)] = j;
        perm[static_cast<std::size_t>(j)] = piv_row;
        upper.push_back({j, j, d});
        upper_diag[static_cast<std::size_t>(j)] = d;

        auto& lcol = lcols[static_cast<std::size_t>(j)];
        for (Index row : pattern) {
            const auto ur = static_cast<std::size_t>(row);
            const Scalar v = work[ur];
            work[ur] = 0.0;
            if (pinv[ur] >= 0 || v == Scalar(0.0) || std::abs(v) < tau) {
                continue;
            }
            lcol.push_back({row, v / d});
        }
        std::sort(lcol.begin(), lcol.end(),
                  [](const ColumnEntry& x, const ColumnEntry& y) { return x.index < y.index; });
    }

    std::vector<Triplet> lower;
    for (Index k = 0; k < n; ++k) {
        for (const auto& l : lcols[static_cast<std::size_t>(k)]) {
            lower.push_back({pinv[static_cast<std::size_t>(l.index)], k, l.value});
        }
    }
    return IlutFactors{CsrMatrix::from_triplets(n, n, std::move(lower)),
                       CsrMatrix::from_triplets(n, n, std::move(upper)), std::move(upper_diag),
                       std::move(perm)};
}

// Solves L y = y in place (unit lower triangular, strict part stored).
void lower_solve(const CsrMatrix& lower, std::span<Scalar> y) {
    const auto rp = lower.row_ptr();
    const auto ci = lower.col_idx();
    const auto va = lower.values();
    for (std::size_t i = 0; i < y.size(); ++i) {
        Scalar sum = y[i];
        for (auto p = static_cast<std::size_t>(rp[i]); p < static_cast<std::size_t>(rp[i + 1]); ++p) {
            sum -= va[p] * y[static_cast<std::size_t>(ci[p])];
        }
        y[i] = sum;
    }
}

// Solves U y = y in place.
void upper_solve(const CsrMatrix& upper, std::span<const Scalar> diag, std::span<Scalar> y) {
    const auto rp = upper.row_ptr();
    const auto ci = upper.col_idx();
    const auto va = upper.values();
    for (std::size_t ii = y.size(); ii-- > 0;) {
        Scalar sum = y[ii];
        for (auto p = static_cast<std::size_t>(rp[ii]); p < static_cast<std::size_t>(rp[ii + 1]); ++p) {
            const auto c = static_cast<std::size_t>(ci[p]);
            if (c > ii) {
                sum -= va[p] * y[c];
            }
        }
        y[ii] = sum / diag[ii];
    }
}

// Solves U^H y = y in place: U^H is lower triangular, so sweep forward and
// scatter row i of U (column i of U^H) into the later unknowns.
void upper_adjoint_solve(const CsrMatrix& upper, std::span<const Scalar> diag, std::span<Scalar> y) {
    const auto rp = upper.row_ptr();
    const auto ci = upper.col_idx();
    const auto va = upper.values();
    for (std::size_t i = 0; i < y.size(); ++i) {
        const Scalar xi = y[i] / std::conj(diag[i]);
        y[i] = xi;
        for (auto p = static_cast<std::size_t>(rp[i]); p < static_cast<std::size_t>(rp[i + 1]); ++p) {
            const auto c = static_cast<std::size_t>(ci[p]);
            if (c > i) {
                y[c] -= std::conj(va[p]) * xi;
            }
        }
    }
}

// Solves L^H y = y in place (unit upper triangular), backward scatter.
void lower_adjoint_solve(const CsrMatrix& lower, std::span<Scalar> y) {
    const auto rp = lower.row_ptr();
    const auto ci = lower.col_idx();
    const auto va = lower.values();
    for (std::size_t i = y.size(); i-- > 0;) {
        const Scalar xi = y[i];
        for (auto p = static_cast<std::size_t>(rp[i]); p < static_cast<std::size_t>(rp[i + 1]); ++p) {
            y[static_cast<std::size_t>(ci[p])] -= std::conj(va[p]) * xi;
        }
    }
}

}  // namespace

Preconditioner Preconditioner::identity(Index n) {
    return Preconditioner(n, IdentityImpl{});
}

Preconditioner Preconditioner::jacobi(const CsrMatrix& a) {
    if (a.rows() != a.cols()) {
        throw DimensionError("jacobi: matrix must be square");
    }
    Vector diag(static_cast<std::size_t>(a.rows()), Scalar(0.0));
    const auto rp = a.row_ptr();
    const auto ci = a.col_idx();
    const auto va = a.values();
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index p = rp[static_cast<std::size_t>(i)]; p < rp[static_cast<std::size_t>(i + 1)]; ++p) {
            if (ci[static_cast<std::size_t>(p)] == i) {
                diag[static_cast<std::size_t>(i)] += va[static_cast<std::size_t>(p)];
            }
        }
        if (diag[static_cast<std::size_t>(i)] == Scalar(0.0)) {
            throw FactorizationError(i, "jacobi: zero diagonal in row " + std::to_string(i + 1));
        }
    }
    return Preconditioner(a.rows(), JacobiImpl{std::move(diag)});
}

Preconditioner Preconditioner::ilut(const CsrMatrix& a, double droptol, bool pivot) {
    return Preconditioner(a.rows(), IlutImpl{factorize(a, droptol, pivot), droptol});
}

Preconditioner Preconditioner::from_spec(const CsrMatrix& a, std::string_view spec) {
    if (spec == "none" || spec.empty()) {
        return identity(a.rows());
    }
    if (spec == "jacobi") {
        return jacobi(a);
    }
    constexpr std::string_view prefix = "ilut:";
    if (spec.substr(0, prefix.size()) == prefix) {
        const std::string num(spec.substr(prefix.size()));
        std::size_t used = 0;
        double droptol = 0.0;
        try {
            droptol = std::stod(num, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != num.size() || !(droptol >= 0.0)) {
            throw std::invalid_argument("preconditioner: bad drop tolerance in '" +
                                        std::string(spec) + "'");
        }
        return ilut(a, droptol, true);
    }
    throw std::invalid_argument("preconditioner: unknown kind '" + std::string(spec) +
                                "' (expected none, jacobi or ilut:<droptol>)");
}

Preconditioner::Kind Preconditioner::kind() const noexcept {
    switch (impl_.index()) {
        case 1:
            return Kind::Jacobi;
        case 2:
            return Kind::Ilut;
        default:
            return Kind::Identity;
    }
}

std::string Preconditioner::describe() const {
    if (const auto* il = std::get_if<IlutImpl>(&impl_)) {
        std::ostringstream os;
        os << "ilut:" << il->droptol;
        return os.str();
    }
    return kind() == Kind::Jacobi ? "jacobi" : "none";
}

const IlutFactors* Preconditioner::ilut_factors() const noexcept {
    const auto* il = std::get_if<IlutImpl>(&impl_);
    return il != nullptr ? &il->factors : nullptr;
}

void Preconditioner::apply_inv(std::span<const Scalar> v, std::span<Scalar> out,
                               OpCounters* counters) const {
    require_length(v.size(), n_, "apply_inv");
    require_length(out.size(), n_, "apply_inv");
    if (const auto* jac = std::get_if<JacobiImpl>(&impl_)) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = v[i] / jac->diag[i];
        }
    } else if (const auto* il = std::get_if<IlutImpl>(&impl_)) {
        const auto& f = il->factors;
        Vector y(v.size());
        for (std::size_t k = 0; k < y.size(); ++k) {
            y[k] = v[static_cast<std::size_t>(f.perm[k])];
        }
        lower_solve(f.lower, y);
        upper_solve(f.upper, f.upper_diag, y);
        std::copy(y.begin(), y.end(), out.begin());
    } else {
        std::copy(v.begin(), v.end(), out.begin());
    }
    if (counters != nullptr) {
        ++counters->precond_solves;
    }
}

Vector Preconditioner::apply_inv(std::span<const Scalar> v, OpCounters* counters) const {
    Vector out(v.size());
    apply_inv(v, out, counters);
    return out;
}

void Preconditioner::apply_inv_adjoint(std::span<const Scalar> v, std::span<Scalar> out,
                                       OpCounters* counters) const {
    require_length(v.size(), n_, "apply_inv_adjoint");
    require_length(out.size(), n_, "apply_inv_adjoint");
    if (const auto* jac = std::get_if<JacobiImpl>(&impl_)) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = v[i] / std::conj(jac->diag[i]);
        }
    } else if (const auto* il = std::get_if<IlutImpl>(&impl_)) {
        // M = P^T L U, so M^{-H} = P^T L^{-H} U^{-H}.
        const auto& f = il->factors;
        Vector y(v.begin(), v.end());
        upper_adjoint_solve(f.upper, f.upper_diag, y);
        lower_adjoint_solve(f.lower, y);
        for (std::size_t k = 0; k < y.size(); ++k) {
            out[static_cast<std::size_t>(f.perm[k])] = y[k];
        }
    } else {
        std::copy(v.begin(), v.end(), out.begin());
    }
    if (counters != nullptr) {
        ++counters->precond_solves;
    }
}

Vector Preconditioner::apply_inv_adjoint(std::span<const Scalar> v, OpCounters* counters) const {
    Vector out(v.size());
    apply_inv_adjoint(v, out, counters);
    return out;
}

}  // namespace mlbicgstabt
