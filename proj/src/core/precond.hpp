#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "core/linalg.hpp"

namespace mlbicgstabt {

/// Threshold incomplete LU factors with P A ~= L U.
///
/// `lower` holds only the strictly lower part of L (its unit diagonal is
/// implicit); `upper` holds U including the diagonal. Both are expressed in
/// pivot order, i.e. row k of L and U belongs to original row `perm[k]`.
struct IlutFactors {
    CsrMatrix lower;
    CsrMatrix upper;
    Vector upper_diag;
    std::vector<Index> perm;
};

/// A preconditioner M applied through M^{-1} v and M^{-H} v.
class Preconditioner {
public:
    enum class Kind { Identity, Jacobi, Ilut };

    static Preconditioner identity(Index n);
    static Preconditioner jacobi(const CsrMatrix& a);

    /// Left-looking (column by column) threshold ILU. In column j every
    /// candidate entry of L or U with |value| < droptol * ||A(:, j)||_2 is
    /// dropped; the pivot itself is never dropped. With `pivot` the largest
    /// remaining entry of the column becomes the pivot (partial pivoting),
    /// otherwise the diagonal is used. Throws FactorizationError naming the
    /// column when no nonzero pivot is left.
    static Preconditioner ilut(const CsrMatrix& a, double droptol, bool pivot = true);

    /// Parses "none", "jacobi" or "ilut:<droptol>".
    static Preconditioner from_spec(const CsrMatrix& a, std::string_view spec);

    Kind kind() const noexcept;
    Index size() const noexcept { return n_; }
    std::string describe() const;

    /// nullptr unless kind() == Kind::Ilut.
    const IlutFactors* ilut_factors() const noexcept;

    void apply_inv(std::span<const Scalar> v, std::span<Scalar> out,
                   OpCounters* counters = nullptr) const;
    Vector apply_inv(std::span<const Scalar> v, OpCounters* counters = nullptr) const;

    void apply_inv_adjoint(std::span<const Scalar> v, std::span<Scalar> out,
                           OpCounters* counters = nullptr) const;
    Vector apply_inv_adjoint(std::span<const Scalar> v, OpCounters* counters = nullptr) const;

private:
    struct IdentityImpl {};
    struct JacobiImpl {
        Vector diag;
    };
    struct IlutImpl {
        IlutFactors factors;
        double droptol;
    };

    Preconditioner(Index n, std::variant<IdentityImpl, JacobiImpl, IlutImpl> impl)
        : n_(n), impl_(std::move(impl)) {}

    Index n_ = 0;
    std::variant<IdentityImpl, JacobiImpl, IlutImpl> impl_;
};

}  // namespace mlbicgstabt
