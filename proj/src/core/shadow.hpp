#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "core/linalg.hpp"

namespace mlbicgstabt {

/// How the shadow block Q is obtained.
///
/// Rademacher: Q = [r0, s_2, ..., s_n] where every entry of s_i is the sign of
/// a standard normal sample. Samples come from std::mt19937_64 seeded with
/// `seed` (its output sequence is fixed by the standard), turned into normals
/// with the Box-Muller transform
///     u1 = ((x1 >> 11) + 1) * 2^-53,  u2 = (x2 >> 11) * 2^-53,
///     z  = sqrt(-2 ln u1) * cos(2 pi u2),
/// one (x1, x2) pair per entry, filling column 2 top to bottom, then column 3,
/// and so on. sign(0) is taken as +1. r0 is used as given, not normalized.
///
/// Provided: Q is `provided` verbatim (for reproduction studies).
struct ShadowSpec {
    enum class Mode { Rademacher, Provided };

    Index n = 1;
    std::uint64_t seed = 0;
    Mode mode = Mode::Rademacher;
    DenseBlock provided;
};

/// Throws ZeroResidualError when r0 == 0 in Rademacher mode.
DenseBlock build_shadow(std::span<const Scalar> r0, const ShadowSpec& spec);

/// The standard normal stream used by build_shadow, exposed for tests.
std::vector<double> shadow_normals(std::uint64_t seed, std::size_t count);

/// p_k = (A^H)^{g_n(k)} q_{r_n(k)} for k = 1, 2, ..., produced in order.
/// Keeps the last n vectors so each new p_k costs one adjoint matvec once
/// k > n (p_k = A^H p_{k-n}).
class LeftLanczosSequence {
public:
    LeftLanczosSequence(const CsrMatrix& a, const DenseBlock& q, OpCounters* counters = nullptr);

    /// Returns p_k for the next k (starting with k = 1).
    const Vector& next();
    Index last_index() const noexcept { return k_; }

private:
    const CsrMatrix* a_;
    const DenseBlock* q_;
    OpCounters* counters_;
    Index k_ = 0;
    std::vector<Vector> window_;  // window_[(k - 1) % n] == p_k
};

/// Direct evaluation of p_k for one k (g_n(k) adjoint matvecs).
Vector left_lanczos_vector(const CsrMatrix& a, const DenseBlock& q, Index k,
                           OpCounters* counters = nullptr);

}  // namespace mlbicgstabt
