#include <algorithm>

#include "core/errors.hpp"
#include "core/shadow.hpp"
#include "core/solver_common.hpp"

namespace mlbicgstabt {

// Slot s mod n keeps hat-g_s, A hat-g_s, p_{s+1} and the divisor
// p_{s+1}^H A hat-g_s for the n most recent s.
SolveResult solve_ml_bicg(const CsrMatrix& a, std::span<const Scalar> b,
                          std::span<const Scalar> x0, const DenseBlock& q,
                          const SolverConfig& config, SolveTrace* trace) {
    if (q.cols() < 1 || q.rows() != a.rows()) {
        throw DimensionError("mlbicg: shadow block must be N x n with n >= 1");
    }
    const Index n = q.cols();
    detail::SolveContext ctx("mlbicg", n, a, b, x0, config, trace);
    OpCounters* cnt = &ctx.counters;
    const auto udim = static_cast<std::size_t>(a.rows());
    const auto un = static_cast<std::size_t>(n);

    Vector x = ctx.initial_guess();
    Vector r = residual(a, x, b, cnt);
    if (ctx.record(ctx.relative(r), x)) {
        return ctx.finish(std::move(x), r, Termination::Converged, 0);
    }

    LeftLanczosSequence left(a, q, cnt);
    std::vector<Vector> ghat(un);
    std::vector<Vector> aghat(un);
    std::vector<Vector> p(un);
    Vector divisor(un);

    ghat[0] = r;
    aghat[0] = matvec(a, ghat[0], cnt);
    p[0] = left.next();
    divisor[0] = dot_conj(p[0], aghat[0], cnt);
    ctx.mark_setup_done();

    Vector acc(udim);
    const Index max_it = ctx.max_it();
    for (Index k = 1;; ++k) {
        const auto prev = static_cast<std::size_t>((k - 1) % n);
        if (ctx.near_zero(divisor[prev], norm2(p[prev]), norm2(aghat[prev]))) {
            return ctx.finish(std::move(x), r, Termination::Breakdown, k - 1, "pAg");
        }
        const Scalar alpha = dot_conj(p[prev], r, cnt) / divisor[prev];
        axpy(alpha, ghat[prev], x, cnt);
        axpy(-alpha, aghat[prev], r, cnt);
        const bool converged = ctx.record(ctx.relative(r), x);
        if (converged || k >= max_it) {
            ctx.begin_record(k, x, r);
            return ctx.finish(std::move(x), r,
                              converged ? Termination::Converged : Termination::MaxIterations, k);
        }
        IterationRecord* rec = ctx.begin_record(k, x, r);

        // acc = A (hat-r_k + sum_{t < s} beta_t hat-g_t), extended one term per s.
        matvec(a, r, acc, cnt);
        Vector gk = r;
        for (Index s = std::max<Index>(k - n, 0); s <= k - 1; ++s) {
            const auto slot = static_cast<std::size_t>(s % n);
            const Scalar beta = -dot_conj(p[slot], acc, cnt) / divisor[slot];
            axpy(beta, aghat[slot], acc, cnt);
            axpy(beta, ghat[slot], gk, cnt);
            if (rec != nullptr) {
                rec->beta.emplace_back(s, beta);
            }
        }

        const auto slot = static_cast<std::size_t>(k % n);
        ghat[slot] = std::move(gk);
        aghat[slot] = matvec(a, ghat[slot], cnt);
        p[slot] = left.next();
        divisor[slot] = dot_conj(p[slot], aghat[slot], cnt);
        if (rec != nullptr) {
            rec->g = ghat[slot];
            rec->w = aghat[slot];
            rec->counters = ctx.counters;
        }
    }
}

}  // namespace mlbicgstabt
