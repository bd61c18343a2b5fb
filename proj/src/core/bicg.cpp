#include "core/errors.hpp"
#include "core/solver_common.hpp"

namespace mlbicgstabt {

SolveResult solve_bicg(const CsrMatrix& a, std::span<const Scalar> b,
                       std::span<const Scalar> x0, const Preconditioner& m,
                       const SolverConfig& config, SolveTrace* trace) {
    if (m.size() != a.rows()) {
        throw DimensionError("bicg: preconditioner size does not match the matrix");
    }
    detail::SolveContext ctx("bicg", 1, a, b, x0, config, trace);
    OpCounters* cnt = &ctx.counters;
    const auto udim = static_cast<std::size_t>(a.rows());

    Vector x = ctx.initial_guess();
    Vector r = residual(a, x, b, cnt);
    if (ctx.record(ctx.relative(r), x)) {
        return ctx.finish(std::move(x), r, Termination::Converged, 0);
    }
    Vector rt = r;
    ctx.mark_setup_done();

    Vector z(udim);
    Vector zt(udim);
    Vector p(udim);
    Vector pt(udim);
    Vector ap(udim);
    Vector apt(udim);
    Scalar rho_prev = 1.0;
    const Index max_it = ctx.max_it();

    for (Index k = 1;; ++k) {
        m.apply_inv(r, z, cnt);
        m.apply_inv_adjoint(rt, zt, cnt);
        const Scalar rho = dot_conj(rt, z, cnt);
        if (ctx.near_zero(rho, norm2(rt), norm2(z))) {
            return ctx.finish(std::move(x), r, Termination::Breakdown, k - 1, "rho");
        }
        if (k == 1) {
            p = z;
            pt = zt;
        } else {
            const Scalar beta = rho / rho_prev;
            aypx(beta, z, p, cnt);
            aypx(std::conj(beta), zt, pt, cnt);
        }
        matvec(a, p, ap, cnt);
        matvec_adjoint(a, pt, apt, cnt);
        const Scalar sigma = dot_conj(pt, ap, cnt);
        if (ctx.near_zero(sigma, norm2(pt), norm2(ap))) {
            return ctx.finish(std::move(x), r, Termination::Breakdown, k - 1, "sigma");
        }
        const Scalar alpha = rho / sigma;
        axpy(alpha, p, x, cnt);
        axpy(-alpha, ap, r, cnt);
        axpy(-std::conj(alpha), apt, rt, cnt);
        rho_prev = rho;

        const bool converged = ctx.record(ctx.relative(r), x);
        if (auto* rec = ctx.begin_record(k, x, r)) {
            rec->g = p;
            rec->w = ap;
            rec->counters = ctx.counters;
        }
        if (converged || k >= max_it) {
            return ctx.finish(std::move(x), r,
                              converged ? Termination::Converged : Termination::MaxIterations, k);
        }
    }
}

}  // namespace mlbicgstabt
