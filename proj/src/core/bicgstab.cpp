#include "core/errors.hpp"
#include "core/solver_common.hpp"

namespace mlbicgstabt {

SolveResult solve_bicgstab(const CsrMatrix& a, std::span<const Scalar> b,
                           std::span<const Scalar> x0, const Preconditioner& m,
                           const SolverConfig& config, SolveTrace* trace) {
    if (m.size() != a.rows()) {
        throw DimensionError("bicgstab: preconditioner size does not match the matrix");
    }
    detail::SolveContext ctx("bicgstab", 1, a, b, x0, config, trace);
    OpCounters* cnt = &ctx.counters;
    const auto udim = static_cast<std::size_t>(a.rows());

    Vector x = ctx.initial_guess();
    Vector r = residual(a, x, b, cnt);
    if (ctx.record(ctx.relative(r), x)) {
        return ctx.finish(std::move(x), r, Termination::Converged, 0);
    }
    const Vector shadow = r;
    const double shadow_norm = norm2(shadow);
    ctx.mark_setup_done();

    Vector p(udim);
    Vector v(udim);
    Vector phat(udim);
    Vector shat(udim);
    Vector t(udim);
    Scalar rho_prev = 1.0;
    Scalar alpha = 1.0;
    Scalar omega = 1.0;
    const Index max_it = ctx.max_it();

    for (Index k = 1;; ++k) {
        const Scalar rho = dot_conj(shadow, r, cnt);
        if (ctx.near_zero(rho, shadow_norm, norm2(r))) {
            return ctx.finish(std::move(x), r, Termination::Breakdown, k - 1, "rho");
        }
        if (k == 1) {
            p = r;
        } else {
            const Scalar beta = (rho / rho_prev) * (alpha / omega);
            axpy(-omega, v, p, cnt);
            aypx(beta, r, p, cnt);
        }
        m.apply_inv(p, phat, cnt);
        matvec(a, phat, v, cnt);
        const Scalar sigma = dot_conj(shadow, v, cnt);
        if (ctx.near_zero(sigma, shadow_norm, norm2(v))) {
            return ctx.finish(std::move(x), r, Termination::Breakdown, k - 1, "sigma");
        }
        alpha = rho / sigma;
        axpy(alpha, phat, x, cnt);
        axpy(-alpha, v, r, cnt);  // r holds s

        const double rel_s = ctx.relative(r);
        if (rel_s < ctx.tol()) {
            ctx.record(rel_s, x);
            ctx.begin_record(k, x, r);
            return ctx.finish(std::move(x), r, Termination::Converged, k);
        }
        m.apply_inv(r, shat, cnt);
        matvec(a, shat, t, cnt);
        const auto selected = select_omega(r, t, config.kappa, cnt);
        if (!selected) {
            ctx.record(rel_s, x);
            return ctx.finish(std::move(x), r, Termination::Breakdown, k, "Au");
        }
        omega = perturb_omega(*selected, norm2(r), norm2(t), config.omega_perturb);
        if (omega == Scalar(0.0)) {
            ctx.record(rel_s, x);
            return ctx.finish(std::move(x), r, Termination::Breakdown, k, "omega");
        }
        ctx.push_omega(omega);
        axpy(omega, shat, x, cnt);
        axpy(-omega, t, r, cnt);
        rho_prev = rho;

        const bool converged = ctx.record(ctx.relative(r), x);
        if (auto* rec = ctx.begin_record(k, x, r)) {
            rec->g = p;
            rec->w = v;
            rec->omega = omega;
            rec->counters = ctx.counters;
        }
        if (converged || k >= max_it) {
            return ctx.finish(std::move(x), r,
                              converged ? Termination::Converged : Termination::MaxIterations, k);
        }
    }
}

}  // namespace mlbicgstabt
