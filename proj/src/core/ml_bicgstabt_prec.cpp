#include <algorithm>

#include "core/errors.hpp"
#include "core/solver_common.hpp"

namespace mlbicgstabt {

// Cycle j, phase i form of the preconditioned method (k = j n + i). Slot i of
// G, W and c holds g, w = A M^{-1} g and c = q_{i+1}^H w for the most recent
// k with k mod n == i; `ghat` is M^{-1} applied to the newest direction.
SolveResult solve_ml_bicgstabt_prec(const CsrMatrix& a, std::span<const Scalar> b,
                                    std::span<const Scalar> x0, const DenseBlock& q,
                                    const Preconditioner& m, const SolverConfig& config,
                                    SolveTrace* trace) {
    if (q.cols() < 1 || q.rows() != a.rows()) {
        throw DimensionError("mlbicgstabt-prec: shadow block must be N x n with n >= 1");
    }
    if (m.size() != a.rows()) {
        throw DimensionError("mlbicgstabt-prec: preconditioner size does not match the matrix");
    }
    const Index n = q.cols();
    detail::SolveContext ctx("mlbicgstabt-prec", n, a, b, x0, config, trace);
    OpCounters* cnt = &ctx.counters;
    const Index dim = a.rows();
    const auto udim = static_cast<std::size_t>(dim);

    DenseBlock f(dim, n - 1);
    {
        Vector tmp(udim);
        for (Index i = 0; i + 1 < n; ++i) {
            matvec_adjoint(a, q.col(i), tmp, cnt);
            m.apply_inv_adjoint(tmp, f.col(i), cnt);
        }
    }
    std::vector<double> q_norm(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        q_norm[static_cast<std::size_t>(i)] = norm2(q.col(i));
    }

    Vector x = ctx.initial_guess();
    Vector r = residual(a, x, b, cnt);
    if (ctx.record(ctx.relative(r), x)) {
        return ctx.finish(std::move(x), r, Termination::Converged, 0);
    }

    DenseBlock g(dim, n);
    DenseBlock w(dim, n);
    Vector c(static_cast<std::size_t>(n));
    Vector ghat(udim);
    std::copy(r.begin(), r.end(), g.col(0).begin());
    m.apply_inv(g.col(0), ghat, cnt);
    matvec(a, ghat, w.col(0), cnt);
    c[0] = dot_conj(q.col(0), w.col(0), cnt);
    if (ctx.near_zero(c[0], q_norm[0], norm2(w.col(0)))) {
        return ctx.finish(std::move(x), r, Termination::Breakdown, 0, "c");
    }
    Scalar e = dot_conj(q.col(0), r, cnt);
    Scalar omega = 1.0;
    ctx.mark_setup_done();

    Vector zw(udim);
    Vector gk(udim);
    Vector uhat(udim);
    Vector z(udim);
    const Index max_it = ctx.max_it();
    Index k = 0;

    // Closes slot `slot`: stores g, refreshes ghat, w and c, and reports
    // whether c is (numerically) zero.
    auto close_direction = [&](Index slot, IterationRecord* rec) {
        std::copy(gk.begin(), gk.end(), g.col(slot).begin());
        m.apply_inv(g.col(slot), ghat, cnt);
        matvec(a, ghat, w.col(slot), cnt);
        c[static_cast<std::size_t>(slot)] = dot_conj(q.col(slot), w.col(slot), cnt);
        if (rec != nullptr) {
            rec->g.assign(g.col(slot).begin(), g.col(slot).end());
            rec->w.assign(w.col(slot).begin(), w.col(slot).end());
            rec->omega = omega;
            rec->counters = ctx.counters;
        }
        return ctx.near_zero(c[static_cast<std::size_t>(slot)], q_norm[static_cast<std::size_t>(slot)],
                             norm2(w.col(slot)));
    };

    for (Index j = 0;; ++j) {
        for (Index i = 1; i <= n - 1; ++i) {
            const Scalar alpha = e / c[static_cast<std::size_t>(i - 1)];
            axpy(alpha, ghat, x, cnt);
            axpy(-alpha, w.col(i - 1), r, cnt);
            ++k;
            const bool converged = ctx.record(ctx.relative(r), x);
            if (converged || k >= max_it) {
                ctx.begin_record(k, x, r);
                return ctx.finish(std::move(x), r,
                                  converged ? Termination::Converged : Termination::MaxIterations, k);
            }
            IterationRecord* rec = ctx.begin_record(k, x, r);
            e = dot_conj(q.col(i), r, cnt);

            if (j >= 1) {
                Scalar bt = -e / c[static_cast<std::size_t>(i)];
                std::copy(r.begin(), r.end(), zw.begin());
                axpy(bt, w.col(i), zw, cnt);
                std::copy(g.col(i).begin(), g.col(i).end(), gk.begin());
                scale(bt, gk, cnt);
                if (rec != nullptr) {
                    rec->beta_tilde.emplace_back((j - 1) * n + i, bt);
                }
                for (Index s = i + 1; s <= n - 1; ++s) {
                    bt = -dot_conj(q.col(s), zw, cnt) / c[static_cast<std::size_t>(s)];
                    axpy(bt, w.col(s), zw, cnt);
                    axpy(bt, g.col(s), gk, cnt);
                    if (rec != nullptr) {
                        rec->beta_tilde.emplace_back((j - 1) * n + s, bt);
                    }
                }
                aypx(-1.0 / omega, zw, gk, cnt);
                for (Index s = 0; s <= i - 1; ++s) {
                    const Scalar beta =
                        -dot_conj(f.col(s), gk, cnt) / c[static_cast<std::size_t>(s)];
                    axpy(beta, g.col(s), gk, cnt);
                    if (rec != nullptr) {
                        rec->beta.emplace_back(j * n + s, beta);
                    }
                }
            } else {
                Scalar beta = -dot_conj(f.col(0), r, cnt) / c[0];
                std::copy(r.begin(), r.end(), gk.begin());
                axpy(beta, g.col(0), gk, cnt);
                if (rec != nullptr) {
                    rec->beta.emplace_back(j * n, beta);
                }
                for (Index s = 1; s <= i - 1; ++s) {
                    beta = -dot_conj(f.col(s), gk, cnt) / c[static_cast<std::size_t>(s)];
                    axpy(beta, g.col(s), gk, cnt);
                    if (rec != nullptr) {
                        rec->beta.emplace_back(j * n + s, beta);
                    }
                }
            }
            if (close_direction(i, rec)) {
                return ctx.finish(std::move(x), r, Termination::Breakdown, k, "c");
            }
        }

        // Cycle end: k = j n + n.
        const Scalar alpha = e / c[static_cast<std::size_t>(n - 1)];
        axpy(alpha, ghat, x, cnt);
        axpy(-alpha, w.col(n - 1), r, cnt);  // r holds u from here on
        ++k;
        const double rel_u = ctx.relative(r);
        if (rel_u < ctx.tol()) {
            ctx.record(rel_u, x);
            if (auto* last = ctx.begin_record(k, x, r)) {
                last->u = r;
            }
            return ctx.finish(std::move(x), r, Termination::Converged, k);
        }
        Vector u_copy;
        if (ctx.trace() != nullptr) {
            u_copy = r;
        }
        m.apply_inv(r, uhat, cnt);
        matvec(a, uhat, z, cnt);
        const auto selected = select_omega(r, z, config.kappa, cnt);
        if (!selected) {
            ctx.record(rel_u, x);
            return ctx.finish(std::move(x), r, Termination::Breakdown, k, "Au");
        }
        omega = perturb_omega(*selected, norm2(r), norm2(z), config.omega_perturb);
        if (omega == Scalar(0.0)) {
            ctx.record(rel_u, x);
            return ctx.finish(std::move(x), r, Termination::Breakdown, k, "omega");
        }
        ctx.push_omega(omega);
        axpy(omega, uhat, x, cnt);
        axpy(-omega, z, r, cnt);
        const bool converged = ctx.record(ctx.relative(r), x);
        if (converged || k >= max_it) {
            if (auto* last = ctx.begin_record(k, x, r)) {
                last->u = std::move(u_copy);
                last->omega = omega;
            }
            return ctx.finish(std::move(x), r,
                              converged ? Termination::Converged : Termination::MaxIterations, k);
        }
        IterationRecord* rec = ctx.begin_record(k, x, r);
        if (rec != nullptr) {
            rec->u = std::move(u_copy);
        }

        e = dot_conj(q.col(0), r, cnt);
        Scalar bt = -e / c[0];
        std::copy(r.begin(), r.end(), zw.begin());
        axpy(bt, w.col(0), zw, cnt);
        std::copy(g.col(0).begin(), g.col(0).end(), gk.begin());
        scale(bt, gk, cnt);
        if (rec != nullptr) {
            rec->beta_tilde.emplace_back(j * n, bt);
        }
        for (Index s = 1; s <= n - 1; ++s) {
            bt = -dot_conj(q.col(s), zw, cnt) / c[static_cast<std::size_t>(s)];
            axpy(bt, w.col(s), zw, cnt);
            axpy(bt, g.col(s), gk, cnt);
            if (rec != nullptr) {
                rec->beta_tilde.emplace_back(j * n + s, bt);
            }
        }
        aypx(-1.0 / omega, zw, gk, cnt);
        if (close_direction(0, rec)) {
            return ctx.finish(std::move(x), r, Termination::Breakdown, k, "c");
        }
    }
}

}  // namespace mlbicgstabt
