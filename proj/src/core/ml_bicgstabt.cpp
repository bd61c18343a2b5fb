#include <algorithm>

#include "core/errors.hpp"
#include "core/index.hpp"
#include "core/solver_common.hpp"

namespace mlbicgstabt {

namespace {

void check_shadow(const CsrMatrix& a, const DenseBlock& q, const char* method) {
    if (q.cols() < 1 || q.rows() != a.rows()) {
        throw DimensionError(std::string(method) + ": shadow block must be N x n with n >= 1");
    }
}

}  // namespace

// Storage follows the circular layout: g_s, w_s and c_s live in slot s mod n,
// which is also r_n(s + 1) - 1, the index of the shadow vector paired with
// them. A slot is overwritten only after the iteration has consumed it, so
// g_k and w_k are built in scratch vectors first.
SolveResult solve_ml_bicgstabt(const CsrMatrix& a, std::span<const Scalar> b,
                               std::span<const Scalar> x0, const DenseBlock& q,
                               const SolverConfig& config, SolveTrace* trace) {
    check_shadow(a, q, "mlbicgstabt");
    const Index n = q.cols();
    detail::SolveContext ctx("mlbicgstabt", n, a, b, x0, config, trace);
    OpCounters* cnt = &ctx.counters;
    const Index dim = a.rows();

    DenseBlock f(dim, n - 1);
    for (Index i = 0; i + 1 < n; ++i) {
        matvec_adjoint(a, q.col(i), f.col(i), cnt);
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
    std::copy(r.begin(), r.end(), g.col(0).begin());
    matvec(a, g.col(0), w.col(0), cnt);
    c[0] = dot_conj(q.col(0), w.col(0), cnt);
    if (ctx.near_zero(c[0], q_norm[0], norm2(w.col(0)))) {
        return ctx.finish(std::move(x), r, Termination::Breakdown, 0, "c");
    }
    // e = q_{r_n(k+1)}^H r_k: the numerator of the next alpha, and also the
    // first inner product of the next z_w sweep, computed once.
    Scalar e = dot_conj(q.col(0), r, cnt);
    Scalar omega = 1.0;
    ctx.mark_setup_done();

    Vector zw(static_cast<std::size_t>(dim));
    Vector gk(static_cast<std::size_t>(dim));
    Vector au(static_cast<std::size_t>(dim));
    const Index max_it = ctx.max_it();

    for (Index k = 1;; ++k) {
        const auto [j, i] = split_index(n, k);
        const Index prev = (k - 1) % n;
        const Scalar alpha = e / c[static_cast<std::size_t>(prev)];
        axpy(alpha, g.col(prev), x, cnt);
        IterationRecord* rec = nullptr;

        if (i < n) {
            axpy(-alpha, w.col(prev), r, cnt);
            const bool converged = ctx.record(ctx.relative(r), x);
            if (converged || k >= max_it) {
                ctx.begin_record(k, x, r);
                return ctx.finish(std::move(x), r,
                                  converged ? Termination::Converged : Termination::MaxIterations, k);
            }
            rec = ctx.begin_record(k, x, r);
            e = dot_conj(q.col(i), r, cnt);

            std::copy(r.begin(), r.end(), zw.begin());
            std::fill(gk.begin(), gk.end(), Scalar(0.0));
            const Index s0 = std::max<Index>(k - n, 0);
            for (Index s = s0; s <= j * n - 1; ++s) {
                const Index slot = s % n;
                const Scalar num = s == s0 ? e : dot_conj(q.col(slot), zw, cnt);
                const Scalar bt = -num / c[static_cast<std::size_t>(slot)];
                axpy(bt, w.col(slot), zw, cnt);
                axpy(bt, g.col(slot), gk, cnt);
                if (rec != nullptr) {
                    rec->beta_tilde.emplace_back(s, bt);
                }
            }
            aypx(-1.0 / omega, zw, gk, cnt);
            for (Index s = j * n; s <= k - 1; ++s) {
                const Index slot = s % n;
                const Scalar beta = -dot_conj(f.col(slot), gk, cnt) / c[static_cast<std::size_t>(slot)];
                axpy(beta, g.col(slot), gk, cnt);
                if (rec != nullptr) {
                    rec->beta.emplace_back(s, beta);
                }
            }
        } else {
            // r now holds u_k = r_{k-1} - alpha_k w_{k-1}.
            axpy(-alpha, w.col(prev), r, cnt);
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
            matvec(a, r, au, cnt);
            const auto selected = select_omega(r, au, config.kappa, cnt);
            if (!selected) {
                ctx.record(rel_u, x);
                return ctx.finish(std::move(x), r, Termination::Breakdown, k, "Au");
            }
            omega = perturb_omega(*selected, norm2(r), norm2(au), config.omega_perturb);
            if (omega == Scalar(0.0)) {
                ctx.record(rel_u, x);
                return ctx.finish(std::move(x), r, Termination::Breakdown, k, "omega");
            }
            ctx.push_omega(omega);
            axpy(omega, r, x, cnt);
            axpy(-omega, au, r, cnt);
            const bool converged = ctx.record(ctx.relative(r), x);
            if (converged || k >= max_it) {
                if (auto* last = ctx.begin_record(k, x, r)) {
                    last->u = std::move(u_copy);
                    last->omega = omega;
                }
                return ctx.finish(std::move(x), r,
                                  converged ? Termination::Converged : Termination::MaxIterations, k);
            }
            rec = ctx.begin_record(k, x, r);
            if (rec != nullptr) {
                rec->u = std::move(u_copy);
            }
            e = dot_conj(q.col(0), r, cnt);

            std::copy(r.begin(), r.end(), zw.begin());
            std::fill(gk.begin(), gk.end(), Scalar(0.0));
            for (Index s = j * n; s <= k - 1; ++s) {
                const Index slot = s % n;
                const Scalar num = s == j * n ? e : dot_conj(q.col(slot), zw, cnt);
                const Scalar bt = -num / c[static_cast<std::size_t>(slot)];
                axpy(bt, w.col(slot), zw, cnt);
                axpy(bt, g.col(slot), gk, cnt);
                if (rec != nullptr) {
                    rec->beta_tilde.emplace_back(s, bt);
                }
            }
            aypx(-1.0 / omega, zw, gk, cnt);
        }

        const Index slot = k % n;
        std::copy(gk.begin(), gk.end(), g.col(slot).begin());
        matvec(a, g.col(slot), w.col(slot), cnt);
        c[static_cast<std::size_t>(slot)] = dot_conj(q.col(i % n), w.col(slot), cnt);
        if (rec != nullptr) {
            rec->g.assign(g.col(slot).begin(), g.col(slot).end());
            rec->w.assign(w.col(slot).begin(), w.col(slot).end());
            rec->omega = omega;
            rec->counters = ctx.counters;
        }
        if (ctx.near_zero(c[static_cast<std::size_t>(slot)], q_norm[static_cast<std::size_t>(i % n)],
                          norm2(w.col(slot)))) {
            return ctx.finish(std::move(x), r, Termination::Breakdown, k, "c");
        }
    }
}

}  // namespace mlbicgstabt
