#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "core/linalg.hpp"
#include "core/precond.hpp"

namespace mlbicgstabt {

struct SolverConfig {
    /// Stop once ||r_k||_2 / ||b||_2 < tol, measured on the recursively
    /// updated residual.
    double tol = 1e-7;
    /// Upper bound on k-iterations; 0 means 10 N.
    Index max_it = 0;
    /// Minimization control for omega; 0 is plain residual minimization.
    double kappa = 0.0;
    /// A divisor d is treated as zero when |d| <= breakdown_eps * |x| * |y|,
    /// where x and y are the two vectors whose inner product produced d.
    double breakdown_eps = 1e-14;
    /// omega is pushed away from zero to at least omega_perturb * |u| / |Au|.
    double omega_perturb = 1e-14;
    /// Record ||b - A x_k|| / ||b|| every iteration (extra matvec, uncounted).
    bool track_true_error = false;

    /// Throws std::invalid_argument on out-of-range settings.
    void validate() const;
};

enum class Termination { Converged, MaxIterations, Breakdown };

/// 0 converged, 1 iteration limit, -1 breakdown.
int flag_code(Termination t) noexcept;
const char* termination_name(Termination t) noexcept;

struct ConvergenceReport {
    std::string method;
    Index n = 1;
    Termination flag = Termination::MaxIterations;
    std::string breakdown_site;
    Index iterations = 0;
    double tol = 0.0;
    /// ||r_k|| / ||b|| for k = 0 .. iterations.
    std::vector<double> residual_history;
    /// ||b - A x_k|| / ||b||, same indexing; empty unless tracked.
    std::vector<double> true_error_history;
    double true_error = 0.0;
    double residual_gap = 0.0;
    /// Totals for the whole solve, and the part spent before the first
    /// k-iteration (shadow products, initial residual, first direction).
    OpCounters counters;
    OpCounters setup_counters;
    std::vector<Scalar> omega_history;

    friend bool operator==(const ConvergenceReport&, const ConvergenceReport&) = default;
};

struct SolveResult {
    Vector x;
    ConvergenceReport report;
};

/// Snapshot of one k-iteration. Vectors that were not produced before the
/// iteration ended (early exit) are left empty.
struct IterationRecord {
    Index k = 0;
    Vector x;
    Vector r;
    Vector u;  ///< only at cycle ends
    Vector g;  ///< direction g_k (hat-g_k for the BiCG-type methods)
    Vector w;  ///< A g_k, or A M^{-1} g_k when preconditioned
    Scalar omega = 1.0;
    std::vector<std::pair<Index, Scalar>> beta_tilde;  ///< (s, beta~_s^(k))
    std::vector<std::pair<Index, Scalar>> beta;        ///< (s, beta_s^(k))
    OpCounters counters;
};

struct SolveTrace {
    std::vector<IterationRecord> iterations;
};

/// Multiple-starting BiCG with left vectors p_k = (A^H)^{g_n(k)} q_{r_n(k)}.
SolveResult solve_ml_bicg(const CsrMatrix& a, std::span<const Scalar> b,
                          std::span<const Scalar> x0, const DenseBlock& q,
                          const SolverConfig& config, SolveTrace* trace = nullptr);

/// ML(n)BiCGStab with A^H: f_i = A^H q_i are formed once, then every
/// k-iteration refreshes w_k = A g_k. Written against the flat counter k and
/// the index functions.
SolveResult solve_ml_bicgstabt(const CsrMatrix& a, std::span<const Scalar> b,
                               std::span<const Scalar> x0, const DenseBlock& q,
                               const SolverConfig& config, SolveTrace* trace = nullptr);

/// Right-preconditioned variant (A M^{-1} y = b, x = M^{-1} y) in the split
/// cycle/phase loop form, with f_i = M^{-H} A^H q_i.
SolveResult solve_ml_bicgstabt_prec(const CsrMatrix& a, std::span<const Scalar> b,
                                    std::span<const Scalar> x0, const DenseBlock& q,
                                    const Preconditioner& m, const SolverConfig& config,
                                    SolveTrace* trace = nullptr);

/// Right-preconditioned BiCGStab with shadow vector r0.
SolveResult solve_bicgstab(const CsrMatrix& a, std::span<const Scalar> b,
                           std::span<const Scalar> x0, const Preconditioner& m,
                           const SolverConfig& config, SolveTrace* trace = nullptr);

/// Preconditioned BiCG with shadow residual r0; uses A^H and M^{-H}.
SolveResult solve_bicg(const CsrMatrix& a, std::span<const Scalar> b,
                       std::span<const Scalar> x0, const Preconditioner& m,
                       const SolverConfig& config, SolveTrace* trace = nullptr);

/// omega = (Au)^H u / ||Au||^2, optionally enlarged so that the cosine between
/// u and Au is at least kappa. nullopt when Au == 0.
std::optional<Scalar> select_omega(std::span<const Scalar> u, std::span<const Scalar> au,
                                   double kappa, OpCounters* counters = nullptr);

/// Moves omega off zero: if |omega| < rel * |u| / |Au| it is replaced by that
/// threshold with omega's phase (positive real when omega == 0).
Scalar perturb_omega(Scalar omega, double u_norm, double au_norm, double rel);

/// ||(b - A x) - r|| / ||b||  (||b|| == 0 is treated as 1).
double residual_gap(const CsrMatrix& a, std::span<const Scalar> x, std::span<const Scalar> b,
                    std::span<const Scalar> r_computed);

}  // namespace mlbicgstabt
