#pragma once

// Bookkeeping shared by the iterative methods: input checks, the residual
// history, trace snapshots and the final report.

#include <cmath>
#include <string>

#include "core/solvers.hpp"

namespace mlbicgstabt::detail {

class SolveContext {
public:
    SolveContext(std::string method, Index n, const CsrMatrix& a, std::span<const Scalar> b,
                 std::span<const Scalar> x0, const SolverConfig& config, SolveTrace* trace);

    OpCounters counters;

    Index max_it() const noexcept { return max_it_; }
    double tol() const noexcept { return config_.tol; }
    const SolverConfig& config() const noexcept { return config_; }
    SolveTrace* trace() const noexcept { return trace_; }

    Vector initial_guess() const;

    double relative(std::span<const Scalar> r) const { return norm2(r) / bnorm_; }

    /// Appends one history entry for the pair (x, r); returns true when the
    /// relative residual is below tol.
    bool record(double rel, std::span<const Scalar> x);

    bool near_zero(Scalar divisor, double left_norm, double right_norm) const {
        return std::abs(divisor) <= config_.breakdown_eps * left_norm * right_norm;
    }

    void mark_setup_done() { report_.setup_counters = counters; }
    void push_omega(Scalar omega) { report_.omega_history.push_back(omega); }

    SolveResult finish(Vector x, std::span<const Scalar> r, Termination flag, Index iterations,
                       std::string site = {});

    IterationRecord* begin_record(Index k, std::span<const Scalar> x, std::span<const Scalar> r);

private:
    const CsrMatrix& a_;
    std::span<const Scalar> b_;
    std::span<const Scalar> x0_;
    const SolverConfig& config_;
    SolveTrace* trace_;
    double bnorm_ = 1.0;
    Index max_it_ = 0;
    ConvergenceReport report_;
};

}  // namespace mlbicgstabt::detail
