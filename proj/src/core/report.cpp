#include <cmath>
#include <stdexcept>

#include "core/errors.hpp"
#include "core/solver_common.hpp"

namespace mlbicgstabt {

void SolverConfig::validate() const {
    if (!(tol > 0.0)) {
        throw std::invalid_argument("solver: tol must be > 0");
    }
    if (max_it < 0) {
        throw std::invalid_argument("solver: max_it must be >= 1 (or 0 for the 10 N default)");
    }
    if (!(kappa >= 0.0)) {
        throw std::invalid_argument("solver: kappa must be >= 0");
    }
    if (!(breakdown_eps >= 0.0) || !(omega_perturb >= 0.0)) {
        throw std::invalid_argument("solver: breakdown_eps and omega_perturb must be >= 0");
    }
}

int flag_code(Termination t) noexcept {
    switch (t) {
        case Termination::Converged:
            return 0;
        case Termination::MaxIterations:
            return 1;
        case Termination::Breakdown:
            return -1;
    }
    return -1;
}

const char* termination_name(Termination t) noexcept {
    switch (t) {
        case Termination::Converged:
            return "converged";
        case Termination::MaxIterations:
            return "max_iterations";
        case Termination::Breakdown:
            return "breakdown";
    }
    return "breakdown";
}

double residual_gap(const CsrMatrix& a, std::span<const Scalar> x, std::span<const Scalar> b,
                    std::span<const Scalar> r_computed) {
    Vector diff = residual(a, x, b);
    if (diff.size() != r_computed.size()) {
        throw DimensionError("residual_gap: residual length mismatch");
    }
    for (std::size_t i = 0; i < diff.size(); ++i) {
        diff[i] -= r_computed[i];
    }
    double bnorm = norm2(b);
    if (bnorm == 0.0) {
        bnorm = 1.0;
    }
    return norm2(diff) / bnorm;
}

namespace detail {

SolveContext::SolveContext(std::string method, Index n, const CsrMatrix& a,
                           std::span<const Scalar> b, std::span<const Scalar> x0,
                           const SolverConfig& config, SolveTrace* trace)
    : a_(a), b_(b), x0_(x0), config_(config), trace_(trace) {
    config.validate();
    if (a.rows() != a.cols()) {
        throw DimensionError(method + ": matrix must be square");
    }
    if (static_cast<Index>(b.size()) != a.rows()) {
        throw DimensionError(method + ": right-hand side has length " + std::to_string(b.size()) +
                             ", expected " + std::to_string(a.rows()));
    }
    if (!x0.empty() && static_cast<Index>(x0.size()) != a.rows()) {
        throw DimensionError(method + ": initial guess has wrong length");
    }
    bnorm_ = norm2(b);
    if (bnorm_ == 0.0) {
        bnorm_ = 1.0;
    }
    max_it_ = config.max_it > 0 ? config.max_it : 10 * a.rows();
    report_.method = std::move(method);
    report_.n = n;
    report_.tol = config.tol;
    if (trace_ != nullptr) {
        trace_->iterations.clear();
    }
}

Vector SolveContext::initial_guess() const {
    if (x0_.empty()) {
        return Vector(b_.size(), Scalar(0.0));
    }
    return Vector(x0_.begin(), x0_.end());
}

bool SolveContext::record(double rel, std::span<const Scalar> x) {
    report_.residual_history.push_back(rel);
    if (config_.track_true_error) {
        report_.true_error_history.push_back(norm2(residual(a_, x, b_)) / bnorm_);
    }
    return rel < config_.tol;
}

IterationRecord* SolveContext::begin_record(Index k, std::span<const Scalar> x,
                                            std::span<const Scalar> r) {
    if (trace_ == nullptr) {
        return nullptr;
    }
    auto& rec = trace_->iterations.emplace_back();
    rec.k = k;
    rec.x.assign(x.begin(), x.end());
    rec.r.assign(r.begin(), r.end());
    return &rec;
}

SolveResult SolveContext::finish(Vector x, std::span<const Scalar> r, Termination flag,
                                 Index iterations, std::string site) {
    report_.flag = flag;
    report_.iterations = iterations;
    report_.breakdown_site = std::move(site);
    report_.counters = counters;
    const Vector true_r = residual(a_, x, b_);
    report_.true_error = norm2(true_r) / bnorm_;
    double gap = 0.0;
    for (std::size_t i = 0; i < true_r.size(); ++i) {
        gap += std::norm(true_r[i] - r[i]);
    }
    report_.residual_gap = std::sqrt(gap) / bnorm_;
    return SolveResult{std::move(x), std::move(report_)};
}

}  // namespace detail
}  // namespace mlbicgstabt
