#include <cmath>

#include "core/errors.hpp"
#include "core/solvers.hpp"

namespace mlbicgstabt {

std::optional<Scalar> select_omega(std::span<const Scalar> u, std::span<const Scalar> au,
                                   double kappa, OpCounters* counters) {
    if (u.size() != au.size()) {
        throw DimensionError("select_omega: length mismatch");
    }
    const double au_sq = dot_conj(au, au, counters).real();
    if (au_sq == 0.0) {
        return std::nullopt;
    }
    const Scalar rho = dot_conj(au, u, counters);
    Scalar omega = rho / au_sq;
    if (kappa > 0.0) {
        // Sleijpen-van der Vorst: keep |cos(u, Au)| from collapsing the step.
        const double cosine = std::abs(rho) / (std::sqrt(au_sq) * norm2(u));
        if (cosine < kappa && cosine != 0.0) {
            omega *= kappa / cosine;
        }
    }
    return omega;
}

Scalar perturb_omega(Scalar omega, double u_norm, double au_norm, double rel) {
    if (au_norm == 0.0) {
        return omega;
    }
    const double threshold = rel * u_norm / au_norm;
    const double mag = std::abs(omega);
    if (mag >= threshold) {
        return omega;
    }
    if (mag == 0.0) {
        return Scalar(threshold);
    }
    return omega / mag * threshold;
}

}  // namespace mlbicgstabt
