#include "core/shadow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "core/errors.hpp"
#include "core/index.hpp"

namespace mlbicgstabt {

std::vector<double> shadow_normals(std::uint64_t seed, std::size_t count) {
    std::mt19937_64 gen(seed);
    constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53
    std::vector<double> out(count);
    for (auto& z : out) {
        const double u1 = static_cast<double>((gen() >> 11) + 1) * kInv53;
        const double u2 = static_cast<double>(gen() >> 11) * kInv53;
        z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    return out;
}

DenseBlock build_shadow(std::span<const Scalar> r0, const ShadowSpec& spec) {
    if (spec.n < 1) {
        throw std::invalid_argument("shadow: n must be >= 1");
    }
    const auto rows = static_cast<Index>(r0.size());
    if (spec.mode == ShadowSpec::Mode::Provided) {
        if (spec.provided.rows() != rows || spec.provided.cols() != spec.n) {
            throw DimensionError("shadow: provided block is " + std::to_string(spec.provided.rows()) +
                                 "x" + std::to_string(spec.provided.cols()) + ", expected " +
                                 std::to_string(rows) + "x" + std::to_string(spec.n));
        }
        return spec.provided;
    }
    if (std::all_of(r0.begin(), r0.end(), [](const Scalar& v) { return v == Scalar(0.0); })) {
        throw ZeroResidualError("shadow: initial residual is zero; x0 already solves the system");
    }

    DenseBlock q(rows, spec.n);
    std::copy(r0.begin(), r0.end(), q.col(0).begin());
    const auto normals =
        shadow_normals(spec.seed, static_cast<std::size_t>(rows * (spec.n - 1)));
    std::size_t next = 0;
    for (Index j = 1; j < spec.n; ++j) {
        for (auto& v : q.col(j)) {
            v = normals[next++] < 0.0 ? -1.0 : 1.0;
        }
    }
    return q;
}

LeftLanczosSequence::LeftLanczosSequence(const CsrMatrix& a, const DenseBlock& q,
                                         OpCounters* counters)
    : a_(&a), q_(&q), counters_(counters), window_(static_cast<std::size_t>(q.cols())) {
    if (q.cols() < 1 || q.rows() != a.cols() || a.rows() != a.cols()) {
        throw DimensionError("left Lanczos vectors: Q must be N x n with n >= 1 for square A");
    }
}

const Vector& LeftLanczosSequence::next() {
    ++k_;
    const Index n = q_->cols();
    auto& slot = window_[static_cast<std::size_t>((k_ - 1) % n)];
    if (k_ <= n) {
        const auto col = q_->col(k_ - 1);
        slot.assign(col.begin(), col.end());
    } else {
        slot = matvec_adjoint(*a_, slot, counters_);
    }
    return slot;
}

Vector left_lanczos_vector(const CsrMatrix& a, const DenseBlock& q, Index k, OpCounters* counters) {
    if (k < 1) {
        throw std::invalid_argument("left_lanczos_vector: k must be >= 1");
    }
    if (q.rows() != a.rows() || a.rows() != a.cols()) {
        throw DimensionError("left_lanczos_vector: Q rows must match square A");
    }
    const auto [power, phase] = split_index(q.cols(), k);
    const auto col = q.col(phase - 1);
    Vector p(col.begin(), col.end());
    for (Index t = 0; t < power; ++t) {
        p = matvec_adjoint(a, p, counters);
    }
    return p;
}

}  // namespace mlbicgstabt
