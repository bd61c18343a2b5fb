#include "mlbicgstabt/mlbicgstabt.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "core/errors.hpp"
#include "core/matrix_market.hpp"
#include "core/precond.hpp"
#include "core/report_io.hpp"
#include "core/shadow.hpp"
#include "core/solvers.hpp"
#include "json.hpp"

namespace mb = mlbicgstabt;

struct mlb_matrix {
    mb::CsrMatrix a;
};

struct mlb_block {
    mb::DenseBlock data;
};

struct mlb_precond {
    mb::Preconditioner m;
};

struct mlb_report {
    mb::ConvergenceReport report;
};

namespace {

thread_local std::string last_error;

mlb_status fail(mlb_status status, const std::string& message) {
    last_error = message;
    return status;
}

mlb_status translate_current() {
    try {
        throw;
    } catch (const mb::ParseError& e) {
        return fail(MLB_ERR_PARSE, e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(MLB_ERR_PARSE, e.what());
    } catch (const mb::IoError& e) {
        return fail(MLB_ERR_IO, e.what());
    } catch (const mb::FactorizationError& e) {
        return fail(MLB_ERR_FACTORIZATION, e.what());
    } catch (const mb::ZeroResidualError& e) {
        return fail(MLB_ERR_ZERO_RESIDUAL, e.what());
    } catch (const mb::DimensionError& e) {
        return fail(MLB_ERR_DIMENSION, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(MLB_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(MLB_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(MLB_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(MLB_ERR_INTERNAL, "unknown error");
    }
}

template <class F>
mlb_status guarded(F&& body) {
    try {
        body();
        return MLB_OK;
    } catch (...) {
        return translate_current();
    }
}

void require(bool ok, const char* message) {
    if (!ok) {
        throw std::invalid_argument(message);
    }
}

mb::Vector single_column(const mb::DenseBlock& block, const char* what) {
    if (block.cols() != 1) {
        throw mb::DimensionError(std::string(what) + " must have exactly one column");
    }
    const auto col = block.col(0);
    return mb::Vector(col.begin(), col.end());
}

mlb_counters to_c(const mb::OpCounters& c) {
    return {c.matvec_a, c.matvec_ah, c.precond_solves, c.dot_products, c.saxpys, c.scalings};
}

constexpr const char* kMethodNames[] = {"mlbicgstabt", "mlbicgstabt-prec", "mlbicg", "bicgstab",
                                        "bicg"};

}  // namespace

extern "C" {

const char* mlb_last_error(void) { return last_error.c_str(); }

const char* mlb_status_name(mlb_status status) {
    switch (status) {
        case MLB_OK:
            return "ok";
        case MLB_ERR_INVALID_ARGUMENT:
            return "invalid argument";
        case MLB_ERR_DIMENSION:
            return "dimension mismatch";
        case MLB_ERR_PARSE:
            return "parse error";
        case MLB_ERR_IO:
            return "i/o error";
        case MLB_ERR_FACTORIZATION:
            return "factorization error";
        case MLB_ERR_ZERO_RESIDUAL:
            return "zero residual";
        case MLB_ERR_INTERNAL:
            return "internal error";
    }
    return "unknown status";
}

const char* mlb_version(void) { return "1.0.0"; }

void mlb_solver_options_default(mlb_solver_options* options) {
    if (options == nullptr) {
        return;
    }
    const mb::SolverConfig cfg;
    options->n = 1;
    options->tol = cfg.tol;
    options->max_it = cfg.max_it;
    options->kappa = cfg.kappa;
    options->seed = 0;
    options->breakdown_eps = cfg.breakdown_eps;
    options->omega_perturb = cfg.omega_perturb;
    options->track_true_error = cfg.track_true_error ? 1 : 0;
}

mlb_status mlb_method_from_string(const char* name, mlb_method* out) {
    if (name == nullptr || out == nullptr) {
        return fail(MLB_ERR_INVALID_ARGUMENT, "method: null argument");
    }
    for (int i = 0; i < 5; ++i) {
        if (std::strcmp(name, kMethodNames[i]) == 0) {
            *out = static_cast<mlb_method>(i);
            return MLB_OK;
        }
    }
    return fail(MLB_ERR_INVALID_ARGUMENT,
                std::string("unknown method '") + name +
                    "' (expected mlbicgstabt, mlbicgstabt-prec, mlbicg, bicgstab or bicg)");
}

const char* mlb_method_name(mlb_method method) {
    const int i = static_cast<int>(method);
    return i >= 0 && i < 5 ? kMethodNames[i] : "unknown";
}

mlb_status mlb_matrix_read(const char* path, mlb_matrix** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "matrix_read: null argument");
        *out = new mlb_matrix{mb::read_matrix_market(std::string(path))};
    });
}

mlb_status mlb_matrix_from_coo(int64_t rows, int64_t cols, int64_t nnz, const int64_t* row_idx,
                               const int64_t* col_idx, const mlb_complex* values,
                               mlb_matrix** out) {
    return guarded([&] {
        require(out != nullptr && rows >= 0 && cols >= 0 && nnz >= 0,
                "matrix_from_coo: bad argument");
        require(nnz == 0 || (row_idx != nullptr && col_idx != nullptr && values != nullptr),
                "matrix_from_coo: null entry arrays");
        std::vector<mb::Triplet> entries;
        entries.reserve(static_cast<std::size_t>(nnz));
        for (int64_t e = 0; e < nnz; ++e) {
            if (row_idx[e] < 0 || row_idx[e] >= rows || col_idx[e] < 0 || col_idx[e] >= cols) {
                throw mb::DimensionError("matrix_from_coo: entry " + std::to_string(e) +
                                         " is out of range");
            }
            entries.push_back({row_idx[e], col_idx[e], {values[e].re, values[e].im}});
        }
        *out = new mlb_matrix{mb::CsrMatrix::from_triplets(rows, cols, std::move(entries))};
    });
}

mlb_status mlb_matrix_write(const mlb_matrix* a, const char* path) {
    return guarded([&] {
        require(a != nullptr && path != nullptr, "matrix_write: null argument");
        mb::write_matrix_market(a->a, std::string(path));
    });
}

mlb_status mlb_matrix_info(const mlb_matrix* a, int64_t* rows, int64_t* cols, int64_t* nnz) {
    if (a == nullptr) {
        return fail(MLB_ERR_INVALID_ARGUMENT, "matrix_info: null matrix");
    }
    if (rows != nullptr) {
        *rows = a->a.rows();
    }
    if (cols != nullptr) {
        *cols = a->a.cols();
    }
    if (nnz != nullptr) {
        *nnz = a->a.nnz();
    }
    return MLB_OK;
}

void mlb_matrix_free(mlb_matrix* a) { delete a; }

mlb_status mlb_block_read(const char* path, mlb_block** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "block_read: null argument");
        *out = new mlb_block{mb::read_dense_block(std::string(path))};
    });
}

mlb_status mlb_block_from_data(int64_t rows, int64_t cols, const mlb_complex* data,
                               mlb_block** out) {
    return guarded([&] {
        require(out != nullptr && rows >= 0 && cols >= 0, "block_from_data: bad argument");
        require(rows * cols == 0 || data != nullptr, "block_from_data: null data");
        mb::DenseBlock block(rows, cols);
        for (int64_t j = 0; j < cols; ++j) {
            for (int64_t i = 0; i < rows; ++i) {
                const auto& v = data[j * rows + i];
                block(i, j) = {v.re, v.im};
            }
        }
        *out = new mlb_block{std::move(block)};
    });
}

mlb_status mlb_block_default_rhs(const mlb_matrix* a, mlb_block** out) {
    return guarded([&] {
        require(a != nullptr && out != nullptr, "block_default_rhs: null argument");
        const mb::Vector b = mb::default_rhs(a->a);
        mb::DenseBlock block(static_cast<mb::Index>(b.size()), 1);
        std::copy(b.begin(), b.end(), block.col(0).begin());
        *out = new mlb_block{std::move(block)};
    });
}

mlb_status mlb_block_column(const mlb_block* block, int64_t col, mlb_block** out) {
    return guarded([&] {
        require(block != nullptr && out != nullptr, "block_column: null argument");
        if (col < 0 || col >= block->data.cols()) {
            throw mb::DimensionError("block_column: column " + std::to_string(col) +
                                     " out of range (block has " +
                                     std::to_string(block->data.cols()) + " columns)");
        }
        mb::DenseBlock c(block->data.rows(), 1);
        const auto src = block->data.col(col);
        std::copy(src.begin(), src.end(), c.col(0).begin());
        *out = new mlb_block{std::move(c)};
    });
}

mlb_status mlb_block_info(const mlb_block* block, int64_t* rows, int64_t* cols) {
    if (block == nullptr) {
        return fail(MLB_ERR_INVALID_ARGUMENT, "block_info: null block");
    }
    if (rows != nullptr) {
        *rows = block->data.rows();
    }
    if (cols != nullptr) {
        *cols = block->data.cols();
    }
    return MLB_OK;
}

mlb_status mlb_block_get(const mlb_block* block, mlb_complex* out, int64_t count) {
    if (block == nullptr || out == nullptr) {
        return fail(MLB_ERR_INVALID_ARGUMENT, "block_get: null argument");
    }
    const auto data = block->data.data();
    if (count < static_cast<int64_t>(data.size())) {
        return fail(MLB_ERR_DIMENSION, "block_get: output buffer too small");
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
        out[i] = {data[i].real(), data[i].imag()};
    }
    return MLB_OK;
}

void mlb_block_free(mlb_block* block) { delete block; }

mlb_status mlb_precond_create(const mlb_matrix* a, const char* spec, mlb_precond** out) {
    return guarded([&] {
        require(a != nullptr && spec != nullptr && out != nullptr,
                "precond_create: null argument");
        *out = new mlb_precond{mb::Preconditioner::from_spec(a->a, spec)};
    });
}

void mlb_precond_free(mlb_precond* m) { delete m; }

mlb_status mlb_shadow_build(const mlb_block* r0, int64_t n, uint64_t seed, mlb_block** out) {
    return guarded([&] {
        require(r0 != nullptr && out != nullptr, "shadow_build: null argument");
        require(n >= 1, "shadow_build: n must be at least 1");
        const mb::Vector r = single_column(r0->data, "shadow_build: r0");
        mb::ShadowSpec spec;
        spec.n = n;
        spec.seed = seed;
        *out = new mlb_block{mb::build_shadow(r, spec)};
    });
}

mlb_status mlb_solve(const mlb_matrix* a, const mlb_block* b, const mlb_block* x0,
                     const mlb_block* q, const mlb_precond* m, mlb_method method,
                     const mlb_solver_options* options, mlb_block** x_out,
                     mlb_report** report_out) {
    return guarded([&] {
        require(a != nullptr && b != nullptr && report_out != nullptr,
                "solve: matrix, right-hand side and report output are required");
        mlb_solver_options opts;
        mlb_solver_options_default(&opts);
        if (options != nullptr) {
            opts = *options;
        }
        mb::SolverConfig cfg;
        cfg.tol = opts.tol;
        cfg.max_it = opts.max_it;
        cfg.kappa = opts.kappa;
        cfg.breakdown_eps = opts.breakdown_eps;
        cfg.omega_perturb = opts.omega_perturb;
        cfg.track_true_error = opts.track_true_error != 0;
        if (cfg.max_it < 0) {
            throw std::invalid_argument("solve: max_it must be >= 0");
        }

        const mb::CsrMatrix& mat = a->a;
        const mb::Vector rhs = single_column(b->data, "solve: right-hand side");
        mb::Vector guess;
        if (x0 != nullptr) {
            guess = single_column(x0->data, "solve: initial guess");
        }
        const bool has_precond = m != nullptr && m->m.kind() != mb::Preconditioner::Kind::Identity;
        if (has_precond &&
            (method == MLB_METHOD_MLBICGSTABT || method == MLB_METHOD_MLBICG)) {
            throw std::invalid_argument(std::string("solve: ") + mlb_method_name(method) +
                                        " takes no preconditioner; use mlbicgstabt-prec");
        }
        std::optional<mb::Preconditioner> identity;
        const mb::Preconditioner* prec = m != nullptr ? &m->m : nullptr;
        if (prec == nullptr) {
            identity = mb::Preconditioner::identity(mat.rows());
            prec = &*identity;
        }

        const bool needs_shadow = method == MLB_METHOD_MLBICGSTABT ||
                                  method == MLB_METHOD_MLBICGSTABT_PREC ||
                                  method == MLB_METHOD_MLBICG;
        mb::DenseBlock shadow;
        if (needs_shadow) {
            if (q != nullptr) {
                shadow = q->data;
            } else {
                if (opts.n < 1) {
                    throw std::invalid_argument("solve: n must be at least 1");
                }
                if (static_cast<mb::Index>(rhs.size()) != mat.rows() || mat.rows() != mat.cols()) {
                    throw mb::DimensionError("solve: matrix must be square and match b");
                }
                const mb::Vector r0 = guess.empty() ? rhs : mb::residual(mat, guess, rhs);
                if (mb::norm2(r0) == 0.0) {
                    // Nothing to solve; the solver stops at k = 0 without
                    // touching Q.
                    shadow = mb::DenseBlock(mat.rows(), opts.n);
                } else {
                    mb::ShadowSpec spec;
                    spec.n = opts.n;
                    spec.seed = opts.seed;
                    shadow = mb::build_shadow(r0, spec);
                }
            }
        }

        mb::SolveResult result;
        switch (method) {
            case MLB_METHOD_MLBICGSTABT:
                result = mb::solve_ml_bicgstabt(mat, rhs, guess, shadow, cfg);
                break;
            case MLB_METHOD_MLBICGSTABT_PREC:
                result = mb::solve_ml_bicgstabt_prec(mat, rhs, guess, shadow, *prec, cfg);
                break;
            case MLB_METHOD_MLBICG:
                result = mb::solve_ml_bicg(mat, rhs, guess, shadow, cfg);
                break;
            case MLB_METHOD_BICGSTAB:
                result = mb::solve_bicgstab(mat, rhs, guess, *prec, cfg);
                break;
            case MLB_METHOD_BICG:
                result = mb::solve_bicg(mat, rhs, guess, *prec, cfg);
                break;
            default:
                throw std::invalid_argument("solve: unknown method");
        }

        if (x_out != nullptr) {
            mb::DenseBlock xb(static_cast<mb::Index>(result.x.size()), 1);
            std::copy(result.x.begin(), result.x.end(), xb.col(0).begin());
            *x_out = new mlb_block{std::move(xb)};
        }
        *report_out = new mlb_report{std::move(result.report)};
    });
}

mlb_status mlb_report_get_summary(const mlb_report* report, mlb_report_summary* out) {
    if (report == nullptr || out == nullptr) {
        return fail(MLB_ERR_INVALID_ARGUMENT, "report_get_summary: null argument");
    }
    const auto& r = report->report;
    out->flag = mb::flag_code(r.flag);
    out->n = r.n;
    out->iterations = r.iterations;
    out->tol = r.tol;
    out->final_residual = r.residual_history.empty() ? 0.0 : r.residual_history.back();
    out->true_error = r.true_error;
    out->residual_gap = r.residual_gap;
    out->counters = to_c(r.counters);
    out->setup_counters = to_c(r.setup_counters);
    return MLB_OK;
}

const char* mlb_report_method(const mlb_report* report) {
    return report != nullptr ? report->report.method.c_str() : "";
}

const char* mlb_report_flag_name(const mlb_report* report) {
    return report != nullptr ? mb::termination_name(report->report.flag) : "";
}

const char* mlb_report_breakdown_site(const mlb_report* report) {
    return report != nullptr ? report->report.breakdown_site.c_str() : "";
}

int64_t mlb_report_history_length(const mlb_report* report) {
    return report != nullptr ? static_cast<int64_t>(report->report.residual_history.size()) : 0;
}

mlb_status mlb_report_history(const mlb_report* report, double* out, int64_t count) {
    if (report == nullptr || out == nullptr) {
        return fail(MLB_ERR_INVALID_ARGUMENT, "report_history: null argument");
    }
    const auto& h = report->report.residual_history;
    if (count < static_cast<int64_t>(h.size())) {
        return fail(MLB_ERR_DIMENSION, "report_history: output buffer too small");
    }
    std::copy(h.begin(), h.end(), out);
    return MLB_OK;
}

int64_t mlb_report_true_error_length(const mlb_report* report) {
    return report != nullptr ? static_cast<int64_t>(report->report.true_error_history.size()) : 0;
}

mlb_status mlb_report_true_error_history(const mlb_report* report, double* out, int64_t count) {
    if (report == nullptr || out == nullptr) {
        return fail(MLB_ERR_INVALID_ARGUMENT, "report_true_error_history: null argument");
    }
    const auto& h = report->report.true_error_history;
    if (count < static_cast<int64_t>(h.size())) {
        return fail(MLB_ERR_DIMENSION, "report_true_error_history: output buffer too small");
    }
    std::copy(h.begin(), h.end(), out);
    return MLB_OK;
}

int64_t mlb_report_omega_length(const mlb_report* report) {
    return report != nullptr ? static_cast<int64_t>(report->report.omega_history.size()) : 0;
}

mlb_status mlb_report_omega_history(const mlb_report* report, mlb_complex* out, int64_t count) {
    if (report == nullptr || out == nullptr) {
        return fail(MLB_ERR_INVALID_ARGUMENT, "report_omega_history: null argument");
    }
    const auto& h = report->report.omega_history;
    if (count < static_cast<int64_t>(h.size())) {
        return fail(MLB_ERR_DIMENSION, "report_omega_history: output buffer too small");
    }
    for (std::size_t i = 0; i < h.size(); ++i) {
        out[i] = {h[i].real(), h[i].imag()};
    }
    return MLB_OK;
}

mlb_status mlb_report_write(const mlb_report* report, const char* format, const char* path) {
    return guarded([&] {
        require(report != nullptr && format != nullptr && path != nullptr,
                "report_write: null argument");
        mb::write_report(report->report, mb::parse_report_format(format), path);
    });
}

mlb_status mlb_report_format(const mlb_report* report, const char* format, char** out) {
    return guarded([&] {
        require(report != nullptr && format != nullptr && out != nullptr,
                "report_format: null argument");
        const std::string text =
            mb::format_report(report->report, mb::parse_report_format(format));
        char* buf = static_cast<char*>(std::malloc(text.size() + 1));
        if (buf == nullptr) {
            throw std::bad_alloc();
        }
        std::memcpy(buf, text.c_str(), text.size() + 1);
        *out = buf;
    });
}

void mlb_string_free(char* s) { std::free(s); }

void mlb_report_free(mlb_report* report) { delete report; }

}  // extern "C"
