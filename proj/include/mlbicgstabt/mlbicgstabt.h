#ifndef MLBICGSTABT_H
#define MLBICGSTABT_H

#include <stddef.h>
#include <stdint.h>

#if defined(MLB_BUILDING_LIBRARY)
#define MLB_API __attribute__((visibility("default")))
#else
#define MLB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns a status; on failure mlb_last_error() holds a
 * message for the calling thread until its next failing call. */
typedef enum mlb_status {
    MLB_OK = 0,
    MLB_ERR_INVALID_ARGUMENT = 1,
    MLB_ERR_DIMENSION = 2,
    MLB_ERR_PARSE = 3,
    MLB_ERR_IO = 4,
    MLB_ERR_FACTORIZATION = 5,
    MLB_ERR_ZERO_RESIDUAL = 6,
    MLB_ERR_INTERNAL = 7
} mlb_status;

typedef enum mlb_method {
    MLB_METHOD_MLBICGSTABT = 0,
    MLB_METHOD_MLBICGSTABT_PREC = 1,
    MLB_METHOD_MLBICG = 2,
    MLB_METHOD_BICGSTAB = 3,
    MLB_METHOD_BICG = 4
} mlb_method;

typedef struct mlb_complex {
    double re;
    double im;
} mlb_complex;

typedef struct mlb_counters {
    uint64_t matvec_a;
    uint64_t matvec_ah;
    uint64_t precond_solves;
    uint64_t dot_products;
    uint64_t saxpys;
    uint64_t scalings;
} mlb_counters;

typedef struct mlb_solver_options {
    int64_t n;              /* shadow dimension; ignored by bicg/bicgstab */
    double tol;             /* on the recursive relative residual */
    int64_t max_it;         /* 0: ten times the matrix order */
    double kappa;           /* 0: plain residual minimization for omega */
    uint64_t seed;          /* Rademacher shadow block when q is not given */
    double breakdown_eps;
    double omega_perturb;
    int track_true_error;   /* nonzero: record ||b - A x_k|| / ||b|| */
} mlb_solver_options;

typedef struct mlb_report_summary {
    int flag;               /* 0 converged, 1 iteration limit, -1 breakdown */
    int64_t n;
    int64_t iterations;
    double tol;
    double final_residual;  /* last recursive relative residual */
    double true_error;
    double residual_gap;
    mlb_counters counters;
    mlb_counters setup_counters;
} mlb_report_summary;

typedef struct mlb_matrix mlb_matrix;
typedef struct mlb_block mlb_block;
typedef struct mlb_precond mlb_precond;
typedef struct mlb_report mlb_report;

MLB_API const char* mlb_last_error(void);
MLB_API const char* mlb_status_name(mlb_status status);
MLB_API const char* mlb_version(void);

MLB_API void mlb_solver_options_default(mlb_solver_options* options);
MLB_API mlb_status mlb_method_from_string(const char* name, mlb_method* out);
MLB_API const char* mlb_method_name(mlb_method method);

/* Sparse matrices. Indices passed to mlb_matrix_from_coo are 0-based and
 * duplicates are summed. */
MLB_API mlb_status mlb_matrix_read(const char* path, mlb_matrix** out);
MLB_API mlb_status mlb_matrix_from_coo(int64_t rows, int64_t cols, int64_t nnz,
                                       const int64_t* row_idx, const int64_t* col_idx,
                                       const mlb_complex* values, mlb_matrix** out);
MLB_API mlb_status mlb_matrix_write(const mlb_matrix* a, const char* path);
MLB_API mlb_status mlb_matrix_info(const mlb_matrix* a, int64_t* rows, int64_t* cols,
                                   int64_t* nnz);
MLB_API void mlb_matrix_free(mlb_matrix* a);

/* Dense column-major blocks (right-hand sides, initial guesses, shadow
 * blocks, solutions). */
MLB_API mlb_status mlb_block_read(const char* path, mlb_block** out);
MLB_API mlb_status mlb_block_from_data(int64_t rows, int64_t cols, const mlb_complex* data,
                                       mlb_block** out);
MLB_API mlb_status mlb_block_default_rhs(const mlb_matrix* a, mlb_block** out);
MLB_API mlb_status mlb_block_column(const mlb_block* block, int64_t col, mlb_block** out);
MLB_API mlb_status mlb_block_info(const mlb_block* block, int64_t* rows, int64_t* cols);
MLB_API mlb_status mlb_block_get(const mlb_block* block, mlb_complex* out, int64_t count);
MLB_API void mlb_block_free(mlb_block* block);

/* spec: "none", "jacobi" or "ilut:<droptol>". */
MLB_API mlb_status mlb_precond_create(const mlb_matrix* a, const char* spec, mlb_precond** out);
MLB_API void mlb_precond_free(mlb_precond* m);

/* [r0, sign(randn)...] with n columns. */
MLB_API mlb_status mlb_shadow_build(const mlb_block* r0, int64_t n, uint64_t seed,
                                    mlb_block** out);

/* x0, q and m may be NULL (zero guess, seeded shadow block, no
 * preconditioner). mlbicgstabt and mlbicg reject a preconditioner other than
 * "none"; use mlbicgstabt-prec. x_out may be NULL. */
MLB_API mlb_status mlb_solve(const mlb_matrix* a, const mlb_block* b, const mlb_block* x0,
                             const mlb_block* q, const mlb_precond* m, mlb_method method,
                             const mlb_solver_options* options, mlb_block** x_out,
                             mlb_report** report_out);

MLB_API mlb_status mlb_report_get_summary(const mlb_report* report, mlb_report_summary* out);
MLB_API const char* mlb_report_method(const mlb_report* report);
MLB_API const char* mlb_report_flag_name(const mlb_report* report);
MLB_API const char* mlb_report_breakdown_site(const mlb_report* report);
MLB_API int64_t mlb_report_history_length(const mlb_report* report);
MLB_API mlb_status mlb_report_history(const mlb_report* report, double* out, int64_t count);
MLB_API int64_t mlb_report_true_error_length(const mlb_report* report);
MLB_API mlb_status mlb_report_true_error_history(const mlb_report* report, double* out,
                                                 int64_t count);
MLB_API int64_t mlb_report_omega_length(const mlb_report* report);
MLB_API mlb_status mlb_report_omega_history(const mlb_report* report, mlb_complex* out,
                                            int64_t count);
/* format: "csv" or "json". */
MLB_API mlb_status mlb_report_write(const mlb_report* report, const char* format,
                                    const char* path);
/* Caller releases *out with mlb_string_free. */
MLB_API mlb_status mlb_report_format(const mlb_report* report, const char* format, char** out);
MLB_API void mlb_string_free(char* s);
MLB_API void mlb_report_free(mlb_report* report);

#ifdef __cplusplus
}
#endif

#endif
