// Command-line driver. Talks to the solver library only through the C API.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mlbicgstabt/mlbicgstabt.h"

namespace {

constexpr int kExitConverged = 0;
constexpr int kExitConfig = 1;
constexpr int kExitMaxIt = 2;
constexpr int kExitBreakdown = 3;

constexpr const char* kOutputDirEnv = "MLBICGSTABT_OUTPUT_DIR";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check(mlb_status s, const std::string& context) {
    if (s != MLB_OK) {
        const std::string msg = mlb_last_error();
        throw ConfigError(msg.rfind(context + ":", 0) == 0 ? msg : context + ": " + msg);
    }
}

template <class T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};
using MatrixPtr = std::unique_ptr<mlb_matrix, Deleter<mlb_matrix, mlb_matrix_free>>;
using BlockPtr = std::unique_ptr<mlb_block, Deleter<mlb_block, mlb_block_free>>;
using PrecondPtr = std::unique_ptr<mlb_precond, Deleter<mlb_precond, mlb_precond_free>>;
using ReportPtr = std::unique_ptr<mlb_report, Deleter<mlb_report, mlb_report_free>>;

struct Plan {
    std::string matrix;
    std::string rhs = "ones";
    int64_t rhs_col = 1;
    std::string method = "mlbicgstabt";
    int64_t n = 4;
    double tol = 1e-7;
    int64_t max_it = 0;
    double kappa = 0.0;
    std::string precond = "none";
    uint64_t seed = 0;
    std::string out;
    std::string format = "csv";
    std::string shadow_file;
    bool true_error = false;
};

void add_common(CLI::App& app, Plan& p, bool single_matrix) {
    if (single_matrix) {
        app.add_option("--matrix", p.matrix, "Matrix Market file")->required();
    }
    app.add_option("--rhs", p.rhs, "right-hand side: 'ones' for b = A e, or a Matrix Market file")
        ->capture_default_str();
    app.add_option("--rhs-col", p.rhs_col, "1-based column of a multi-column rhs file")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--tol", p.tol, "stop when ||r_k|| / ||b|| < tol")->capture_default_str();
    app.add_option("--max-it", p.max_it, "iteration limit, 0 for 10 N")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    app.add_option("--kappa", p.kappa, "omega minimization control")->capture_default_str();
    app.add_option("--precond", p.precond, "none | jacobi | ilut:<droptol>")->capture_default_str();
    app.add_option("--seed", p.seed, "seed of the +-1 shadow columns")->capture_default_str();
    app.add_option("--format", p.format, "report format")
        ->capture_default_str()
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_flag("--true-error", p.true_error, "record ||b - A x_k|| / ||b|| every iteration");
}

struct Problem {
    MatrixPtr a;
    BlockPtr b;
};

Problem load_problem(const Plan& p) {
    Problem prob;
    mlb_matrix* a = nullptr;
    check(mlb_matrix_read(p.matrix.c_str(), &a), "--matrix");
    prob.a.reset(a);
    mlb_block* b = nullptr;
    if (p.rhs == "ones") {
        check(mlb_block_default_rhs(a, &b), "rhs");
    } else {
        mlb_block* all = nullptr;
        check(mlb_block_read(p.rhs.c_str(), &all), "--rhs");
        BlockPtr holder(all);
        check(mlb_block_column(all, p.rhs_col - 1, &b), "--rhs-col");
    }
    prob.b.reset(b);
    return prob;
}

mlb_solver_options options_of(const Plan& p, int64_t n) {
    mlb_solver_options o;
    mlb_solver_options_default(&o);
    o.n = n;
    o.tol = p.tol;
    o.max_it = p.max_it;
    o.kappa = p.kappa;
    o.seed = p.seed;
    o.track_true_error = p.true_error ? 1 : 0;
    return o;
}

mlb_method method_of(const std::string& name) {
    mlb_method m;
    check(mlb_method_from_string(name.c_str(), &m), "--method");
    return m;
}

bool is_ml_method(mlb_method m) {
    return m == MLB_METHOD_MLBICGSTABT || m == MLB_METHOD_MLBICGSTABT_PREC ||
           m == MLB_METHOD_MLBICG;
}

ReportPtr run(const Problem& prob, const Plan& p, mlb_method method, int64_t n,
              const mlb_block* q = nullptr) {
    PrecondPtr m;
    if (p.precond != "none") {
        mlb_precond* raw = nullptr;
        check(mlb_precond_create(prob.a.get(), p.precond.c_str(), &raw), "--precond");
        m.reset(raw);
    }
    const mlb_solver_options o = options_of(p, n);
    mlb_report* r = nullptr;
    check(mlb_solve(prob.a.get(), prob.b.get(), nullptr, q, m.get(), method, &o, nullptr, &r),
          "solve");
    return ReportPtr(r);
}

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string short_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4e", v);
    return buf;
}

std::string stem_of(const std::string& path) { return std::filesystem::path(path).stem().string(); }

// --out wins; otherwise a file name under the output-directory variable;
// otherwise nothing is written.
std::string output_path(const std::string& out, const std::string& default_name) {
    if (!out.empty()) {
        return out;
    }
    if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
        std::filesystem::create_directories(dir);
        return (std::filesystem::path(dir) / default_name).string();
    }
    return {};
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text)) {
        throw ConfigError("cannot write '" + path + "'");
    }
}

int exit_code_for(int flag) {
    switch (flag) {
        case 0:
            return kExitConverged;
        case 1:
            return kExitMaxIt;
        default:
            return kExitBreakdown;
    }
}

const char* flag_word(int flag) {
    return flag == 0 ? "converged" : flag == 1 ? "max_iterations" : "breakdown";
}

int cmd_solve(const Plan& p) {
    const mlb_method method = method_of(p.method);
    const Problem prob = load_problem(p);
    BlockPtr q;
    int64_t n = p.n;
    if (!p.shadow_file.empty()) {
        mlb_block* raw = nullptr;
        check(mlb_block_read(p.shadow_file.c_str(), &raw), "--shadow-file");
        q.reset(raw);
        mlb_block_info(raw, nullptr, &n);
    }
    const ReportPtr r = run(prob, p, method, n, q.get());
    mlb_report_summary s;
    check(mlb_report_get_summary(r.get(), &s), "report");

    std::cout << "method          " << p.method << "\n"
              << "n               " << s.n << "\n"
              << "flag            " << flag_word(s.flag);
    if (s.flag == -1) {
        std::cout << " (" << mlb_report_breakdown_site(r.get()) << ")";
    }
    std::cout << "\n"
              << "iterations      " << s.iterations << "\n"
              << "relative resid  " << short_num(s.final_residual) << "\n"
              << "true error      " << short_num(s.true_error) << "\n"
              << "residual gap    " << short_num(s.residual_gap) << "\n"
              << "matvec A        " << s.counters.matvec_a << "\n"
              << "matvec A^H      " << s.counters.matvec_ah << "\n"
              << "precond solves  " << s.counters.precond_solves << "\n"
              << "dot products    " << s.counters.dot_products << "\n";

    const std::string path = output_path(
        p.out, stem_of(p.matrix) + "_" + p.method + "_n" + std::to_string(s.n) + "." + p.format);
    if (!path.empty()) {
        check(mlb_report_write(r.get(), p.format.c_str(), path.c_str()), path);
        std::cout << "report          " << path << "\n";
    }
    return exit_code_for(s.flag);
}

struct SweepRow {
    int64_t n = 0;
    std::string line;
};

int cmd_sweep(const Plan& p, const std::string& range, int jobs) {
    const mlb_method method = method_of(p.method);
    if (!is_ml_method(method)) {
        throw ConfigError("sweep needs an ML(n) method (mlbicgstabt, mlbicgstabt-prec, mlbicg)");
    }
    const auto colon = range.find(':');
    int64_t lo = 0;
    int64_t hi = 0;
    try {
        if (colon == std::string::npos) {
            throw std::invalid_argument(range);
        }
        std::size_t used = 0;
        lo = std::stoll(range.substr(0, colon), &used);
        if (used != colon) {
            throw std::invalid_argument(range);
        }
        const std::string tail = range.substr(colon + 1);
        hi = std::stoll(tail, &used);
        if (used != tail.size()) {
            throw std::invalid_argument(range);
        }
    } catch (const std::exception&) {
        throw ConfigError("--n-range must look like a:b, got '" + range + "'");
    }
    if (lo < 1 || hi < lo) {
        throw ConfigError("--n-range needs 1 <= a <= b");
    }
    const Problem prob = load_problem(p);

    auto one = [&](int64_t n) {
        try {
            const ReportPtr r = run(prob, p, method, n);
            mlb_report_summary s;
            check(mlb_report_get_summary(r.get(), &s), "report");
            return std::to_string(n) + "," + g17(s.true_error) + "," +
                   std::to_string(s.iterations) + "," + g17(s.residual_gap) + "," +
                   flag_word(s.flag) + "\n";
        } catch (const ConfigError& e) {
            std::cerr << "n = " << n << ": " << e.what() << "\n";
            return std::to_string(n) + ",,,,error\n";
        }
    };

    std::vector<std::string> rows(static_cast<std::size_t>(hi - lo + 1));
    if (jobs <= 1) {
        for (int64_t n = lo; n <= hi; ++n) {
            rows[static_cast<std::size_t>(n - lo)] = one(n);
        }
    } else {
        for (int64_t start = lo; start <= hi; start += jobs) {
            std::vector<std::future<std::string>> batch;
            for (int64_t n = start; n <= hi && n < start + jobs; ++n) {
                batch.push_back(std::async(std::launch::async, one, n));
            }
            for (std::size_t t = 0; t < batch.size(); ++t) {
                rows[static_cast<std::size_t>(start - lo) + t] = batch[t].get();
            }
        }
    }

    std::string csv = "n,E(n),iterations,gap,flag\n";
    for (const auto& row : rows) {
        csv += row;
    }
    const std::string path = output_path(p.out, stem_of(p.matrix) + "_" + p.method + "_sweep.csv");
    if (path.empty()) {
        std::cout << csv;
    } else {
        write_text(path, csv);
        std::cout << "sweep written to " << path << "\n";
    }
    return kExitConverged;
}

int cmd_compare(const Plan& base, const std::vector<std::string>& matrices,
                const std::vector<std::string>& methods, const std::vector<int64_t>& ns) {
    for (const auto& m : methods) {
        method_of(m);
    }
    struct Row {
        std::string matrix, method, n, iterations, true_error, matvec_a, matvec_ah, flag;
    };
    std::vector<Row> rows;
    for (const auto& file : matrices) {
        Plan p = base;
        p.matrix = file;
        std::unique_ptr<Problem> prob;
        try {
            prob = std::make_unique<Problem>(load_problem(p));
        } catch (const ConfigError& e) {
            std::cerr << file << ": " << e.what() << "\n";
        }
        for (const auto& name : methods) {
            const mlb_method method = method_of(name);
            const std::vector<int64_t> row_ns =
                is_ml_method(method) ? ns : std::vector<int64_t>{1};
            for (int64_t n : row_ns) {
                Row row{stem_of(file), name, is_ml_method(method) ? std::to_string(n) : "-",
                        "", "", "", "", ""};
                if (!prob) {
                    row.flag = "error";
                    rows.push_back(row);
                    continue;
                }
                try {
                    const ReportPtr r = run(*prob, p, method, n);
                    mlb_report_summary s;
                    check(mlb_report_get_summary(r.get(), &s), "report");
                    row.iterations = std::to_string(s.iterations);
                    row.true_error = short_num(s.true_error);
                    row.matvec_a = std::to_string(s.counters.matvec_a);
                    row.matvec_ah = std::to_string(s.counters.matvec_ah);
                    row.flag = flag_word(s.flag);
                } catch (const ConfigError& e) {
                    row.flag = "error";
                    std::cerr << file << " / " << name << ": " << e.what() << "\n";
                }
                rows.push_back(row);
            }
        }
    }

    std::string csv = "matrix,method,n,iterations,true_error,matvec_a,matvec_ah,flag\n";
    for (const auto& r : rows) {
        csv += r.matrix + "," + r.method + "," + r.n + "," + r.iterations + "," + r.true_error + "," +
               r.matvec_a + "," + r.matvec_ah + "," + r.flag + "\n";
    }

    const std::vector<std::string> head = {"matrix",     "method",   "n",         "iterations",
                                           "true error", "matvec A", "matvec A^H", "flag"};
    std::vector<std::size_t> width(head.size());
    auto cells = [](const Row& r) {
        return std::vector<std::string>{r.matrix,     r.method,   r.n,         r.iterations,
                                        r.true_error, r.matvec_a, r.matvec_ah, r.flag};
    };
    for (std::size_t c = 0; c < head.size(); ++c) {
        width[c] = head[c].size();
    }
    for (const auto& r : rows) {
        const auto cs = cells(r);
        for (std::size_t c = 0; c < cs.size(); ++c) {
            width[c] = std::max(width[c], cs[c].size());
        }
    }
    auto print_line = [&](const std::vector<std::string>& cs) {
        for (std::size_t c = 0; c < cs.size(); ++c) {
            std::cout << (c == 0 ? "" : "  ") << cs[c];
            if (c + 1 < cs.size()) {
                std::cout << std::string(width[c] - cs[c].size(), ' ');
            }
        }
        std::cout << "\n";
    };
    print_line(head);
    for (const auto& r : rows) {
        print_line(cells(r));
    }

    const std::string path = output_path(base.out, "compare.csv");
    if (!path.empty()) {
        write_text(path, csv);
        std::cout << "table written to " << path << "\n";
    }
    return kExitConverged;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ML(n)BiCGStab with A^H: sparse linear solver driver"};
    app.set_version_flag("--version", mlb_version());
    app.set_config("--config", "", "key=value file with option defaults");
    app.require_subcommand(1);

    Plan solve_plan;
    CLI::App* solve = app.add_subcommand("solve", "run one solve and write its report");
    add_common(*solve, solve_plan, true);
    solve->add_option("--method", solve_plan.method, "mlbicgstabt | mlbicgstabt-prec | mlbicg | bicgstab | bicg")
        ->capture_default_str();
    solve->add_option("--n", solve_plan.n, "number of shadow vectors")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    solve->add_option("--out", solve_plan.out, "report file");
    solve->add_option("--shadow-file", solve_plan.shadow_file,
                      "Matrix Market array file with the shadow block Q (overrides --n)");

    Plan sweep_plan;
    sweep_plan.method = "mlbicgstabt";
    std::string n_range = "1:8";
    int jobs = 1;
    CLI::App* sweep = app.add_subcommand("sweep", "E(n) against n, one solve per n");
    add_common(*sweep, sweep_plan, true);
    sweep->add_option("--method", sweep_plan.method, "mlbicgstabt | mlbicgstabt-prec | mlbicg")
        ->capture_default_str();
    sweep->add_option("--n-range", n_range, "inclusive range a:b")->capture_default_str();
    sweep->add_option("--jobs", jobs, "solves run concurrently")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sweep->add_option("--out", sweep_plan.out, "CSV file (default: stdout)");

    Plan compare_plan;
    std::vector<std::string> matrices;
    std::vector<std::string> methods;
    std::vector<int64_t> ns;
    CLI::App* compare = app.add_subcommand("compare", "table over matrices x methods x n");
    add_common(*compare, compare_plan, false);
    compare->add_option("--matrix", matrices, "Matrix Market file (repeatable)")->required();
    compare->add_option("--method", methods, "method (repeatable)")->required();
    compare->add_option("--n", ns, "shadow dimension (repeatable)")->check(CLI::PositiveNumber);
    compare->add_option("--out", compare_plan.out, "CSV file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*solve) {
            return cmd_solve(solve_plan);
        }
        if (*sweep) {
            return cmd_sweep(sweep_plan, n_range, jobs);
        }
        if (ns.empty()) {
            ns.push_back(4);
        }
        return cmd_compare(compare_plan, matrices, methods, ns);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}
