#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <tuple>

#include "core/errors.hpp"
#include "core/matrix_market.hpp"
#include "core/report_io.hpp"
#include "core/shadow.hpp"
#include "support.hpp"

using namespace mlbicgstabt;
using namespace mlbtest;

namespace {

CsrMatrix parse(const std::string& text, MatrixMarketHeader* header = nullptr) {
    std::istringstream in(text);
    return read_matrix_market(in, header);
}

std::int64_t parse_error_line(const std::string& text) {
    try {
        parse(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return -1;
}

std::vector<std::tuple<Index, Index, double, double>> entry_multiset(const CsrMatrix& a) {
    std::vector<std::tuple<Index, Index, double, double>> out;
    for (const auto& t : a.triplets()) {
        out.emplace_back(t.row, t.col, t.value.real(), t.value.imag());
    }
    std::sort(out.begin(), out.end());
    return out;
}

ConvergenceReport sample_report(bool with_true) {
    Rng rng(5);
    const CsrMatrix a = random_well_conditioned(rng, 12, 3.0, true);
    const Vector b = rng.vector(12, true);
    ShadowSpec spec;
    spec.n = 3;
    spec.seed = 2;
    SolverConfig cfg;
    cfg.track_true_error = with_true;
    return solve_ml_bicgstabt(a, b, {}, build_shadow(b, spec), cfg).report;
}

}  // namespace

TEST_CASE("coordinate identity") {
    const CsrMatrix a = parse(
        "%%MatrixMarket matrix coordinate real general\n"
        "% comment\n"
        "3 3 3\n1 1 1\n2 2 1\n3 3 1\n");
    CHECK(a.rows() == 3);
    CHECK(a.nnz() == 3);
    const Dense d = to_dense(a);
    for (Index i = 0; i < 3; ++i) {
        CHECK(d(i, i) == Scalar(1.0));
    }
}

TEST_CASE("symmetric expansion") {
    MatrixMarketHeader h;
    const CsrMatrix a = parse(
        "%%MatrixMarket matrix coordinate real symmetric\n"
        "2 2 2\n1 1 4\n2 1 5\n",
        &h);
    CHECK(h.symmetry == MatrixMarketHeader::Symmetry::Symmetric);
    CHECK(a.nnz() == 3);
    const Dense d = to_dense(a);
    CHECK(d(1, 0) == Scalar(5.0));
    CHECK(d(0, 1) == Scalar(5.0));
}

TEST_CASE("hermitian, skew-symmetric, complex, integer and pattern fields") {
    const Dense herm = to_dense(parse(
        "%%MatrixMarket matrix coordinate complex hermitian\n"
        "2 2 2\n1 1 2 0\n2 1 1 3\n"));
    CHECK(herm(1, 0) == Scalar(1.0, 3.0));
    CHECK(herm(0, 1) == Scalar(1.0, -3.0));

    const Dense skew = to_dense(parse(
        "%%MatrixMarket matrix coordinate real skew-symmetric\n"
        "2 2 1\n2 1 7\n"));
    CHECK(skew(1, 0) == Scalar(7.0));
    CHECK(skew(0, 1) == Scalar(-7.0));

    const Dense ints = to_dense(parse(
        "%%MatrixMarket matrix coordinate integer general\n"
        "1 2 1\n1 2 -3\n"));
    CHECK(ints(0, 1) == Scalar(-3.0));

    const CsrMatrix pat = parse(
        "%%MatrixMarket matrix coordinate pattern general\n"
        "2 2 2\n1 2\n2 1\n");
    CHECK(to_dense(pat)(0, 1) == Scalar(1.0));
}

TEST_CASE("array format is column major") {
    const Dense d = to_dense(parse(
        "%%MatrixMarket matrix array real general\n"
        "2 2\n1\n2\n3\n4\n"));
    CHECK(d(0, 0) == Scalar(1.0));
    CHECK(d(1, 0) == Scalar(2.0));
    CHECK(d(0, 1) == Scalar(3.0));
    CHECK(d(1, 1) == Scalar(4.0));
}

TEST_CASE("duplicates are summed and explicit zeros kept") {
    const CsrMatrix a = parse(
        "%%MatrixMarket matrix coordinate real general\n"
        "2 2 3\n1 1 1\n1 1 2\n2 2 0\n");
    CHECK(a.nnz() == 2);
    CHECK(to_dense(a)(0, 0) == Scalar(3.0));
}

TEST_CASE("parse errors carry line numbers") {
    CHECK(parse_error_line("") == 1);
    CHECK(parse_error_line("hello\n") == 1);
    CHECK(parse_error_line("%%MatrixMarket vector coordinate real general\n1 1 1\n") == 1);
    CHECK(parse_error_line("%%MatrixMarket matrix coordinate quaternion general\n") == 1);
    CHECK(parse_error_line("%%MatrixMarket matrix coordinate real weird\n") == 1);
    CHECK(parse_error_line("%%MatrixMarket matrix coordinate real general\n% c\n2 2\n") == 3);
    CHECK(parse_error_line("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n") == 3);
    CHECK(parse_error_line("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n") == 4);
    CHECK(parse_error_line("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 x\n") == 3);
    CHECK(parse_error_line("%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n1 2 1\n") ==
          3);
    CHECK(parse_error_line("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 1\n2 2 2\n") ==
          4);
    CHECK(parse_error_line("%%MatrixMarket matrix array pattern general\n1 1\n") == 1);
}

TEST_CASE("write then parse is idempotent") {
    Rng rng(21);
    for (bool cplx : {false, true}) {
        const CsrMatrix a = random_sparse(rng, 9, 0.3, 1.0, cplx);
        std::stringstream s1;
        write_matrix_market(a, s1);
        const CsrMatrix b = read_matrix_market(s1);
        CHECK(entry_multiset(b) == entry_multiset(a));
        std::stringstream s2;
        write_matrix_market(b, s2);
        std::stringstream s1again;
        write_matrix_market(a, s1again);
        CHECK(s2.str() == s1again.str());
    }
}

TEST_CASE("dense blocks") {
    std::istringstream arr(
        "%%MatrixMarket matrix array complex general\n"
        "2 2\n1 0\n2 0\n0 1\n0 2\n");
    const DenseBlock blk = read_dense_block(arr);
    CHECK(blk.rows() == 2);
    CHECK(blk.cols() == 2);
    CHECK(blk(1, 1) == Scalar(0.0, 2.0));
    std::stringstream out;
    write_dense_block(blk, out);
    CHECK(read_dense_block(out) == blk);

    std::istringstream coord(
        "%%MatrixMarket matrix coordinate real general\n"
        "3 1 1\n2 1 5\n");
    const DenseBlock c = read_dense_block(coord);
    CHECK(c(1, 0) == Scalar(5.0));
    CHECK(c(0, 0) == Scalar(0.0));
}

TEST_CASE("default right-hand side is A e") {
    const Vector ones{1.0, 1.0, 1.0};
    CHECK(default_rhs(CsrMatrix::identity(3)) == ones);
    const Vector d{2.0, 3.0};
    CHECK(default_rhs(CsrMatrix::diagonal(d)) == d);
    Rng rng(8);
    const CsrMatrix a = random_sparse(rng, 5, 0.5, 0.0, true);
    const Dense dd = to_dense(a);
    const Vector got = default_rhs(a);
    for (Index i = 0; i < 5; ++i) {
        Scalar s = 0.0;
        for (Index j = 0; j < 5; ++j) {
            s += dd(i, j);
        }
        CHECK(std::abs(got[static_cast<std::size_t>(i)] - s) < 1e-14);
    }
}

TEST_CASE("missing file is an io error") {
    CHECK_THROWS_AS(read_matrix_market(std::string("/nonexistent/x.mtx")), IoError);
}

TEST_CASE("report csv") {
    ConvergenceReport r;
    r.method = "mlbicgstabt";
    r.iterations = 1;
    r.tol = 1e-7;
    r.residual_history = {1.0, 0.25};
    CHECK(report_to_csv(r) == "k,relative_residual\n0,1\n1,0.25\n");
    r.true_error_history = {1.0, 0.5};
    CHECK(report_to_csv(r) == "k,relative_residual,true_error\n0,1,1\n1,0.25,0.5\n");
}

TEST_CASE("report json round trip") {
    for (bool with_true : {false, true}) {
        const ConvergenceReport r = sample_report(with_true);
        REQUIRE(r.flag == Termination::Converged);
        const ConvergenceReport back = report_from_json(report_to_json(r));
        CHECK(back == r);
        CHECK(report_to_json(back) == report_to_json(r));
    }
    ConvergenceReport odd;
    odd.residual_history = {1.0, std::numeric_limits<double>::infinity()};
    odd.true_error = std::numeric_limits<double>::quiet_NaN();
    const ConvergenceReport back = report_from_json(report_to_json(odd));
    CHECK(std::isinf(back.residual_history[1]));
    CHECK(std::isnan(back.true_error));
}

TEST_CASE("converged report records a final residual below tol") {
    const ConvergenceReport r = sample_report(false);
    const std::string csv = report_to_csv(r);
    const auto last_line_start = csv.rfind('\n', csv.size() - 2) + 1;
    const std::string last = csv.substr(last_line_start);
    const double value = std::stod(last.substr(last.find(',') + 1));
    CHECK(value < r.tol);
}

TEST_CASE("report file output") {
    const ConvergenceReport r = sample_report(false);
    const std::string path = "test_io_report.json";
    write_report(r, ReportFormat::Json, path);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(report_from_json(ss.str()) == r);
    std::remove(path.c_str());
    CHECK_THROWS_AS(write_report(r, ReportFormat::Csv, "/nonexistent/dir/r.csv"), IoError);
    CHECK(parse_report_format("csv") == ReportFormat::Csv);
    CHECK_THROWS_AS(parse_report_format("xml"), std::invalid_argument);
}
