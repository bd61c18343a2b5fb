#include "core/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string_view>
#include <vector>

#include "core/errors.hpp"

namespace mlbicgstabt {

namespace {

using Header = MatrixMarketHeader;

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
        }
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
        }
        if (i > start) {
            tokens.push_back(line.substr(start, i - start));
        }
    }
    return tokens;
}

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    bool next(std::string& line) {
        if (!std::getline(in_, line)) {
            return false;
        }
        ++line_no_;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        return true;
    }

    // Skips comment and blank lines.
    bool next_data(std::string& line) {
        while (next(line)) {
            const auto first = line.find_first_not_of(" \t");
            if (first == std::string::npos || line[first] == '%') {
                continue;
            }
            return true;
        }
        return false;
    }

    std::int64_t line_no() const noexcept { return line_no_; }

private:
    std::istream& in_;
    std::int64_t line_no_ = 0;
};

std::int64_t parse_int(std::string_view tok, std::int64_t line, const char* what) {
    std::int64_t v = 0;
    const auto* end = tok.data() + tok.size();
    const auto res = std::from_chars(tok.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) {
        throw ParseError(line, std::string("invalid ") + what + " '" + std::string(tok) + "'");
    }
    return v;
}

double parse_real(std::string_view tok, std::int64_t line) {
    double v = 0.0;
    const auto* begin = tok.data();
    const auto* end = tok.data() + tok.size();
    if (begin != end && *begin == '+') {
        ++begin;
    }
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end) {
        throw ParseError(line, "invalid numeric value '" + std::string(tok) + "'");
    }
    return v;
}

Header parse_header(LineReader& reader) {
    std::string line;
    if (!reader.next(line)) {
        throw ParseError(1, "empty file, missing %%MatrixMarket header");
    }
    const auto tokens = split_ws(line);
    if (tokens.empty() || lower(tokens[0]) != "%%matrixmarket") {
        throw ParseError(reader.line_no(), "missing %%MatrixMarket banner");
    }
    if (tokens.size() != 5) {
        throw ParseError(reader.line_no(),
                         "malformed header, expected: %%MatrixMarket matrix <format> <field> <symmetry>");
    }
    if (lower(tokens[1]) != "matrix") {
        throw ParseError(reader.line_no(), "unsupported object '" + std::string(tokens[1]) + "'");
    }
    Header h;
    const auto fmt = lower(tokens[2]);
    if (fmt == "coordinate") {
        h.format = Header::Format::Coordinate;
    } else if (fmt == "array") {
        h.format = Header::Format::Array;
    } else {
        throw ParseError(reader.line_no(), "unsupported format '" + std::string(tokens[2]) + "'");
    }
    const auto field = lower(tokens[3]);
    if (field == "real" || field == "double") {
        h.field = Header::Field::Real;
    } else if (field == "complex") {
        h.field = Header::Field::Complex;
    } else if (field == "integer") {
        h.field = Header::Field::Integer;
    } else if (field == "pattern") {
        h.field = Header::Field::Pattern;
    } else {
        throw ParseError(reader.line_no(), "unsupported field '" + std::string(tokens[3]) + "'");
    }
    const auto sym = lower(tokens[4]);
    if (sym == "general") {
        h.symmetry = Header::Symmetry::General;
    } else if (sym == "symmetric") {
        h.symmetry = Header::Symmetry::Symmetric;
    } else if (sym == "skew-symmetric") {
        h.symmetry = Header::Symmetry::SkewSymmetric;
    } else if (sym == "hermitian") {
        h.symmetry = Header::Symmetry::Hermitian;
    } else {
        throw ParseError(reader.line_no(), "unsupported symmetry '" + std::string(tokens[4]) + "'");
    }
    if (h.format == Header::Format::Array && h.field == Header::Field::Pattern) {
        throw ParseError(reader.line_no(), "pattern field is not allowed with array format");
    }
    return h;
}

struct ParsedMatrix {
    Header header;
    Index rows = 0;
    Index cols = 0;
    std::vector<Triplet> entries;  // expanded to full storage
};

Scalar parse_value(const std::vector<std::string_view>& tok, std::size_t first, const Header& h,
                   std::int64_t line) {
    const std::size_t want = h.field == Header::Field::Pattern   ? 0
                             : h.field == Header::Field::Complex ? 2
                                                                 : 1;
    if (tok.size() != first + want) {
        throw ParseError(line, "expected " + std::to_string(first + want) + " fields, found " +
                                   std::to_string(tok.size()));
    }
    switch (h.field) {
        case Header::Field::Pattern:
            return 1.0;
        case Header::Field::Complex:
            return {parse_real(tok[first], line), parse_real(tok[first + 1], line)};
        default:
            return parse_real(tok[first], line);
    }
}

void add_with_symmetry(std::vector<Triplet>& out, const Header& h, Index i, Index j, Scalar v,
                       std::int64_t line) {
    out.push_back({i, j, v});
    if (i == j) {
        if (h.symmetry == Header::Symmetry::SkewSymmetric && v != Scalar(0.0)) {
            throw ParseError(line, "skew-symmetric matrix with nonzero diagonal entry");
        }
        return;
    }
    switch (h.symmetry) {
        case Header::Symmetry::Symmetric:
            out.push_back({j, i, v});
            break;
        case Header::Symmetry::SkewSymmetric:
            out.push_back({j, i, -v});
            break;
        case Header::Symmetry::Hermitian:
            out.push_back({j, i, std::conj(v)});
            break;
        case Header::Symmetry::General:
            break;
    }
}

ParsedMatrix parse(std::istream& in) {
    LineReader reader(in);
    ParsedMatrix pm;
    pm.header = parse_header(reader);
    const Header& h = pm.header;

    std::string line;
    if (!reader.next_data(line)) {
        throw ParseError(reader.line_no() + 1, "missing size line");
    }
    const auto size_tok = split_ws(line);
    const bool coord = h.format == Header::Format::Coordinate;
    if (size_tok.size() != (coord ? 3u : 2u)) {
        throw ParseError(reader.line_no(), coord ? "size line must be: rows cols nnz"
                                                 : "size line must be: rows cols");
    }
    pm.rows = parse_int(size_tok[0], reader.line_no(), "row count");
    pm.cols = parse_int(size_tok[1], reader.line_no(), "column count");
    if (pm.rows < 0 || pm.cols < 0) {
        throw ParseError(reader.line_no(), "negative dimension");
    }
    if (h.symmetry != Header::Symmetry::General && pm.rows != pm.cols) {
        throw ParseError(reader.line_no(), "symmetric storage requires a square matrix");
    }

    if (coord) {
        const Index nnz = parse_int(size_tok[2], reader.line_no(), "entry count");
        if (nnz < 0) {
            throw ParseError(reader.line_no(), "negative entry count");
        }
        pm.entries.reserve(static_cast<std::size_t>(
            h.symmetry == Header::Symmetry::General ? nnz : 2 * nnz));
        for (Index e = 0; e < nnz; ++e) {
            if (!reader.next_data(line)) {
                throw ParseError(reader.line_no() + 1, "expected " + std::to_string(nnz) +
                                                           " entries, found " + std::to_string(e));
            }
            const auto tok = split_ws(line);
            if (tok.size() < 2) {
                throw ParseError(reader.line_no(), "entry needs row and column indices");
            }
            const Index i = parse_int(tok[0], reader.line_no(), "row index");
            const Index j = parse_int(tok[1], reader.line_no(), "column index");
            if (i < 1 || i > pm.rows || j < 1 || j > pm.cols) {
                throw ParseError(reader.line_no(), "index (" + std::to_string(i) + ", " +
                                                       std::to_string(j) + ") out of range");
            }
            if (h.symmetry != Header::Symmetry::General && j > i) {
                throw ParseError(reader.line_no(),
                                 "entry above the diagonal in a symmetric-storage file");
            }
            const Scalar v = parse_value(tok, 2, h, reader.line_no());
            add_with_symmetry(pm.entries, h, i - 1, j - 1, v, reader.line_no());
        }
    } else {
        for (Index j = 0; j < pm.cols; ++j) {
            Index first_row = 0;
            if (h.symmetry == Header::Symmetry::SkewSymmetric) {
                first_row = j + 1;
            } else if (h.symmetry != Header::Symmetry::General) {
                first_row = j;
            }
            for (Index i = first_row; i < pm.rows; ++i) {
                if (!reader.next_data(line)) {
                    throw ParseError(reader.line_no() + 1, "array data ended early");
                }
                const auto tok = split_ws(line);
                const Scalar v = parse_value(tok, 0, h, reader.line_no());
                add_with_symmetry(pm.entries, h, i, j, v, reader.line_no());
            }
        }
    }
    if (reader.next_data(line)) {
        throw ParseError(reader.line_no(), "unexpected data after the last entry");
    }
    return pm;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    return in;
}

}  // namespace

CsrMatrix read_matrix_market(std::istream& in, MatrixMarketHeader* header) {
    auto pm = parse(in);
    if (header != nullptr) {
        *header = pm.header;
    }
    return CsrMatrix::from_triplets(pm.rows, pm.cols, std::move(pm.entries));
}

CsrMatrix read_matrix_market(const std::string& path) {
    auto in = open_input(path);
    return read_matrix_market(in);
}

DenseBlock read_dense_block(std::istream& in) {
    auto pm = parse(in);
    DenseBlock block(pm.rows, pm.cols);
    for (const auto& t : pm.entries) {
        block(t.row, t.col) += t.value;
    }
    return block;
}

DenseBlock read_dense_block(const std::string& path) {
    auto in = open_input(path);
    return read_dense_block(in);
}

void write_matrix_market(const CsrMatrix& a, std::ostream& out) {
    const auto vals = a.values();
    const bool is_real = std::all_of(vals.begin(), vals.end(),
                                     [](const Scalar& v) { return v.imag() == 0.0; });
    out << "%%MatrixMarket matrix coordinate " << (is_real ? "real" : "complex") << " general\n";
    out << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
    out << std::setprecision(17);
    for (const auto& t : a.triplets()) {
        out << (t.row + 1) << ' ' << (t.col + 1) << ' ' << t.value.real();
        if (!is_real) {
            out << ' ' << t.value.imag();
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("write_matrix_market: stream failure");
    }
}

void write_matrix_market(const CsrMatrix& a, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    write_matrix_market(a, out);
}

void write_dense_block(const DenseBlock& block, std::ostream& out) {
    const auto data = block.data();
    const bool is_real = std::all_of(data.begin(), data.end(),
                                     [](const Scalar& v) { return v.imag() == 0.0; });
    out << "%%MatrixMarket matrix array " << (is_real ? "real" : "complex") << " general\n";
    out << block.rows() << ' ' << block.cols() << '\n';
    out << std::setprecision(17);
    for (const auto& v : data) {
        out << v.real();
        if (!is_real) {
            out << ' ' << v.imag();
        }
        out << '\n';
    }
}

Vector default_rhs(const CsrMatrix& a) {
    const Vector ones(static_cast<std::size_t>(a.cols()), Scalar(1.0));
    return matvec(a, ones);
}

}  // namespace mlbicgstabt
