#pragma once

#include <iosfwd>
#include <string>

#include "core/linalg.hpp"

namespace mlbicgstabt {

struct MatrixMarketHeader {
    enum class Format { Coordinate, Array };
    enum class Field { Real, Complex, Integer, Pattern };
    enum class Symmetry { General, Symmetric, SkewSymmetric, Hermitian };

    Format format = Format::Coordinate;
    Field field = Field::Real;
    Symmetry symmetry = Symmetry::General;
};

/// Reads a sparse matrix in either storage format. Symmetric, skew-symmetric
/// and Hermitian files are expanded to full storage, duplicate coordinates are
/// summed and explicitly stored zeros are kept. Pattern entries get value 1.
/// Throws ParseError (with line number) or IoError.
CsrMatrix read_matrix_market(const std::string& path);
CsrMatrix read_matrix_market(std::istream& in, MatrixMarketHeader* header = nullptr);

/// Reads dense data (array format, or coordinate format scattered into a
/// zero block) as an N x m block, for right-hand sides and shadow vectors.
DenseBlock read_dense_block(const std::string& path);
DenseBlock read_dense_block(std::istream& in);

/// Coordinate/general output; the field is "real" when every stored value has
/// zero imaginary part, otherwise "complex". Values use 17 significant digits.
void write_matrix_market(const CsrMatrix& a, const std::string& path);
void write_matrix_market(const CsrMatrix& a, std::ostream& out);

/// Array/general output of a dense block.
void write_dense_block(const DenseBlock& block, std::ostream& out);

/// A e with e the vector of ones.
Vector default_rhs(const CsrMatrix& a);

}  // namespace mlbicgstabt
