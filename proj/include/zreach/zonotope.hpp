#ifndef ZREACH_ZONOTOPE_HPP
#define ZREACH_ZONOTOPE_HPP

#include "zreach/rng.hpp"
#include "zreach/types.hpp"

#include <vector>

namespace zreach
{

/// Zonotope <c, G> = { c + G b : |b_i| <= 1 }.
///
/// All-zero generator columns are dropped on construction, so a zonotope with
/// no generators is exactly the singleton {c}.
class Zonotope
{
public:
    Zonotope() = default;
    explicit Zonotope(Vector center);
    Zonotope(Vector center, const Matrix& generators);

    /// Axis-aligned box [lower, upper] as a zonotope with diagonal generators.
    static Zonotope from_box(const Vector& lower, const Vector& upper);

    const Vector& center() const { return center_; }
    const Matrix& generators() const { return generators_; }

    Index dim() const { return center_.size(); }
    Index num_generators() const { return generators_.cols(); }
    bool is_singleton() const { return generators_.cols() == 0; }

private:
    Vector center_;
    Matrix generators_;
};

/// Interval matrix [lower, upper], elementwise lower <= upper.
class IntervalMatrix
{
public:
    IntervalMatrix() = default;
    IntervalMatrix(Matrix lower, Matrix upper);

    const Matrix& lower() const { return lower_; }
    const Matrix& upper() const { return upper_; }
    Matrix midpoint() const { return 0.5 * (upper_ + lower_); }
    Matrix radius() const { return 0.5 * (upper_ - lower_); }
    Index rows() const { return lower_.rows(); }
    Index cols() const { return lower_.cols(); }

private:
    Matrix lower_;
    Matrix upper_;
};

/// Matrix zonotope <C, {G_1..G_g}> = { C + sum_i b_i G_i : |b_i| <= 1 }.
/// All-zero generator matrices are dropped on construction.
class MatrixZonotope
{
public:
    MatrixZonotope() = default;
    explicit MatrixZonotope(Matrix center);
    MatrixZonotope(Matrix center, const std::vector<Matrix>& generators);

    const Matrix& center() const { return center_; }
    const std::vector<Matrix>& generators() const { return generators_; }

    Index rows() const { return center_.rows(); }
    Index cols() const { return center_.cols(); }
    Index num_generators() const { return static_cast<Index>(generators_.size()); }

    /// { X^T : X in this set }.
    MatrixZonotope transposed() const;

private:
    Matrix center_;
    std::vector<Matrix> generators_;
};

Zonotope linear_map(const Matrix& map, const Zonotope& z);
Zonotope translate(const Zonotope& z, const Vector& offset);
Zonotope minkowski_sum(const Zonotope& a, const Zonotope& b);
Zonotope cartesian_product(const Zonotope& a, const Zonotope& b);

/// Smallest axis-aligned box containing z, as an n x 1 interval matrix.
IntervalMatrix interval_hull(const Zonotope& z);

enum class ReductionMethod
{
    Box, ///< enclose the remainder in its axis-aligned interval hull
    Pca  ///< enclose the remainder in a box aligned with its principal axes
};

/// Order reduction to at most max_generators columns, result contains z.
/// Keeps the (max_generators - n) longest generators and encloses the rest
/// in a parallelotope. With Box the interval hull is preserved exactly.
/// Requires max_generators >= n.
Zonotope reduce(const Zonotope& z, Index max_generators, ReductionMethod method = ReductionMethod::Box);

/// Order reduction in the coordinates x = frame * y: generators are ranked by
/// their length in y, and the remainder is boxed in y. frame must be
/// invertible.
Zonotope reduce_in_frame(const Zonotope& z, Index max_generators, const Matrix& frame);

enum class SamplingMode
{
    Uniform, ///< factors drawn uniformly from [-1, 1]
    Vertex   ///< factors drawn from {-1, 1}
};

Vector sample(const Zonotope& z, Rng& rng, SamplingMode mode = SamplingMode::Uniform);

/// Column-stacking correspondence between matrix and vector zonotopes.
Zonotope vectorize(const MatrixZonotope& m);
MatrixZonotope unvectorize(const Zonotope& z, Index rows, Index cols);

MatrixZonotope minkowski_sum(const MatrixZonotope& a, const MatrixZonotope& b);
MatrixZonotope reduce(const MatrixZonotope& m, Index max_generators,
                      ReductionMethod method = ReductionMethod::Box);
Matrix sample(const MatrixZonotope& m, Rng& rng, SamplingMode mode = SamplingMode::Uniform);

IntervalMatrix interval_matrix(const MatrixZonotope& m);

/// || |mid| + radius ||_F, an upper bound on ||A||_F for all A in the interval.
double interval_frobenius(const IntervalMatrix& im);

/// Enclosure of { A z : A in m, z in z }: all center/generator cross terms.
Zonotope multiply(const MatrixZonotope& m, const Zonotope& z);

/// Sum of interval-hull half-widths.
double hull_radius_sum(const Zonotope& z);

inline Vector vec(const Matrix& m)
{
    return Eigen::Map<const Vector>(m.data(), m.size());
}

inline Matrix unvec(const Vector& v, Index rows, Index cols)
{
    if (rows * cols != v.size())
        throw DimensionError("unvec: vector length does not match shape");
    return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

} // namespace zreach

#endif
