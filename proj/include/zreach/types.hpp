#ifndef ZREACH_TYPES_HPP
#define ZREACH_TYPES_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace zreach
{

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

/// Operand shapes do not agree.
class DimensionError : public std::invalid_argument
{
public:
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// An argument violates an operation's precondition (bad order, rank, range).
class PreconditionError : public std::invalid_argument
{
public:
    explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Floating-point breakdown: singular systems, lost definiteness, non-finite data.
class NumericError : public std::runtime_error
{
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

inline bool all_finite(const Matrix& m)
{
    return m.allFinite();
}

} // namespace zreach

#endif
