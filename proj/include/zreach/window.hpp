#ifndef ZREACH_WINDOW_HPP
#define ZREACH_WINDOW_HPP

#include "zreach/types.hpp"

#include <deque>
#include <vector>

namespace zreach
{

/// Input-state data in shifted form: column j of x_plus is the successor of
/// column j of x_minus under input column j of u_minus.
struct DataBatch
{
    Matrix x_minus;
    Matrix u_minus;
    Matrix x_plus;

    DataBatch() = default;
    DataBatch(Matrix x_minus, Matrix u_minus, Matrix x_plus);

    Index size() const { return x_minus.cols(); }
    Index state_dim() const { return x_minus.rows(); }
    Index input_dim() const { return u_minus.rows(); }

    /// D = [X-; U-], with a leading row of ones when affine.
    Matrix data_matrix(bool affine = false) const;
    /// Regressor points z_j = [x_j; u_j] as columns of D (non-affine).
    std::vector<Vector> points() const;

    /// Column-wise concatenation of several batches of equal dimensions.
    static DataBatch concatenate(const std::vector<DataBatch>& parts);
};

/// Fixed-capacity FIFO of (x_prev, u, x_next) transitions.
class SlidingWindow
{
public:
    SlidingWindow() = default;
    SlidingWindow(Index capacity, Index state_dim, Index input_dim);

    Index capacity() const { return capacity_; }
    Index fill() const { return static_cast<Index>(x_minus_.size()); }
    bool full() const { return fill() == capacity_; }
    bool empty() const { return x_minus_.empty(); }
    Index state_dim() const { return nx_; }
    Index input_dim() const { return nu_; }

    /// Appends one transition, evicting the oldest one when full.
    void push(const Vector& x_prev, const Vector& u, const Vector& x_next);

    /// Current contents, oldest first.
    DataBatch batch() const;

private:
    Index capacity_ = 0;
    Index nx_ = 0;
    Index nu_ = 0;
    std::deque<Vector> x_minus_;
    std::deque<Vector> u_minus_;
    std::deque<Vector> x_plus_;
};

SlidingWindow window_push(SlidingWindow w, const Vector& x_prev, const Vector& u, const Vector& x_next);

} // namespace zreach

#endif
