#include "zreach/window.hpp"

#include <string>

namespace zreach
{

DataBatch::DataBatch(Matrix xm, Matrix um, Matrix xp) : x_minus(std::move(xm)), u_minus(std::move(um)), x_plus(std::move(xp))
{
    if (u_minus.cols() != x_minus.cols() || x_plus.cols() != x_minus.cols())
        throw DimensionError("data batch: X-, U-, X+ must have the same number of columns");
    if (x_plus.rows() != x_minus.rows())
        throw DimensionError("data batch: X+ and X- must have the same number of rows");
}

Matrix DataBatch::data_matrix(bool affine) const
{
    const Index off = affine ? 1 : 0;
    Matrix d(off + state_dim() + input_dim(), size());
    if (affine)
        d.row(0).setOnes();
    d.middleRows(off, state_dim()) = x_minus;
    d.bottomRows(input_dim()) = u_minus;
    return d;
}

std::vector<Vector> DataBatch::points() const
{
    const Matrix d = data_matrix(false);
    std::vector<Vector> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (Index j = 0; j < size(); ++j)
        out.emplace_back(d.col(j));
    return out;
}

DataBatch DataBatch::concatenate(const std::vector<DataBatch>& parts)
{
    if (parts.empty())
        return DataBatch();
    Index total = 0;
    for (const auto& p : parts) {
        if (p.state_dim() != parts.front().state_dim() || p.input_dim() != parts.front().input_dim())
            throw DimensionError("data batch concatenation: dimensions differ");
        total += p.size();
    }
    Matrix xm(parts.front().state_dim(), total);
    Matrix um(parts.front().input_dim(), total);
    Matrix xp(parts.front().state_dim(), total);
    Index c = 0;
    for (const auto& p : parts) {
        xm.middleCols(c, p.size()) = p.x_minus;
        um.middleCols(c, p.size()) = p.u_minus;
        xp.middleCols(c, p.size()) = p.x_plus;
        c += p.size();
    }
    return DataBatch(std::move(xm), std::move(um), std::move(xp));
}

SlidingWindow::SlidingWindow(Index capacity, Index state_dim, Index input_dim)
    : capacity_(capacity), nx_(state_dim), nu_(input_dim)
{
    if (capacity < 1)
        throw PreconditionError("sliding window: capacity must be positive");
    if (state_dim < 1 || input_dim < 0)
        throw PreconditionError("sliding window: invalid dimensions");
}

void SlidingWindow::push(const Vector& x_prev, const Vector& u, const Vector& x_next)
{
    if (x_prev.size() != nx_ || x_next.size() != nx_ || u.size() != nu_)
        throw DimensionError("sliding window push: expected state dim " + std::to_string(nx_) + " and input dim " +
                             std::to_string(nu_) + ", got " + std::to_string(x_prev.size()) + "/" +
                             std::to_string(u.size()) + "/" + std::to_string(x_next.size()));
    if (full()) {
        x_minus_.pop_front();
        u_minus_.pop_front();
        x_plus_.pop_front();
    }
    x_minus_.push_back(x_prev);
    u_minus_.push_back(u);
    x_plus_.push_back(x_next);
}

DataBatch SlidingWindow::batch() const
{
    const Index n = fill();
    Matrix xm(nx_, n), um(nu_, n), xp(nx_, n);
    for (Index j = 0; j < n; ++j) {
        const auto s = static_cast<std::size_t>(j);
        xm.col(j) = x_minus_[s];
        um.col(j) = u_minus_[s];
        xp.col(j) = x_plus_[s];
    }
    return DataBatch(std::move(xm), std::move(um), std::move(xp));
}

SlidingWindow window_push(SlidingWindow w, const Vector& x_prev, const Vector& u, const Vector& x_next)
{
    w.push(x_prev, u, x_next);
    return w;
}

} // namespace zreach
