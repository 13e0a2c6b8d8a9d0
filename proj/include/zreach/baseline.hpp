#ifndef ZREACH_BASELINE_HPP
#define ZREACH_BASELINE_HPP

#include "zreach/window.hpp"
#include "zreach/zonotope.hpp"

namespace zreach
{

/// Batch least-squares set of models consistent with the data and noise set:
/// (X+ - C_w 1^T) D^+ plus generators -g_i e_t^T D^+ for every noise generator
/// g_i and data column t. D = [X-; U-], with a leading ones row when affine.
///
/// Rank-deficient D is rejected (insufficient excitation) unless
/// allow_rank_deficient is set, in which case the pseudoinverse is used.
MatrixZonotope batch_ls_model_set(const DataBatch& data, const Zonotope& noise, bool affine,
                                  bool allow_rank_deficient = false);

/// As above on a full window.
MatrixZonotope batch_ls_model_set(const SlidingWindow& window, const Zonotope& noise, bool affine);

} // namespace zreach

#endif
