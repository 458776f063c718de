#pragma once

#include <vector>

#include "cadence/common.hpp"

namespace cadence::metrics {

// Per-unit trajectories on a shared evaluation grid: rows = grid times,
// cols = observation dimension. valid_from[i] masks grid entries before
// unit i's entry time (predictions are only defined for t >= t_entry).
struct TrajectoryBatch {
    std::vector<double> grid;
    std::vector<RowMatrix> units;
    std::vector<std::size_t> valid_from; // first valid grid index per unit
};

// Mean over units, valid grid times and dimensions of |pred - truth|.
double trajectory_mae(const TrajectoryBatch& predicted, const TrajectoryBatch& truth);

// RMSE over units and dimensions at each grid time (entries with no valid
// unit are NaN).
std::vector<double> rmse_vs_horizon(const TrajectoryBatch& predicted,
                                    const TrajectoryBatch& truth);

} // namespace cadence::metrics
