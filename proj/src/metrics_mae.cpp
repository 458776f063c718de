#include "cadence/metrics/mae.hpp"

#include <cmath>
#include <limits>

namespace cadence::metrics {

namespace {

void check_compatible(const TrajectoryBatch& a, const TrajectoryBatch& b) {
    if (a.grid != b.grid) throw DimensionError("trajectory metric: grids differ");
    if (a.units.size() != b.units.size())
        throw DimensionError("trajectory metric: unit counts differ");
    for (std::size_t i = 0; i < a.units.size(); ++i) {
        if (a.units[i].rows != a.grid.size() || b.units[i].rows != b.grid.size() ||
            a.units[i].cols != b.units[i].cols)
            throw DimensionError("trajectory metric: unit trajectory shape mismatch");
    }
}

std::size_t valid_from_of(const TrajectoryBatch& t, std::size_t i) {
    return t.valid_from.empty() ? 0 : t.valid_from[i];
}

} // namespace

double trajectory_mae(const TrajectoryBatch& predicted, const TrajectoryBatch& truth) {
    check_compatible(predicted, truth);
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < predicted.units.size(); ++i) {
        const auto& p = predicted.units[i];
        const auto& t = truth.units[i];
        for (std::size_t g = valid_from_of(predicted, i); g < p.rows; ++g)
            for (std::size_t d = 0; d < p.cols; ++d) {
                total += std::abs(p(g, d) - t(g, d));
                ++count;
            }
    }
    if (count == 0) throw InsufficientSamplesError("trajectory_mae: no valid entries");
    return total / static_cast<double>(count);
}

std::vector<double> rmse_vs_horizon(const TrajectoryBatch& predicted,
                                    const TrajectoryBatch& truth) {
    check_compatible(predicted, truth);
    const std::size_t n_grid = predicted.grid.size();
    std::vector<double> sums(n_grid, 0.0);
    std::vector<std::size_t> counts(n_grid, 0);
    for (std::size_t i = 0; i < predicted.units.size(); ++i) {
        const auto& p = predicted.units[i];
        const auto& t = truth.units[i];
        for (std::size_t g = valid_from_of(predicted, i); g < p.rows; ++g)
            for (std::size_t d = 0; d < p.cols; ++d) {
                const double e = p(g, d) - t(g, d);
                sums[g] += e * e;
                counts[g] += 1;
            }
    }
    std::vector<double> rmse(n_grid);
    for (std::size_t g = 0; g < n_grid; ++g)
        rmse[g] = counts[g] ? std::sqrt(sums[g] / static_cast<double>(counts[g]))
                            : std::numeric_limits<double>::quiet_NaN();
    return rmse;
}

} // namespace cadence::metrics
