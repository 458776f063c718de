#pragma once

#include <cstdint>

#include "cadence/common.hpp"
#include "cadence/parallel.hpp"

namespace cadence::metrics {

// Sliced Wasserstein-2: root of the average, over L seeded uniform random
// unit directions, of the exact squared 1-D W2 between projected samples
// (sorted-quantile coupling; sample sizes may differ).
double sliced_w2(const RowMatrix& a, const RowMatrix& b, int num_projections,
                 std::uint64_t seed, par::Mode mode = par::Mode::openmp);

double sliced_w2_serial(const RowMatrix& a, const RowMatrix& b, int num_projections,
                        std::uint64_t seed);

// Exact squared W2 between two 1-D samples (need not be the same size).
double w2_squared_1d(std::vector<double> a, std::vector<double> b);

} // namespace cadence::metrics
