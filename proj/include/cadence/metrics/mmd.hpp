#pragma once

#include <cstdint>
#include <vector>

#include "cadence/common.hpp"
#include "cadence/parallel.hpp"

// Weighted maximum mean discrepancy with a Gaussian kernel
// k(x,y) = exp(-|x-y|^2 / (2 sigma^2)), biased estimator (full double sums).

namespace cadence::metrics {

struct WeightedSampleSet {
    RowMatrix points;            // n x q
    std::vector<double> weights; // nonnegative, sum to 1 within 1e-10

    static WeightedSampleSet uniform(RowMatrix pts);
    void validate() const;
};

double gaussian_kernel(VecView x, VecView y, double sigma);

// Biased weighted estimator, clamped at zero from below. Internally
// canonicalizes the argument order so mmd2(a, b) == mmd2(b, a) bitwise.
double mmd2(const WeightedSampleSet& a, const WeightedSampleSet& b, double sigma,
            par::Mode mode = par::Mode::openmp);

// Pre-clamp value (can be a tiny negative number for a == b).
double mmd2_unclamped(const WeightedSampleSet& a, const WeightedSampleSet& b,
                      double sigma, par::Mode mode = par::Mode::openmp);

// Plain serial twin of the OpenMP kernel, kept as a reference implementation
// for tests and the benchmark tool.
double mmd2_serial(const WeightedSampleSet& a, const WeightedSampleSet& b,
                   double sigma);

// out(i, j) = k(A_i, B_j). Parallel over rows; deterministic.
void gaussian_kernel_matrix(const RowMatrix& A, const RowMatrix& B, double sigma,
                            RowMatrix& out, par::Mode mode = par::Mode::openmp);
void gaussian_kernel_matrix_serial(const RowMatrix& A, const RowMatrix& B,
                                   double sigma, RowMatrix& out);

// Median pairwise distance over at most max_points rows (seeded subsample).
double median_heuristic_bandwidth(const RowMatrix& pts, std::size_t max_points,
                                  std::uint64_t seed);

// Unweighted two-sample permutation test on MMD^2.
struct TwoSampleTest {
    double stat = 0.0;   // observed MMD^2
    double null95 = 0.0; // 95th percentile of the permutation null
    double pvalue = 1.0;
    bool pass() const { return stat <= null95; }
};

TwoSampleTest mmd_permutation_test(const RowMatrix& a, const RowMatrix& b,
                                   double sigma, int n_permutations,
                                   std::uint64_t seed,
                                   par::Mode mode = par::Mode::openmp);

} // namespace cadence::metrics
