#include "cadence/metrics/mmd.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace cadence::metrics {

WeightedSampleSet WeightedSampleSet::uniform(RowMatrix pts) {
    WeightedSampleSet s;
    const std::size_t n = pts.rows;
    s.points = std::move(pts);
    s.weights.assign(n, n > 0 ? 1.0 / static_cast<double>(n) : 0.0);
    return s;
}

void WeightedSampleSet::validate() const {
    if (points.rows != weights.size())
        throw DimensionError("weighted sample set: weight count != point count");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw InvalidArgumentError("weighted sample set: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-10)
        throw InvalidArgumentError("weighted sample set: weights must sum to 1");
}

double gaussian_kernel(VecView x, VecView y, double sigma) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        d2 += d * d;
    }
    return std::exp(-d2 / (2.0 * sigma * sigma));
}

namespace {

// Weighted double sum over a kernel block: sum_i sum_j wa_i wb_j k(A_i, B_j).
double weighted_block_sum(const WeightedSampleSet& a, const WeightedSampleSet& b,
                          double sigma, par::Mode mode) {
    const std::size_t n = a.points.rows;
    return par::blocked_sum(
        n, 32,
        [&](std::size_t i) {
            double acc = 0.0;
            const auto ai = a.points.row(i);
            for (std::size_t j = 0; j < b.points.rows; ++j)
                acc += b.weights[j] * gaussian_kernel(ai, b.points.row(j), sigma);
            return a.weights[i] * acc;
        },
        mode);
}

// Deterministic total order on sample sets for the symmetry canonicalization.
bool set_less(const WeightedSampleSet& a, const WeightedSampleSet& b) {
    if (a.points.rows != b.points.rows) return a.points.rows < b.points.rows;
    const int c = std::memcmp(a.points.data.data(), b.points.data.data(),
                              a.points.data.size() * sizeof(double));
    if (c != 0) return c < 0;
    return std::memcmp(a.weights.data(), b.weights.data(),
                       a.weights.size() * sizeof(double)) < 0;
}

} // namespace

double mmd2_unclamped(const WeightedSampleSet& a, const WeightedSampleSet& b,
                      double sigma, par::Mode mode) {
    if (a.points.cols != b.points.cols)
        throw DimensionError("mmd2: sample sets have different dimensions");
    if (sigma <= 0.0) throw InvalidArgumentError("mmd2: sigma must be positive");
    const WeightedSampleSet* x = &a;
    const WeightedSampleSet* y = &b;
    if (set_less(b, a)) std::swap(x, y);
    const double t_xx = weighted_block_sum(*x, *x, sigma, mode);
    const double t_yy = weighted_block_sum(*y, *y, sigma, mode);
    const double t_xy = weighted_block_sum(*x, *y, sigma, mode);
    return t_xx + t_yy - 2.0 * t_xy;
}

double mmd2(const WeightedSampleSet& a, const WeightedSampleSet& b, double sigma,
            par::Mode mode) {
    return std::max(0.0, mmd2_unclamped(a, b, sigma, mode));
}

double mmd2_serial(const WeightedSampleSet& a, const WeightedSampleSet& b,
                   double sigma) {
    return mmd2(a, b, sigma, par::Mode::serial);
}

void gaussian_kernel_matrix(const RowMatrix& A, const RowMatrix& B, double sigma,
                            RowMatrix& out, par::Mode mode) {
    if (A.cols != B.cols) throw DimensionError("kernel matrix: dimension mismatch");
    out = RowMatrix(A.rows, B.rows);
    par::parallel_for(
        A.rows,
        [&](std::size_t i) {
            const auto ai = A.row(i);
            auto orow = out.row(i);
            for (std::size_t j = 0; j < B.rows; ++j)
                orow[j] = gaussian_kernel(ai, B.row(j), sigma);
        },
        mode);
}

void gaussian_kernel_matrix_serial(const RowMatrix& A, const RowMatrix& B,
                                   double sigma, RowMatrix& out) {
    gaussian_kernel_matrix(A, B, sigma, out, par::Mode::serial);
}

double median_heuristic_bandwidth(const RowMatrix& pts, std::size_t max_points,
                                  std::uint64_t seed) {
    if (pts.rows < 2) throw InsufficientSamplesError("median heuristic: need >= 2 points");
    std::vector<std::size_t> idx(pts.rows);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    if (pts.rows > max_points) {
        Rng rng = Rng::stream(seed, rng_purpose::metric, 0);
        for (std::size_t i = 0; i < max_points; ++i) {
            const std::size_t j = i + rng.below(pts.rows - i);
            std::swap(idx[i], idx[j]);
        }
        idx.resize(max_points);
    }
    std::vector<double> dists;
    dists.reserve(idx.size() * (idx.size() - 1) / 2);
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = i + 1; j < idx.size(); ++j) {
            double d2 = 0.0;
            const auto xi = pts.row(idx[i]);
            const auto xj = pts.row(idx[j]);
            for (std::size_t d = 0; d < pts.cols; ++d) {
                const double t = xi[d] - xj[d];
                d2 += t * t;
            }
            dists.push_back(std::sqrt(d2));
        }
    std::nth_element(dists.begin(), dists.begin() + dists.size() / 2, dists.end());
    const double med = dists[dists.size() / 2];
    return med > 0.0 ? med : 1.0;
}

TwoSampleTest mmd_permutation_test(const RowMatrix& a, const RowMatrix& b,
                                   double sigma, int n_permutations,
                                   std::uint64_t seed, par::Mode mode) {
    const std::size_t n = a.rows, m = b.rows, total = n + m;
    if (n == 0 || m == 0)
        throw InsufficientSamplesError("permutation test: empty sample set");

    RowMatrix pooled(total, a.cols);
    for (std::size_t i = 0; i < n; ++i)
        std::copy(a.row(i).begin(), a.row(i).end(), pooled.row(i).begin());
    for (std::size_t j = 0; j < m; ++j)
        std::copy(b.row(j).begin(), b.row(j).end(), pooled.row(n + j).begin());

    RowMatrix K;
    gaussian_kernel_matrix(pooled, pooled, sigma, K, mode);

    auto split_stat = [&](const std::vector<std::size_t>& order) {
        double s_aa = 0.0, s_bb = 0.0, s_ab = 0.0;
        for (std::size_t i = 0; i < total; ++i) {
            const std::size_t pi = order[i];
            const double* krow = K.data.data() + pi * total;
            for (std::size_t j = 0; j < total; ++j) {
                const double k = krow[order[j]];
                if (i < n && j < n)
                    s_aa += k;
                else if (i >= n && j >= n)
                    s_bb += k;
                else
                    s_ab += k;
            }
        }
        const double nn = static_cast<double>(n) * n;
        const double mm = static_cast<double>(m) * m;
        const double nm = static_cast<double>(n) * m;
        return s_aa / nn + s_bb / mm - s_ab / nm; // s_ab counts both directions
    };

    std::vector<std::size_t> identity(total);
    for (std::size_t i = 0; i < total; ++i) identity[i] = i;
    const double stat = split_stat(identity);

    std::vector<double> null_stats(n_permutations);
    par::parallel_for(
        static_cast<std::size_t>(n_permutations),
        [&](std::size_t p) {
            Rng rng = Rng::stream(seed, rng_purpose::permutation, p);
            std::vector<std::size_t> order(identity);
            for (std::size_t i = total - 1; i > 0; --i) {
                const std::size_t j = rng.below(i + 1);
                std::swap(order[i], order[j]);
            }
            null_stats[p] = split_stat(order);
        },
        mode);

    TwoSampleTest res;
    res.stat = stat;
    std::vector<double> sorted(null_stats);
    std::sort(sorted.begin(), sorted.end());
    const std::size_t q = static_cast<std::size_t>(
        std::floor(0.95 * static_cast<double>(n_permutations - 1)));
    res.null95 = sorted[q];
    int ge = 0;
    for (double s : null_stats)
        if (s >= stat) ++ge;
    res.pvalue = (1.0 + ge) / (1.0 + n_permutations);
    return res;
}

} // namespace cadence::metrics
