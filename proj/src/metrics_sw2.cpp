#include "cadence/metrics/sw2.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace cadence::metrics {

double w2_squared_1d(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty())
        throw InsufficientSamplesError("w2_squared_1d: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const std::size_t n = a.size(), m = b.size();

    // Integrate (Fa^{-1}(u) - Fb^{-1}(u))^2 du over the merged quantile grid.
    double total = 0.0;
    std::size_t ia = 0, ib = 0;
    double u = 0.0;
    while (ia < n && ib < m) {
        const double next_a = static_cast<double>(ia + 1) / n;
        const double next_b = static_cast<double>(ib + 1) / m;
        const double next = std::min(next_a, next_b);
        const double diff = a[ia] - b[ib];
        total += diff * diff * (next - u);
        u = next;
        if (next_a <= next) ++ia;
        if (next_b <= next) ++ib;
    }
    return total;
}

namespace {

double sw2_impl(const RowMatrix& a, const RowMatrix& b, int L, std::uint64_t seed,
                par::Mode mode) {
    if (a.cols != b.cols) throw DimensionError("sliced_w2: dimension mismatch");
    if (L < 1) throw InvalidArgumentError("sliced_w2: need at least one projection");
    const std::size_t q = a.cols;

    std::vector<double> per_proj(L);
    par::parallel_for(
        static_cast<std::size_t>(L),
        [&](std::size_t l) {
            Rng rng = Rng::stream(seed, rng_purpose::metric, l);
            std::vector<double> dir(q);
            double norm = 0.0;
            do {
                norm = 0.0;
                for (auto& d : dir) {
                    d = rng.normal();
                    norm += d * d;
                }
            } while (norm == 0.0);
            norm = std::sqrt(norm);
            for (auto& d : dir) d /= norm;

            std::vector<double> pa(a.rows), pb(b.rows);
            for (std::size_t i = 0; i < a.rows; ++i) {
                double s = 0.0;
                const auto r = a.row(i);
                for (std::size_t d = 0; d < q; ++d) s += dir[d] * r[d];
                pa[i] = s;
            }
            for (std::size_t i = 0; i < b.rows; ++i) {
                double s = 0.0;
                const auto r = b.row(i);
                for (std::size_t d = 0; d < q; ++d) s += dir[d] * r[d];
                pb[i] = s;
            }
            per_proj[l] = w2_squared_1d(std::move(pa), std::move(pb));
        },
        mode);

    double mean = 0.0;
    for (double v : per_proj) mean += v;
    mean /= static_cast<double>(L);
    return std::sqrt(mean);
}

} // namespace

double sliced_w2(const RowMatrix& a, const RowMatrix& b, int num_projections,
                 std::uint64_t seed, par::Mode mode) {
    return sw2_impl(a, b, num_projections, seed, mode);
}

double sliced_w2_serial(const RowMatrix& a, const RowMatrix& b, int num_projections,
                        std::uint64_t seed) {
    return sw2_impl(a, b, num_projections, seed, par::Mode::serial);
}

} // namespace cadence::metrics
