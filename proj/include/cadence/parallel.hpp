#pragma once

#include <cstddef>
#include <span>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

// Deterministic parallel primitives.
//
// Every parallel kernel in this codebase is either a pure map (each index
// writes its own output slot) or a blocked accumulation. Blocked accumulation
// splits the index range into fixed-size blocks, reduces each block serially
// in index order into its own buffer, and then folds the block buffers in
// block order on one thread. The grouping of floating-point sums therefore
// depends only on the block size, never on the thread count or schedule, so
// results are bit-identical for any OMP_NUM_THREADS, including 1.
//
// Mode::serial runs the same code on the calling thread; it exists so tests
// and the benchmark tool can compare the serial and OpenMP paths directly.

namespace cadence::par {

enum class Mode { serial, openmp };

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Pure map over [0, n). f(i) must only write state owned by index i.
template <class F>
void parallel_for(std::size_t n, F&& f, Mode mode = Mode::openmp) {
#ifdef _OPENMP
    if (mode == Mode::openmp) {
#pragma omp parallel for schedule(dynamic, 16)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            f(static_cast<std::size_t>(i));
        return;
    }
#else
    (void)mode;
#endif
    for (std::size_t i = 0; i < n; ++i) f(i);
}

// Map over blocks [lo, hi) of at most `block` indices.
template <class F>
void parallel_for_blocks(std::size_t n, std::size_t block, F&& f, Mode mode = Mode::openmp) {
    if (block == 0) block = 1;
    const std::size_t n_blocks = (n + block - 1) / block;
#ifdef _OPENMP
    if (mode == Mode::openmp) {
#pragma omp parallel for schedule(dynamic, 1)
        for (long long b = 0; b < static_cast<long long>(n_blocks); ++b) {
            const std::size_t lo = static_cast<std::size_t>(b) * block;
            const std::size_t hi = lo + block < n ? lo + block : n;
            f(static_cast<std::size_t>(b), lo, hi);
        }
        return;
    }
#else
    (void)mode;
#endif
    for (std::size_t b = 0; b < n_blocks; ++b) {
        const std::size_t lo = b * block;
        const std::size_t hi = lo + block < n ? lo + block : n;
        f(b, lo, hi);
    }
}

// Deterministic reduction. per_block(lo, hi, buf) accumulates the
// contribution of indices [lo, hi) into buf (length buf_len, zeroed).
// Block buffers are folded into out in block order. out is accumulated into,
// not cleared.
template <class F>
void blocked_accumulate(std::size_t n, std::size_t block, std::span<double> out,
                        F&& per_block, Mode mode = Mode::openmp) {
    if (n == 0) return;
    if (block == 0) block = 1;
    const std::size_t n_blocks = (n + block - 1) / block;
    const std::size_t buf_len = out.size();
    std::vector<double> bufs(n_blocks * buf_len, 0.0);
    parallel_for_blocks(
        n, block,
        [&](std::size_t b, std::size_t lo, std::size_t hi) {
            per_block(lo, hi, std::span<double>(bufs.data() + b * buf_len, buf_len));
        },
        mode);
    for (std::size_t b = 0; b < n_blocks; ++b) {
        const double* src = bufs.data() + b * buf_len;
        for (std::size_t k = 0; k < buf_len; ++k) out[k] += src[k];
    }
}

// Scalar convenience wrapper around blocked_accumulate.
template <class F>
double blocked_sum(std::size_t n, std::size_t block, F&& per_index, Mode mode = Mode::openmp) {
    double total = 0.0;
    blocked_accumulate(
        n, block, std::span<double>(&total, 1),
        [&](std::size_t lo, std::size_t hi, std::span<double> buf) {
            for (std::size_t i = lo; i < hi; ++i) buf[0] += per_index(i);
        },
        mode);
    return total;
}

} // namespace cadence::par
