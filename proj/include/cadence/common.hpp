#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

// Shared basics: error types, deterministic RNG streams, a row-major matrix.

namespace cadence {

using VecView = std::span<const double>;
using MutVecView = std::span<double>;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
    using Error::Error;
};

// Thrown when an integration leaves the finite/bounded regime.
struct DivergedError : Error {
    double last_valid_time;
    DivergedError(const std::string& msg, double t)
        : Error(msg), last_valid_time(t) {}
};

struct InvalidArgumentError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

// Parse failure in a dataset/checkpoint file; record_index is -1 when the
// failure is in the header.
struct ParseError : Error {
    long record_index;
    ParseError(const std::string& msg, long record)
        : Error(msg), record_index(record) {}
};

struct InsufficientSamplesError : Error {
    using Error::Error;
};

struct ObjectiveUnavailableError : Error {
    using Error::Error;
};

struct DegenerateAnchorError : Error {
    using Error::Error;
};

struct RankDeficientError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Deterministic RNG. xoshiro256++ seeded through splitmix64, with hand-rolled
// uniform/normal converters so that streams are bit-identical across
// platforms and standard-library versions.
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& s : s_) s = splitmix64(sm);
    }

    // Independent substream keyed by (seed, purpose, index). Used so that
    // per-unit / per-step draws do not depend on thread count or iteration
    // order.
    static Rng stream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index) {
        std::uint64_t sm = seed;
        std::uint64_t a = splitmix64(sm);
        sm = a ^ (purpose * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL);
        std::uint64_t b = splitmix64(sm);
        sm = b ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
        return Rng(splitmix64(sm));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Standard normal via Box-Muller (no cached spare; two uniforms per draw).
    double normal() {
        double u1 = 1.0 - uniform(); // (0, 1]
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Integer in [0, n). Multiply-high; bias is < 2^-64 and irrelevant here.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

// Purpose tags for Rng::stream. One per independent stochastic role.
namespace rng_purpose {
inline constexpr std::uint64_t unit_base = 1;      // benchgen per-unit draws
inline constexpr std::uint64_t unit_followup = 2;  // benchgen follow-up draws
inline constexpr std::uint64_t init = 3;           // parameter initialization
inline constexpr std::uint64_t dsm_step = 4;       // stage 1 per-step batch/noise
inline constexpr std::uint64_t stage2_step = 5;    // stage 2 per-step query times
inline constexpr std::uint64_t metric = 6;         // seeded metric draws (SW2 etc.)
inline constexpr std::uint64_t permutation = 7;    // permutation tests
inline constexpr std::uint64_t lift = 8;           // high-dimensional lift matrices
inline constexpr std::uint64_t holdout = 9;        // train/holdout splits
} // namespace rng_purpose

// ---------------------------------------------------------------------------
// Minimal row-major matrix of doubles. Hot kernels index raw storage; Eigen
// is used only behind cold linear-algebra calls (PCA, small solves).
// ---------------------------------------------------------------------------

struct RowMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    RowMatrix() = default;
    RowMatrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    MutVecView row(std::size_t i) { return {data.data() + i * cols, cols}; }
    VecView row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

inline bool all_finite(VecView v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace cadence
