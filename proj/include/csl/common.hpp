#pragma once

#include <cstdint>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace csl {

// ---------------------------------------------------------------------------
// Errors shared across modules.

struct NotExtendable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ClusterTooLarge : std::runtime_error {
    ClusterTooLarge(int variable, std::size_t size, std::size_t bound)
        : std::runtime_error("local cluster of variable " + std::to_string(variable) +
                             " has " + std::to_string(size) + " variables (bound " +
                             std::to_string(bound) + ")"),
          variable(variable), size(size), bound(bound) {}
    int variable;
    std::size_t size;
    std::size_t bound;
};

struct SingularInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Deterministic RNG. std::mt19937_64 has a fully specified sequence; the
// distribution conversions below are hand-rolled so that results are
// reproducible across standard libraries.

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over (seed, stream)
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(mix_seed(seed, 0)) {}

    std::uint64_t next() {
        // xorshift* would do; keep splitmix64 as the engine, it is seedable,
        // splittable and passes BigCrush for this workload.
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // rejection-free modulo bias is negligible for n << 2^64; use
        // Lemire's multiply-shift reduction for determinism and speed.
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Standard normal via Box-Muller (deterministic, no cached state surprises).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// Variable sets as 64-bit masks. Exact search is bounded well below 64
// variables, so one word suffices; graph-scale code uses explicit vectors.

using VarSet = std::uint64_t;

inline bool vs_contains(VarSet s, int i) { return (s >> i) & 1ULL; }
inline VarSet vs_with(VarSet s, int i) { return s | (1ULL << i); }
inline VarSet vs_without(VarSet s, int i) { return s & ~(1ULL << i); }
inline int vs_size(VarSet s) { return __builtin_popcountll(s); }
inline bool vs_subset(VarSet a, VarSet b) { return (a & ~b) == 0; }
inline VarSet vs_full(int d) { return d >= 64 ? ~0ULL : ((1ULL << d) - 1); }

inline std::vector<int> vs_to_vector(VarSet s) {
    std::vector<int> out;
    while (s) {
        int i = __builtin_ctzll(s);
        out.push_back(i);
        s &= s - 1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Compensated (double-double) accumulation. Search totals are sums of a few
// dozen local scores; accumulating them error-free makes DP, A* and the
// brute-force enumerator agree bit-for-bit instead of to ~1e-10.

struct DSum {
    double hi = 0.0;
    double lo = 0.0;

    static DSum zero() { return {}; }

    DSum plus(double y) const {
        double s = hi + y;
        double bb = s - hi;
        double err = (hi - (s - bb)) + (y - bb);
        err += lo;
        double rhi = s + err;
        double rlo = err - (rhi - s);
        return {rhi, rlo};
    }

    DSum plus(const DSum& y) const { return plus(y.hi).plus(y.lo); }

    double value() const { return hi + lo; }

    bool less(const DSum& o) const {
        if (hi != o.hi) return hi < o.hi;
        return lo < o.lo;
    }
    bool operator==(const DSum& o) const { return hi == o.hi && lo == o.lo; }
};

inline DSum dsum_of(const std::vector<double>& xs) {
    DSum s;
    for (double x : xs) s = s.plus(x);
    return s;
}

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPosInf = std::numeric_limits<double>::infinity();

}  // namespace csl
