#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hicl {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input documents (CSV, JSON specs).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Invariant violations and bad arguments.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Filesystem and OS failures.
class IoError : public Error {
public:
    using Error::Error;
};

/// Failures while running an experiment pipeline.
class PipelineError : public Error {
public:
    using Error::Error;
};

/// splitmix64 finalizer; bijective on 64-bit values.
uint64_t mix64(uint64_t x);

/// FNV-1a over a byte string.
uint64_t hash_string(std::string_view s);

/// Combine a seed with an integer stream id.
uint64_t derive_seed(uint64_t seed, uint64_t stream);

/// Combine a seed with a textual node path ("hr/c3/DoS" and the like).
uint64_t derive_seed(uint64_t seed, std::string_view path);

/// Deterministic random source. The engine is std::mt19937_64 (fully
/// specified by the standard); all distribution transforms are hand-rolled
/// so that sequences are identical across platforms and standard libraries.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(mix64(seed)) {}

    uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [0, n). n must be > 0.
    size_t bounded(size_t n);

    /// Uniform double in [0, 1).
    double uniform01();

    /// Uniform double in [a, b).
    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    /// Standard normal via Box-Muller.
    double normal();

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = bounded(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

/// Shortest round-trip decimal representation (locale independent).
std::string format_double(double value);

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Work is split into
/// contiguous chunks; each index owns its output slot, so results cannot
/// depend on the thread count. Exceptions from workers are rethrown.
void parallel_for(size_t n, int threads, const std::function<void(size_t)>& fn);

/// Trim ASCII whitespace from both ends.
std::string_view trim(std::string_view s);

}  // namespace hicl
