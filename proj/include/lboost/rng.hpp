#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace lboost {

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed for the stream addressed by `keys` under `master`. Distinct key paths
/// give statistically independent streams, so results never depend on the
/// order in which work units run.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys);

/// Random stream with platform-independent output: the engine is mt19937_64
/// (fully specified by the standard) and the transforms below are our own.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
    RandomStream(std::uint64_t master, std::initializer_list<std::uint64_t> keys)
        : engine_(derive_seed(master, keys)) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Standard normal by the Box-Muller transform.
    double normal();
    /// Uniform integer in [0, bound) without modulo bias.
    std::uint64_t below(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Fisher-Yates shuffle driven by `rng`.
template <typename T>
void shuffle(std::vector<T>& v, RandomStream& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.below(i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace lboost
