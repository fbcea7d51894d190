#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace ratl {

// All randomness in the library flows through this wrapper. std::mt19937_64's
// raw output sequence is fully specified by the standard, but the
// std::uniform_* distributions are not; the helpers below replace them so that
// identical seeds give identical results on any platform/stdlib.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, n). Modulo bias is ~n/2^64, irrelevant at our sizes.
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(next() % n); }

    // Uniform in [0, 1), 53-bit resolution.
    double real() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Fisher-Yates.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// One splitmix64 step; used to derive independent seeds for sub-tasks
// (per-fold, per-label) so results do not depend on execution order.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + (stream + 1) * 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace ratl
