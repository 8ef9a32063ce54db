#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace recap {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Independent stream for (root seed, task index); replicate results depend
// only on their index, so parallel schedules cannot change them.
inline std::mt19937_64 make_stream(std::uint64_t root, std::uint64_t index) {
    std::uint64_t s = root;
    splitmix64(s);
    s ^= 0xD1B54A32D192ED03ull * (index + 1);
    return std::mt19937_64(splitmix64(s));
}

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Index draw by cumulative scan; probs need not be normalized.
inline std::size_t draw_categorical(std::mt19937_64& rng, const std::vector<double>& probs) {
    double total = 0.0;
    for (double p : probs) total += p;
    double u = uniform01(rng) * total;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        u -= probs[i];
        if (u < 0.0) return i;
    }
    return probs.size() - 1;
}

}  // namespace recap
