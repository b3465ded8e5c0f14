#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Geometry>

namespace sweptnet {

// Seeded random generator with hand-rolled distribution transforms. The
// transforms are written out explicitly (instead of std::uniform_real_distribution
// etc.) so that a given seed produces the same stream on every standard library.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // index in [0, n)
    size_t uniform_index(size_t n) { return static_cast<size_t>(uniform() * static_cast<double>(n)); }

    // Standard normal via Box-Muller. Draws two uniforms per call.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    Eigen::Vector3d normal3(double sigma) {
        return {sigma * normal(), sigma * normal(), sigma * normal()};
    }

    // Uniform rotation over SO(3) (Shoemake's subgroup algorithm).
    Eigen::Matrix3d rotation() {
        const double u1 = uniform();
        const double u2 = uniform();
        const double u3 = uniform();
        const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
        Eigen::Quaterniond q(b * std::cos(2.0 * M_PI * u3), a * std::sin(2.0 * M_PI * u2),
                             a * std::cos(2.0 * M_PI * u2), b * std::sin(2.0 * M_PI * u3));
        return q.normalized().toRotationMatrix();
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = uniform_index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

// Derives independent substream seeds from a base seed, so that work items
// (motions, scenes, permutations) can be generated in any order or in parallel
// while producing identical bytes. SplitMix64 finalizer.
inline uint64_t substream_seed(uint64_t base, uint64_t index) {
    uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace sweptnet
