#pragma once

#include <cstdint>
#include <cmath>

#include <Eigen/Dense>

namespace ope {

/**
 * SplitMix64 stream generator (Steele, Lea & Flood 2014).
 *
 * The state advances by the 64-bit golden-gamma constant and each output is a
 * finalizer of the state, so the stream is a pure function of (seed, counter).
 * Any port that implements the same mixing constants reproduces the stream
 * bit-for-bit.
 *
 * Draw-order contract used by the samplers: one tuple consumes, in order,
 * state, action, reward (two uniforms via Box-Muller), next-state.
 */
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; consumes exactly two uniforms.
    double next_normal() {
        double u1 = next_uniform();
        double u2 = next_uniform();
        // Guard the log singularity at u1 == 0.
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    /// Index sampled from an (unnormalized is not allowed) probability vector
    /// by CDF scan; consumes one uniform.
    int next_categorical(const Eigen::VectorXd& probs) {
        const double u = next_uniform();
        double acc = 0.0;
        const int n = static_cast<int>(probs.size());
        for (int i = 0; i < n; ++i) {
            acc += probs[i];
            if (u < acc) return i;
        }
        return n - 1;  // rounding residue lands on the last cell
    }

private:
    std::uint64_t state_;
};

}  // namespace ope
