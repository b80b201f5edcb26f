#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace sprl {

/// Named random streams. Every consumer of randomness draws from its own
/// stream so that adding a draw in one place never shifts another's sequence.
enum class Stream : std::uint64_t {
    noise = 1,
    shuffle = 2,
    init = 3,
    augment = 4,
};

/// Seeded, splittable PRNG: mt19937_64 keyed by (seed, stream, substream)
/// through a SplitMix64 mix. Distributions are implemented here rather than
/// taken from <random> so that sampled values are identical across standard
/// libraries.
class SplitRng {
  public:
    SplitRng(std::uint64_t seed, Stream stream, std::uint64_t substream = 0)
        : engine_(mix(mix(mix(seed) ^ static_cast<std::uint64_t>(stream)) ^ substream)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1), 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n), n > 0. Rejection sampling, exact.
    std::uint64_t uniform_below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("uniform_below: empty range");
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    /// Standard normal via Box-Muller; pairs are generated, the spare cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    /// Fisher-Yates.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(uniform_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// Sample an index from a probability row by CDF inversion. When u lands
    /// in the rounding slack past the accumulated sum, fall back to the last
    /// index that actually carries mass.
    int categorical(std::span<const double> probs) {
        const double u = uniform();
        double acc = 0.0;
        int last_nonzero = 0;
        for (std::size_t j = 0; j < probs.size(); ++j) {
            if (probs[j] > 0.0) last_nonzero = static_cast<int>(j);
            acc += probs[j];
            if (u < acc && probs[j] > 0.0) return static_cast<int>(j);
        }
        return last_nonzero;
    }

  private:
    static std::uint64_t mix(std::uint64_t x) {
        // SplitMix64 finalizer
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace sprl
