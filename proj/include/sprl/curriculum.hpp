#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sprl {

/// Pace parameters of the self-paced schedule. Epochs are 1-based.
struct PaceConfig {
    int sample_count = 0;       // n
    int initial_size = 0;       // m, confident-curriculum size after warmup
    int warmup_epochs = 20;     // T1
    int total_epochs = 200;     // T
    int subset_count = 10;      // K
    double resistance_scale = 10.0;  // step unit for the resistance weight cap
};

/// Throws unless 0 < T1 < T, K in [2, n], m in [0.1 n, 0.5 n], and the
/// curriculum step length is nonzero.
void validate_pace(const PaceConfig& cfg);

/// Inclusive bounds of the admissible initial curriculum size [0.1 n, 0.5 n].
int initial_size_floor(int n);
int initial_size_ceiling(int n);

/// Piecewise-linear curriculum size: n during warmup, then m plus one subset
/// of floor(n/K) samples every step_length epochs, capped at n. The step
/// length is floor((T - T1) / (K - mK/n + 1)) with the inner term kept in
/// exact rational arithmetic.
int curriculum_size(int epoch, const PaceConfig& cfg);

/// gamma_max = scale * (10 - ceil(m / (0.1 n))).
double max_resistance_weight(double scale, int initial_size, int n);

/// Ramp-up weight of the resistance term: 0 through warmup, then
/// gamma_max * exp(-5 (1 - mu)^2) with mu = (t - T1)/(T - T1).
double resistance_weight(int epoch, const PaceConfig& cfg);

/// v and the realised threshold lambda.
struct Selection {
    std::vector<std::uint8_t> selected;
    double threshold = 0.0;
};

/// Mark exactly `count` samples with the smallest losses (ties broken by
/// ascending index). threshold is the largest selected loss, +inf when
/// count = n, -inf when count = 0.
Selection select_confident(std::span<const double> losses, int count);

/// Plain self-paced rule: selected iff loss < threshold. No cardinality
/// constraint.
std::vector<std::uint8_t> spl_select(std::span<const double> losses, double threshold);

/// Pick m from warmup confident counts: the max count when the noise rate is
/// unknown, otherwise 0.65 (1 - rate) n, both clamped to [0.1 n, 0.5 n].
int choose_initial_size(std::span<const int> confident_counts,
                        std::optional<double> known_noise_rate, int n);

}  // namespace sprl
