#include "sprl/curriculum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sprl {

namespace {

// floor((T - T1) / (K - mK/n + 1)) without leaving integers:
// (T - T1) * n / (K*n - m*K + n), all terms positive.
std::int64_t step_length(const PaceConfig& cfg) {
    const std::int64_t n = cfg.sample_count;
    const std::int64_t numer = static_cast<std::int64_t>(cfg.total_epochs - cfg.warmup_epochs) * n;
    const std::int64_t denom =
        static_cast<std::int64_t>(cfg.subset_count) * n - static_cast<std::int64_t>(cfg.initial_size) * cfg.subset_count + n;
    if (denom <= 0) throw std::invalid_argument("curriculum: non-positive pace divisor");
    return numer / denom;
}

}  // namespace

int initial_size_floor(int n) { return static_cast<int>(std::ceil(0.1 * n - 1e-9)); }
int initial_size_ceiling(int n) { return static_cast<int>(std::floor(0.5 * n + 1e-9)); }

void validate_pace(const PaceConfig& cfg) {
    if (cfg.sample_count <= 0) throw std::invalid_argument("pace: sample_count must be positive");
    if (!(cfg.warmup_epochs > 0 && cfg.warmup_epochs < cfg.total_epochs))
        throw std::invalid_argument("pace: need 0 < T1 < T, got T1=" +
                                    std::to_string(cfg.warmup_epochs) +
                                    " T=" + std::to_string(cfg.total_epochs));
    if (cfg.subset_count < 2 || cfg.subset_count > cfg.sample_count)
        throw std::invalid_argument("pace: subset count K must lie in [2, n]");
    if (cfg.initial_size < initial_size_floor(cfg.sample_count) ||
        cfg.initial_size > initial_size_ceiling(cfg.sample_count))
        throw std::invalid_argument("pace: initial size m=" + std::to_string(cfg.initial_size) +
                                    " outside [0.1 n, 0.5 n] for n=" +
                                    std::to_string(cfg.sample_count));
    if (cfg.resistance_scale < 0.0)
        throw std::invalid_argument("pace: resistance scale must be >= 0");
    if (step_length(cfg) == 0)
        throw std::invalid_argument(
            "pace: curriculum step length is zero: T-T1=" +
            std::to_string(cfg.total_epochs - cfg.warmup_epochs) + " is smaller than K - mK/n + 1 with K=" +
            std::to_string(cfg.subset_count) + "; raise T-T1 or lower K");
}

int curriculum_size(int epoch, const PaceConfig& cfg) {
    if (epoch < 1 || epoch > cfg.total_epochs)
        throw std::invalid_argument("curriculum_size: epoch out of range");
    if (epoch <= cfg.warmup_epochs) return cfg.sample_count;

    const std::int64_t step = step_length(cfg);
    if (step == 0)
        throw std::invalid_argument(
            "curriculum_size: step length zero: T-T1=" +
            std::to_string(cfg.total_epochs - cfg.warmup_epochs) +
            " too small for K=" + std::to_string(cfg.subset_count));
    const std::int64_t increments = (epoch - cfg.warmup_epochs) / step;
    const std::int64_t subset = cfg.sample_count / cfg.subset_count;
    const std::int64_t size = cfg.initial_size + increments * subset;
    return static_cast<int>(std::min<std::int64_t>(size, cfg.sample_count));
}

double max_resistance_weight(double scale, int initial_size, int n) {
    // ceil(m / (0.1 n)) = ceil(10 m / n) in exact integer arithmetic.
    const std::int64_t tenth_steps =
        (static_cast<std::int64_t>(initial_size) * 10 + n - 1) / n;
    const double value = scale * (10.0 - static_cast<double>(tenth_steps));
    if (value < 0.0)
        throw std::invalid_argument("max_resistance_weight: negative cap (m too large)");
    return value;
}

double resistance_weight(int epoch, const PaceConfig& cfg) {
    if (epoch < 1 || epoch > cfg.total_epochs)
        throw std::invalid_argument("resistance_weight: epoch out of range");
    if (epoch <= cfg.warmup_epochs) return 0.0;
    const double cap = max_resistance_weight(cfg.resistance_scale, cfg.initial_size, cfg.sample_count);
    const double mu = static_cast<double>(epoch - cfg.warmup_epochs) /
                      static_cast<double>(cfg.total_epochs - cfg.warmup_epochs);
    const double d = 1.0 - mu;
    return cap * std::exp(-5.0 * d * d);
}

Selection select_confident(std::span<const double> losses, int count) {
    const int n = static_cast<int>(losses.size());
    if (count < 0 || count > n)
        throw std::invalid_argument("select_confident: count " + std::to_string(count) +
                                    " out of range for n=" + std::to_string(n));
    for (double l : losses)
        if (!std::isfinite(l)) throw std::invalid_argument("select_confident: non-finite loss");

    Selection sel;
    sel.selected.assign(n, 0);
    if (count == 0) {
        sel.threshold = -std::numeric_limits<double>::infinity();
        return sel;
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (losses[a] != losses[b]) return losses[a] < losses[b];
        return a < b;
    });
    for (int r = 0; r < count; ++r) sel.selected[order[r]] = 1;
    sel.threshold = (count == n) ? std::numeric_limits<double>::infinity()
                                 : losses[order[count - 1]];
    return sel;
}

std::vector<std::uint8_t> spl_select(std::span<const double> losses, double threshold) {
    if (!std::isfinite(threshold)) throw std::invalid_argument("spl_select: threshold must be finite");
    std::vector<std::uint8_t> v(losses.size());
    for (std::size_t i = 0; i < losses.size(); ++i) v[i] = losses[i] < threshold ? 1 : 0;
    return v;
}

int choose_initial_size(std::span<const int> confident_counts,
                        std::optional<double> known_noise_rate, int n) {
    int m;
    if (known_noise_rate) {
        m = static_cast<int>(std::llround(0.65 * (1.0 - *known_noise_rate) * n));
    } else {
        if (confident_counts.empty())
            throw std::invalid_argument("choose_initial_size: empty warmup history");
        m = *std::max_element(confident_counts.begin(), confident_counts.end());
    }
    return std::clamp(m, initial_size_floor(n), initial_size_ceiling(n));
}

}  // namespace sprl
