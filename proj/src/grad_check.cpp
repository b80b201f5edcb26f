#include "sprl/grad_check.hpp"

#include <cmath>

namespace sprl {

namespace {

// Flattened view over weights then biases, layer by layer.
double* coord_ptr(ModelParams& p, std::size_t idx) {
    for (auto& w : p.weights) {
        if (idx < w.data.size()) return &w.data[idx];
        idx -= w.data.size();
    }
    for (auto& b : p.biases) {
        if (idx < b.size()) return &b[idx];
        idx -= b.size();
    }
    return nullptr;
}

double coord_grad(const Gradients& g, std::size_t idx) {
    for (const auto& w : g.weights) {
        if (idx < w.data.size()) return w.data[idx];
        idx -= w.data.size();
    }
    for (const auto& b : g.biases) {
        if (idx < b.size()) return b[idx];
        idx -= b.size();
    }
    return 0.0;
}

}  // namespace

double grad_check(const LossFn& loss_fn, const ModelParams& params, int probe_count,
                  SplitRng& rng, double step) {
    const LossEval base = loss_fn(params);
    const std::size_t total = params.param_count();

    ModelParams probe = params;
    double worst = 0.0;
    for (int p = 0; p < probe_count; ++p) {
        const std::size_t idx = static_cast<std::size_t>(rng.uniform_below(total));
        double* coord = coord_ptr(probe, idx);
        const double original = *coord;

        *coord = original + step;
        const double up = loss_fn(probe).value;
        *coord = original - step;
        const double down = loss_fn(probe).value;
        *coord = original;

        const double numeric = (up - down) / (2.0 * step);
        const double analytic = coord_grad(base.grads, idx);
        const double denom = std::max({1.0, std::abs(numeric), std::abs(analytic)});
        worst = std::max(worst, std::abs(numeric - analytic) / denom);
    }
    return worst;
}

}  // namespace sprl
