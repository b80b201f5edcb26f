#pragma once

#include <functional>

#include "sprl/model.hpp"
#include "sprl/rng.hpp"

namespace sprl {

struct LossEval {
    double value = 0.0;
    Gradients grads;
};

using LossFn = std::function<LossEval(const ModelParams&)>;

/// Compare the analytic gradient of loss_fn against central finite
/// differences (step 1e-5) on probe_count random parameter coordinates.
/// Returns the max relative error over the probes.
double grad_check(const LossFn& loss_fn, const ModelParams& params, int probe_count,
                  SplitRng& rng, double step = 1e-5);

}  // namespace sprl
