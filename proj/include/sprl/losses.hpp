#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "sprl/matrix.hpp"

namespace sprl {

/// Floor applied to probabilities before any log or division.
inline constexpr double kProbFloor = 1e-12;

inline double clamp_prob(double p) { return std::clamp(p, kProbFloor, 1.0); }

/// Per-sample probability vectors recorded at forward time in the previous
/// epoch; row i is overwritten once per epoch, after the parameter update
/// that consumed sample i.
struct PredictionMemory {
    DenseMatrix probs;  // n x c
    int epoch_tag = 0;

    static PredictionMemory uniform(int n, int c) {
        PredictionMemory m;
        m.probs = DenseMatrix(n, c, 1.0 / c);
        return m;
    }
};

/// A scalar loss on one probability vector together with its gradient with
/// respect to that vector.
struct ScalarLoss {
    double value = 0.0;
    std::vector<double> grad;
};

/// -log(p[label]), natural log. grad = -onehot(label)/p.
ScalarLoss cross_entropy(std::span<const double> probs, int label);

/// Resistance loss: sum_j -prev[j] * log(p[j]); c weighted cross-entropies
/// against the previous epoch's prediction. grad[j] = -prev[j]/p[j], entries
/// treated independently.
ScalarLoss resistance_loss(std::span<const double> probs, std::span<const double> prev);

/// KL(prev || p).
ScalarLoss kd_loss(std::span<const double> probs, std::span<const double> prev);

/// KL(u || p) with u uniform; zero iff p is uniform.
ScalarLoss label_smooth_loss(std::span<const double> probs);

/// beta * CE(p, noisy_label) + (1-beta) * CE(p, argmax p), hard bootstrap.
ScalarLoss bootstrap_hard_loss(std::span<const double> probs, int noisy_label,
                               double beta = 0.8);

enum class Prop1Case { i, ii, iii };

/// One gradient-descent step applied directly to free probability entries:
/// next[j] = cur[j] + eta * prev[j] / cur[j]. No renormalisation.
std::vector<double> prop1_update(std::span<const double> prev, std::span<const double> cur,
                                 double eta);

struct Prop1Result {
    std::vector<double> next;
    Prop1Case which = Prop1Case::i;
};

/// prop1_update plus classification of the (j, k) entry pair. Requires
/// cur[j] > cur[k]. With r = cur[j]/cur[k] and q = prev[j]/prev[k]:
/// case i: q < r; case ii: q > r^2; case iii: r <= q <= r^2.
Prop1Result prop1_step(std::span<const double> prev, std::span<const double> cur,
                       double eta, int j, int k);

/// Value and gradient of a whole-batch loss; grad is with respect to the
/// batch probability matrix.
struct BatchLoss {
    double value = 0.0;
    DenseMatrix grad;
};

enum class Regularizer { resistance, kd, label_smooth };

/// Combined curriculum loss over a mini-batch:
///   (1/sum v) * sum_{v_i=1} -log(p_i[y_i]) + (gamma/|B|) * sum_i reg(p_i).
/// The CE term is defined as 0 when no batch sample is selected; the
/// regularizer always spans the full batch.
BatchLoss combined_batch_loss(const DenseMatrix& probs, const DenseMatrix& prev,
                              std::span<const int> noisy_labels,
                              std::span<const std::uint8_t> selected, double gamma_t,
                              Regularizer reg);

/// The combined loss with the resistance regularizer.
BatchLoss sprl_batch_loss(const DenseMatrix& probs, const DenseMatrix& prev,
                          std::span<const int> noisy_labels,
                          std::span<const std::uint8_t> selected, double gamma_t);

/// Batch-mean hard-bootstrap loss.
BatchLoss bootstrap_batch_loss(const DenseMatrix& probs, std::span<const int> noisy_labels,
                               double beta);

}  // namespace sprl
