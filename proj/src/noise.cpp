#include "sprl/noise.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include "sprl/rng.hpp"

namespace sprl {

void TransitionMatrix::validate() const {
    if (q.rows != classes || q.cols != classes)
        throw std::invalid_argument("transition matrix: shape mismatch");
    for (int i = 0; i < classes; ++i) {
        double sum = 0.0;
        for (int j = 0; j < classes; ++j) {
            const double v = q.at(i, j);
            if (v < 0.0 || v > 1.0)
                throw std::invalid_argument("transition matrix: entry outside [0,1]");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("transition matrix: row " + std::to_string(i) +
                                        " sums to " + std::to_string(sum));
    }
}

void NoiseSpec::validate(int classes) const {
    switch (kind) {
        case NoiseKind::none:
        case NoiseKind::model_generated:
            return;
        case NoiseKind::symmetric:
            if (rate < 0.0 || rate >= (classes - 1.0) / classes)
                throw std::invalid_argument("symmetric noise needs 0 <= rate < (c-1)/c");
            return;
        case NoiseKind::pair:
            if (rate < 0.0 || rate >= 0.5)
                throw std::invalid_argument("pair noise needs 0 <= rate < 0.5");
            return;
    }
}

TransitionMatrix symmetric_matrix(int classes, double epsilon) {
    if (classes < 2) throw std::invalid_argument("symmetric_matrix: need at least two classes");
    if (epsilon < 0.0 || epsilon >= (classes - 1.0) / classes)
        throw std::invalid_argument("symmetric_matrix: rate must lie in [0, (c-1)/c)");
    TransitionMatrix t;
    t.classes = classes;
    t.q = DenseMatrix(classes, classes, epsilon / (classes - 1));
    for (int i = 0; i < classes; ++i) t.q.at(i, i) = 1.0 - epsilon;
    return t;
}

TransitionMatrix pair_matrix(int classes, double epsilon) {
    if (classes < 2) throw std::invalid_argument("pair_matrix: need at least two classes");
    if (epsilon < 0.0 || epsilon >= 0.5)
        throw std::invalid_argument("pair_matrix: rate must lie in [0, 0.5)");
    TransitionMatrix t;
    t.classes = classes;
    t.q = DenseMatrix(classes, classes, 0.0);
    for (int i = 0; i < classes; ++i) {
        t.q.at(i, i) = 1.0 - epsilon;
        t.q.at(i, (i + 1) % classes) = epsilon;
    }
    return t;
}

TransitionMatrix uniform_matrix(int classes) {
    if (classes < 2) throw std::invalid_argument("uniform_matrix: need at least two classes");
    TransitionMatrix t;
    t.classes = classes;
    t.q = DenseMatrix(classes, classes, 1.0 / classes);
    return t;
}

std::vector<int> apply_noise(std::span<const int> labels, const TransitionMatrix& q,
                             std::uint64_t seed) {
    q.validate();
    SplitRng rng(seed, Stream::noise);
    std::vector<int> noisy(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int y = labels[i];
        if (y < 0 || y >= q.classes)
            throw std::invalid_argument("apply_noise: label out of range at index " +
                                        std::to_string(i));
        noisy[i] = rng.categorical(q.q.row(y));
    }
    return noisy;
}

void write_noisy_labels_csv(std::span<const int> labels, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "noisy_label\n";
    for (int y : labels) out << y << '\n';
}

}  // namespace sprl
