#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace sprl {

/// Row-major dense matrix of 64-bit floats. The one numeric container the
/// whole library moves around: feature batches, weight blocks, probability
/// tables.
struct DenseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    DenseMatrix() = default;
    DenseMatrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

    std::span<double> row(int r) { return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)}; }
    std::span<const double> row(int r) const { return {data.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)}; }

    void fill(double v) { std::fill(data.begin(), data.end(), v); }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

/// C = A * B with A [n x k], B [k x m]. Plain loops, k-inner ordering.
inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    DenseMatrix c(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        const double* arow = a.data.data() + static_cast<std::size_t>(i) * a.cols;
        double* crow = c.data.data() + static_cast<std::size_t>(i) * c.cols;
        for (int k = 0; k < a.cols; ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            const double* brow = b.data.data() + static_cast<std::size_t>(k) * b.cols;
            for (int j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

inline DenseMatrix gather_rows(const DenseMatrix& m, std::span<const int> idx) {
    DenseMatrix out(static_cast<int>(idx.size()), m.cols);
    for (int i = 0; i < out.rows; ++i) {
        auto src = m.row(idx[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

}  // namespace sprl
