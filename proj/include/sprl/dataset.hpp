#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sprl/matrix.hpp"

namespace sprl {

/// Feature matrix with parallel true/noisy label vectors and a test split.
/// noisy labels equal the true labels until a corruption is applied.
struct Dataset {
    DenseMatrix train_features;
    std::vector<int> train_true_labels;
    std::vector<int> train_noisy_labels;
    DenseMatrix test_features;
    std::vector<int> test_labels;
    int class_count = 0;
    std::string name;

    int train_size() const { return train_features.rows; }
    int test_size() const { return test_features.rows; }
    double realized_noise_rate() const;
};

/// Balanced isotropic Gaussian clusters (unit variance) around seeded random
/// centers with coordinates ~ separation * N(0,1); stratified 80/20 split.
Dataset make_blobs(int total, int classes, int dim, double separation, std::uint64_t seed);

/// IDX pair (big-endian magic 0x803 images / 0x801 labels). Pixels scaled to
/// [0,1] as flat features. limit=0 keeps everything; larger-than-file limits
/// clamp with a warning. Seeded 80/20 split.
Dataset load_idx(const std::string& images_path, const std::string& labels_path, int limit,
                 std::uint64_t seed);

/// Numeric CSV with a header row; one sample per row. Labels come from
/// labels_path when given, otherwise from a "label" column of the features
/// file. Deterministic 80/20 split by seeded permutation.
Dataset load_csv(const std::string& features_path, const std::string& labels_path,
                 std::uint64_t seed);

// --- CSV plumbing shared by loaders, the harness and tests ---

/// 17-significant-digit formatting; round-trips doubles bit-exactly.
std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv_table(const std::string& path);
void write_csv_table(const std::string& path, const CsvTable& table);

}  // namespace sprl
