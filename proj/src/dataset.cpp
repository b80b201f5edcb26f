#include "sprl/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "sprl/rng.hpp"

namespace sprl {

double Dataset::realized_noise_rate() const {
    if (train_true_labels.empty()) return 0.0;
    int flipped = 0;
    for (std::size_t i = 0; i < train_true_labels.size(); ++i)
        if (train_true_labels[i] != train_noisy_labels[i]) ++flipped;
    return static_cast<double>(flipped) / train_true_labels.size();
}

Dataset make_blobs(int total, int classes, int dim, double separation, std::uint64_t seed) {
    if (total < classes || classes < 2 || dim < 1 || separation <= 0.0)
        throw std::invalid_argument("make_blobs: bad arguments");

    SplitRng rng(seed, Stream::init, 0x626c6f62 /* "blob" */);

    DenseMatrix centers(classes, dim);
    for (double& v : centers.data) v = separation * rng.normal();

    // Balanced per-class counts, remainder spread over the first classes.
    std::vector<int> counts(classes, total / classes);
    for (int k = 0; k < total % classes; ++k) counts[k] += 1;

    Dataset ds;
    ds.class_count = classes;
    ds.name = "blobs";

    std::vector<std::vector<double>> train_rows, test_rows;
    std::vector<int> train_labels, test_labels;
    for (int k = 0; k < classes; ++k) {
        const int test_k = counts[k] / 5;  // 80/20, per class
        for (int s = 0; s < counts[k]; ++s) {
            std::vector<double> x(dim);
            for (int j = 0; j < dim; ++j) x[j] = centers.at(k, j) + rng.normal();
            if (s < counts[k] - test_k) {
                train_rows.push_back(std::move(x));
                train_labels.push_back(k);
            } else {
                test_rows.push_back(std::move(x));
                test_labels.push_back(k);
            }
        }
    }

    // One seeded shuffle so train order is not class-sorted.
    std::vector<int> order(train_rows.size());
    std::iota(order.begin(), order.end(), 0);
    SplitRng shuffle_rng(seed, Stream::shuffle, 0x73706c69 /* "spli" */);
    shuffle_rng.shuffle(order);

    ds.train_features = DenseMatrix(static_cast<int>(train_rows.size()), dim);
    ds.train_true_labels.resize(train_rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        std::copy(train_rows[order[i]].begin(), train_rows[order[i]].end(),
                  ds.train_features.row(static_cast<int>(i)).begin());
        ds.train_true_labels[i] = train_labels[order[i]];
    }
    ds.train_noisy_labels = ds.train_true_labels;

    ds.test_features = DenseMatrix(static_cast<int>(test_rows.size()), dim);
    ds.test_labels = test_labels;
    for (std::size_t i = 0; i < test_rows.size(); ++i)
        std::copy(test_rows[i].begin(), test_rows[i].end(),
                  ds.test_features.row(static_cast<int>(i)).begin());
    return ds;
}

namespace {

std::uint32_t read_be32(std::istream& in, const std::string& path, const char* what) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in)
        throw std::runtime_error("load_idx: " + path + " truncated while reading " + what);
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

// Seeded 80/20 split of already-parsed rows. check_label_coverage makes a
// test-split label with no training occurrences an error.
Dataset split_dataset(std::vector<std::vector<double>> rows, std::vector<int> labels,
                      int dim, std::uint64_t seed, const std::string& name,
                      bool check_label_coverage) {
    const int n = static_cast<int>(rows.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    SplitRng rng(seed, Stream::shuffle, 0x73706c69 /* "spli" */);
    rng.shuffle(order);

    const int test_n = n / 5;
    const int train_n = n - test_n;

    Dataset ds;
    ds.name = name;
    ds.train_features = DenseMatrix(train_n, dim);
    ds.train_true_labels.resize(train_n);
    ds.test_features = DenseMatrix(test_n, dim);
    ds.test_labels.resize(test_n);

    int max_label = 0;
    std::vector<char> seen_in_train;
    for (int i = 0; i < train_n; ++i) {
        std::copy(rows[order[i]].begin(), rows[order[i]].end(), ds.train_features.row(i).begin());
        const int y = labels[order[i]];
        ds.train_true_labels[i] = y;
        max_label = std::max(max_label, y);
        if (y >= static_cast<int>(seen_in_train.size())) seen_in_train.resize(y + 1, 0);
        seen_in_train[y] = 1;
    }
    ds.train_noisy_labels = ds.train_true_labels;
    for (int i = 0; i < test_n; ++i) {
        std::copy(rows[order[train_n + i]].begin(), rows[order[train_n + i]].end(),
                  ds.test_features.row(i).begin());
        ds.test_labels[i] = labels[order[train_n + i]];
    }

    for (int y : ds.test_labels) {
        if (check_label_coverage &&
            (y >= static_cast<int>(seen_in_train.size()) || !seen_in_train[y]))
            throw std::runtime_error("dataset " + name + ": label " + std::to_string(y) +
                                     " appears only in the test split");
        max_label = std::max(max_label, y);
    }
    ds.class_count = max_label + 1;
    return ds;
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path, int limit,
                 std::uint64_t seed) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) throw std::runtime_error("load_idx: cannot open " + images_path);
    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) throw std::runtime_error("load_idx: cannot open " + labels_path);

    const std::uint32_t img_magic = read_be32(img, images_path, "magic");
    if (img_magic != 0x00000803u)
        throw std::runtime_error("load_idx: bad image magic at offset 0 in " + images_path +
                                 " (expected 0x00000803)");
    const std::uint32_t lab_magic = read_be32(lab, labels_path, "magic");
    if (lab_magic != 0x00000801u)
        throw std::runtime_error("load_idx: bad label magic at offset 0 in " + labels_path +
                                 " (expected 0x00000801)");

    const std::uint32_t img_count = read_be32(img, images_path, "count");
    const std::uint32_t rows = read_be32(img, images_path, "rows");
    const std::uint32_t cols = read_be32(img, images_path, "cols");
    const std::uint32_t lab_count = read_be32(lab, labels_path, "count");
    if (img_count != lab_count)
        throw std::runtime_error("load_idx: image count " + std::to_string(img_count) +
                                 " does not match label count " + std::to_string(lab_count));

    int take = static_cast<int>(img_count);
    if (limit > 0 && limit < take) take = limit;
    if (limit > static_cast<int>(img_count))
        std::cerr << "load_idx: limit " << limit << " exceeds file count " << img_count
                  << ", clamping\n";

    const int dim = static_cast<int>(rows * cols);
    std::vector<std::vector<double>> samples;
    std::vector<int> labels;
    samples.reserve(take);
    std::vector<unsigned char> buf(dim);
    for (int i = 0; i < take; ++i) {
        img.read(reinterpret_cast<char*>(buf.data()), dim);
        if (!img) throw std::runtime_error("load_idx: " + images_path + " truncated at sample " +
                                           std::to_string(i));
        char y;
        lab.read(&y, 1);
        if (!lab) throw std::runtime_error("load_idx: " + labels_path + " truncated at sample " +
                                           std::to_string(i));
        std::vector<double> x(dim);
        for (int j = 0; j < dim; ++j) x[j] = buf[j] / 255.0;
        samples.push_back(std::move(x));
        labels.push_back(static_cast<unsigned char>(y));
    }
    return split_dataset(std::move(samples), std::move(labels), dim, seed, "idx", false);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_cell(const std::string& field, const std::string& path, int row, int col) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        throw std::runtime_error("CSV " + path + ": non-numeric cell '" + field + "' at row " +
                                 std::to_string(row) + " column " + std::to_string(col));
    return v;
}

}  // namespace

CsvTable read_csv_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("CSV: cannot open " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("CSV " + path + ": empty file");
    for (auto& name : split_fields(line)) table.header.push_back(name);

    int row_index = 1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != table.header.size())
            throw std::runtime_error("CSV " + path + ": row " + std::to_string(row_index) +
                                     " has " + std::to_string(fields.size()) + " fields, expected " +
                                     std::to_string(table.header.size()));
        std::vector<double> row(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c)
            row[c] = parse_cell(fields[c], path, row_index, static_cast<int>(c));
        table.rows.push_back(std::move(row));
        ++row_index;
    }
    return table;
}

void write_csv_table(const std::string& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);  // LF endings everywhere
    if (!out) throw std::runtime_error("CSV: cannot write " + path);
    for (std::size_t c = 0; c < table.header.size(); ++c)
        out << (c ? "," : "") << table.header[c];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out << (c ? "," : "") << format_double(row[c]);
        out << '\n';
    }
}

Dataset load_csv(const std::string& features_path, const std::string& labels_path,
                 std::uint64_t seed) {
    CsvTable feats = read_csv_table(features_path);
    if (feats.rows.empty())
        throw std::runtime_error("load_csv: " + features_path + " holds a header but no samples");

    std::vector<int> labels;
    std::vector<std::vector<double>> rows;
    int dim = 0;

    auto to_label = [&](double v, int row) {
        const int y = static_cast<int>(std::llround(v));
        if (y < 0 || std::abs(v - y) > 1e-9)
            throw std::runtime_error("load_csv: label '" + format_double(v) + "' at row " +
                                     std::to_string(row) + " is not a class index");
        return y;
    };

    if (!labels_path.empty()) {
        CsvTable labs = read_csv_table(labels_path);
        if (labs.header.size() != 1)
            throw std::runtime_error("load_csv: " + labels_path + " must have a single column");
        if (labs.rows.size() != feats.rows.size())
            throw std::runtime_error("load_csv: feature/label row counts differ (" +
                                     std::to_string(feats.rows.size()) + " vs " +
                                     std::to_string(labs.rows.size()) + ")");
        dim = static_cast<int>(feats.header.size());
        for (std::size_t i = 0; i < feats.rows.size(); ++i) {
            rows.push_back(feats.rows[i]);
            labels.push_back(to_label(labs.rows[i][0], static_cast<int>(i) + 1));
        }
    } else {
        int label_col = -1;
        for (std::size_t c = 0; c < feats.header.size(); ++c)
            if (feats.header[c] == "label") label_col = static_cast<int>(c);
        if (label_col < 0)
            throw std::runtime_error("load_csv: no labels file given and no 'label' column in " +
                                     features_path);
        dim = static_cast<int>(feats.header.size()) - 1;
        if (dim == 0) throw std::runtime_error("load_csv: no feature columns in " + features_path);
        for (std::size_t i = 0; i < feats.rows.size(); ++i) {
            std::vector<double> x;
            x.reserve(dim);
            for (std::size_t c = 0; c < feats.rows[i].size(); ++c)
                if (static_cast<int>(c) != label_col) x.push_back(feats.rows[i][c]);
            rows.push_back(std::move(x));
            labels.push_back(to_label(feats.rows[i][label_col], static_cast<int>(i) + 1));
        }
    }
    return split_dataset(std::move(rows), std::move(labels), dim, seed, "csv", true);
}

}  // namespace sprl
