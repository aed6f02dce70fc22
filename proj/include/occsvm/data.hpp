#pragma once

// Dataset ingestion and the one-class evaluation split.
//
// Label convention: a row is positive (+1) iff its label parses to exactly
// 1; every other label value is negative (-1).

#include "occsvm/kernel.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace occsvm {

enum class SourceFormat { Svmlight, Csv };

std::string_view to_string(SourceFormat format);
SourceFormat parse_source_format(std::string_view name);

/// Per-column min/max recorded by minmax_scale, reusable on other data.
struct MinMaxScaler {
    Eigen::VectorXd min;
    Eigen::VectorXd max;

    FeatureMatrix apply(const FeatureMatrix& X) const;
};

struct Dataset {
    FeatureMatrix features;
    std::vector<int> labels;  // +1 / -1
    std::string name;
    SourceFormat source_format = SourceFormat::Svmlight;
    bool scaled = false;
    std::vector<std::string> feature_names;  // from a CSV header, if any
    std::optional<MinMaxScaler> scaler;

    Eigen::Index size() const noexcept { return features.rows(); }
    Eigen::Index dim() const noexcept { return features.cols(); }
    std::size_t count_positive() const;

    /// Rows with the given label, in file order.
    FeatureMatrix rows_with_label(int label) const;
    Dataset subset(const std::vector<Eigen::Index>& indices) const;
};

/// "<label> <index>:<value> ..." lines; 1-based indices, densified to the
/// largest index seen. Blank lines and '#' comments are skipped, "qid:"
/// tokens are ignored.
Dataset load_svmlight(std::istream& in, std::string name = "svmlight");
Dataset load_svmlight(const std::filesystem::path& path);

/// Writes the dense rows back in svmlight form with 17 significant digits,
/// omitting zero entries.
void save_svmlight(const Dataset& ds, std::ostream& out);

/// Label column, given as a header name or a 0-based column index.
using LabelColumn = std::variant<std::string, std::size_t>;

/// Comma separated, rectangular. A first row that contains any
/// non-numeric field is treated as a header.
Dataset load_csv(std::istream& in, const LabelColumn& label_column, std::string name = "csv");
Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column);

Dataset load_dataset(const std::filesystem::path& path, SourceFormat format,
                     const LabelColumn& label_column = std::size_t{0});

/// Column-wise (x - min) / (max - min); constant columns become 0.
Dataset minmax_scale(const Dataset& ds);

struct SplitSpec {
    double train_fraction_of_positives = 0.25;
    std::uint64_t seed = 0;
};

struct Split {
    Dataset train;
    Dataset test;
    std::vector<Eigen::Index> train_indices;  // ascending
    std::vector<Eigen::Index> test_indices;   // ascending
};

/// Deterministic splitmix64 stream, used for the positive shuffle.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next();

private:
    std::uint64_t state_;
};

/// Shuffles the positive row indices (file order) with Fisher-Yates driven
/// by SplitMix64(seed); j = next() % (i + 1) for i = m-1 down to 1. The
/// first max(1, floor(fraction * m)) shuffled positives form the training
/// set; every other row, including all negatives, goes to the test set.
/// Both sides keep file order.
Split split_occ(const Dataset& ds, const SplitSpec& spec);

}  // namespace occsvm
