#include "occsvm/data.hpp"

#include "occsvm/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <string_view>

namespace occsvm {

std::string_view to_string(SourceFormat format) {
    return format == SourceFormat::Svmlight ? "svmlight" : "csv";
}

SourceFormat parse_source_format(std::string_view name) {
    if (name == "svmlight" || name == "libsvm") return SourceFormat::Svmlight;
    if (name == "csv") return SourceFormat::Csv;
    throw InputError("unknown data format '" + std::string(name) + "'");
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

int map_label(double raw) { return raw == 1.0 ? 1 : -1; }

std::string stem_of(const std::filesystem::path& path) { return path.stem().string(); }

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path.string() + "'");
    return in;
}

}  // namespace

FeatureMatrix MinMaxScaler::apply(const FeatureMatrix& X) const {
    if (X.cols() != min.size()) throw InputError("scaler: dimension mismatch");
    FeatureMatrix out(X.rows(), X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double range = max[j] - min[j];
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            out(i, j) = range > 0.0 ? (X(i, j) - min[j]) / range : 0.0;
    }
    return out;
}

std::size_t Dataset::count_positive() const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

FeatureMatrix Dataset::rows_with_label(int label) const {
    std::vector<Eigen::Index> idx;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) idx.push_back(static_cast<Eigen::Index>(i));
    return subset(idx).features;
}

Dataset Dataset::subset(const std::vector<Eigen::Index>& indices) const {
    Dataset out;
    out.name = name;
    out.source_format = source_format;
    out.scaled = scaled;
    out.feature_names = feature_names;
    out.scaler = scaler;
    out.features.resize(static_cast<Eigen::Index>(indices.size()), features.cols());
    out.labels.reserve(indices.size());
    for (std::size_t r = 0; r < indices.size(); ++r) {
        out.features.row(static_cast<Eigen::Index>(r)) = features.row(indices[r]);
        out.labels.push_back(labels[static_cast<std::size_t>(indices[r])]);
    }
    return out;
}

// --- svmlight ---------------------------------------------------------------

Dataset load_svmlight(std::istream& in, std::string name) {
    struct Row {
        int label;
        std::vector<std::pair<std::size_t, double>> entries;
    };
    std::vector<Row> rows;
    std::size_t max_index = 0;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view body(line);
        if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
        body = trim(body);
        if (body.empty()) continue;

        const std::string where = "line " + std::to_string(line_no);
        std::istringstream tokens{std::string(body)};
        std::string tok;
        tokens >> tok;
        const auto label = parse_double(tok);
        if (!label) throw ParseError(where, "invalid label '" + tok + "'");

        Row row{map_label(*label), {}};
        while (tokens >> tok) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos) throw ParseError(where, "expected index:value, got '" + tok + "'");
            const std::string_view key(tok.data(), colon);
            if (key == "qid") continue;
            std::size_t index = 0;
            const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), index);
            if (key.empty() || ec != std::errc() || ptr != key.data() + key.size() || index == 0)
                throw ParseError(where, "invalid feature index '" + std::string(key) + "'");
            const auto value = parse_double(std::string_view(tok).substr(colon + 1));
            if (!value) throw ParseError(where, "invalid feature value in '" + tok + "'");
            row.entries.emplace_back(index, *value);
            max_index = std::max(max_index, index);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InputError("empty dataset: no data lines in '" + name + "'");
    if (max_index == 0) throw InputError("dataset '" + name + "' has no features");

    Dataset ds;
    ds.name = std::move(name);
    ds.source_format = SourceFormat::Svmlight;
    ds.features = FeatureMatrix::Zero(static_cast<Eigen::Index>(rows.size()),
                                      static_cast<Eigen::Index>(max_index));
    ds.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (const auto& [index, value] : rows[i].entries)
            ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(index - 1)) = value;
        ds.labels.push_back(rows[i].label);
    }
    return ds;
}

Dataset load_svmlight(const std::filesystem::path& path) {
    auto in = open_input(path);
    return load_svmlight(in, stem_of(path));
}

void save_svmlight(const Dataset& ds, std::ostream& out) {
    const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
    for (Eigen::Index i = 0; i < ds.size(); ++i) {
        out << (ds.labels[static_cast<std::size_t>(i)] == 1 ? "1" : "-1");
        for (Eigen::Index j = 0; j < ds.dim(); ++j)
            if (ds.features(i, j) != 0.0) out << ' ' << (j + 1) << ':' << ds.features(i, j);
        out << '\n';
    }
    out.precision(old_precision);
}

// --- csv ----------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string_view rest(line);
    while (true) {
        const auto comma = rest.find(',');
        fields.emplace_back(trim(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return fields;
}

}  // namespace

Dataset load_csv(std::istream& in, const LabelColumn& label_column, std::string name) {
    std::vector<std::vector<std::string>> table;
    std::vector<std::size_t> line_numbers;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        table.push_back(split_csv_line(line));
        line_numbers.push_back(line_no);
    }
    if (table.empty()) throw InputError("empty dataset: no rows in '" + name + "'");

    const std::size_t width = table.front().size();
    const bool has_header = std::any_of(table.front().begin(), table.front().end(),
                                        [](const std::string& f) { return !parse_double(f); });

    std::size_t label_idx = 0;
    if (const auto* col_name = std::get_if<std::string>(&label_column)) {
        if (!has_header)
            throw InputError("label column '" + *col_name + "' requested but the CSV has no header");
        const auto& header = table.front();
        const auto it = std::find(header.begin(), header.end(), *col_name);
        if (it == header.end()) throw InputError("label column '" + *col_name + "' not found in header");
        label_idx = static_cast<std::size_t>(it - header.begin());
    } else {
        label_idx = std::get<std::size_t>(label_column);
        if (label_idx >= width)
            throw InputError("label column index " + std::to_string(label_idx) + " out of range (" +
                             std::to_string(width) + " columns)");
    }
    if (width < 2) throw InputError("CSV needs a label column and at least one feature column");

    const std::size_t first = has_header ? 1 : 0;
    const std::size_t n = table.size() - first;
    if (n == 0) throw InputError("empty dataset: header only in '" + name + "'");

    Dataset ds;
    ds.name = std::move(name);
    ds.source_format = SourceFormat::Csv;
    if (has_header)
        for (std::size_t j = 0; j < width; ++j)
            if (j != label_idx) ds.feature_names.push_back(table.front()[j]);

    ds.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(width - 1));
    ds.labels.reserve(n);
    for (std::size_t r = first; r < table.size(); ++r) {
        const auto& fields = table[r];
        const std::string where = "line " + std::to_string(line_numbers[r]);
        if (fields.size() != width)
            throw ParseError(where, "expected " + std::to_string(width) + " fields, found " +
                                        std::to_string(fields.size()));
        Eigen::Index col = 0;
        for (std::size_t j = 0; j < width; ++j) {
            const auto value = parse_double(fields[j]);
            if (!value)
                throw ParseError(where + ", column " + std::to_string(j + 1),
                                 "non-numeric value '" + fields[j] + "'");
            if (j == label_idx)
                ds.labels.push_back(map_label(*value));
            else
                ds.features(static_cast<Eigen::Index>(r - first), col++) = *value;
        }
    }
    return ds;
}

Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column) {
    auto in = open_input(path);
    return load_csv(in, label_column, stem_of(path));
}

Dataset load_dataset(const std::filesystem::path& path, SourceFormat format,
                     const LabelColumn& label_column) {
    return format == SourceFormat::Svmlight ? load_svmlight(path) : load_csv(path, label_column);
}

Dataset minmax_scale(const Dataset& ds) {
    if (ds.size() < 1) throw InputError("minmax_scale: empty dataset");
    MinMaxScaler scaler{ds.features.colwise().minCoeff().transpose(),
                        ds.features.colwise().maxCoeff().transpose()};
    Dataset out = ds;
    out.features = scaler.apply(ds.features);
    out.scaled = true;
    out.scaler = std::move(scaler);
    return out;
}

// --- split ----------------------------------------------------------------------

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

Split split_occ(const Dataset& ds, const SplitSpec& spec) {
    if (!(spec.train_fraction_of_positives > 0.0 && spec.train_fraction_of_positives < 1.0))
        throw InputError("train fraction must be in (0,1)");
    std::vector<Eigen::Index> positives;
    for (std::size_t i = 0; i < ds.labels.size(); ++i)
        if (ds.labels[i] == 1) positives.push_back(static_cast<Eigen::Index>(i));
    if (positives.size() < 4)
        throw InputError("split needs at least 4 positives, found " + std::to_string(positives.size()));

    SplitMix64 rng(spec.seed);
    for (std::size_t i = positives.size() - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(rng.next() % (i + 1));
        std::swap(positives[i], positives[j]);
    }
    const auto n_train = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(spec.train_fraction_of_positives *
                                               static_cast<double>(positives.size()))));

    std::vector<bool> in_train(ds.labels.size(), false);
    for (std::size_t k = 0; k < n_train; ++k) in_train[static_cast<std::size_t>(positives[k])] = true;

    Split split;
    for (std::size_t i = 0; i < ds.labels.size(); ++i)
        (in_train[i] ? split.train_indices : split.test_indices).push_back(static_cast<Eigen::Index>(i));
    split.train = ds.subset(split.train_indices);
    split.test = ds.subset(split.test_indices);
    return split;
}

}  // namespace occsvm
