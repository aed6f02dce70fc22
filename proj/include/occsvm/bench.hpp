#pragma once

#include "occsvm/data.hpp"
#include "occsvm/kernel.hpp"
#include "occsvm/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace occsvm {

struct BenchDataset {
    std::string name;
    std::filesystem::path path;
    SourceFormat format = SourceFormat::Svmlight;
    LabelColumn label_column = std::size_t{0};
};

/// Defaults reproduce the evaluation protocol: gamma in {0.1, 0.5, 1.0},
/// c0 = 0.1, theta = 0.99, delta = 1.01, tol = 1e-6, 25% of the positives
/// for training, no feature scaling.
struct BenchPlan {
    std::vector<BenchDataset> datasets;
    std::vector<double> gammas{0.1, 0.5, 1.0};
    KernelFamily family = KernelFamily::PaperGaussian;
    SolverConfig solver;
    std::uint64_t seed = 0;
    double train_fraction = 0.25;
    bool scale = false;

    void validate() const;
};

/// Plan file: a JSON object with "datasets" (list of {name, path, format,
/// label_col}) and optional overrides "gammas", "kernel", "nu", "c0",
/// "theta", "delta", "tol", "max_outer", "max_inner", "seed",
/// "train_fraction", "scale". Relative dataset paths resolve against the
/// plan file's directory.
BenchPlan load_plan(const std::filesystem::path& path);

struct BenchCell {
    std::string dataset;
    double gamma = 0.0;
    double nu = 0.0;
    double accuracy = 0.0;
    double f1 = 0.0;
    double train_time_ms = 0.0;  // solve only
    double gram_time_ms = 0.0;
    double total_time_ms = 0.0;  // gram + solve + model + scoring
    std::size_t outer_iters = 0;
    std::size_t inner_iters = 0;
    bool converged = false;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::optional<std::string> error;  // set when the cell failed

    bool ok() const noexcept { return !error.has_value(); }
};

struct BenchResult {
    BenchPlan plan;
    std::vector<BenchCell> cells;  // dataset-major, gamma-minor, plan order
};

/// Per-cell failures are recorded in the cell and never abort the run.
BenchResult run_bench(const BenchPlan& plan);

/// Percent of positions where prediction equals truth.
double accuracy(std::span<const int> predictions, std::span<const int> truth);

/// F1 of the +1 class in percent; 0 when precision + recall is 0.
double f1_score(std::span<const int> predictions, std::span<const int> truth);

enum class TableFormat { Text, Csv, Json };

TableFormat parse_table_format(std::string_view name);

inline constexpr const char* kCsvColumns =
    "dataset,gamma,nu,accuracy,f1,train_time_ms,outer_iters,inner_iters,converged,n_train,n_test";

std::string emit_table(const BenchResult& result, TableFormat format);

}  // namespace occsvm
