#pragma once

#include "occsvm/kernel.hpp"
#include "occsvm/solver.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace occsvm {

/// alpha_i above this is kept as a support vector.
inline constexpr double kSupportThreshold = 1e-8;
/// Relative distance to C below which alpha_i counts as at the upper bound.
inline constexpr double kBoundThreshold = 1e-8;

inline constexpr int kModelFormatVersion = 1;

struct TrainingMeta {
    Eigen::Index n_train = 0;
    std::size_t outer_iters = 0;
    std::size_t inner_iters = 0;
    bool converged = false;
    double optimality = 0.0;
    double equality_residual = 0.0;
    double objective = 0.0;
    double alpha_sum = 0.0;  // over all alpha, including dropped ones
    double box_upper = 0.0;
    SolverConfig config;
    /// Column min/max applied to the training features, empty if unscaled.
    /// Scoring does not apply it; callers scale inputs the same way first.
    std::vector<double> feature_min;
    std::vector<double> feature_max;
};

struct OccSvmModel {
    KernelSpec kernel;
    FeatureMatrix support_vectors;
    Eigen::VectorXd coefficients;
    double offset = 0.0;
    double nu = 0.5;
    TrainingMeta training_meta;

    Eigen::Index dim() const noexcept { return support_vectors.cols(); }
    Eigen::Index n_sv() const noexcept { return support_vectors.rows(); }

    /// True if support vector i sits strictly inside (0, C).
    bool is_interior(Eigen::Index i) const;
};

/// Mean of (K alpha)_i over the strictly interior alpha_i, falling back to
/// all alpha_i above the support threshold. Throws ModelDegenerateError if
/// every alpha_i is below it.
double compute_offset(const Eigen::VectorXd& alpha, const GramMatrix& K, double C);

/// Builds a model from a finished solve. Rows of X are the training points.
OccSvmModel build_model(const FeatureMatrix& X, const KernelSpec& kernel, const GramMatrix& K,
                        const SolverConfig& config, const SolverReport& report);

/// Gram build, solve and model extraction in one call.
OccSvmModel train(const FeatureMatrix& X, const KernelSpec& kernel, const SolverConfig& config);

/// sum_j coef_j k(sv_j, x) - offset.
double score(const OccSvmModel& model, std::span<const double> x);

/// +1 when score >= 0, -1 otherwise.
int predict(const OccSvmModel& model, std::span<const double> x);

void save_model(const OccSvmModel& model, std::ostream& out);
void save_model(const OccSvmModel& model, const std::filesystem::path& path);
OccSvmModel load_model(std::istream& in);
OccSvmModel load_model(const std::filesystem::path& path);

}  // namespace occsvm
