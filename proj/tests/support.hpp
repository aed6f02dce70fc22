#pragma once

#include "occsvm/kernel.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace occsvm::testing {

inline std::mt19937_64& rng() {
    static std::mt19937_64 gen(0x5eed'0ccULL);
    return gen;
}

inline double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng()); }

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> normal;
    Eigen::MatrixXd A(rows, cols);
    for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = normal(rng());
    return A;
}

/// K = A^T A with A (n x n) standard normal scaled by 1/sqrt(n), so that
/// the entries of K are O(1).
inline Eigen::MatrixXd random_psd(Eigen::Index n) {
    const Eigen::MatrixXd A = random_matrix(n, n) / std::sqrt(static_cast<double>(n));
    Eigen::MatrixXd K = A.transpose() * A;
    // Exact symmetry; A^T A through Eigen can differ in the last bit.
    return 0.5 * (K + K.transpose());
}

inline FeatureMatrix random_features(Eigen::Index n, Eigen::Index d, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    FeatureMatrix X(n, d);
    for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = normal(rng());
    return X;
}

}  // namespace occsvm::testing
