#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

namespace occsvm {

/// Row-major so that each sample is a contiguous span.
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline std::span<const double> row_span(const FeatureMatrix& X, Eigen::Index i) {
    return {X.data() + i * X.cols(), static_cast<std::size_t>(X.cols())};
}

enum class KernelFamily {
    PaperGaussian,  // exp(-gamma * ||x - y||)
    RbfSquared,     // exp(-gamma * ||x - y||^2)
    Linear,         // x . y
    Polynomial,     // (x . y + coef0)^degree
};

std::string_view to_string(KernelFamily family);
KernelFamily parse_kernel_family(std::string_view name);

struct KernelSpec {
    KernelFamily family = KernelFamily::PaperGaussian;
    double gamma = 0.5;
    int degree = 3;
    double coef0 = 0.0;

    static KernelSpec paper_gaussian(double gamma) { return {KernelFamily::PaperGaussian, gamma}; }
    static KernelSpec rbf_squared(double gamma) { return {KernelFamily::RbfSquared, gamma}; }
    static KernelSpec linear() { return {KernelFamily::Linear}; }
    static KernelSpec polynomial(int degree, double coef0) {
        return {KernelFamily::Polynomial, 0.5, degree, coef0};
    }

    bool is_gaussian() const noexcept {
        return family == KernelFamily::PaperGaussian || family == KernelFamily::RbfSquared;
    }

    /// Throws InputError if gamma <= 0 (Gaussian families) or degree < 1 (polynomial).
    void validate() const;
};

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y);

/// Dense symmetric kernel matrix with its trace cached.
class GramMatrix {
public:
    /// Takes ownership of a square matrix. Symmetry is the caller's
    /// responsibility; gram_matrix() guarantees it bit-exactly.
    explicit GramMatrix(Eigen::MatrixXd entries);

    Eigen::Index size() const noexcept { return entries_.rows(); }
    double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }
    const Eigen::MatrixXd& matrix() const noexcept { return entries_; }
    double trace() const noexcept { return trace_; }

private:
    Eigen::MatrixXd entries_;
    double trace_;
};

/// Builds K(i,j) = k(x_i, x_j) from the upper triangle and mirrors it.
GramMatrix gram_matrix(const KernelSpec& spec, const FeatureMatrix& X);

/// Text layout: first token n, then n rows of n whitespace-separated numbers.
/// Symmetry and positive semidefiniteness are not checked. Throws
/// ParseError on malformed text and InputError on non-finite entries.
GramMatrix read_gram_matrix(std::istream& in);

/// trace(K) + c * n, an upper bound on ||K + c ee^T||_2 for PSD K.
double lipschitz_estimate(const GramMatrix& K, double c);

}  // namespace occsvm
