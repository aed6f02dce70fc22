#include "occsvm/kernel.hpp"

#include "occsvm/error.hpp"

#include <cstdlib>
#include <cmath>
#include <istream>
#include <sstream>
#include <string>

namespace occsvm {

std::string_view to_string(KernelFamily family) {
    switch (family) {
    case KernelFamily::PaperGaussian: return "paper-gaussian";
    case KernelFamily::RbfSquared: return "rbf-squared";
    case KernelFamily::Linear: return "linear";
    case KernelFamily::Polynomial: return "polynomial";
    }
    return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
    if (name == "paper-gaussian") return KernelFamily::PaperGaussian;
    if (name == "rbf-squared") return KernelFamily::RbfSquared;
    if (name == "linear") return KernelFamily::Linear;
    if (name == "polynomial") return KernelFamily::Polynomial;
    throw InputError("unknown kernel family '" + std::string(name) + "'");
}

void KernelSpec::validate() const {
    if (is_gaussian() && !(gamma > 0.0 && std::isfinite(gamma)))
        throw InputError("gamma must be positive for " + std::string(to_string(family)));
    if (family == KernelFamily::Polynomial && degree < 1)
        throw InputError("polynomial degree must be >= 1");
}

namespace {

double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double squared_distance(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return s;
}

}  // namespace

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw InputError("kernel_eval: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()) + ")");
    switch (spec.family) {
    case KernelFamily::PaperGaussian:
        return std::exp(-spec.gamma * std::sqrt(squared_distance(x, y)));
    case KernelFamily::RbfSquared:
        return std::exp(-spec.gamma * squared_distance(x, y));
    case KernelFamily::Linear:
        return dot(x, y);
    case KernelFamily::Polynomial:
        return std::pow(dot(x, y) + spec.coef0, spec.degree);
    }
    return 0.0;
}

GramMatrix::GramMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols())
        throw InputError("Gram matrix must be square");
    trace_ = entries_.trace();
}

GramMatrix gram_matrix(const KernelSpec& spec, const FeatureMatrix& X) {
    spec.validate();
    if (X.rows() < 1 || X.cols() < 1)
        throw InputError("gram_matrix: need at least one sample and one feature");
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto xi = row_span(X, i);
        for (Eigen::Index j = i; j < n; ++j) {
            const double v = kernel_eval(spec, xi, row_span(X, j));
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return GramMatrix(std::move(K));
}

GramMatrix read_gram_matrix(std::istream& in) {
    std::string token;
    if (!(in >> token)) throw ParseError("n", "missing matrix size");
    long long n = 0;
    try {
        std::size_t used = 0;
        n = std::stoll(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
        throw ParseError("n", "invalid matrix size '" + token + "'");
    }
    if (n < 1) throw ParseError("n", "matrix size must be positive");

    Eigen::MatrixXd K(n, n);
    for (long long i = 0; i < n; ++i) {
        for (long long j = 0; j < n; ++j) {
            const std::string where = "row " + std::to_string(i + 1) + ", column " + std::to_string(j + 1);
            if (!(in >> token)) throw ParseError(where, "unexpected end of input");
            // strtod accepts nan/inf so they can be reported as non-finite below.
            char* end = nullptr;
            const double v = std::strtod(token.c_str(), &end);
            if (end != token.c_str() + token.size()) throw ParseError(where, "invalid number '" + token + "'");
            if (!std::isfinite(v)) throw InputError(where + ": non-finite entry");
            K(i, j) = v;
        }
    }
    if (in >> token) throw ParseError("row " + std::to_string(n + 1), "trailing data after matrix");
    return GramMatrix(std::move(K));
}

double lipschitz_estimate(const GramMatrix& K, double c) {
    if (!(c > 0.0)) throw InputError("lipschitz_estimate: c must be positive");
    return K.trace() + c * static_cast<double>(K.size());
}

}  // namespace occsvm
