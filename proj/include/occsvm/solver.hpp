#pragma once

// Augmented Lagrangian / fast projected gradient solver for
//
//     min  1/2 a^T K a   s.t.  sum(a) = 1,  0 <= a_i <= C,
//
// the dual of the soft-margin one-class SVM. The equality constraint is
// handled by the multiplier method on
//
//     L_c(a, mu) = 1/2 a^T K a + mu h(a) + c/2 h(a)^2,   h(a) = sum(a) - 1,
//
// and each box-constrained subproblem is minimized by an accelerated
// projected gradient iteration with step 1/L, L = trace(K) + c n.

#include "occsvm/kernel.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace occsvm {

struct SolverConfig {
    double nu = 0.5;
    double c0 = 0.1;
    double theta = 0.99;
    double delta = 1.01;
    double tol_final = 1e-6;
    std::size_t max_outer = 500;
    std::size_t max_inner = 50000;
    double c_max = 1e6;
    /// Explicit box bound C. When unset, C = 1 / (nu n).
    std::optional<double> box_upper;

    void validate() const;
    /// Box bound for n training points. Throws InputError if n C < 1.
    double upper_bound(Eigen::Index n) const;
};

/// One pass of the outer loop, recorded for inspection.
struct OuterStep {
    std::size_t iteration = 0;
    double mu_before = 0.0;
    double mu_after = 0.0;
    double c = 0.0;
    double residual = 0.0;  // h(a) after the inner solve
    double optimality = 0.0;
    std::size_t inner_iterations = 0;
    bool inner_converged = false;
};

struct SolverReport {
    Eigen::VectorXd alpha;
    double mu = 0.0;
    double c = 0.0;
    double objective = 0.0;
    double equality_residual = 0.0;
    double optimality = 0.0;
    double box_upper = 0.0;
    std::size_t outer_iters = 0;
    std::size_t inner_iters_total = 0;
    bool converged = false;
    std::vector<OuterStep> history;
    std::chrono::duration<double> wall_time{};
};

/// Component-wise clip onto [0, C].
Eigen::VectorXd project_box(Eigen::VectorXd alpha, double C);

/// h(a) = sum(a) - 1.
double equality_residual(const Eigen::VectorXd& alpha);

double dual_objective(const GramMatrix& K, const Eigen::VectorXd& alpha);
double al_value(const GramMatrix& K, const Eigen::VectorXd& alpha, double mu, double c);
Eigen::VectorXd al_gradient(const GramMatrix& K, const Eigen::VectorXd& alpha, double mu, double c);

/// ||a - P(a - g)||_inf for a given gradient g.
double projected_gradient_residual(const Eigen::VectorXd& alpha, const Eigen::VectorXd& grad,
                                   double C);

/// max(||a - P(a - grad L_c)||_inf, |h(a)|). Zero exactly at a KKT point.
double optimality_measure(const GramMatrix& K, const Eigen::VectorXd& alpha, double mu, double c,
                          double C);

struct FpgmResult {
    Eigen::VectorXd alpha;
    double value = 0.0;  // L_c at alpha
    std::size_t iterations = 0;
    bool converged = false;
};

/// Called with (s, a_s) after every accelerated step, s = 1, 2, ...
using FpgmObserver = std::function<void(std::size_t, const Eigen::VectorXd&)>;

/// Minimizes L_c(., mu) over the box starting from alpha0 (which must lie
/// in the box). Stops once the projected-gradient residual of the current
/// iterate is at most inner_tol; if max_inner runs out first, the iterate
/// with the lowest L_c seen is returned with converged = false.
FpgmResult fpgm(const GramMatrix& K, const Eigen::VectorXd& alpha0, double mu, double c, double C,
                double inner_tol, std::size_t max_inner, const FpgmObserver& observer = {});

/// Full AL-FPGM solve. Throws NumericalError on non-finite intermediate values.
SolverReport solve(const GramMatrix& K, const SolverConfig& config);

}  // namespace occsvm
