#include "occsvm/solver.hpp"

#include "occsvm/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace occsvm {

void SolverConfig::validate() const {
    if (!(nu > 0.0 && nu < 1.0)) throw InputError("nu must be in (0,1)");
    if (!(c0 > 0.0 && std::isfinite(c0))) throw InputError("c0 must be positive");
    if (!(theta > 0.0 && theta < 1.0)) throw InputError("theta must be in (0,1)");
    if (!(delta > 1.0 && std::isfinite(delta))) throw InputError("delta must be > 1");
    if (!(tol_final > 0.0)) throw InputError("tol must be positive");
    if (max_outer == 0) throw InputError("max_outer must be positive");
    if (max_inner == 0) throw InputError("max_inner must be positive");
    if (!(c_max >= c0)) throw InputError("c_max must be >= c0");
    if (box_upper && !(*box_upper > 0.0 && std::isfinite(*box_upper)))
        throw InputError("C must be positive");
}

double SolverConfig::upper_bound(Eigen::Index n) const {
    if (n < 1) throw InputError("need at least one training point");
    const double C = box_upper ? *box_upper : 1.0 / (nu * static_cast<double>(n));
    if (static_cast<double>(n) * C < 1.0)
        throw InputError("infeasible box: n * C = " + std::to_string(n * C) + " < 1");
    return C;
}

Eigen::VectorXd project_box(Eigen::VectorXd alpha, double C) {
    for (auto& a : alpha) a = std::min(std::max(a, 0.0), C);
    return alpha;
}

double equality_residual(const Eigen::VectorXd& alpha) { return alpha.sum() - 1.0; }

namespace {

void check_dims(const GramMatrix& K, const Eigen::VectorXd& alpha) {
    if (alpha.size() != K.size())
        throw InputError("dimension mismatch: K is " + std::to_string(K.size()) +
                         "x" + std::to_string(K.size()) + ", alpha has " +
                         std::to_string(alpha.size()) + " entries");
}

// L_c given a precomputed K a.
double al_value_from(const Eigen::VectorXd& alpha, const Eigen::VectorXd& Ka, double mu, double c) {
    const double h = equality_residual(alpha);
    return 0.5 * alpha.dot(Ka) + mu * h + 0.5 * c * h * h;
}

Eigen::VectorXd gradient_from(const Eigen::VectorXd& alpha, const Eigen::VectorXd& Ka, double mu,
                              double c) {
    const double shift = mu + c * equality_residual(alpha);
    return Ka.array() + shift;
}

}  // namespace

double dual_objective(const GramMatrix& K, const Eigen::VectorXd& alpha) {
    check_dims(K, alpha);
    return 0.5 * alpha.dot(K.matrix() * alpha);
}

double al_value(const GramMatrix& K, const Eigen::VectorXd& alpha, double mu, double c) {
    check_dims(K, alpha);
    return al_value_from(alpha, K.matrix() * alpha, mu, c);
}

Eigen::VectorXd al_gradient(const GramMatrix& K, const Eigen::VectorXd& alpha, double mu, double c) {
    check_dims(K, alpha);
    return gradient_from(alpha, K.matrix() * alpha, mu, c);
}

double projected_gradient_residual(const Eigen::VectorXd& alpha, const Eigen::VectorXd& grad,
                                   double C) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < alpha.size(); ++i) {
        const double stepped = std::min(std::max(alpha[i] - grad[i], 0.0), C);
        worst = std::max(worst, std::abs(alpha[i] - stepped));
    }
    return worst;
}

double optimality_measure(const GramMatrix& K, const Eigen::VectorXd& alpha, double mu, double c,
                          double C) {
    check_dims(K, alpha);
    const Eigen::VectorXd grad = al_gradient(K, alpha, mu, c);
    return std::max(projected_gradient_residual(alpha, grad, C),
                    std::abs(equality_residual(alpha)));
}

FpgmResult fpgm(const GramMatrix& K, const Eigen::VectorXd& alpha0, double mu, double c, double C,
                double inner_tol, std::size_t max_inner, const FpgmObserver& observer) {
    check_dims(K, alpha0);
    const Eigen::MatrixXd& Km = K.matrix();
    const double L = lipschitz_estimate(K, c);

    // The gradient is affine in alpha, so K y for the extrapolated point is
    // formed from the two cached products instead of a second mat-vec.
    Eigen::VectorXd prev = alpha0;  // previous projected iterate
    Eigen::VectorXd Kprev = Km * prev;
    Eigen::VectorXd y = prev;
    Eigen::VectorXd Ky = Kprev;
    Eigen::VectorXd cur(alpha0.size());
    Eigen::VectorXd Kcur(alpha0.size());

    FpgmResult best{alpha0, al_value_from(alpha0, Kprev, mu, c), 0, false};
    if (projected_gradient_residual(alpha0, gradient_from(alpha0, Kprev, mu, c), C) <= inner_tol) {
        best.converged = true;
        return best;
    }

    double t = 1.0;
    for (std::size_t s = 1; s <= max_inner; ++s) {
        const Eigen::VectorXd grad = gradient_from(y, Ky, mu, c);
        cur = project_box(y - grad / L, C);
        Kcur.noalias() = Km * cur;

        const double value = al_value_from(cur, Kcur, mu, c);
        if (value < best.value) {
            best.alpha = cur;
            best.value = value;
        }
        best.iterations = s;
        if (observer) observer(s, cur);

        if (projected_gradient_residual(cur, gradient_from(cur, Kcur, mu, c), C) <= inner_tol) {
            return {cur, value, s, true};
        }

        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double momentum = (t - 1.0) / t_next;
        y = cur + momentum * (cur - prev);
        Ky = Kcur + momentum * (Kcur - Kprev);
        prev.swap(cur);
        Kprev.swap(Kcur);
        t = t_next;
    }
    return best;
}

SolverReport solve(const GramMatrix& K, const SolverConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const Eigen::Index n = K.size();
    const double C = config.upper_bound(n);
    if (!K.matrix().allFinite()) throw InputError("Gram matrix has non-finite entries");

    SolverReport report;
    report.box_upper = C;
    report.c = config.c0;

    if (n == 1) {
        // sum(a) = 1 pins the only variable; mu = -K00 makes it a KKT point.
        report.alpha = Eigen::VectorXd::Ones(1);
        report.mu = -K(0, 0);
        report.objective = 0.5 * K(0, 0);
        report.optimality = optimality_measure(K, report.alpha, report.mu, report.c, C);
        report.converged = report.optimality <= config.tol_final;
        report.wall_time = std::chrono::steady_clock::now() - start;
        return report;
    }

    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    double mu = 0.0;
    double c = config.c0;
    double stationarity = projected_gradient_residual(alpha, al_gradient(K, alpha, mu, c), C);
    double rec = std::max(stationarity, std::abs(equality_residual(alpha)));

    std::size_t outer = 0;
    while (rec > config.tol_final && outer < config.max_outer) {
        ++outer;
        if (!std::isfinite(lipschitz_estimate(K, c)))
            throw NumericalError(outer, "Lipschitz estimate overflowed");
        // The inner solve can only reduce the stationarity part of rec, so
        // the target is theta times that part, tightened further to the
        // constraint violation once |h| has dropped below it.
        const double target = std::min(stationarity, std::abs(equality_residual(alpha)));
        const double inner_tol = config.theta * std::max(target, config.tol_final);
        FpgmResult inner = fpgm(K, alpha, mu, c, C, inner_tol, config.max_inner);
        report.inner_iters_total += inner.iterations;
        alpha = std::move(inner.alpha);

        const double h = equality_residual(alpha);
        const double mu_next = mu + c * h;
        if (!std::isfinite(inner.value) || !std::isfinite(h) || !std::isfinite(mu_next))
            throw NumericalError(outer, "non-finite augmented Lagrangian or multiplier");
        stationarity = projected_gradient_residual(alpha, al_gradient(K, alpha, mu_next, c), C);
        rec = std::max(stationarity, std::abs(h));
        if (!std::isfinite(rec)) throw NumericalError(outer, "non-finite optimality measure");

        report.history.push_back({outer, mu, mu_next, c, h, rec, inner.iterations, inner.converged});
        mu = mu_next;
        c = std::min(config.delta * c, config.c_max);
    }

    report.alpha = std::move(alpha);
    report.mu = mu;
    report.c = c;
    report.objective = dual_objective(K, report.alpha);
    report.equality_residual = equality_residual(report.alpha);
    report.optimality = rec;
    report.outer_iters = outer;
    report.converged = rec <= config.tol_final;
    report.wall_time = std::chrono::steady_clock::now() - start;
    return report;
}

}  // namespace occsvm
