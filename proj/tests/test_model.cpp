#include "doctest.h"

#include "occsvm/error.hpp"
#include "occsvm/model.hpp"

#include "oracle.hpp"
#include "support.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>
#include <vector>

using namespace occsvm;
using occsvm::testing::random_features;
using occsvm::testing::uniform;

namespace {

std::vector<double> point(std::initializer_list<double> xs) { return xs; }

std::string to_text(const OccSvmModel& m) {
    std::ostringstream os;
    save_model(m, os);
    return os.str();
}

OccSvmModel blob_model(double gamma = 0.5, double nu = 0.2) {
    const FeatureMatrix X = random_features(40, 3, 0.5);
    SolverConfig cfg;
    cfg.nu = nu;
    return train(X, KernelSpec::paper_gaussian(gamma), cfg);
}

}  // namespace

TEST_CASE("train: two identical points split the mass evenly") {
    FeatureMatrix X(2, 2);
    X << 1.0, 2.0, 1.0, 2.0;
    SolverConfig cfg;
    cfg.nu = 0.5;
    const OccSvmModel m = train(X, KernelSpec::paper_gaussian(0.5), cfg);
    REQUIRE(m.n_sv() == 2);
    CHECK(m.coefficients[0] == doctest::Approx(0.5).epsilon(1e-5));
    CHECK(m.coefficients[1] == doctest::Approx(0.5).epsilon(1e-5));
    CHECK(m.training_meta.converged);
    CHECK(predict(m, point({1.0, 2.0})) == 1);
}

TEST_CASE("train: coefficients respect the box on a tight cluster") {
    const FeatureMatrix X = random_features(20, 2, 0.01);
    SolverConfig cfg;
    cfg.nu = 0.1;
    const OccSvmModel m = train(X, KernelSpec::rbf_squared(1.0), cfg);
    CHECK(m.training_meta.box_upper == doctest::Approx(0.5).epsilon(1e-15));
    for (Eigen::Index i = 0; i < m.n_sv(); ++i) {
        CHECK(m.coefficients[i] > kSupportThreshold);
        CHECK(m.coefficients[i] <= 0.5);
    }
}

TEST_CASE("train: objective matches the slow oracle on a 50-point blob") {
    const FeatureMatrix X = random_features(50, 2);
    for (double gamma : {0.1, 0.5, 1.0}) {
        SolverConfig cfg;
        cfg.nu = 0.3;
        const KernelSpec spec = KernelSpec::paper_gaussian(gamma);
        const OccSvmModel m = train(X, spec, cfg);
        const auto ref = oracle::slow_pgm(gram_matrix(spec, X).matrix(), m.training_meta.box_upper);
        CHECK(m.training_meta.converged);
        CHECK(std::abs(m.training_meta.objective - ref.objective) <= 1e-5 * std::max(1.0, ref.objective));
    }
}

TEST_CASE("compute_offset") {
    const GramMatrix I2(Eigen::MatrixXd::Identity(2, 2));
    CHECK(compute_offset(Eigen::Vector2d(0.5, 0.5), I2, 1.0) == 0.5);

    // Only index 1 is interior: (K a)_1.
    Eigen::MatrixXd K(3, 3);
    K << 1.0, 0.2, 0.3, 0.2, 1.0, 0.4, 0.3, 0.4, 1.0;
    const Eigen::Vector3d a(0.5, 0.3, 0.0);
    CHECK(compute_offset(a, GramMatrix(K), 0.5) == doctest::Approx(0.2 * 0.5 + 0.3).epsilon(1e-15));

    // Everything at the bound: fall back to all support vectors.
    CHECK(compute_offset(Eigen::Vector2d(0.5, 0.5), I2, 0.5) == 0.5);

    CHECK_THROWS_AS(compute_offset(Eigen::Vector2d(0.0, 1e-9), I2, 1.0), ModelDegenerateError);
    CHECK_THROWS_AS(compute_offset(Eigen::Vector3d(0.0, 1.0, 0.0), I2, 1.0), InputError);
}

TEST_CASE("offset: interior support vectors score at zero") {
    for (int trial = 0; trial < 5; ++trial) {
        const FeatureMatrix X = random_features(60, 3);
        SolverConfig cfg;
        cfg.nu = 0.1 * occsvm::testing::uniform_int(1, 9);
        const KernelSpec spec = KernelSpec::paper_gaussian(uniform(0.1, 1.0));
        const GramMatrix K = gram_matrix(spec, X);
        const SolverReport r = solve(K, cfg);
        REQUIRE(r.converged);
        const OccSvmModel m = build_model(X, spec, K, cfg, r);

        const Eigen::VectorXd Ka = K.matrix() * r.alpha;
        double lo = 1e300, hi = -1e300, sum = 0.0;
        int interior = 0;
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            if (r.alpha[i] > kSupportThreshold && r.alpha[i] < r.box_upper * (1 - kBoundThreshold)) {
                lo = std::min(lo, Ka[i]);
                hi = std::max(hi, Ka[i]);
                sum += Ka[i];
                ++interior;
                CHECK(std::abs(score(m, row_span(X, i))) <= 10 * cfg.tol_final);
            }
        }
        if (interior > 0) {
            CHECK(hi - lo <= 10 * cfg.tol_final);
            CHECK(m.offset == doctest::Approx(sum / interior).epsilon(1e-14));
        }

        // Dual mass bookkeeping.
        CHECK(m.coefficients.sum() <= 1.0 + cfg.tol_final);
        CHECK(m.coefficients.sum() >= 1.0 - cfg.tol_final - static_cast<double>(X.rows()) * kSupportThreshold);
        CHECK(std::abs(m.training_meta.alpha_sum - 1.0) <= cfg.tol_final);
        CHECK(std::isfinite(m.offset));
    }
}

TEST_CASE("score: limits and naive recomputation") {
    const OccSvmModel m = blob_model();
    CHECK(m.offset > 0.0);

    const std::vector<double> far{1e6, -1e6, 1e6};
    CHECK(score(m, far) == doctest::Approx(-m.offset).epsilon(1e-12));
    CHECK(predict(m, far) == -1);

    for (double gx = -2.0; gx <= 2.0; gx += 0.5)
        for (double gy = -2.0; gy <= 2.0; gy += 0.5) {
            const std::vector<double> x{gx, gy, 0.25};
            double naive = 0.0;
            for (Eigen::Index j = 0; j < m.n_sv(); ++j) {
                double sq = 0.0;
                for (int k = 0; k < 3; ++k) sq += (m.support_vectors(j, k) - x[k]) * (m.support_vectors(j, k) - x[k]);
                naive += m.coefficients[j] * std::exp(-m.kernel.gamma * std::sqrt(sq));
            }
            naive -= m.offset;
            const double s = score(m, x);
            CHECK(std::abs(s - naive) <= 1e-12);
            CHECK(predict(m, x) == (s >= 0.0 ? 1 : -1));
        }

    CHECK_THROWS_AS(score(m, point({1.0, 2.0})), InputError);
}

TEST_CASE("predict: tie goes to +1 and sign is scale invariant") {
    OccSvmModel m = blob_model();
    const std::vector<double> x{0.1, 0.2, 0.3};
    const double s = score(m, x);
    m.offset += s;  // now score(x) is exactly zero up to the same summation
    const double tie = score(m, x);
    if (tie == 0.0) CHECK(predict(m, x) == 1);

    OccSvmModel scaled = blob_model();
    OccSvmModel base = scaled;
    scaled.coefficients *= 3.5;
    scaled.offset *= 3.5;
    for (int k = 0; k < 50; ++k) {
        const std::vector<double> p{uniform(-2, 2), uniform(-2, 2), uniform(-2, 2)};
        if (std::abs(score(base, p)) > 1e-9) CHECK(predict(scaled, p) == predict(base, p));
    }
}

TEST_CASE("persistence round-trip is exact") {
    OccSvmModel m = blob_model(0.7, 0.3);
    m.training_meta.feature_min = {0.0, -1.0, 2.0};
    m.training_meta.feature_max = {1.0, 1.0, 3.0};
    const std::string text = to_text(m);
    std::istringstream in(text);
    const OccSvmModel back = load_model(in);

    CHECK(back.support_vectors == m.support_vectors);
    CHECK(back.coefficients == m.coefficients);
    CHECK(back.offset == m.offset);
    CHECK(back.nu == m.nu);
    CHECK(back.kernel.family == m.kernel.family);
    CHECK(back.kernel.gamma == m.kernel.gamma);
    CHECK(back.training_meta.feature_min == m.training_meta.feature_min);
    CHECK(back.training_meta.config.theta == m.training_meta.config.theta);
    CHECK(to_text(back) == text);

    for (int k = 0; k < 100; ++k) {
        const std::vector<double> p{uniform(-2, 2), uniform(-2, 2), uniform(-2, 2)};
        CHECK(score(back, p) == score(m, p));
        CHECK(predict(back, p) == predict(m, p));
    }

    const auto path = std::filesystem::temp_directory_path() / "occsvm_test_model.json";
    save_model(m, path);
    CHECK(load_model(path).offset == m.offset);
    std::filesystem::remove(path);
}

TEST_CASE("persistence: field order and schema") {
    const std::string text = to_text(blob_model());
    const std::vector<std::string> keys{"\"format_version\"", "\"kernel\"", "\"n_sv\"", "\"dim\"",
                                        "\"support_vectors\"", "\"coefficients\"", "\"offset\"", "\"nu\"",
                                        "\"training_meta\""};
    std::size_t pos = 0;
    for (const auto& k : keys) {
        const auto at = text.find(k, pos);
        REQUIRE_MESSAGE(at != std::string::npos, k);
        pos = at;
    }
}

TEST_CASE("persistence: malformed documents") {
    const std::string text = to_text(blob_model());

    std::istringstream truncated(text.substr(0, text.size() / 2));
    CHECK_THROWS_AS(load_model(truncated), ParseError);

    std::string wrong_version = text;
    wrong_version.replace(wrong_version.find("\"format_version\": 1"), 19, "\"format_version\": 2");
    std::istringstream v(wrong_version);
    CHECK_THROWS_WITH_AS(load_model(v), "model format version mismatch: expected 1, found 2", VersionError);

    std::string missing = text;
    missing.replace(missing.find("\"n_train\""), 9, "\"n_trainX\"");
    std::istringstream m(missing);
    try {
        load_model(m);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.location() == "training_meta.n_train");
    }

    std::string bad_kernel = text;
    bad_kernel.replace(bad_kernel.find("paper-gaussian"), 14, "sigmoid");
    std::istringstream k(bad_kernel);
    CHECK_THROWS_AS(load_model(k), ParseError);

    std::string bad_count = text;
    bad_count.replace(bad_count.find("\"dim\": 3"), 8, "\"dim\": 4");
    std::istringstream c(bad_count);
    try {
        load_model(c);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.location() == "support_vectors");
    }
}
