#include "occsvm/model.hpp"

#include "occsvm/error.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace occsvm {

bool OccSvmModel::is_interior(Eigen::Index i) const {
    const double C = training_meta.box_upper;
    return coefficients[i] > kSupportThreshold && coefficients[i] < C - kBoundThreshold * C;
}

double compute_offset(const Eigen::VectorXd& alpha, const GramMatrix& K, double C) {
    if (alpha.size() != K.size()) throw InputError("compute_offset: dimension mismatch");
    const Eigen::VectorXd Ka = K.matrix() * alpha;
    const double upper = C - kBoundThreshold * C;

    double interior_sum = 0.0, support_sum = 0.0;
    Eigen::Index interior = 0, support = 0;
    for (Eigen::Index i = 0; i < alpha.size(); ++i) {
        if (alpha[i] <= kSupportThreshold) continue;
        support_sum += Ka[i];
        ++support;
        if (alpha[i] < upper) {
            interior_sum += Ka[i];
            ++interior;
        }
    }
    if (interior > 0) return interior_sum / static_cast<double>(interior);
    if (support > 0) return support_sum / static_cast<double>(support);
    throw ModelDegenerateError("no dual coefficient above the support threshold");
}

OccSvmModel build_model(const FeatureMatrix& X, const KernelSpec& kernel, const GramMatrix& K,
                        const SolverConfig& config, const SolverReport& report) {
    const Eigen::VectorXd& alpha = report.alpha;
    const double offset = compute_offset(alpha, K, report.box_upper);
    if (!std::isfinite(offset)) throw ModelDegenerateError("offset is not finite");

    std::vector<Eigen::Index> kept;
    for (Eigen::Index i = 0; i < alpha.size(); ++i)
        if (alpha[i] > kSupportThreshold) kept.push_back(i);

    OccSvmModel model;
    model.kernel = kernel;
    model.support_vectors.resize(static_cast<Eigen::Index>(kept.size()), X.cols());
    model.coefficients.resize(static_cast<Eigen::Index>(kept.size()));
    for (std::size_t r = 0; r < kept.size(); ++r) {
        const auto row = static_cast<Eigen::Index>(r);
        model.support_vectors.row(row) = X.row(kept[r]);
        model.coefficients[row] = alpha[kept[r]];
    }
    model.offset = offset;
    model.nu = config.nu;

    auto& meta = model.training_meta;
    meta.n_train = X.rows();
    meta.outer_iters = report.outer_iters;
    meta.inner_iters = report.inner_iters_total;
    meta.converged = report.converged;
    meta.optimality = report.optimality;
    meta.equality_residual = report.equality_residual;
    meta.objective = report.objective;
    meta.alpha_sum = alpha.sum();
    meta.box_upper = report.box_upper;
    meta.config = config;
    return model;
}

OccSvmModel train(const FeatureMatrix& X, const KernelSpec& kernel, const SolverConfig& config) {
    if (X.rows() < 1) throw InputError("train: no training rows");
    config.validate();
    const GramMatrix K = gram_matrix(kernel, X);
    const SolverReport report = solve(K, config);
    return build_model(X, kernel, K, config, report);
}

double score(const OccSvmModel& model, std::span<const double> x) {
    if (static_cast<Eigen::Index>(x.size()) != model.dim())
        throw InputError("score: expected " + std::to_string(model.dim()) + " features, got " +
                         std::to_string(x.size()));
    double s = 0.0;
    for (Eigen::Index j = 0; j < model.n_sv(); ++j)
        s += model.coefficients[j] * kernel_eval(model.kernel, row_span(model.support_vectors, j), x);
    return s - model.offset;
}

int predict(const OccSvmModel& model, std::span<const double> x) {
    return score(model, x) >= 0.0 ? 1 : -1;
}

// ---------------------------------------------------------------------------
// Persistence. Field order is fixed by ordered_json; doubles are written in
// shortest round-trip form, so reloading reproduces every value bit-exactly.

namespace {

using Json = nlohmann::ordered_json;

const Json& field(const Json& obj, const std::string& path, const char* key) {
    if (!obj.is_object()) throw ParseError(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(path.empty() ? key : path + "." + key, "missing field");
    return *it;
}

template <class T>
T get(const Json& obj, const std::string& path, const char* key) {
    const Json& v = field(obj, path, key);
    const std::string where = path.empty() ? key : path + "." + key;
    try {
        if constexpr (std::is_same_v<T, double>) {
            if (!v.is_number()) throw ParseError(where, "expected a number");
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ParseError(where, "expected a boolean");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ParseError(where, "expected an integer");
            if constexpr (std::is_unsigned_v<T>)
                if (v.get<long long>() < 0) throw ParseError(where, "expected a non-negative integer");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ParseError(where, "expected a string");
        }
        return v.get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(where, e.what());
    }
}

std::vector<double> get_numbers(const Json& obj, const char* key, std::size_t expected) {
    const Json& v = field(obj, "", key);
    if (!v.is_array()) throw ParseError(key, "expected an array");
    if (v.size() != expected)
        throw ParseError(key, "expected " + std::to_string(expected) + " values, found " +
                                  std::to_string(v.size()));
    std::vector<double> out;
    out.reserve(expected);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number())
            throw ParseError(std::string(key) + "[" + std::to_string(i) + "]", "expected a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

Json config_to_json(const SolverConfig& c) {
    Json j;
    j["nu"] = c.nu;
    j["c0"] = c.c0;
    j["theta"] = c.theta;
    j["delta"] = c.delta;
    j["tol"] = c.tol_final;
    j["max_outer"] = c.max_outer;
    j["max_inner"] = c.max_inner;
    j["c_max"] = c.c_max;
    j["C"] = c.box_upper ? Json(*c.box_upper) : Json(nullptr);
    return j;
}

SolverConfig config_from_json(const Json& j, const std::string& path) {
    SolverConfig c;
    c.nu = get<double>(j, path, "nu");
    c.c0 = get<double>(j, path, "c0");
    c.theta = get<double>(j, path, "theta");
    c.delta = get<double>(j, path, "delta");
    c.tol_final = get<double>(j, path, "tol");
    c.max_outer = get<std::size_t>(j, path, "max_outer");
    c.max_inner = get<std::size_t>(j, path, "max_inner");
    c.c_max = get<double>(j, path, "c_max");
    const Json& C = field(j, path, "C");
    if (!C.is_null()) c.box_upper = get<double>(j, path, "C");
    return c;
}

}  // namespace

void save_model(const OccSvmModel& model, std::ostream& out) {
    Json doc;
    doc["format_version"] = kModelFormatVersion;
    doc["kernel"] = {{"family", std::string(to_string(model.kernel.family))},
                     {"gamma", model.kernel.gamma},
                     {"degree", model.kernel.degree},
                     {"coef0", model.kernel.coef0}};
    doc["n_sv"] = model.n_sv();
    doc["dim"] = model.dim();
    doc["support_vectors"] = std::vector<double>(
        model.support_vectors.data(), model.support_vectors.data() + model.support_vectors.size());
    doc["coefficients"] = std::vector<double>(model.coefficients.begin(), model.coefficients.end());
    doc["offset"] = model.offset;
    doc["nu"] = model.nu;

    const auto& m = model.training_meta;
    Json meta;
    meta["n_train"] = m.n_train;
    meta["outer_iters"] = m.outer_iters;
    meta["inner_iters"] = m.inner_iters;
    meta["converged"] = m.converged;
    meta["optimality"] = m.optimality;
    meta["equality_residual"] = m.equality_residual;
    meta["objective"] = m.objective;
    meta["alpha_sum"] = m.alpha_sum;
    meta["box_upper"] = m.box_upper;
    meta["config"] = config_to_json(m.config);
    if (m.feature_min.empty())
        meta["scaling"] = nullptr;
    else
        meta["scaling"] = {{"min", m.feature_min}, {"max", m.feature_max}};
    doc["training_meta"] = std::move(meta);

    out << doc.dump(2) << '\n';
    if (!out) throw Error("failed writing model");
}

void save_model(const OccSvmModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    save_model(model, out);
}

OccSvmModel load_model(std::istream& in) {
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("byte " + std::to_string(e.byte), e.what());
    }

    const int version = get<int>(doc, "", "format_version");
    if (version != kModelFormatVersion)
        throw VersionError("model format version mismatch: expected " +
                           std::to_string(kModelFormatVersion) + ", found " +
                           std::to_string(version));

    OccSvmModel model;
    const Json& k = field(doc, "", "kernel");
    try {
        model.kernel.family = parse_kernel_family(get<std::string>(k, "kernel", "family"));
    } catch (const InputError& e) {
        throw ParseError("kernel.family", e.what());
    }
    model.kernel.gamma = get<double>(k, "kernel", "gamma");
    model.kernel.degree = get<int>(k, "kernel", "degree");
    model.kernel.coef0 = get<double>(k, "kernel", "coef0");
    try {
        model.kernel.validate();
    } catch (const InputError& e) {
        throw ParseError("kernel", e.what());
    }

    const auto n_sv = get<std::size_t>(doc, "", "n_sv");
    const auto dim = get<std::size_t>(doc, "", "dim");
    const auto sv = get_numbers(doc, "support_vectors", n_sv * dim);
    const auto coef = get_numbers(doc, "coefficients", n_sv);
    model.support_vectors = Eigen::Map<const FeatureMatrix>(sv.data(), static_cast<Eigen::Index>(n_sv),
                                                            static_cast<Eigen::Index>(dim));
    model.coefficients = Eigen::Map<const Eigen::VectorXd>(coef.data(), static_cast<Eigen::Index>(n_sv));
    model.offset = get<double>(doc, "", "offset");
    model.nu = get<double>(doc, "", "nu");

    const Json& meta = field(doc, "", "training_meta");
    auto& m = model.training_meta;
    m.n_train = get<Eigen::Index>(meta, "training_meta", "n_train");
    m.outer_iters = get<std::size_t>(meta, "training_meta", "outer_iters");
    m.inner_iters = get<std::size_t>(meta, "training_meta", "inner_iters");
    m.converged = get<bool>(meta, "training_meta", "converged");
    m.optimality = get<double>(meta, "training_meta", "optimality");
    m.equality_residual = get<double>(meta, "training_meta", "equality_residual");
    m.objective = get<double>(meta, "training_meta", "objective");
    m.alpha_sum = get<double>(meta, "training_meta", "alpha_sum");
    m.box_upper = get<double>(meta, "training_meta", "box_upper");
    m.config = config_from_json(field(meta, "training_meta", "config"), "training_meta.config");
    if (const Json& sc = field(meta, "training_meta", "scaling"); !sc.is_null()) {
        const auto read = [&](const char* key) {
            const Json& v = field(sc, "training_meta.scaling", key);
            const std::string where = std::string("training_meta.scaling.") + key;
            if (!v.is_array() || v.size() != dim) throw ParseError(where, "expected " + std::to_string(dim) + " numbers");
            std::vector<double> out;
            for (const auto& x : v) {
                if (!x.is_number()) throw ParseError(where, "expected a number");
                out.push_back(x.get<double>());
            }
            return out;
        };
        m.feature_min = read("min");
        m.feature_max = read("max");
    }
    return model;
}

OccSvmModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    return load_model(in);
}

}  // namespace occsvm
