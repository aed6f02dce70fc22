// occsvm: train / predict / bench / solve-qp front end.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 solver did not
// converge (outputs are still written), 4 every bench cell failed.

#include "occsvm/bench.hpp"
#include "occsvm/data.hpp"
#include "occsvm/error.hpp"
#include "occsvm/model.hpp"
#include "occsvm/solver.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace occsvm;

enum Exit : int { kOk = 0, kUsage = 1, kData = 2, kNotConverged = 3, kAllFailed = 4 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverFlags {
    SolverConfig config;
    void add_to(CLI::App& cmd) {
        cmd.add_option("--c0", config.c0, "Initial augmented Lagrangian scaling c");
        cmd.add_option("--theta", config.theta, "Inner accuracy contraction, in (0,1)");
        cmd.add_option("--delta", config.delta, "Growth factor for c, > 1");
        cmd.add_option("--tol", config.tol_final, "Stopping threshold on the optimality measure");
        cmd.add_option("--max-outer", config.max_outer, "Outer iteration cap");
        cmd.add_option("--max-inner", config.max_inner, "FPGM iteration cap per outer step");
    }
};

struct DataFlags {
    std::string path;
    std::string format = "svmlight";
    std::string label_col = "0";

    void add_to(CLI::App& cmd, bool required) {
        auto* opt = cmd.add_option("--data", path, "Input dataset");
        if (required) opt->required();
        cmd.add_option("--format", format, "Input format")->check(CLI::IsMember({"svmlight", "csv"}));
        cmd.add_option("--label-col", label_col, "CSV label column (header name or 0-based index)");
    }

    LabelColumn label_column() const {
        if (!label_col.empty() && label_col.find_first_not_of("0123456789") == std::string::npos)
            return static_cast<std::size_t>(std::stoull(label_col));
        return label_col;
    }

    Dataset load() const {
        return load_dataset(path, parse_source_format(format), label_column());
    }
};

void validate_or_usage(const SolverConfig& config) {
    try {
        config.validate();
    } catch (const InputError& e) {
        throw UsageError(e.what());
    }
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw Error("cannot write '" + path + "'");
}

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// --- train --------------------------------------------------------------------

struct TrainCmd {
    DataFlags data;
    SolverFlags solver;
    std::string kernel = "paper-gaussian";
    double gamma = 0.5;
    int degree = 3;
    double coef0 = 0.0;
    bool scale = false;
    std::uint64_t seed = 0;
    std::string model_out = "model.json";

    void add_to(CLI::App& app) {
        auto* cmd = app.add_subcommand("train", "Train a one-class SVM on the +1 rows of a dataset");
        data.add_to(*cmd, true);
        cmd->add_option("--nu", solver.config.nu, "Outlier fraction parameter, in (0,1)");
        cmd->add_option("--kernel", kernel, "Kernel family")
            ->check(CLI::IsMember({"paper-gaussian", "rbf-squared", "linear", "polynomial"}));
        cmd->add_option("--gamma", gamma, "Kernel width (Gaussian families)");
        cmd->add_option("--degree", degree, "Polynomial degree");
        cmd->add_option("--coef0", coef0, "Polynomial offset");
        solver.add_to(*cmd);
        cmd->add_flag("--scale", scale, "Min-max scale features to [0,1] before training");
        cmd->add_option("--seed", seed, "Recorded for provenance; training is deterministic");
        cmd->add_option("--model-out", model_out, "Where to write the model");
        cmd->callback([this] { run_ = true; });
    }

    int run() const {
        validate_or_usage(solver.config);
        const KernelSpec spec{parse_kernel_family(kernel), gamma, degree, coef0};
        try {
            spec.validate();
        } catch (const InputError& e) {
            throw UsageError(e.what());
        }

        Dataset ds = data.load();
        if (scale) ds = minmax_scale(ds);
        const FeatureMatrix X = ds.rows_with_label(1);
        if (X.rows() == 0) throw InputError("no rows labeled 1 in '" + data.path + "'");
        const std::size_t ignored = ds.labels.size() - static_cast<std::size_t>(X.rows());

        OccSvmModel model = train(X, spec, solver.config);
        if (ds.scaler) {
            model.training_meta.feature_min.assign(ds.scaler->min.begin(), ds.scaler->min.end());
            model.training_meta.feature_max.assign(ds.scaler->max.begin(), ds.scaler->max.end());
        }
        save_model(model, std::filesystem::path(model_out));

        const auto& m = model.training_meta;
        std::cout << "n_train=" << m.n_train << " n_sv=" << model.n_sv() << " offset=" << g17(model.offset)
                  << " outer_iters=" << m.outer_iters << " inner_iters=" << m.inner_iters
                  << " converged=" << (m.converged ? "true" : "false")
                  << " ignored_negatives=" << ignored << "\n";
        return m.converged ? kOk : kNotConverged;
    }

    bool run_ = false;
};

// --- predict ------------------------------------------------------------------

struct PredictCmd {
    std::string model_path;
    DataFlags data;
    bool scores = false;
    std::string output;

    void add_to(CLI::App& app) {
        auto* cmd = app.add_subcommand("predict", "Score a dataset with a trained model");
        cmd->add_option("--model", model_path, "Model file")->required();
        data.add_to(*cmd, true);
        cmd->add_flag("--scores", scores, "Emit raw decision values instead of +1/-1");
        cmd->add_option("--output", output, "Output file (default: standard output)");
        cmd->callback([this] { run_ = true; });
    }

    int run() const {
        const OccSvmModel model = load_model(std::filesystem::path(model_path));
        Dataset ds = data.load();

        FeatureMatrix X = ds.features;
        if (X.cols() < model.dim() && ds.source_format == SourceFormat::Svmlight) {
            // Sparse rows may simply not mention the trailing features.
            FeatureMatrix padded = FeatureMatrix::Zero(X.rows(), model.dim());
            padded.leftCols(X.cols()) = X;
            X = std::move(padded);
        }
        if (X.cols() != model.dim())
            throw InputError("dimension mismatch: model has " + std::to_string(model.dim()) +
                             " features, data has " + std::to_string(X.cols()));
        const auto& meta = model.training_meta;
        if (!meta.feature_min.empty()) {
            MinMaxScaler scaler{Eigen::Map<const Eigen::VectorXd>(meta.feature_min.data(), model.dim()),
                                Eigen::Map<const Eigen::VectorXd>(meta.feature_max.data(), model.dim())};
            X = scaler.apply(X);
        }

        std::ostringstream os;
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            const auto x = row_span(X, i);
            if (scores)
                os << g17(score(model, x)) << "\n";
            else
                os << (predict(model, x) == 1 ? "+1" : "-1") << "\n";
        }
        write_output(output, os.str());
        return kOk;
    }

    bool run_ = false;
};

// --- bench --------------------------------------------------------------------

struct BenchCmd {
    std::string plan_path;
    std::vector<std::string> data_paths;
    std::string data_format = "svmlight";
    std::string label_col = "0";
    std::vector<double> gammas{0.1, 0.5, 1.0};
    std::string kernel = "paper-gaussian";
    double nu = 0.5;
    SolverFlags solver;
    std::uint64_t seed = 0;
    double train_fraction = 0.25;
    bool scale = false;
    std::string out;
    std::string format = "text";
    CLI::App* cmd = nullptr;

    void add_to(CLI::App& app) {
        cmd = app.add_subcommand("bench", "Run the one-class evaluation protocol over a gamma grid");
        auto* plan = cmd->add_option("--plan", plan_path, "JSON plan file");
        auto* data = cmd->add_option("--data", data_paths, "Dataset path (repeatable)");
        plan->excludes(data);
        cmd->add_option("--data-format", data_format, "Format of --data files")
            ->check(CLI::IsMember({"svmlight", "csv"}));
        cmd->add_option("--label-col", label_col, "CSV label column for --data files");
        cmd->add_option("--gammas", gammas, "Kernel widths")->delimiter(',');
        cmd->add_option("--kernel", kernel, "Kernel family")
            ->check(CLI::IsMember({"paper-gaussian", "rbf-squared"}));
        cmd->add_option("--nu", nu, "Outlier fraction parameter, in (0,1)");
        solver.add_to(*cmd);
        cmd->add_option("--seed", seed, "Split seed");
        cmd->add_option("--train-fraction", train_fraction, "Fraction of positives used for training");
        cmd->add_flag("--scale", scale, "Min-max scale features before splitting");
        cmd->add_option("--out", out, "Output file (default: standard output)");
        cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "csv", "json"}));
        cmd->callback([this] { run_ = true; });
    }

    bool given(const char* name) const { return cmd->count(name) > 0; }

    BenchPlan build_plan() const {
        BenchPlan plan;
        if (!plan_path.empty()) {
            plan = load_plan(plan_path);
        } else {
            if (data_paths.empty()) throw UsageError("bench needs --plan or at least one --data");
            DataFlags df{"", data_format, label_col};
            for (const auto& p : data_paths)
                plan.datasets.push_back({std::filesystem::path(p).stem().string(), p,
                                         parse_source_format(data_format), df.label_column()});
        }
        // Flags given explicitly override the plan file.
        const bool inline_mode = plan_path.empty();
        if (inline_mode || given("--gammas")) plan.gammas = gammas;
        if (inline_mode || given("--kernel")) plan.family = parse_kernel_family(kernel);
        if (inline_mode || given("--nu")) plan.solver.nu = nu;
        if (inline_mode || given("--c0")) plan.solver.c0 = solver.config.c0;
        if (inline_mode || given("--theta")) plan.solver.theta = solver.config.theta;
        if (inline_mode || given("--delta")) plan.solver.delta = solver.config.delta;
        if (inline_mode || given("--tol")) plan.solver.tol_final = solver.config.tol_final;
        if (inline_mode || given("--max-outer")) plan.solver.max_outer = solver.config.max_outer;
        if (inline_mode || given("--max-inner")) plan.solver.max_inner = solver.config.max_inner;
        if (inline_mode || given("--seed")) plan.seed = seed;
        if (inline_mode || given("--train-fraction")) plan.train_fraction = train_fraction;
        if (inline_mode || given("--scale")) plan.scale = scale;
        try {
            plan.validate();
        } catch (const InputError& e) {
            throw UsageError(e.what());
        }
        return plan;
    }

    int run() const {
        const BenchPlan plan = build_plan();
        const BenchResult result = run_bench(plan);
        write_output(out, emit_table(result, parse_table_format(format)));
        for (const auto& cell : result.cells)
            if (cell.ok()) return kOk;
        return kAllFailed;
    }

    bool run_ = false;
};

// --- solve-qp -------------------------------------------------------------------

struct SolveQpCmd {
    std::string gram_path;
    double C = 0.0;
    double nu = 0.5;
    SolverFlags solver;
    std::string format = "text";
    CLI::App* cmd = nullptr;

    void add_to(CLI::App& app) {
        cmd = app.add_subcommand("solve-qp", "Solve the dual QP for a Gram matrix read from a file");
        cmd->add_option("--gram", gram_path, "Gram matrix file: n, then n rows of n numbers")->required();
        auto* c_opt = cmd->add_option("--C", C, "Box upper bound");
        auto* nu_opt = cmd->add_option("--nu", nu, "Use C = 1/(nu n)");
        c_opt->excludes(nu_opt);
        solver.add_to(*cmd);
        cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
        cmd->callback([this] { run_ = true; });
    }

    int run() const {
        SolverConfig config = solver.config;
        if (cmd->count("--nu")) config.nu = nu;
        if (cmd->count("--C")) config.box_upper = C;
        validate_or_usage(config);

        std::ifstream in(gram_path, std::ios::binary);
        if (!in) throw InputError("cannot open '" + gram_path + "'");
        const GramMatrix K = read_gram_matrix(in);
        const SolverReport r = solve(K, config);

        if (format == "json") {
            nlohmann::ordered_json j;
            j["n"] = K.size();
            j["C"] = r.box_upper;
            j["alpha"] = std::vector<double>(r.alpha.begin(), r.alpha.end());
            j["objective"] = r.objective;
            j["equality_residual"] = r.equality_residual;
            j["optimality"] = r.optimality;
            j["mu"] = r.mu;
            j["outer_iters"] = r.outer_iters;
            j["inner_iters"] = r.inner_iters_total;
            j["converged"] = r.converged;
            j["wall_time_ms"] = r.wall_time.count() * 1e3;
            std::cout << j.dump(2) << "\n";
        } else {
            std::cout << "n " << K.size() << "\nC " << g17(r.box_upper) << "\nalpha";
            for (double a : r.alpha) std::cout << ' ' << g17(a);
            std::cout << "\nobjective " << g17(r.objective) << "\nequality_residual "
                      << g17(r.equality_residual) << "\noptimality " << g17(r.optimality) << "\nmu "
                      << g17(r.mu) << "\nouter_iters " << r.outer_iters << "\ninner_iters "
                      << r.inner_iters_total << "\nconverged " << (r.converged ? "true" : "false")
                      << "\n";
        }
        return r.converged ? kOk : kNotConverged;
    }

    bool run_ = false;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"One-class SVM training with an augmented Lagrangian fast projected gradient solver",
                 "occsvm"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);

    TrainCmd train_cmd;
    PredictCmd predict_cmd;
    BenchCmd bench_cmd;
    SolveQpCmd solve_cmd;
    train_cmd.add_to(app);
    predict_cmd.add_to(app);
    bench_cmd.add_to(app);
    solve_cmd.add_to(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n";
        // Print the usage of the subcommand that failed, if one was selected.
        const auto selected = app.get_subcommands();
        std::cerr << (selected.empty() ? app.help() : selected.front()->help());
        return kUsage;
    }

    try {
        if (train_cmd.run_) return train_cmd.run();
        if (predict_cmd.run_) return predict_cmd.run();
        if (bench_cmd.run_) return bench_cmd.run();
        if (solve_cmd.run_) return solve_cmd.run();
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kData;
    }
    return kUsage;
}
