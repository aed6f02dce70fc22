#include "occsvm/bench.hpp"

#include "occsvm/error.hpp"
#include "occsvm/model.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace occsvm {

void BenchPlan::validate() const {
    if (datasets.empty()) throw InputError("bench plan has no datasets");
    if (gammas.empty()) throw InputError("bench plan has no gamma values");
    for (double g : gammas)
        if (!(g > 0.0 && std::isfinite(g))) throw InputError("gamma values must be positive");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw InputError("train_fraction must be in (0,1)");
    solver.validate();
}

BenchPlan load_plan(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open plan '" + path.string() + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string(), e.what());
    }

    BenchPlan plan;
    try {
        const auto base = path.parent_path();
        for (const auto& d : doc.at("datasets")) {
            BenchDataset ds;
            ds.path = d.at("path").get<std::string>();
            if (ds.path.is_relative()) ds.path = base / ds.path;
            ds.name = d.value("name", ds.path.stem().string());
            ds.format = parse_source_format(d.value("format", "svmlight"));
            if (d.contains("label_col")) {
                const auto& lc = d.at("label_col");
                if (lc.is_string())
                    ds.label_column = lc.get<std::string>();
                else
                    ds.label_column = lc.get<std::size_t>();
            }
            plan.datasets.push_back(std::move(ds));
        }
        if (doc.contains("gammas")) plan.gammas = doc.at("gammas").get<std::vector<double>>();
        if (doc.contains("kernel")) plan.family = parse_kernel_family(doc.at("kernel").get<std::string>());
        auto& s = plan.solver;
        s.nu = doc.value("nu", s.nu);
        s.c0 = doc.value("c0", s.c0);
        s.theta = doc.value("theta", s.theta);
        s.delta = doc.value("delta", s.delta);
        s.tol_final = doc.value("tol", s.tol_final);
        s.max_outer = doc.value("max_outer", s.max_outer);
        s.max_inner = doc.value("max_inner", s.max_inner);
        plan.seed = doc.value("seed", plan.seed);
        plan.train_fraction = doc.value("train_fraction", plan.train_fraction);
        plan.scale = doc.value("scale", plan.scale);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string(), e.what());
    }
    plan.validate();
    return plan;
}

double accuracy(std::span<const int> predictions, std::span<const int> truth) {
    if (predictions.size() != truth.size()) throw InputError("accuracy: length mismatch");
    if (predictions.empty()) throw InputError("accuracy: empty input");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hits += predictions[i] == truth[i];
    return 100.0 * static_cast<double>(hits) / static_cast<double>(truth.size());
}

double f1_score(std::span<const int> predictions, std::span<const int> truth) {
    if (predictions.size() != truth.size()) throw InputError("f1_score: length mismatch");
    if (predictions.empty()) throw InputError("f1_score: empty input");
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (predictions[i] == 1 && truth[i] == 1) ++tp;
        if (predictions[i] == 1 && truth[i] != 1) ++fp;
        if (predictions[i] != 1 && truth[i] == 1) ++fn;
    }
    const double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    if (precision + recall == 0.0) return 0.0;
    return 100.0 * 2.0 * precision * recall / (precision + recall);
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void run_cell(const Split& split, const KernelSpec& kernel, const SolverConfig& config,
              BenchCell& cell) {
    const auto t0 = Clock::now();
    const FeatureMatrix& X = split.train.features;
    const GramMatrix K = gram_matrix(kernel, X);
    cell.gram_time_ms = ms_since(t0);

    const SolverReport report = solve(K, config);
    cell.train_time_ms = std::chrono::duration<double, std::milli>(report.wall_time).count();
    const OccSvmModel model = build_model(X, kernel, K, config, report);

    std::vector<int> predictions;
    predictions.reserve(static_cast<std::size_t>(split.test.size()));
    for (Eigen::Index i = 0; i < split.test.size(); ++i)
        predictions.push_back(predict(model, row_span(split.test.features, i)));
    cell.total_time_ms = ms_since(t0);

    cell.accuracy = accuracy(predictions, split.test.labels);
    cell.f1 = f1_score(predictions, split.test.labels);
    cell.outer_iters = report.outer_iters;
    cell.inner_iters = report.inner_iters_total;
    cell.converged = report.converged;
}

}  // namespace

BenchResult run_bench(const BenchPlan& plan) {
    plan.validate();
    BenchResult result{plan, {}};
    for (const auto& entry : plan.datasets) {
        std::optional<Split> split;
        std::string load_error;
        try {
            Dataset ds = load_dataset(entry.path, entry.format, entry.label_column);
            if (plan.scale) ds = minmax_scale(ds);
            split = split_occ(ds, SplitSpec{plan.train_fraction, plan.seed});
        } catch (const std::exception& e) {
            load_error = e.what();
        }

        for (double gamma : plan.gammas) {
            BenchCell cell;
            cell.dataset = entry.name;
            cell.gamma = gamma;
            cell.nu = plan.solver.nu;
            if (!split) {
                cell.error = load_error;
            } else {
                cell.n_train = static_cast<std::size_t>(split->train.size());
                cell.n_test = static_cast<std::size_t>(split->test.size());
                KernelSpec kernel{plan.family, gamma};
                try {
                    run_cell(*split, kernel, plan.solver, cell);
                } catch (const std::exception& e) {
                    cell.error = e.what();
                }
            }
            result.cells.push_back(std::move(cell));
        }
    }
    return result;
}

TableFormat parse_table_format(std::string_view name) {
    if (name == "text") return TableFormat::Text;
    if (name == "csv") return TableFormat::Csv;
    if (name == "json") return TableFormat::Json;
    throw InputError("unknown output format '" + std::string(name) + "'");
}

namespace {

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string general(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

// Same digits as the text and csv tables.
double round1(double v) { return std::strtod(fixed(v, 1).c_str(), nullptr); }

std::string params_line(const BenchPlan& plan) {
    const auto& s = plan.solver;
    std::ostringstream os;
    os << "kernel=" << to_string(plan.family) << " nu=" << general(s.nu) << " c0=" << general(s.c0)
       << " theta=" << general(s.theta) << " delta=" << general(s.delta)
       << " tol=" << general(s.tol_final) << " seed=" << plan.seed
       << " train_fraction=" << general(plan.train_fraction) << " scale=" << (plan.scale ? "yes" : "no");
    return os.str();
}

std::string emit_text(const BenchResult& result) {
    std::ostringstream os;
    os << "# " << params_line(result.plan) << "\n";
    os << "# accuracy (%) by gamma\n";
    os << "Dataset";
    for (double g : result.plan.gammas) os << " & " << fixed(g, 1);
    os << "\n";

    // One table row per dataset in plan order.
    std::size_t k = 0;
    while (k < result.cells.size()) {
        const std::string& name = result.cells[k].dataset;
        os << name;
        for (std::size_t g = 0; g < result.plan.gammas.size() && k < result.cells.size(); ++g, ++k) {
            const auto& cell = result.cells[k];
            os << " & " << (cell.ok() ? fixed(cell.accuracy, 1) : "FAIL");
        }
        os << "\n";
    }

    os << "\n# details\n";
    for (const auto& cell : result.cells) {
        os << cell.dataset << " gamma=" << general(cell.gamma);
        if (!cell.ok()) {
            os << " error=\"" << *cell.error << "\"\n";
            continue;
        }
        os << " accuracy=" << fixed(cell.accuracy, 1) << " f1=" << fixed(cell.f1, 1)
           << " outer_iters=" << cell.outer_iters << " inner_iters=" << cell.inner_iters
           << " converged=" << (cell.converged ? "true" : "false") << " n_train=" << cell.n_train
           << " n_test=" << cell.n_test << " train_time_ms=" << fixed(cell.train_time_ms, 3)
           << " gram_time_ms=" << fixed(cell.gram_time_ms, 3)
           << " total_time_ms=" << fixed(cell.total_time_ms, 3) << "\n";
    }
    return os.str();
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string emit_csv(const BenchResult& result) {
    std::ostringstream os;
    os << "# " << params_line(result.plan) << "\n" << kCsvColumns << "\n";
    for (const auto& cell : result.cells) {
        os << csv_escape(cell.dataset) << ',' << general(cell.gamma) << ',' << general(cell.nu) << ',';
        if (cell.ok()) {
            os << fixed(cell.accuracy, 1) << ',' << fixed(cell.f1, 1) << ','
               << fixed(cell.train_time_ms, 3) << ',' << cell.outer_iters << ',' << cell.inner_iters
               << ',' << (cell.converged ? "true" : "false");
        } else {
            os << ",,,,,failed";
        }
        os << ',' << cell.n_train << ',' << cell.n_test << "\n";
    }
    return os.str();
}

std::string emit_json(const BenchResult& result) {
    using Json = nlohmann::ordered_json;
    const auto& p = result.plan;
    Json doc;
    doc["params"] = {{"kernel", std::string(to_string(p.family))},
                     {"nu", p.solver.nu},
                     {"c0", p.solver.c0},
                     {"theta", p.solver.theta},
                     {"delta", p.solver.delta},
                     {"tol", p.solver.tol_final},
                     {"seed", p.seed},
                     {"train_fraction", p.train_fraction},
                     {"scale", p.scale},
                     {"gammas", p.gammas}};
    Json records = Json::array();
    for (const auto& cell : result.cells) {
        Json r;
        r["dataset"] = cell.dataset;
        r["gamma"] = cell.gamma;
        r["nu"] = cell.nu;
        if (cell.ok()) {
            r["accuracy"] = round1(cell.accuracy);
            r["f1"] = round1(cell.f1);
            r["train_time_ms"] = cell.train_time_ms;
            r["outer_iters"] = cell.outer_iters;
            r["inner_iters"] = cell.inner_iters;
            r["converged"] = cell.converged;
        } else {
            r["accuracy"] = nullptr;
            r["f1"] = nullptr;
            r["train_time_ms"] = nullptr;
            r["outer_iters"] = nullptr;
            r["inner_iters"] = nullptr;
            r["converged"] = nullptr;
        }
        r["n_train"] = cell.n_train;
        r["n_test"] = cell.n_test;
        r["gram_time_ms"] = cell.ok() ? Json(cell.gram_time_ms) : Json(nullptr);
        r["total_time_ms"] = cell.ok() ? Json(cell.total_time_ms) : Json(nullptr);
        r["error"] = cell.error ? Json(*cell.error) : Json(nullptr);
        records.push_back(std::move(r));
    }
    doc["records"] = std::move(records);
    return doc.dump(2) + "\n";
}

}  // namespace

std::string emit_table(const BenchResult& result, TableFormat format) {
    switch (format) {
    case TableFormat::Text: return emit_text(result);
    case TableFormat::Csv: return emit_csv(result);
    case TableFormat::Json: return emit_json(result);
    }
    return {};
}

}  // namespace occsvm
