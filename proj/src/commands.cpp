#include "lboost/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

#include "json.hpp"

#include "lboost/csv.hpp"
#include "lboost/diagnostics.hpp"
#include "lboost/plot.hpp"
#include "lboost/rng.hpp"

namespace lboost {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

std::string fmt(double x) { return format_double(x); }
std::string fmt(std::size_t x) { return std::to_string(x); }

fs::path prepare_out(const RunConfig& cfg) {
    fs::create_directories(cfg.out);
    return cfg.out;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::vector<std::string> method_names(const std::vector<Method>& methods) {
    std::vector<std::string> out;
    for (Method m : methods) out.push_back(to_string(m));
    return out;
}

json solver_json(const RunConfig& cfg) {
    const TwoStageOptions o = cfg.two_stage();
    return json{{"lasso_tol", o.lasso.tol},
                {"min_ratio", cfg.min_ratio},
                {"learning_rate", o.boost.learning_rate},
                {"max_iter", o.boost.max_iter},
                {"aicc_multiplier", o.boost.aicc_multiplier},
                {"stop_rule", o.boost.stop_rule == StopRule::fixed ? "fixed"
                              : o.boost.stop_rule == StopRule::aicc ? "aicc"
                                                                    : "aicc_doubled"},
                {"boost_steps", o.boost_steps},
                {"relax_weights", o.relax_weights},
                {"stepwise_max_steps", o.stepwise_max_steps},
                {"twiced_lasso_recompute_grid", o.twiced_lasso_recompute_grid}};
}

json manifest_base(const std::string& command, const RunConfig& cfg) {
    return json{{"tool", "lboost"},
                {"version", kVersion},
                {"command", command},
                {"seed", cfg.seed},
                {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION)},
                {"solver", solver_json(cfg)}};
}

std::vector<Method> methods_or(const RunConfig& cfg, std::vector<Method> fallback) {
    return cfg.methods.empty() ? fallback : cfg.methods;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

// ---------------------------------------------------------------- simulate

SimulateOutput cmd_simulate(const RunConfig& cfg) {
    const fs::path out = prepare_out(cfg);
    SimulateOutput res;
    const SimConfig sim = cfg.sim_config();
    res.result = run_experiment(sim);
    const auto& r = res.result;

    CsvWriter metrics(out / "metrics.csv");
    metrics.row({"setting", "beta_type", "rho", "snr", "method", "tuning", "replication", "rr", "rte", "pve", "nnz",
                 "correct_nonzeros", "q", "stage2_index", "status"});
    for (const auto& rec : r.raws) {
        metrics.row({sim.setting, std::to_string(sim.beta_type), fmt(sim.rho), fmt(sim.snrs[rec.snr_index]),
                     to_string(rec.method), to_string(sim.tuning), fmt(rec.replication),
                     rec.ok ? fmt(rec.metrics.rr) : "nan", rec.ok ? fmt(rec.metrics.rte) : "nan",
                     rec.ok ? fmt(rec.metrics.pve) : "nan", rec.ok ? fmt(rec.metrics.nnz) : "nan",
                     rec.ok ? fmt(rec.metrics.correct_nonzeros) : "nan", fmt(rec.q), fmt(rec.stage2_index),
                     rec.ok ? "ok" : "failed: " + rec.error});
    }
    metrics.close();
    res.files.push_back(out / "metrics.csv");

    CsvWriter summary(out / "summary.csv");
    summary.row({"setting", "beta_type", "rho", "snr", "method", "tuning", "rr", "rte", "pve", "nnz",
                 "correct_nonzeros", "completed", "failed"});
    for (const auto& c : r.cells)
        summary.row({sim.setting, std::to_string(sim.beta_type), fmt(sim.rho), fmt(c.snr), to_string(c.method),
                     to_string(sim.tuning), fmt(c.rr), fmt(c.rte), fmt(c.pve), fmt(c.nnz), fmt(c.correct_nonzeros),
                     fmt(c.completed), fmt(c.failed)});
    summary.close();
    res.files.push_back(out / "summary.csv");

    const std::vector<std::pair<std::string, double CellAverage::*>> plots{
        {"rr", &CellAverage::rr}, {"rte", &CellAverage::rte}, {"pve", &CellAverage::pve}, {"nnz", &CellAverage::nnz}};
    for (const auto& [name, field] : plots) {
        const fs::path path = out / ("plot_" + name + ".csv");
        CsvWriter w(path);
        w.row({"snr", "method", "value", "correct_nonzeros"});
        for (const auto& c : r.cells) w.row({fmt(c.snr), to_string(c.method), fmt(c.*field), fmt(c.correct_nonzeros)});
        w.close();
        res.files.push_back(path);
    }

    json m = manifest_base("simulate", cfg);
    m["simulation"] = {{"setting", sim.setting},     {"beta_type", sim.beta_type},   {"n", sim.n},
                       {"p", sim.p},                 {"s", sim.s},                   {"rho", sim.rho},
                       {"snrs", sim.snrs},           {"replications", sim.replications},
                       {"methods", method_names(sim.methods)},
                       {"tuning", to_string(sim.tuning)}, {"lambda_count", sim.lambda_count}};
    std::size_t failed = 0;
    for (const auto& c : r.cells) failed += c.failed;
    m["failed_fits"] = failed;
    write_json(out / "manifest.json", m);
    res.files.push_back(out / "manifest.json");
    return res;
}

// ---------------------------------------------------------------- models

void save_models(const fs::path& path, const std::string& response, const std::vector<SavedModel>& models) {
    json arr = json::array();
    for (const auto& m : models) {
        json cols = json::array();
        for (std::size_t j = 0; j < m.column_names.size(); ++j)
            cols.push_back({{"name", m.column_names[j]}, {"coef", m.coef.values(static_cast<Index>(j))}});
        arr.push_back({{"group", m.group}, {"method", to_string(m.method)}, {"intercept", m.coef.intercept},
                       {"columns", cols}});
    }
    write_json(path, json{{"format", "lboost-model"}, {"version", 1}, {"response", response}, {"models", arr}});
}

std::vector<SavedModel> load_models(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model '" + path.string() + "'");
    const json j = json::parse(in);
    if (j.value("format", "") != "lboost-model") throw std::runtime_error("'" + path.string() + "' is not a model file");
    std::vector<SavedModel> out;
    for (const auto& m : j.at("models")) {
        SavedModel s;
        s.group = m.at("group").get<std::string>();
        s.method = parse_method(m.at("method").get<std::string>());
        s.coef.intercept = m.at("intercept").get<double>();
        const auto& cols = m.at("columns");
        s.coef.values.resize(static_cast<Index>(cols.size()));
        for (std::size_t k = 0; k < cols.size(); ++k) {
            s.column_names.push_back(cols[k].at("name").get<std::string>());
            s.coef.values(static_cast<Index>(k)) = cols[k].at("coef").get<double>();
        }
        out.push_back(std::move(s));
    }
    return out;
}

// ---------------------------------------------------------------- fit / predict

void write_path_families(const fs::path& path, const std::vector<std::string>& column_names,
                         const std::vector<std::pair<std::string, PathFamily>>& families) {
    CsvWriter w(path);
    std::vector<std::string> head{"group", "method", "entry", "q", "lambda", "stage2_index", "nnz", "intercept"};
    head.insert(head.end(), column_names.begin(), column_names.end());
    w.row(head);
    for (const auto& [group, family] : families) {
        if (static_cast<std::size_t>(family.p) != column_names.size())
            throw std::invalid_argument("write_path_families: column count mismatch");
        for (std::size_t e = 0; e < family.entries.size(); ++e) {
            const FamilyEntry& entry = family.entries[e];
            for (const Candidate& c : entry.candidates) {
                const CoefVector b = family.coefficients(entry, c);
                std::vector<std::string> row{group,          to_string(family.method), fmt(e),
                                             fmt(entry.q),   fmt(entry.lambda),        fmt(c.stage2_index),
                                             fmt(ActiveSet::support(b.values).size()), fmt(b.intercept)};
                for (Index j = 0; j < b.values.size(); ++j) row.push_back(fmt(b.values(j)));
                w.row(row);
            }
        }
    }
    w.close();
}

FitOutput cmd_fit_predict(const RunConfig& cfg) {
    if (cfg.input.empty()) throw std::invalid_argument("fit: no input file configured");
    const fs::path out = prepare_out(cfg);
    const IngestResult data = ingest_csv(cfg.input, cfg.response, cfg.group);
    const std::vector<Method> methods = methods_or(
        cfg, {Method::lasso, Method::forward_stepwise, Method::relaxed_lasso, Method::lassoed_boosting});
    const std::size_t G = data.groups.size(), M = methods.size();

    FitOutput res;
    res.report.rows.resize(G * M);
    std::vector<std::vector<SavedModel>> models(G);
    std::vector<std::vector<PathFamily>> kept(cfg.write_families ? G : 0);
    TwoStageOptions opts = cfg.two_stage();
    opts.execution = Execution::serial;
    for_each_index(Execution::parallel, G, [&](std::size_t g) {
        const GroupData& group = data.groups[g];
        for (std::size_t m = 0; m < M; ++m) {
            GroupReport& row = res.report.rows[g * M + m];
            row.group = group.label;
            row.method = methods[m];
        }
        auto fail = [&](const std::string& why) {
            for (std::size_t m = 0; m < M; ++m) {
                res.report.rows[g * M + m].ok = false;
                res.report.rows[g * M + m].error = why;
            }
        };
        const auto sizes = split_sizes(group.data.n(), cfg.fractions);
        if (sizes[0] < 3 || sizes[1] < 1 || sizes[2] < 1) {
            fail("group too small for the split");
            return;
        }
        try {
            const DataSplit parts = split(group.data, cfg.fractions, derive_seed(cfg.seed, {g}));
            const StandardizedDataset train = standardize(parts.train);
            double l0 = lambda_max(train);
            if (!(l0 > 0.0)) l0 = 1.0;
            const double ratio = cfg.min_ratio > 0.0 ? cfg.min_ratio : default_min_ratio(train.n(), train.p());
            const LambdaGrid grid = make_lambda_grid(l0, cfg.lambda_count_or(100), ratio);
            const auto families = fit_methods(methods, train, grid, opts);
            for (std::size_t m = 0; m < M; ++m) {
                GroupReport& row = res.report.rows[g * M + m];
                row.n_train = parts.train.n(), row.n_validation = parts.validation.n(), row.n_test = parts.test.n();
                const TuningSelection sel = validate_select(families[m], parts.validation);
                row.mspe = mspe(sel.coef, parts.test);
                row.rmspe = std::sqrt(row.mspe);
                row.nnz = sel.nnz;
                for (Index j = 0; j < sel.coef.values.size(); ++j)
                    if (sel.coef.values(j) != 0.0) row.selected.push_back(group.data.column_names[static_cast<std::size_t>(j)]);
                models[g].push_back({group.label, methods[m], group.data.column_names, sel.coef});
            }
            if (cfg.write_families) kept[g] = families;
        } catch (const std::exception& e) {
            fail(e.what());
            models[g].clear();
        }
    });
    for (auto& gm : models)
        for (auto& m : gm) res.models.push_back(std::move(m));

    for (std::size_t m = 0; m < M; ++m) {
        MethodSummary s;
        s.method = methods[m];
        std::vector<double> errs;
        double rsum = 0.0, nsum = 0.0;
        for (std::size_t g = 0; g < G; ++g) {
            const GroupReport& row = res.report.rows[g * M + m];
            if (!row.ok) {
                ++s.skipped;
                continue;
            }
            errs.push_back(row.mspe);
            rsum += row.rmspe;
            nsum += static_cast<double>(row.nnz);
        }
        s.completed = errs.size();
        const double k = static_cast<double>(s.completed);
        const double nan = std::numeric_limits<double>::quiet_NaN();
        double esum = 0.0;
        for (double e : errs) esum += e;
        s.mean_mspe = s.completed ? esum / k : nan;
        s.median_mspe = median_of(errs);
        s.mean_rmspe = s.completed ? rsum / k : nan;
        s.mean_nnz = s.completed ? nsum / k : nan;
        res.report.summary.push_back(s);
    }

    CsvWriter report(out / "report.csv");
    report.row({"group", "method", "status", "n_train", "n_validation", "n_test", "mspe", "rmspe", "nnz", "selected"});
    for (const auto& row : res.report.rows) {
        std::string sel;
        for (const auto& s : row.selected) sel += (sel.empty() ? "" : ";") + s;
        report.row({row.group, to_string(row.method), row.ok ? "ok" : "skipped: " + row.error,
                    std::to_string(row.n_train), std::to_string(row.n_validation), std::to_string(row.n_test),
                    row.ok ? fmt(row.mspe) : "nan", row.ok ? fmt(row.rmspe) : "nan", row.ok ? fmt(row.nnz) : "nan",
                    sel});
    }
    report.close();
    res.files.push_back(out / "report.csv");

    CsvWriter summary(out / "summary.csv");
    summary.row({"method", "mean_mspe", "median_mspe", "mean_rmspe", "mean_nnz", "groups_completed", "groups_skipped"});
    for (const auto& s : res.report.summary)
        summary.row({to_string(s.method), fmt(s.mean_mspe), fmt(s.median_mspe), fmt(s.mean_rmspe), fmt(s.mean_nnz),
                     fmt(s.completed), fmt(s.skipped)});
    summary.close();
    res.files.push_back(out / "summary.csv");

    CsvWriter sizes(out / "model_size.csv");
    sizes.row({"group_index", "method", "nnz", "group"});
    for (std::size_t g = 0; g < G; ++g)
        for (std::size_t m = 0; m < M; ++m) {
            const GroupReport& row = res.report.rows[g * M + m];
            if (row.ok) sizes.row({fmt(g + 1), to_string(row.method), fmt(row.nnz), row.group});
        }
    sizes.close();
    res.files.push_back(out / "model_size.csv");

    // Paired sizes of lassoed boosting against every other method, one row per group.
    json size_counts = json::object();
    const auto lb = std::find(methods.begin(), methods.end(), Method::lassoed_boosting);
    if (lb != methods.end()) {
        const std::size_t b = static_cast<std::size_t>(lb - methods.begin());
        CsvWriter pairs(out / "model_size_pairs.csv");
        pairs.row({"group", "method", "nnz", "lassoed_boosting_nnz"});
        for (std::size_t m = 0; m < M; ++m) {
            if (m == b) continue;
            std::size_t smaller = 0, bigger = 0, equal = 0;
            for (std::size_t g = 0; g < G; ++g) {
                const GroupReport &other = res.report.rows[g * M + m], &mine = res.report.rows[g * M + b];
                if (!other.ok || !mine.ok) continue;
                pairs.row({other.group, to_string(methods[m]), fmt(other.nnz), fmt(mine.nnz)});
                (mine.nnz < other.nnz ? smaller : mine.nnz > other.nnz ? bigger : equal) += 1;
            }
            size_counts[to_string(methods[m])] = {{"smaller", smaller}, {"bigger", bigger}, {"equal", equal}};
        }
        pairs.close();
        res.files.push_back(out / "model_size_pairs.csv");
    }

    save_models(out / "model.json", cfg.response, res.models);
    res.files.push_back(out / "model.json");

    if (cfg.write_families) {
        std::vector<std::pair<std::string, PathFamily>> all;
        for (std::size_t g = 0; g < G; ++g)
            for (auto& f : kept[g]) all.emplace_back(data.groups[g].label, std::move(f));
        write_path_families(out / "families.csv", data.groups.front().data.column_names, all);
        res.files.push_back(out / "families.csv");
    }

    json m = manifest_base("fit", cfg);
    m["input"] = cfg.input.filename().string();
    m["response"] = cfg.response;
    m["group"] = cfg.group ? json(*cfg.group) : json(nullptr);
    m["split"] = {cfg.fractions.train, cfg.fractions.validation, cfg.fractions.test};
    m["methods"] = method_names(methods);
    m["lambda_count"] = cfg.lambda_count_or(100);
    m["groups"] = G;
    m["dropped_rows"] = data.dropped_rows;
    m["lassoed_boosting_size_vs"] = size_counts;
    write_json(out / "manifest.json", m);
    res.files.push_back(out / "manifest.json");
    return res;
}

FileList cmd_predict(const RunConfig& cfg) {
    if (cfg.input.empty() || cfg.model.empty()) throw std::invalid_argument("predict: need both input and model");
    const fs::path out = prepare_out(cfg);
    const auto models = load_models(cfg.model);
    if (models.empty()) throw std::runtime_error("predict: model file holds no models");
    const CsvTable table = read_csv(cfg.input);

    auto col_of = [&](const std::string& name) -> std::optional<std::size_t> {
        const auto it = std::find(table.header.begin(), table.header.end(), name);
        if (it == table.header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - table.header.begin());
    };
    const auto ycol = col_of(cfg.response);
    const auto gcol = cfg.group ? col_of(*cfg.group) : std::nullopt;
    if (cfg.group && !gcol) throw std::runtime_error("predict: group column '" + *cfg.group + "' not found");

    // Missing predictor cells take the column mean of the scored file.
    std::map<std::string, double> means;
    auto cell = [&](std::size_t r, std::size_t c) -> std::optional<double> {
        const std::string& s = table.rows[r][c];
        if (s.find_first_not_of(" \t") == std::string::npos || s == "NA" || s == "nan") return std::nullopt;
        const auto v = parse_double(s);
        if (!v) throw std::runtime_error("non-numeric value '" + s + "' at data row " + std::to_string(r + 1) +
                                         ", column '" + table.header[c] + "'");
        return v;
    };
    auto column_mean = [&](const std::string& name) {
        if (auto it = means.find(name); it != means.end()) return it->second;
        const auto c = col_of(name);
        if (!c) throw std::runtime_error("predict: input lacks column '" + name + "'");
        double sum = 0.0;
        std::size_t k = 0;
        for (std::size_t r = 0; r < table.rows.size(); ++r)
            if (const auto v = cell(r, *c)) sum += *v, ++k;
        if (k == 0) throw std::runtime_error("predict: column '" + name + "' has no values");
        return means[name] = sum / static_cast<double>(k);
    };

    CsvWriter w(out / "predictions.csv");
    std::vector<std::string> head{"row", "group", "method", "prediction"};
    if (ycol) head.push_back(cfg.response);
    w.row(head);
    std::map<std::string, std::pair<double, std::size_t>> sq;  // method -> (sum of squares, count)
    std::vector<std::string> order;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const std::string label = gcol ? table.rows[r][*gcol] : std::string();
        const std::optional<double> y = ycol ? cell(r, *ycol) : std::nullopt;
        for (const auto& m : models) {
            if (gcol && m.group != label) continue;
            double pred = m.coef.intercept;
            for (std::size_t j = 0; j < m.column_names.size(); ++j) {
                const double b = m.coef.values(static_cast<Index>(j));
                if (b == 0.0) continue;
                const auto c = col_of(m.column_names[j]);
                if (!c) throw std::runtime_error("predict: input lacks column '" + m.column_names[j] + "'");
                const auto v = cell(r, *c);
                pred += b * (v ? *v : column_mean(m.column_names[j]));
            }
            const std::string name = to_string(m.method);
            std::vector<std::string> fields{fmt(r + 1), gcol ? label : m.group, name, fmt(pred)};
            if (ycol) fields.push_back(y ? fmt(*y) : "nan");
            w.row(fields);
            if (y) {
                auto [it, inserted] = sq.try_emplace(name, 0.0, 0);
                if (inserted) order.push_back(name);
                it->second.first += (*y - pred) * (*y - pred);
                ++it->second.second;
            }
        }
    }
    w.close();
    FileList files{out / "predictions.csv"};
    if (ycol) {
        CsvWriter s(out / "predict_summary.csv");
        s.row({"method", "mspe", "rmspe", "rows"});
        for (const auto& name : order) {
            const auto [sum, k] = sq[name];
            const double e = sum / static_cast<double>(k);
            s.row({name, fmt(e), fmt(std::sqrt(e)), fmt(k)});
        }
        s.close();
        files.push_back(out / "predict_summary.csv");
    }
    return files;
}

// ---------------------------------------------------------------- attribute

AttributeOutput cmd_attribute(const RunConfig& cfg) {
    const fs::path out = prepare_out(cfg);
    Dataset data;
    if (!cfg.input.empty()) {
        if (cfg.group.has_value() != cfg.attribute_group.has_value())
            throw std::invalid_argument("attribute: a grouped input needs both 'group' and 'attribute_group'");
        IngestResult in = ingest_csv(cfg.input, cfg.response, cfg.group);
        const auto it = std::find_if(in.groups.begin(), in.groups.end(), [&](const GroupData& g) {
            return !cfg.attribute_group || g.label == *cfg.attribute_group;
        });
        if (it == in.groups.end()) throw std::invalid_argument("attribute: no group '" + *cfg.attribute_group + "'");
        data = std::move(it->data);
    } else {
        const SimConfig sim = cfg.sim_config();
        data = draw_dataset(sim, *std::max_element(sim.snrs.begin(), sim.snrs.end()), 0).train;
    }

    AttributeOutput res;
    if (cfg.trajectory == "lasso") {
        res.trajectory = lasso_trajectory(data, cfg.attribution_steps);
    } else if (cfg.trajectory == "ls_boost") {
        res.trajectory = ls_boost_trajectory(data, cfg.attribution_learning_rate, cfg.attribution_iterations);
    } else {
        // Either a plain file with one coefficient vector per row or a
        // families.csv; columns are matched to the data by name.
        const CsvTable t = read_csv(cfg.trajectory_file);
        std::vector<std::size_t> cols;
        for (const auto& name : data.column_names) {
            const auto it = std::find(t.header.begin(), t.header.end(), name);
            if (it == t.header.end()) throw std::runtime_error("attribute: trajectory file lacks column '" + name + "'");
            cols.push_back(static_cast<std::size_t>(it - t.header.begin()));
        }
        // Optional row filters on the bookkeeping columns of families.csv.
        std::vector<std::pair<std::size_t, std::string>> filters;
        auto add_filter = [&](const char* column, const std::optional<std::string>& value) {
            if (!value) return;
            const auto it = std::find(t.header.begin(), t.header.end(), column);
            if (it == t.header.end())
                throw std::runtime_error(std::string("attribute: trajectory file has no '") + column + "' column");
            filters.emplace_back(static_cast<std::size_t>(it - t.header.begin()), *value);
        };
        add_filter("group", cfg.attribute_group);
        add_filter("method", cfg.trajectory_method);
        const Dataset d = demean(data);
        res.trajectory = CoefTrajectory{{}, TrajectorySource::other, d.X, d.y};
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            if (!std::all_of(filters.begin(), filters.end(), [&](const auto& f) { return t.rows[r][f.first] == f.second; }))
                continue;
            Vector b(data.p());
            for (Index j = 0; j < data.p(); ++j) {
                const auto v = parse_double(t.rows[r][cols[static_cast<std::size_t>(j)]]);
                if (!v) throw std::runtime_error("attribute: bad trajectory value at row " + std::to_string(r + 1));
                b(j) = *v;
            }
            res.trajectory.points.push_back(b);
        }
        res.trajectory.validate();
    }
    const CoefTrajectory& traj = res.trajectory;
    res.G = path_ig_matrix(traj);
    res.ftc = ftc_check(traj, res.G);
    const Vector per = per_parameter_attribution(res.G);
    const Vector steps = sapa(res.G);
    const CumulativeAttribution cum = scpa_capa(res.G);
    const auto& names = data.column_names;
    const Index Q = res.G.cols();

    CsvWriter gm(out / "attribution_matrix.csv");
    gm.row({"step", "parameter", "attribution"});
    for (Index q = 0; q < Q; ++q)
        for (Index j = 0; j < res.G.rows(); ++j)
            gm.row({std::to_string(q + 1), names[static_cast<std::size_t>(j)], fmt(res.G(j, q))});
    gm.close();

    const double total = per.sum();
    CsvWriter pp(out / "per_parameter.csv");
    pp.row({"parameter", "attribution", "share"});
    for (Index j = 0; j < per.size(); ++j)
        pp.row({names[static_cast<std::size_t>(j)], fmt(per(j)),
                fmt(total != 0.0 ? per(j) / total : std::numeric_limits<double>::quiet_NaN())});
    pp.close();

    CsvWriter sp(out / "sapa.csv");
    sp.row({"step", "sapa", "loss_before", "loss_after", "capa"});
    for (Index q = 0; q < Q; ++q)
        sp.row({std::to_string(q + 1), fmt(steps(q)), fmt(loss(traj.X, traj.y, traj.points[static_cast<std::size_t>(q)])),
                fmt(loss(traj.X, traj.y, traj.points[static_cast<std::size_t>(q + 1)])), fmt(cum.capa(q))});
    sp.close();

    CsvWriter psp(out / "plot_sapa.csv");
    psp.row({"step", "series", "sapa"});
    for (Index q = 0; q < Q; ++q) psp.row({std::to_string(q + 1), "sapa", fmt(steps(q))});
    psp.close();

    CsvWriter sc(out / "plot_scpa.csv");
    sc.row({"step", "parameter", "share"});
    for (Index j = 0; j < res.G.rows(); ++j)
        for (Index q = 0; q < Q; ++q)
            sc.row({std::to_string(q + 1), names[static_cast<std::size_t>(j)], fmt(cum.scpa(j, q))});
    sc.close();

    json m = manifest_base("attribute", cfg);
    m["trajectory"] = cfg.trajectory == "file" ? std::string("file") : to_string(traj.source);
    m["steps"] = Q;
    m["loss_start"] = loss(traj.X, traj.y, traj.points.front());
    m["loss_end"] = loss(traj.X, traj.y, traj.points.back());
    m["total_attribution"] = pairwise_sum(std::span<const double>(res.G.data(), static_cast<std::size_t>(res.G.size())));
    m["ftc_discrepancy"] = res.ftc;
    m["data"] = cfg.input.empty() ? json("simulated") : json(cfg.input.filename().string());
    write_json(out / "attribution.json", m);

    res.files = {out / "attribution_matrix.csv", out / "per_parameter.csv", out / "sapa.csv",
                 out / "plot_sapa.csv",          out / "plot_scpa.csv",     out / "attribution.json"};
    return res;
}

// ---------------------------------------------------------------- diagnose

FileList cmd_diagnose(const RunConfig& cfg) {
    const fs::path out = prepare_out(cfg);
    FileList files;
    std::vector<Index> sizes = cfg.diag_sizes;
    if (sizes.empty())
        for (Index s = 2; s <= 80; s += 2) sizes.push_back(s);

    CsvWriter rc(out / "rate_curve.csv");
    rc.row({"rho", "size", "gamma_mean", "gamma_sd", "gamma_min", "gamma_max", "lambda_pmin_mean", "lambda_pmin_sd"});
    CsvWriter pg(out / "plot_gamma.csv");
    pg.row({"size", "rho", "gamma_mean"});
    CsvWriter pl(out / "plot_lambda_pmin.csv");
    pl.row({"size", "rho", "lambda_pmin_mean"});
    EigenCurveOptions eo;
    eo.scaling = cfg.gram_scaling;
    eo.random_subsets = cfg.diag_random_subsets;
    json curves = json::array();
    for (double rho : cfg.diag_rhos) {
        const RateCurve c = eigen_curve(cfg.diag_n, rho, sizes, cfg.diag_epsilon, cfg.diag_replications, cfg.seed, eo);
        for (std::size_t i = 0; i < c.sizes.size(); ++i) {
            rc.row({fmt(rho), std::to_string(c.sizes[i]), fmt(c.gamma_mean[i]), fmt(c.gamma_sd[i]), fmt(c.gamma_min[i]),
                    fmt(c.gamma_max[i]), fmt(c.lambda_mean[i]), fmt(c.lambda_sd[i])});
            pg.row({std::to_string(c.sizes[i]), "rho=" + fmt(rho), fmt(c.gamma_mean[i])});
            pl.row({std::to_string(c.sizes[i]), "rho=" + fmt(rho), fmt(c.lambda_mean[i])});
        }
        curves.push_back({{"rho", rho},
                          {"gamma_isotonic_deviation", isotonic_deviation(c.gamma_mean, true)},
                          {"lambda_isotonic_deviation", isotonic_deviation(c.lambda_mean, false)}});
    }
    rc.close(), pg.close(), pl.close();
    files.insert(files.end(), {out / "rate_curve.csv", out / "plot_gamma.csv", out / "plot_lambda_pmin.csv"});

    // Bound audits on one simulated draw, boosting on all columns.
    const SimConfig sim = cfg.sim_config();
    const SimDraw draw = draw_dataset(sim, *std::max_element(sim.snrs.begin(), sim.snrs.end()), 0);
    const StandardizedDataset train = standardize(draw.train);
    const Vector beta_star_std = train.scaling.restandardize(CoefVector{draw.test.beta_star, 0.0});
    BoostConfig fixed = cfg.boost;
    fixed.stop_rule = StopRule::fixed;
    fixed.max_iter = static_cast<int>(cfg.bound_steps);
    const ActiveSet all = ActiveSet::all(train.p());
    const BoostPath lsb = ls_boost(train, all, fixed);
    const BoundTrace bt = prediction_bound_terms(train.X(), train.y(), beta_star_std, lsb, cfg.gram_scaling);
    CsvWriter bw(out / "bound_trace.csv");
    bw.row({"k", "lhs", "term1", "term2", "bound"});
    for (std::size_t k = 0; k < bt.lhs.size(); ++k)
        bw.row({fmt(k), fmt(bt.lhs[k]), fmt(bt.term1[k]), fmt(bt.term2), fmt(bt.term1[k] + bt.term2)});
    bw.close();
    files.push_back(out / "bound_trace.csv");

    const BoostPath fsw = forward_stagewise(train, all, fixed);
    CsvWriter fw(out / "stagewise_bound.csv");
    fw.row({"k", "bound", "best_lhs", "witness"});
    for (std::size_t k : {std::size_t{50}, std::size_t{500}, cfg.bound_steps}) {
        const StagewiseBound sb = fs_bound_terms(train.X(), train.y(), beta_star_std, fsw, k);
        fw.row({fmt(k), fmt(sb.bound), fmt(sb.best_lhs), sb.witness ? fmt(*sb.witness) : "none"});
    }
    fw.close();
    files.push_back(out / "stagewise_bound.csv");

    SimConfig rate_base = sim;
    rate_base.replications = cfg.rate_replications;
    rate_base.snrs = {*std::max_element(sim.snrs.begin(), sim.snrs.end())};
    CsvWriter rw(out / "rate_check.csv");
    rw.row({"method", "n", "n_inf_loss", "n_excess_loss", "replications"});
    json spreads = json::object(), excess_spreads = json::object();
    for (Method method : cfg.rate_methods) {
        const RateCheck r = rate_check(rate_base, cfg.rate_ns, method);
        for (const auto& row : r.rows)
            rw.row({to_string(method), std::to_string(row.n), fmt(row.n_inf_loss), fmt(row.n_excess), fmt(row.completed)});
        spreads[to_string(method)] = r.spread();
        excess_spreads[to_string(method)] = r.excess_spread();
    }
    rw.close();
    files.push_back(out / "rate_check.csv");

    json m = manifest_base("diagnose", cfg);
    m["eigen_curves"] = curves;
    m["bound_worst_slack"] = bt.worst_slack();
    m["bound_gamma"] = bt.gamma;
    m["rate_spread"] = spreads;
    m["rate_excess_spread"] = excess_spreads;
    m["rate_ns"] = cfg.rate_ns;
    write_json(out / "diagnose.json", m);
    files.push_back(out / "diagnose.json");
    return files;
}

// ---------------------------------------------------------------- plot

fs::path cmd_plot(const RunConfig& cfg) {
    if (cfg.plot_input.empty()) throw std::invalid_argument("plot: no plot_input configured");
    fs::create_directories(cfg.out);
    const fs::path svg = cfg.out / (cfg.plot_input.stem().string() + ".svg");
    emit_plot(cfg.plot_input, parse_plot_kind(cfg.plot_kind), svg);
    return svg;
}

// ---------------------------------------------------------------- demo data

void write_synthetic_panel(const fs::path& path, int groups, int rows, int p, std::uint64_t seed) {
    if (groups < 1 || rows < 1 || p < 2) throw std::invalid_argument("synthetic panel: bad dimensions");
    CsvWriter w(path);
    std::vector<std::string> head{"month", "y"};
    for (int j = 0; j < p; ++j) head.push_back("x" + std::to_string(j + 1));
    w.row(head);
    const Matrix sigma = make_sigma(p, 0.35);
    for (int g = 0; g < groups; ++g) {
        RandomStream rng(seed, {0x50414e454cULL, static_cast<std::uint64_t>(g)});
        const Matrix X = draw_gaussian_design(rows, sigma, rng);
        Vector beta = Vector::Zero(p);
        const int s = std::max(1, p / 4);
        for (int j = 0; j < s; ++j) beta(j) = 0.5 + 0.5 * rng.uniform();
        char label[16];
        std::snprintf(label, sizeof label, "m%03d", g + 1);
        for (int i = 0; i < rows; ++i) {
            const double y = X.row(i).dot(beta) + rng.normal();
            std::vector<std::string> fields{label, format_double(y)};
            for (int j = 0; j < p; ++j) fields.push_back(rng.uniform() < 0.01 ? "" : format_double(X(i, j)));
            w.row(fields);
        }
    }
    w.close();
}

}  // namespace lboost
